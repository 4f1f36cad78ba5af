#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "expfunc/quadrature.hpp"

namespace expfunc {

using cplx = std::complex<double>;
using ComplexFn = std::function<cplx(cplx)>;

// One additive piece of a one-sided Levy measure, described by its tails on (0, inf).
struct JumpComponent {
    std::string tag;
    RealFn tail;          // nu-bar(y) = nu((y, inf))
    RealFn double_tail;   // int_y^inf nu-bar
    RealFn inverse_tail;  // optional: y with nu-bar(y) = v
    double exp_c = 0.0;   // exponential component: nu-bar = c e^{-lambda y}
    double exp_lambda = 0.0;

    bool exponential() const { return exp_lambda > 0.0; }
    static JumpComponent make_exponential(double c, double lambda);
};

struct JumpSpec {
    std::vector<JumpComponent> components;

    bool empty() const { return components.empty(); }
    double tail(double y) const;
    double double_tail(double y) const;
    // Laplace-type integral int_0^inf e^{-s y} double_tail(y) dy, s > -(decay rate).
    double dtail_laplace(double s) const;
};

struct LevyTriplet {
    double drift_b = 0.0;  // drift relative to the truncation 1{|y| <= 1}
    double sigma2 = 0.0;
    JumpSpec positive;
    JumpSpec negative;
    double mean = 0.0;  // E[xi_1]
};

LevyTriplet make_triplet(double mean, double sigma2, JumpSpec positive, JumpSpec negative);

// Ladder height exponent. Ascending: phi(z) = -k + d z - int (1 - e^{z y}) mu(dy).
// Descending: phi(z) = -d z - int (1 - e^{-z y}) mu(dy).
struct LadderExponent {
    enum class Side { ascending, descending };
    Side side = Side::descending;
    std::string tag;
    double drift_delta = 0.0;
    double kill = 0.0;
    RealFn levy_density;  // mu density; empty when there are no jumps
    RealFn tail;          // mu-bar
    RealFn tail_integral; // int_y^inf mu-bar (descending side, optional)
    RealFn inverse_tail;  // optional
    ComplexFn exponent;
    bool class_p = false;
    double strip_lo = -1e300;  // exponent analytic for strip_lo < Re z < strip_hi
    double strip_hi = 1e300;

    cplx operator()(cplx z) const { return exponent(z); }
    double operator()(double z) const { return exponent(cplx(z, 0.0)).real(); }
    bool has_jumps() const { return static_cast<bool>(levy_density) || static_cast<bool>(tail); }
};

struct LadderPair {
    LadderExponent ascending;
    LadderExponent descending;
    double psi_plus(double s) const;  // psi_+(-s) = -s phi_+(-s)
    cplx psi(cplx z) const { return -ascending(z) * descending(z); }
    double k_plus() const { return -ascending(0.0); }
};

// Families
struct BrownianDrift {
    double gamma = 1.0;
};
struct SpectrallyNegative {
    ComplexFn psi;
    double gamma = 0.0;
    std::optional<double> alpha;  // set when the descending ladder is of gamma-power type
    double radius_limit = 1e300;  // lim Psi(s)/s as s -> inf
};
struct ExpPositiveJumps {
    double c = 0.0;
    double lambda = 0.0;
    double delta_plus = 0.0;
    double k_plus = 0.0;
    double c_minus = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double delta_minus = 1.0;         // used when alpha is empty
    std::optional<double> alpha;      // gamma-power descending ladder
};
struct PureKill {
    double k_plus = 1.0;
};
struct GammaRatioAscending {
    double alpha_prime = 0.25;
};
using StableLadderVariant = std::variant<PureKill, GammaRatioAscending>;
struct StableLadder {
    double alpha = 0.5;
    StableLadderVariant ascending;
    double k_plus = 1.0;
};
using FamilyParams = std::variant<BrownianDrift, SpectrallyNegative, ExpPositiveJumps, StableLadder>;

struct LevyModel {
    std::string family;
    FamilyParams params;
    std::optional<LevyTriplet> triplet;
    ComplexFn psi_closed;
    std::optional<LadderPair> ladders;
    double strip_lo = -1e300;
    double strip_hi = 1e300;
    double mean = 0.0;
    bool spectrally_negative = false;
};

// Ladder exponents
LadderExponent descending_pure_drift(double delta);
LadderExponent descending_gamma_power(double alpha);   // -s Gamma(a(s-1)+1)/Gamma(a s+1)
LadderExponent descending_stable(double alpha);        // -s Gamma(a(s+1)+1)/((1+s)Gamma(a s+1))
LadderExponent ascending_pure_kill(double k_plus);
LadderExponent ascending_linear(double delta_plus, double k_plus);
LadderExponent ascending_exponential(double delta_plus, double k_plus, double c_minus, double lambda);
LadderExponent ascending_gamma_ratio(double alpha_prime);
// Ascending exponent z -> phi_-(1 - z) of the dual process behind the exponential-law identity.
LadderExponent dual_ascending(const LadderExponent& desc);

// Closed-form tails of the gamma-power subordinator.
double gamma_power_density(double alpha, double y);
double gamma_power_tail(double alpha, double y);
double gamma_power_tail_inverse(double alpha, double v);
double gamma_power_tail_integral(double alpha, double y);

LadderPair build_from_ladders(const LadderExponent& asc, const LadderExponent& desc);

// Family models
LevyModel brownian_drift(double gamma);
// mean < 0, sigma2 >= 0, optional negative exponential jumps with tail c e^{-lambda y}
LevyModel spectrally_negative(double mean, double sigma2, double c_neg = 0.0, double lambda_neg = 1.0);
LevyModel gamma_power_example(double alpha, double gamma);
// Descending ladder: pure drift delta_minus when alpha is empty, else gamma-power(alpha).
LevyModel exp_positive_jumps(double delta_plus, double k_plus, double c_minus, double lambda,
                             std::optional<double> alpha = std::nullopt, double delta_minus = 1.0);
LevyModel stable_ladder(double alpha, StableLadderVariant ascending);

// Processes built from one ladder side, for simulation.
LevyModel ascending_process(const LadderExponent& asc);    // Y: spectrally positive, mean -k_+
LevyModel descending_process(const LadderExponent& desc);  // H-: negative of a subordinator

cplx psi(const LevyModel& model, cplx z);
double psi(const LevyModel& model, double z);
double find_gamma(const LevyModel& model);
std::pair<double, double> find_theta_roots(const ExpPositiveJumps& p);

// Numerical checks
bool is_class_p(const LadderExponent& e);
double small_jump_integral(const LadderExponent& e);  // int (1 ^ y) mu(dy)
double wiener_hopf_defect(const LevyModel& model, int points = 20);
double derivative_at_zero(const LadderExponent& e, double h = 1e-6);

}  // namespace expfunc

#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "expfunc/io.hpp"
#include "expfunc/kernels.hpp"
#include "expfunc/levy_model.hpp"
#include "expfunc/special_fn.hpp"

namespace expfunc {

struct DensityMeta {
    std::string source;  // evaluator id
    std::string family;
    json params = json::object();
    bool full_support = false;  // grid plus tail corrections should carry all the mass
    double mass_tol = 1e-4;
    double grid_mass = 0.0;     // quadrature over xs only
    double lower_mass = 0.0;    // analytic mass below xs.front()
    double upper_mass = 0.0;    // analytic mass above xs.back()
    std::optional<double> upper_tail_exponent;  // m(x) ~ A x^{-p} as x -> inf
    double upper_tail_coefficient = 0.0;        // A
    double validity_lo = 0.0;   // representation valid on [validity_lo, validity_hi]
    double validity_hi = std::numeric_limits<double>::infinity();
};

// Density on a log-uniform grid. `mass` = grid_mass + lower_mass + upper_mass.
struct DensityGrid {
    std::vector<double> xs;
    std::vector<double> values;
    double mass = 0.0;
    DensityMeta meta;

    double log_step() const;
};

std::vector<double> log_grid(double lo, double hi, int points = 512);
// Trapezoid in u = ln x of x m(x).
double log_trapezoid(const std::vector<double>& xs, const std::vector<double>& values);
// Validates the grid, clamps round-off negatives, fills masses (including the power-law upper tail when
// the meta carries an exponent) and enforces the mass invariant for full-support grids.
DensityGrid make_grid(std::vector<double> xs, std::vector<double> values, DensityMeta meta);
DensityGrid grid_from_function(const RealFn& m, double lo, double hi, int points, DensityMeta meta,
                               Exec exec = Exec::parallel, int workers = 0);

// Cubic B-spline of F(u) = x m(x) in u = ln x; zero below the grid, power-law tail above it when known.
class GridInterpolant {
public:
    explicit GridInterpolant(const DensityGrid& g);
    ~GridInterpolant();
    GridInterpolant(GridInterpolant&&) noexcept;
    GridInterpolant& operator=(GridInterpolant&&) noexcept;

    double weighted(double u) const;  // F(u)
    double density(double x) const;
    double u_lo() const { return u_lo_; }
    double u_hi() const { return u_hi_; }
    double step() const { return h_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double u_lo_ = 0.0;
    double u_hi_ = 0.0;
    double h_ = 0.0;
    double tail_exponent_ = 0.0;
    bool has_tail_ = false;
    double f_hi_ = 0.0;
};

// prefactor(x) * sum_n mult_n exp(log_env_n) (scale x)^{power n}
struct SeriesDensity {
    std::string family;
    RealFn prefactor;
    std::vector<double> log_env;  // log of the coefficient envelope, n = first, first + 1, ...
    std::vector<double> mult;     // signed multiplier, |mult| <= 1
    int first = 0;
    int power = -1;
    double scale = 1.0;
    double radius_lo = 0.0;  // x must lie in (radius_lo, radius_hi)
    double radius_hi = std::numeric_limits<double>::infinity();

    bool in_radius(double x) const { return x > radius_lo && x < radius_hi; }
    // Sum with the prefactor applied; throws ValidityError only outside the radius.
    SeriesEvalReport sum(double x, const SeriesOptions& opt) const;
    // Throws ValidityError outside the radius or when rounding prevents the requested accuracy.
    SeriesEvalReport evaluate(double x, const SeriesOptions& opt) const;
};

inline SeriesOptions density_series_options() { return {600, 1e-8, 0.0}; }

// Spectrally negative family: E[I_H^gamma] x^{-gamma-1} / (Gamma(gamma) Gamma(gamma+1))
//   * sum_n (-1)^n Gamma(n+gamma+1) / prod_{k<=n} Psi(k+gamma) x^{-n}
SeriesDensity specneg_series(const SpectrallyNegative& p, double moments_gamma, int terms = 600);
SeriesEvalReport density_specneg_series(const SpectrallyNegative& p, double moments_gamma, double x,
                                        SeriesOptions opt = density_series_options());
// Worked gamma-power example in hypergeometric form: x^{-gamma-1} / Gamma(gamma) * 1F0(alpha, alpha gamma + 1; 1/x).
SeriesEvalReport density_gamma_power_wright(double alpha, double gamma, double x,
                                            SeriesOptions opt = density_series_options());

// Exponential positive jumps. m_Y(x / delta_+) = C sum_i x^{-theta_i - 1} sum_n b_{n,i} (-1/x)^n / n!
SeriesEvalReport density_exp_jumps_Y(const ExpPositiveJumps& p, double y,
                                     SeriesOptions opt = density_series_options());
// P(I_Y > y) by termwise integration.
SeriesEvalReport survival_exp_jumps_Y(const ExpPositiveJumps& p, double y,
                                      SeriesOptions opt = density_series_options());
// Full density of I_xi = I_H x I_Y.
SeriesEvalReport density_exp_jumps(const ExpPositiveJumps& p, double x,
                                   SeriesOptions opt = density_series_options());
// Normalizing constant C = delta_+ Gamma(lambda) / (Gamma(theta1) Gamma(theta2)).
double exp_jumps_constant(const ExpPositiveJumps& p);

// Stable family: m_H(x) = Gamma(1+alpha) x^{-1/alpha} g_alpha(x^{-1/alpha}) / alpha.
double density_stable_H(double alpha, double x);
SeriesDensity stable_series(const StableLadder& p, int terms = 600);
// Series path (k_+ Gamma(1+alpha) / alpha) sum_{n>=1} prod_{k<=n} phi_+(-k) x^n / (Gamma(-alpha n) n!).
SeriesEvalReport density_stable_series(const StableLadder& p, double x,
                                       SeriesOptions opt = density_series_options());
// Integral path int m_H(x/y) m_Y(y) dy / y against a tabulated m_Y.
double density_stable_family(const StableLadder& p, const DensityGrid& mY, double x);
// Same with the closed-form law of I_Y for the implemented ascending variants.
double density_stable_family(const StableLadder& p, double x);
// Law of I_Y for the stable family, when it has a density.
double stable_family_Y_density(const StableLadder& p, double y);

// Closed-form factor laws.
double gamma_density(double a, double x);
// Density of G_a^p, p != 0.
double power_gamma_density(double a, double p, double x);
double inverse_gamma_density(double a, double x);
// P(G_a^p <= x)
double power_gamma_cdf(double a, double p, double x);

// Density of I_xi through the family's direct representation.
RealFn density_function(const LevyModel& model);
DensityGrid density_grid(const LevyModel& model, double lo, double hi, int points, Exec exec = Exec::parallel,
                         int workers = 0);

struct ConvolutionOptions {
    double refine_tol = 1e-6;
    int max_refinements = 4;
    double mass_tol = 1e-4;
    Exec exec = Exec::parallel;
    int workers = 0;
};
// Density of the independent product A x B. Output lattice is log-uniform with the refined step.
DensityGrid density_mellin_convolution(const DensityGrid& a, const DensityGrid& b, ConvolutionOptions opt = {});

// x^beta m(x) / E[I^beta], with E computed on the grid when not supplied.
DensityGrid tilt_density(const DensityGrid& m, double beta, std::optional<double> moment = std::nullopt);

struct LogConcavityReport {
    int points_tested = 0;
    int violations = 0;
    double fraction = 0.0;
    double max_violation = 0.0;
    double x_at_max = 0.0;
    double noise_tol = 1e-8;
};
// Second differences of u -> log m(e^u); positive ones above noise_tol are violations.
LogConcavityReport check_log_concavity(const DensityGrid& m, double noise_tol = 1e-8, double floor_rel = 1e-12);

struct MonotonicityReport {
    int max_order = 0;
    std::vector<int> violations;        // per order 1..max_order
    std::vector<double> worst_relative; // most negative (-1)^k Delta^k f / max|f|, per order
    bool passed = true;
};
// (-1)^k Delta^k f >= 0 on a uniform grid for k = 1..max_order.
MonotonicityReport check_complete_monotonicity(const RealFn& f, double lo, double hi, int points = 41,
                                               int max_order = 4, double tol = 1e-10);

std::string to_csv(const DensityGrid& g);
json to_json(const DensityGrid& g);
DensityGrid read_density_csv(const std::string& path);

}  // namespace expfunc

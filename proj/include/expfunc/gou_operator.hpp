#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "expfunc/density.hpp"
#include "expfunc/io.hpp"
#include "expfunc/levy_model.hpp"

namespace expfunc {

struct TailFunctions {
    RealFn bar_plus;    // Pi-bar_+
    RealFn bar_minus;   // Pi-bar_-
    RealFn dbar_plus;   // int_x^inf Pi-bar_+
    RealFn dbar_minus;  // int_x^inf Pi-bar_-
    std::array<bool, 4> closed_form{true, true, true, true};
    bool has_plus = false;
    bool has_minus = false;
};

TailFunctions make_tails(const LevyModel& model);

// (sigma^2/2) x h(x) + int_x^inf (1/y + E xi_1) h(y) dy + int_x^inf dbar_-(ln(y/x)) h(y) dy
//   + int_0^x dbar_+(ln(x/y)) h(y) dy
double apply_L(const GridInterpolant& h, const LevyModel& model, const TailFunctions& tails, double x);
double apply_L(const DensityGrid& h, const LevyModel& model, const TailFunctions& tails, double x);

struct ResidualReport {
    std::vector<double> xs;
    std::vector<double> residuals;
    double sup_h = 0.0;
    double sup_norm = 0.0;   // max |L h| / sup h
    double l1_norm = 0.0;    // int |L h| dx
    double uncovered = 0.0;  // boundary weight of x h(x) relative to its maximum
    double certify_tol = 1e-4;
    bool certified = false;
};

// Evaluates L h at the grid points with x in [x_lo, x_hi] (defaults: the whole grid).
ResidualReport residual_report(const DensityGrid& h, const LevyModel& model, double x_lo = 0.0,
                               double x_hi = std::numeric_limits<double>::infinity(), double certify_tol = 1e-4,
                               Exec exec = Exec::parallel, int workers = 0);
double residual_norm(const DensityGrid& h, const LevyModel& model);
json to_json(const ResidualReport& r);

// int x^{z-1} L kappa(x) dx versus (Psi(z)/z^2) M(z+1) + M(z)/z for a grid density kappa.
struct MellinOperatorCheck {
    double z = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};
MellinOperatorCheck mellin_operator_check(const DensityGrid& kappa, const LevyModel& model, double z,
                                          Exec exec = Exec::parallel);

// Gaussian kernel estimate in log scale: m(x) = f_{ln I}(ln x) / x. Bandwidth 0 selects Silverman's rule.
DensityGrid kde_density(const std::vector<double>& sample, double lo, double hi, int points, double bandwidth = 0.0);
// Pointwise bootstrap standard error of the estimate above, on the same grid.
std::vector<double> kde_standard_error(const std::vector<double>& sample, double lo, double hi, int points,
                                       double bandwidth, int resamples, std::uint64_t seed);

}  // namespace expfunc

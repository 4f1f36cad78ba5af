#include <doctest.h>

#include <cmath>

#include "expfunc/density.hpp"
#include "expfunc/error.hpp"
#include "expfunc/gou_operator.hpp"

using namespace expfunc;

TEST_CASE("the stationary Brownian density is annihilated") {
    const LevyModel m = brownian_drift(1.0);
    const DensityGrid g = density_grid(m, 1e-3, 1e6, 600);
    const ResidualReport r = residual_report(g, m);
    CHECK(r.certified);
    CHECK(r.sup_norm < 1e-6);
}

TEST_CASE("a density with the wrong gamma is not") {
    const LevyModel m = brownian_drift(1.0);
    const DensityGrid wrong = density_grid(brownian_drift(1.5), 1e-3, 1e6, 600);
    const ResidualReport r = residual_report(wrong, m);
    CHECK_FALSE(r.certified);
    CHECK(r.sup_norm > 1e-2);
}

TEST_CASE("Mellin transform of L kappa") {
    const LevyModel m = brownian_drift(1.0);
    // holds for any kappa, not just the stationary one
    const DensityGrid k = density_grid(brownian_drift(1.5), 1e-3, 1e6, 600);
    for (double z : {0.3, 0.5}) {
        const MellinOperatorCheck c = mellin_operator_check(k, m, z);
        CHECK(std::abs(c.lhs - c.rhs) < 1e-5 * std::abs(c.rhs));
        CHECK(std::abs(c.lhs) > 0.1);
    }
}

TEST_CASE("pure diffusion part acts as a multiplication") {
    // L h for h = e^{-x} under sigma^2 = 2, mean -1 has the closed form x e^{-x} + int_x^inf (1/y - 1) e^{-y} dy
    const LevyModel m = brownian_drift(1.0);
    DensityMeta meta;
    const DensityGrid h = grid_from_function([](double x) { return std::exp(-x); }, 1e-6, 60.0, 2000, meta);
    const GridInterpolant g(h);
    const TailFunctions t = make_tails(m);
    for (double x : {0.1, 1.0, 3.0}) {
        const double expint = integrate_to_infinity([](double y) { return std::exp(-y) / y; }, x);
        const double exact = x * std::exp(-x) + expint - std::exp(-x);
        CHECK(std::abs(apply_L(g, m, t, x) - exact) < 1e-7);
    }
}

TEST_CASE("grids that miss the mass are refused") {
    const LevyModel m = brownian_drift(1.0);
    DensityMeta meta;
    const DensityGrid g =
        grid_from_function([](double x) { return inverse_gamma_density(1.0, x); }, 0.5, 10.0, 100, meta);
    CHECK_THROWS_AS(residual_report(g, m), NumericError);
}

TEST_CASE("worked example: the product density is certified") {
    const LevyModel m = gamma_power_example(0.5, 1.0);
    const TailFunctions t = make_tails(m);
    CHECK(t.has_minus);
    CHECK_FALSE(t.has_plus);
    DensityMeta ma;
    ma.full_support = true;
    DensityMeta mb;
    mb.upper_tail_exponent = 2.0;
    mb.upper_tail_coefficient = 1.0;
    const DensityGrid a = grid_from_function([](double x) { return power_gamma_density(1.0, 0.5, x); }, 1e-7, 10.0,
                                             512, ma);
    const DensityGrid b = grid_from_function([](double x) { return inverse_gamma_density(1.0, x); }, 1e-3, 1e8, 512,
                                             mb);
    ConvolutionOptions opt;
    opt.max_refinements = 1;
    const GridInterpolant f(density_mellin_convolution(a, b, opt));
    DensityMeta meta;
    meta.upper_tail_exponent = 2.0;
    const DensityGrid h = grid_from_function([&](double x) { return f.density(x); }, 1e-3, 1e6, 300, meta);
    CHECK(residual_report(h, m).sup_norm < 1e-4);
}

TEST_CASE("kernel density estimate of a known law") {
    std::vector<double> s;
    for (int i = 1; i <= 4000; ++i) s.push_back(-std::log((i - 0.5) / 4000.0));
    const DensityGrid k = kde_density(s, 0.05, 5.0, 60);
    const GridInterpolant f(k);
    CHECK(f.density(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(0.05));
}

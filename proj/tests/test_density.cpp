#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "expfunc/density.hpp"
#include "expfunc/error.hpp"
#include "expfunc/special_fn.hpp"

using namespace expfunc;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// product law G_1^{1/2} x G_1^{-1}, 40-digit quadrature
constexpr double kWorked[3][2] = {{0.5, 0.54723293684787263626},
                                  {2.0, 0.12950989602372149684},
                                  {10.0, 0.0079255365704767732583}};
}  // namespace

TEST_CASE("worked example: both series forms against the product-law quadrature") {
    const LevyModel m = gamma_power_example(0.5, 1.0);
    const auto& p = std::get<SpectrallyNegative>(m.params);
    for (const auto& r : kWorked) {
        CHECK(rel(density_gamma_power_wright(0.5, 1.0, r[0]).value, r[1]) < 1e-10);
        CHECK(rel(density_specneg_series(p, gamma_fn(1.5), r[0]).value, r[1]) < 1e-10);
    }
}

TEST_CASE("exponential jumps: density and survival of I_Y against the mixture quadrature") {
    const auto p = std::get<ExpPositiveJumps>(exp_positive_jumps(1, 1, 1, 1).params);
    const double ref[3][3] = {{0.3, 0.52587806590251092936, 0.94236507965041690124},
                              {1.0, 0.26319251109450865684, 0.64443872508896192557},
                              {10.0, 0.0098696659434709671713, 0.25226943731521110710}};
    for (const auto& r : ref) {
        CHECK(rel(density_exp_jumps_Y(p, r[0]).value, r[1]) < 1e-6);
        CHECK(rel(survival_exp_jumps_Y(p, r[0]).value, r[2]) < 1e-6);
    }
    CHECK_THROWS_AS(density_exp_jumps_Y(p, 0.02), ValidityError);
}

TEST_CASE("exponential jumps: integer root gap is rejected") {
    const LevyModel m = exp_positive_jumps(1, 1.25, 0.75, 1);
    CHECK_THROWS_AS(density_grid(m, 0.5, 10, 8), ValidityError);
}

TEST_CASE("stable family: series and integral paths against quadrature") {
    const StableLadder p = std::get<StableLadder>(stable_ladder(0.5, GammaRatioAscending{0.25}).params);
    const double ref[3][2] = {{0.5, 0.17363687512833612051}, {1.0, 0.28897774098450746528},
                              {2.0, 0.29708778799508259107}};
    for (const auto& r : ref) {
        CHECK(rel(density_stable_family(p, r[0]), r[1]) < 1e-8);
        CHECK(rel(density_stable_series(p, r[0]).value, r[1]) < 1e-8);
    }
    const StableLadder k = std::get<StableLadder>(stable_ladder(0.5, PureKill{1.0}).params);
    for (double x : {0.3, 1.0, 3.0}) CHECK(rel(density_stable_family(k, x), 0.5 * x * std::exp(-0.25 * x * x)) < 1e-9);
}

TEST_CASE("Brownian grid carries all the mass") {
    const DensityGrid g = density_grid(brownian_drift(1.0), 1e-3, 1e6, 600);
    CHECK(std::abs(g.mass - 1.0) < 1e-4);
    CHECK(g.meta.full_support);
}

TEST_CASE("grid validation") {
    DensityMeta meta;
    CHECK_THROWS_AS(make_grid({1.0, 2.0, 5.0}, {1.0, 1.0, 1.0}, meta), ConfigError);
    meta.full_support = true;
    CHECK_THROWS_AS(make_grid(log_grid(1.0, 2.0, 10), std::vector<double>(10, 1.0), meta), NumericError);
}

TEST_CASE("Mellin convolution of the two factors reproduces the worked example") {
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
    const DensityGrid ab = density_mellin_convolution(a, b, opt);
    const DensityGrid ba = density_mellin_convolution(b, a, opt);
    CHECK(ab.values == ba.values);
    const GridInterpolant f(ab);
    for (const auto& r : kWorked) CHECK(rel(f.density(r[0]), r[1]) < 1e-4);
}

TEST_CASE("tilting the inverse gamma law") {
    // x m(x) / E[I] for I = 1/G_2 is the law of 1/G_1
    const DensityGrid g = density_grid(brownian_drift(2.0), 1e-3, 1e6, 600);
    const DensityGrid t = tilt_density(g, 1.0, 1.0);
    const GridInterpolant f(t);
    for (double x : {0.3, 1.0, 5.0}) CHECK(rel(f.density(x), inverse_gamma_density(1.0, x)) < 1e-6);
    CHECK_THROWS_AS(tilt_density(g, 2.0), NumericError);
}

TEST_CASE("log-concavity in log scale") {
    DensityMeta meta;
    const DensityGrid g = grid_from_function([](double x) { return power_gamma_density(1.0, 0.5, x); }, 1e-3, 5.0,
                                             400, meta);
    CHECK(check_log_concavity(g).violations == 0);
    const DensityGrid bimodal = grid_from_function(
        [](double x) { return gamma_density(2.0, x) + gamma_density(40.0, x); }, 1e-2, 100.0, 400, meta);
    CHECK(check_log_concavity(bimodal).violations > 0);
}

TEST_CASE("complete monotonicity check") {
    CHECK(check_complete_monotonicity([](double x) { return std::exp(-x); }, 0.0, 3.0).passed);
    CHECK_FALSE(check_complete_monotonicity([](double x) { return std::cos(x); }, 0.0, 3.0).passed);
}

TEST_CASE("CSV round trip") {
    const DensityGrid g = density_grid(brownian_drift(1.0), 1e-2, 1e3, 64);
    const auto path = (std::filesystem::temp_directory_path() / "expfunc_density_roundtrip.csv").string();
    write_text(path, to_csv(g));
    const DensityGrid r = read_density_csv(path);
    std::remove(path.c_str());
    CHECK(r.xs == g.xs);
    CHECK(r.values == g.values);
}

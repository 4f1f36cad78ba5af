#include <doctest.h>

#include <cmath>

#include "expfunc/error.hpp"
#include "expfunc/moments.hpp"
#include "expfunc/special_fn.hpp"

using namespace expfunc;

TEST_CASE("positive moments of I_H for the gamma-power ladder") {
    const LevyModel m = gamma_power_example(0.5, 1.0);
    const MomentTable t = moments_H(m.ladders->descending, 10);
    REQUIRE(t.values.size() == 11);
    for (int k = 1; k <= 10; ++k) CHECK(std::abs(t.at(k) / gamma_fn(0.5 * k + 1.0) - 1.0) < 1e-12);
    CHECK(to_csv(moments_H(m.ladders->descending, 0)) == "order,value\n0,1\n");
}

TEST_CASE("negative moments of I_Y for psi_+(-s) = s^2 + gamma s") {
    for (double g : {1.0, 2.0, 3.5}) {
        const LevyModel m = brownian_drift(g);
        const MomentTable t = neg_moments_Y(*m.ladders, 10);
        for (int k = 1; k <= 10; ++k)
            CHECK(std::abs(t.at(k) / std::exp(log_gamma(k + g) - log_gamma(g)) - 1.0) < 1e-12);
    }
}

TEST_CASE("fractional moments interpolate the integer ones") {
    const LevyModel m = gamma_power_example(0.5, 1.0);
    const LadderExponent& d = m.ladders->descending;
    CHECK(fractional_moment_H(d, 1.0) == doctest::Approx(gamma_fn(1.5)).epsilon(1e-8));
    CHECK(fractional_moment_H(d, 0.7) == doctest::Approx(gamma_fn(1.35)).epsilon(1e-8));
}

TEST_CASE("Mellin recursion of the Brownian law") {
    const LevyModel m = brownian_drift(2.0);
    auto M = [](double z) { return std::exp(log_gamma(3.0 - z) - log_gamma(2.0)); };
    for (double r : mellin_recursion_residual(M, m, {0.25, 0.5, 0.75})) CHECK(std::abs(r) < 1e-12);
    auto wrong = [](double z) { return std::exp(log_gamma(3.5 - z) - log_gamma(2.5)); };
    CHECK(std::abs(mellin_recursion_residual(wrong, m, {0.5})[0]) > 1e-3);
}

TEST_CASE("factorized first negative moment") {
    const LevyModel m = gamma_power_example(0.5, 1.0);
    // E[I^{-1}] = -E[xi_1]
    CHECK(factorized_neg_first_moment(*m.ladders) == doctest::Approx(-m.mean).epsilon(1e-6));
}

TEST_CASE("invalid orders") {
    const LevyModel m = brownian_drift(1.0);
    CHECK_THROWS_AS(moments_H(m.ladders->descending, -1), ConfigError);
    CHECK_THROWS_AS(fractional_moment_H(m.ladders->descending, -0.5), ConfigError);
}

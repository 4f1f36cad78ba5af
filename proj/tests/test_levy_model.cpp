#include <doctest.h>

#include <cmath>

#include "expfunc/density.hpp"
#include "expfunc/error.hpp"
#include "expfunc/levy_model.hpp"
#include "expfunc/special_fn.hpp"

using namespace expfunc;

TEST_CASE("Brownian drift: exponent and ladder factorization") {
    const LevyModel m = brownian_drift(1.0);
    CHECK(psi(m, 3.0) == doctest::Approx(6.0));
    CHECK(find_gamma(m) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wiener_hopf_defect(m) < 1e-12);
    REQUIRE(m.ladders);
    CHECK(m.ladders->k_plus() == doctest::Approx(1.0));
}

TEST_CASE("worked gamma-power example") {
    const LevyModel m = gamma_power_example(0.5, 1.0);
    REQUIRE(m.triplet);
    CHECK(m.mean == doctest::Approx(-std::tgamma(0.5)).epsilon(1e-12));
    CHECK(find_gamma(m) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(wiener_hopf_defect(m) < 1e-10);
    // descending exponent gives E[I_H^m] = Gamma(alpha m + 1)
    const LadderExponent& d = m.ladders->descending;
    CHECK(d(1.0) == doctest::Approx(-1.0 / std::tgamma(1.5)).epsilon(1e-13));
    CHECK(d(2.0) == doctest::Approx(-2.0 * std::tgamma(1.5)).epsilon(1e-13));
    CHECK(is_class_p(d));
}

TEST_CASE("gamma-power tails") {
    const double a = 0.5;
    for (double y : {0.01, 0.3, 2.0}) {
        const double t = gamma_power_tail(a, y);
        CHECK(gamma_power_tail_inverse(a, t) == doctest::Approx(y).epsilon(1e-12));
    }
    CHECK(gamma_power_tail_integral(a, 1.0) > gamma_power_tail_integral(a, 2.0));
}

TEST_CASE("exponential positive jumps: roots and constant") {
    const LevyModel m = exp_positive_jumps(1, 1, 1, 1);
    const auto& p = std::get<ExpPositiveJumps>(m.params);
    CHECK(p.theta1 == doctest::Approx(0.38196601125010515).epsilon(1e-14));
    CHECK(p.theta2 == doctest::Approx(2.6180339887498948).epsilon(1e-14));
    CHECK(p.c == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(exp_jumps_constant(p) == doctest::Approx(0.29667513474359103).epsilon(1e-13));
    CHECK(m.mean == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(wiener_hopf_defect(m) < 1e-10);
}

TEST_CASE("stable ladder family") {
    const LevyModel m = stable_ladder(0.5, GammaRatioAscending{0.25});
    REQUIRE(m.ladders);
    CHECK(m.ladders->k_plus() == doctest::Approx(1.0 / std::tgamma(0.75)).epsilon(1e-12));
    CHECK(is_class_p(m.ladders->descending));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(brownian_drift(-1.0), ConfigError);
    CHECK_THROWS_AS(exp_positive_jumps(1, -1, 1, 1), ConfigError);
    CHECK_THROWS_AS(spectrally_negative(-1.0, 0.0, 0.0), ConfigError);
}

TEST_CASE("processes built from one ladder side") {
    const LevyModel m = exp_positive_jumps(1, 1, 1, 1);
    const LevyModel y = ascending_process(m.ladders->ascending);
    CHECK(y.mean == doctest::Approx(-1.0));
    const LevyModel h = descending_process(descending_pure_drift(2.0));
    CHECK(h.mean == doctest::Approx(-2.0).epsilon(1e-6));
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "expfunc/error.hpp"
#include "expfunc/special_fn.hpp"

using namespace expfunc;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("gamma function against high-precision values") {
    CHECK(rel(gamma_fn(0.5), std::sqrt(std::numbers::pi)) < 1e-14);
    CHECK(rel(gamma_fn(10.3), 716430.68906237524454763) < 1e-13);
    CHECK(rel(gamma_fn(-2.5), -0.94530872048294188123) < 1e-13);
    CHECK(rel(log_gamma(1e5), 1051287.7089736568949009) < 1e-15);
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-15));
    CHECK(rgamma(-3.0) == 0.0);
    const auto z = log_gamma(std::complex<double>(2.0, 3.0));
    CHECK(std::abs(z.real() - -2.0928517530927333496) < 1e-13);
    CHECK(std::abs(z.imag() - 2.3023965434668676262) < 1e-13);
}

TEST_CASE("gamma ratios and incomplete gamma") {
    CHECK(rel(gamma_ratio(0.5, 0.0, 200.0), std::exp(log_gamma(200.5) - log_gamma(200.0))) < 1e-12);
    CHECK(rel(gamma_p(2.5, 1.7), 0.36143007689620492341) < 1e-12);
    CHECK(rel(gamma_q(0.3, 5.0), 6.5131875071845158761e-4) < 1e-11);
    CHECK(gamma_p(2.0, 0.0) == 0.0);
}

TEST_CASE("Wright-type 1F0 series") {
    const auto r = wright_1F0(0.5, 1.5, 0.7, SeriesOptions{500, 1e-13, 0.0});
    CHECK(r.converged);
    CHECK(rel(r.value, 0.42399774624690668104) < 1e-13);
}

TEST_CASE("positive stable density: closed form at alpha = 1/2") {
    for (double x : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double exact = std::pow(x, -1.5) * std::exp(-0.25 / x) / (2.0 * std::sqrt(std::numbers::pi));
        CHECK(rel(stable_density(0.5, x).value, exact) < 1e-10);
        CHECK(rel(stable_density_integral(0.5, x), exact) < 1e-10);
    }
    CHECK(rel(stable_density(0.5, 4.0).value, 0.0331254) < 1e-5);
}

TEST_CASE("positive stable density at alpha = 3/4") {
    const double ref[3][2] = {{1.0, 0.45494890769270698423}, {2.0, 0.10718999293584146406},
                              {5.0, 0.016650991581328486598}};
    for (const auto& r : ref) {
        CHECK(rel(stable_density(0.75, r[0]).value, r[1]) < 1e-10);
        CHECK(rel(stable_density_integral(0.75, r[0]), r[1]) < 1e-10);
    }
}

TEST_CASE("stable series refuses arguments below its floor") {
    const double floor = stable_series_floor(0.5);
    CHECK(floor > 0.0);
    CHECK_THROWS_AS(stable_density(0.5, floor / 10.0), ValidityError);
}

TEST_CASE("Kanter function limit at zero") {
    const double a = 0.6;
    const double lim = std::pow(a, a / (1.0 - a)) * (1.0 - a);
    CHECK(rel(kanter_a(a, 1e-6), lim) < 1e-6);
    CHECK(rel(kanter_a(a, 0.0), lim) < 1e-15);
}

TEST_CASE("log-envelope series driver") {
    // sum 1/n! = e
    const SeriesTerm term = [](int n, double& lm, double& mult) {
        lm = -log_gamma(n + 1.0);
        mult = 1.0;
    };
    const auto r = sum_log_series(0, term, SeriesOptions{100, 1e-15, 0.0}, "exp");
    CHECK(r.converged);
    CHECK(rel(r.value, std::exp(1.0)) < 1e-15);
}

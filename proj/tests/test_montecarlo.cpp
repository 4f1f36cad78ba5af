#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "expfunc/density.hpp"
#include "expfunc/error.hpp"
#include "expfunc/montecarlo.hpp"

using namespace expfunc;

namespace {
PathConfig serial_config(std::uint64_t seed = 11) {
    PathConfig c;
    c.seed = seed;
    c.exec = Exec::serial;
    return c;
}
}  // namespace

TEST_CASE("substreams make pools independent of the thread count") {
    const LevyModel m = exp_positive_jumps(1, 1, 1, 1);
    PathConfig a = serial_config();
    PathConfig b = a;
    b.exec = Exec::parallel;
    b.workers = 3;
    CHECK(sample_exp_functional(m, a, 300).values == sample_exp_functional(m, b, 300).values);
    PathConfig c = a;
    c.seed = 12;
    CHECK(sample_exp_functional(m, a, 50).values != sample_exp_functional(m, c, 50).values);
}

TEST_CASE("a pure drift path integrates exactly") {
    const SamplePool p = sample_subordinator_functional(descending_pure_drift(2.0), serial_config(), 20);
    for (double v : p.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Brownian exponential functional is inverse gamma") {
    const SamplePool p = sample_exp_functional(brownian_drift(1.0), serial_config(), 4000);
    const KsResult ks = ks_one_sample(p.values, [](double x) { return std::exp(-1.0 / x); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("gamma-power subordinator functional is G_1^alpha") {
    const LevyModel m = gamma_power_example(0.5, 1.0);
    const SamplePool p = sample_subordinator_functional(m.ladders->descending, serial_config(), 4000);
    const KsResult ks = ks_one_sample(p.values, [](double x) { return power_gamma_cdf(1.0, 0.5, x); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("exact pools") {
    const SamplePool g = gamma_power_pool(2.0, 1.0, serial_config(), 4000);
    CHECK(ks_one_sample(g.values, [](double x) { return 1.0 - std::exp(-x) * (1.0 + x); }).p_value > 0.01);
    const SamplePool e = exponential_pool(2.0, serial_config(), 4000);
    CHECK(ks_one_sample(e.values, [](double x) { return 1.0 - std::exp(-2.0 * x); }).p_value > 0.01);
    const SamplePool prod = product_pool(g, e, "p");
    CHECK(prod.n == 4000);
    CHECK(prod.values[7] == g.values[7] * e.values[7]);
}

TEST_CASE("two-sample KS statistic and p-value") {
    const std::vector<double> a{0.1, 0.4, 0.7, 0.9, 1.3};
    const std::vector<double> b{0.2, 0.25, 0.3, 0.35, 1.0, 1.1};
    const KsResult r = ks_two_sample(a, b);
    CHECK(r.statistic == doctest::Approx(0.4666666666666667).epsilon(1e-15));
    CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
    CHECK(kolmogorov_survival(0.0) == 1.0);
    CHECK(ks_two_sample(a, a).statistic == 0.0);
}

TEST_CASE("thinning positive jumps can only lower the functional") {
    const CoupledPair c = thinning_coupled_pair(exp_positive_jumps(1, 1, 1, 1), 0.5, serial_config(), 500);
    CHECK(c.order_violations == 0);
    CHECK(std::inner_product(c.full.begin(), c.full.end(), c.thinned.begin(), 0.0, std::plus<>(),
                             [](double f, double t) { return f - t; }) > 0.0);
}

TEST_CASE("GOU iteration") {
    const LevyModel m = brownian_drift(1.0);
    for (double v : gou_iterate(m, 2.5, 0.0, serial_config(), 5).values) CHECK(v == 2.5);
    // long horizon: stationary law 1/G_1, started anywhere
    PathConfig c = serial_config();
    const SamplePool u = gou_iterate(m, 3.0, 20.0, c, 2000);
    CHECK(ks_one_sample(u.values, [](double x) { return std::exp(-1.0 / x); }).p_value > 0.01);
    const SamplePool r = time_reversed_pool(m, 3.0, 20.0, c, 2000);
    CHECK(ks_two_sample(u, r).p_value > 0.01);
}

TEST_CASE("fixed horizon and configuration checks") {
    PathConfig c = serial_config();
    c.horizon = PathConfig::Horizon::fixed;
    c.fixed_T = 1.0;
    const SamplePool p = sample_subordinator_functional(descending_pure_drift(1.0), c, 3);
    for (double v : p.values) CHECK(v == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    PathConfig bad = serial_config();
    bad.dt = 0.0;
    CHECK_THROWS_AS(sample_exp_functional(brownian_drift(1.0), bad, 3), ConfigError);
}

TEST_CASE("sidecar records the sampler") {
    const SamplePool p = gamma_power_pool(1.0, 0.5, serial_config(5), 3);
    const json j = sidecar_json(p);
    CHECK(j["seed"] == 5);
    CHECK(j["n"] == 3);
    CHECK(to_csv(p).rfind("value\n", 0) == 0);
}

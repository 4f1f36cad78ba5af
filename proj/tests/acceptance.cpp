// Acceptance criteria 1-10. Usage: acceptance <criterion> [path-to-cli]
// Prints one PASS/FAIL line per criterion; exit status 0 iff it passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "config.hpp"
#include "expfunc/density.hpp"
#include "expfunc/gou_operator.hpp"
#include "expfunc/io.hpp"
#include "expfunc/moments.hpp"
#include "expfunc/montecarlo.hpp"
#include "expfunc/special_fn.hpp"

using namespace expfunc;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances
constexpr double kSignificance = 0.01;
constexpr std::size_t kFactorizationN = 20000;
constexpr std::size_t kControlN = 100000;
constexpr double kControlKillScale = 1.1;
constexpr double kRuntimeBudget = 120.0;  // seconds per family
constexpr double kMomentTol = 1e-12;
constexpr double kRecursionTol = 1e-10;
constexpr double kBootstrapSEs = 3.0;
constexpr std::size_t kMellinN = 20000;
constexpr double kConvolutionTol = 1e-4;
constexpr std::size_t kMixtureN = 20000;
constexpr double kMixtureFloor = 0.2;  // lower end of the certified survival series
constexpr double kStablePathsTol = 1e-6;
constexpr double kTailTol = 0.01;
constexpr double kResidualTol = 1e-4;
constexpr double kControlFactor = 100.0;
constexpr double kOperatorIdentityTol = 1e-5;  // relative; trapezoid on the 600-point grid
constexpr double kStableTol = 1e-8;
constexpr std::size_t kExpLawN = 100000;
constexpr double kConcavityNoise = 1e-8;

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        passed = passed && ok;
        if (!detail.empty()) detail += "; ";
        detail += std::string(ok ? "" : "[x] ") + what;
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PathConfig sampler(std::uint64_t seed) {
    PathConfig c;
    c.seed = seed;
    return c;
}

Outcome factorization() {
    Outcome o;
    struct Case {
        const char* name;
        LevyModel model;
    };
    for (const Case& c : {Case{"brownian", brownian_drift(1.0)}, Case{"gamma_power", gamma_power_example(0.5, 1.0)}}) {
        const auto t0 = std::chrono::steady_clock::now();
        const FactorizationReport gold = factorization_test(c.model, *c.model.ladders, sampler(2024), kFactorizationN,
                                                            kSignificance);
        LadderPair perturbed = *c.model.ladders;
        perturbed.ascending = cli::scale_kill(perturbed.ascending, kControlKillScale);
        const FactorizationReport control =
            factorization_test(c.model, perturbed, sampler(2025), kControlN, kSignificance);
        const double t = seconds_since(t0);
        o.require(gold.passed, std::string(c.name) + " KS p=" + num(gold.adjusted_p_value));
        o.require(!control.passed, std::string(c.name) + " control p=" + num(control.adjusted_p_value));
        o.require(t <= kRuntimeBudget, std::string(c.name) + " " + num(t) + "s");
    }
    return o;
}

Outcome moment_formulas() {
    Outcome o;
    const MomentTable h = moments_H(gamma_power_example(0.5, 1.0).ladders->descending, 10);
    double worst_h = 0.0;
    for (int m = 1; m <= 10; ++m) worst_h = std::max(worst_h, std::abs(h.at(m) / gamma_fn(0.5 * m + 1.0) - 1.0));
    o.require(worst_h < kMomentTol, "E[I_H^m] rel " + num(worst_h));
    double worst_y = 0.0;
    for (double g : {0.5, 1.0, 2.0, 3.7}) {
        const MomentTable y = neg_moments_Y(*brownian_drift(g).ladders, 10);
        for (int m = 1; m <= 10; ++m)
            worst_y = std::max(worst_y, std::abs(y.at(m) / std::exp(log_gamma(m + g) - log_gamma(g)) - 1.0));
    }
    o.require(worst_y < kMomentTol, "E[I_Y^-m] rel " + num(worst_y));
    return o;
}

Outcome mellin_recursion() {
    Outcome o;
    const std::vector<double> zs{0.25, 0.5, 0.75};
    for (double g : {1.0, 2.0}) {
        auto M = [g](double z) { return std::exp(log_gamma(g + 1.0 - z) - log_gamma(g)); };
        double worst = 0.0;
        for (double r : mellin_recursion_residual(M, brownian_drift(g), zs)) worst = std::max(worst, std::abs(r));
        o.require(worst < kRecursionTol, "analytic gamma=" + num(g) + " " + num(worst));
    }
    // E[I^{2z}] must be finite for the bootstrap: gamma = 2 covers z = 0.75
    const LevyModel m = brownian_drift(2.0);
    const SamplePool pool = sample_exp_functional(m, sampler(77), kMellinN);
    for (const auto& r : mc_mellin_residuals(pool.values, m, zs, 200, 78))
        o.require(std::abs(r.residual) <= kBootstrapSEs * r.standard_error,
                  "MC z=" + num(r.z) + " |r|/SE=" + num(std::abs(r.residual) / r.standard_error));
    return o;
}

Outcome series_densities() {
    Outcome o;
    // (a) Wright series against the Mellin convolution of G_1^{1/2} and 1/G_1
    DensityMeta ma;
    ma.full_support = true;
    DensityMeta mb;
    mb.upper_tail_exponent = 2.0;
    mb.upper_tail_coefficient = 1.0;
    const DensityGrid a =
        grid_from_function([](double x) { return power_gamma_density(1.0, 0.5, x); }, 1e-7, 10.0, 1024, ma);
    const DensityGrid b =
        grid_from_function([](double x) { return inverse_gamma_density(1.0, x); }, 1e-3, 1e8, 1024, mb);
    const GridInterpolant conv(density_mellin_convolution(a, b));
    double worst = 0.0;
    for (double x : log_grid(0.5, 50.0, 16)) {
        const double w = density_gamma_power_wright(0.5, 1.0, x).value;
        worst = std::max(worst, std::abs(conv.density(x) - w) / w);
    }
    o.require(worst <= kConvolutionTol, "Wright vs convolution rel " + num(worst));

    // (b) two-root series of m_Y against the exact mixture sampler, conditionally on I_Y >= floor
    const auto p = std::get<ExpPositiveJumps>(exp_positive_jumps(1, 1, 1, 1).params);
    const SamplePool mix = exp_jumps_mixture_pool(p, sampler(31), kMixtureN);
    std::vector<double> upper;
    for (double v : mix.values)
        if (v >= kMixtureFloor) upper.push_back(v);
    const double s0 = survival_exp_jumps_Y(p, kMixtureFloor).value;
    const KsResult ks =
        ks_one_sample(upper, [&](double y) { return 1.0 - survival_exp_jumps_Y(p, y).value / s0; });
    o.require(ks.p_value >= kSignificance, "m_Y series vs mixture KS p=" + num(ks.p_value) + " (n=" +
                                               std::to_string(upper.size()) + ")");

    // (c) stable family: series and integral paths where both are valid
    int compared = 0;
    double worst_stable = 0.0;
    for (const StableLadderVariant& asc : {StableLadderVariant{GammaRatioAscending{0.25}}, StableLadderVariant{PureKill{1.0}}}) {
        const StableLadder s = std::get<StableLadder>(stable_ladder(0.5, asc).params);
        for (double x : log_grid(0.05, 5.0, 24)) {
            double series = 0.0;
            try {
                series = density_stable_series(s, x).value;
            } catch (const std::exception&) {
                continue;
            }
            const double integral = density_stable_family(s, x);
            worst_stable = std::max(worst_stable, std::abs(series - integral) / integral);
            ++compared;
        }
    }
    o.require(compared >= 16 && worst_stable <= kStablePathsTol,
              "stable paths rel " + num(worst_stable) + " at " + std::to_string(compared) + " points");
    return o;
}

Outcome tail_law() {
    Outcome o;
    const double x = 1000.0;
    const double weighted = x * x * density_gamma_power_wright(0.5, 1.0, x).value;
    const double expected = gamma_fn(1.5) / gamma_fn(1.0);
    const double rel = std::abs(weighted - expected) / expected;
    o.require(rel <= kTailTol, "x^2 m(x) = " + num(weighted) + " vs " + num(expected) + " rel " + num(rel));
    return o;
}

Outcome operator_certification() {
    Outcome o;
    const LevyModel m = brownian_drift(1.0);
    const DensityGrid gold = density_grid(m, 1e-3, 1e6, 600);
    const DensityGrid shifted = density_grid(brownian_drift(1.5), 1e-3, 1e6, 600);
    const ResidualReport rg = residual_report(gold, m, 0.0, std::numeric_limits<double>::infinity(), kResidualTol);
    const ResidualReport rc = residual_report(shifted, m, 0.0, std::numeric_limits<double>::infinity(), kResidualTol);
    o.require(rg.sup_norm <= kResidualTol, "gold residual " + num(rg.sup_norm));
    o.require(rc.sup_norm > kControlFactor * kResidualTol, "gamma+0.5 control " + num(rc.sup_norm));
    for (const DensityGrid* k : {&gold, &shifted})
        for (double z : {0.3, 0.5}) {
            const MellinOperatorCheck c = mellin_operator_check(*k, m, z);
            const double diff = std::abs(c.lhs - c.rhs);
            o.require(diff <= kOperatorIdentityTol * std::max({1.0, std::abs(c.lhs), std::abs(c.rhs)}),
                      std::string(k == &gold ? "gold" : "control") + " Mellin identity z=" + num(z) + " diff " +
                          num(diff));
        }
    return o;
}

Outcome stable_kernel() {
    Outcome o;
    double worst = 0.0;
    for (double x : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double exact = std::pow(x, -1.5) * std::exp(-0.25 / x) / (2.0 * std::sqrt(std::numbers::pi));
        worst = std::max(worst, std::abs(stable_density(0.5, x).value - exact) / exact);
    }
    o.require(worst <= kStableTol, "rel " + num(worst));
    return o;
}

Outcome exponential_identity() {
    Outcome o;
    const LadderExponent desc = gamma_power_example(0.5, 1.0).ladders->descending;
    const auto t0 = std::chrono::steady_clock::now();
    const SamplePool h = sample_subordinator_functional(desc, sampler(41), kExpLawN);
    const SamplePool y = sample_dual_Y_functional(desc, sampler(42), kExpLawN);
    std::vector<double> v(kExpLawN);
    for (std::size_t i = 0; i < kExpLawN; ++i) v[i] = h.values[i] / y.values[i];
    const KsResult ks = ks_one_sample(v, [](double x) { return x > 0.0 ? -std::expm1(-x) : 0.0; });
    o.require(ks.p_value >= kSignificance,
              "KS vs Exp(1) D=" + num(ks.statistic) + " p=" + num(ks.p_value) + " (" + num(seconds_since(t0)) + "s)");
    return o;
}

Outcome msu_diagnostic() {
    Outcome o;
    DensityMeta meta;
    auto grid = [&](double a) {
        return grid_from_function([a](double x) { return power_gamma_density(1.0, a, x); }, 1e-4, 20.0, 800, meta);
    };
    const LogConcavityReport half = check_log_concavity(grid(0.5), kConcavityNoise);
    const LogConcavityReport three = check_log_concavity(grid(0.75), kConcavityNoise);
    o.require(half.violations == 0, "G_1^(1/2): " + std::to_string(half.violations) + " violations");
    o.require(three.violations > 0, "G_1^(3/4): " + std::to_string(three.violations) + " violations of " +
                                        std::to_string(three.points_tested));
    // information: the stable-ladder law of I_H at alpha = 3/4
    const DensityGrid mh = grid_from_function([](double x) { return density_stable_H(0.75, x); }, 1e-2, 50.0, 400, meta);
    const LogConcavityReport s = check_log_concavity(mh, kConcavityNoise);
    std::printf("INFO [criterion 9] stable-ladder I_H, alpha=3/4: %d violations of %d, max %.3g at x=%.3g\n",
                s.violations, s.points_tested, s.max_violation, s.x_at_max);
    return o;
}

bool same_payload(const fs::path& a, const fs::path& b, std::string& why) {
    for (const auto& e : fs::directory_iterator(a)) {
        const std::string name = e.path().filename().string();
        const std::string x = read_text(e.path().string());
        const std::string y = read_text((b / name).string());
        if (name == "manifest.json") {
            json jx = json::parse(x);
            json jy = json::parse(y);
            jx.erase("wall_time");
            jy.erase("wall_time");
            for (const char* k : {"params_file", "workers"}) {
                jx.erase(k);
                jy.erase(k);
            }
            if (jx != jy) {
                why = name;
                return false;
            }
        } else if (x != y) {
            why = name;
            return false;
        }
    }
    return true;
}

Outcome determinism(const std::string& cli) {
    Outcome o;
    if (cli.empty()) {
        o.require(false, "no CLI path given");
        return o;
    }
    const fs::path root = fs::temp_directory_path() / "expfunc_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string brownian = (root / "brownian.conf").string();
    const std::string worked = (root / "worked.conf").string();
    write_text(brownian, "family = brownian\ngamma = 2\n");
    write_text(worked, "family = gamma_power_example\nalpha = 0.5\ngamma = 1\n");
    const std::vector<std::pair<std::string, std::string>> runs{
        {"moments", "moments --config " + worked},
        {"density", "density --config " + worked + " --grid 0.5:50:64"},
        {"factorize", "verify --suite factorize --n 3000 --config " + worked},
        {"residual", "verify --suite residual --config " + brownian},
        {"mellin", "verify --suite mellin --n 3000 --config " + brownian},
        {"all", "verify --suite all --n 2000 --config " + brownian},
        {"sample", "sample --sampler Y --n 2000 --config " + worked},
    };
    for (const auto& [name, args] : runs) {
        bool ok = true;
        std::string why;
        for (int rep = 0; rep < 2 && ok; ++rep) {
            const fs::path out = root / (name + std::to_string(rep));
            const std::string workers = rep == 0 ? "0" : "1";
            const std::string cmd = "\"" + cli + "\" " + args + " --seed 7 --workers " + workers + " --out \"" +
                                    out.string() + "\" > /dev/null 2>&1";
            const int rc = std::system(cmd.c_str());
            if (rc != 0 && WEXITSTATUS(rc) > 1) {
                ok = false;
                why = "exit " + std::to_string(WEXITSTATUS(rc));
            }
        }
        if (ok) ok = same_payload(root / (name + "0"), root / (name + "1"), why);
        o.require(ok, name + (ok ? " identical" : " differs: " + why));
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    setvbuf(stdout, nullptr, _IONBF, 0);
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1-10> [cli]\n");
        return 2;
    }
    const int k = std::atoi(argv[1]);
    const std::string cli = argc > 2 ? argv[2] : "";
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"factorization KS, gold and perturbed control", factorization},
        {"moment formulas", moment_formulas},
        {"Mellin recursion, analytic and Monte Carlo", mellin_recursion},
        {"series densities", series_densities},
        {"tail law", tail_law},
        {"operator certification", operator_certification},
        {"stable density kernel", stable_kernel},
        {"I_H / I_Ybar is Exp(1)", exponential_identity},
        {"log-concavity diagnostic", msu_diagnostic},
        {"CLI determinism", [&] { return determinism(cli); }},
    };
    if (k < 1 || k > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "criterion must be 1-10\n");
        return 2;
    }
    const auto& [name, run] = criteria[k - 1];
    Outcome out;
    try {
        out = run();
    } catch (const std::exception& e) {
        out.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s [criterion %d] %s: %s\n", out.passed ? "PASS" : "FAIL", k, name, out.detail.c_str());
    return out.passed ? 0 : 1;
}

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <vector>

#include "config.hpp"
#include "expfunc/density.hpp"
#include "expfunc/error.hpp"
#include "expfunc/gou_operator.hpp"
#include "expfunc/io.hpp"
#include "expfunc/moments.hpp"
#include "expfunc/montecarlo.hpp"
#include "expfunc/special_fn.hpp"

namespace expfunc::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "expfunc 1.0.0";
constexpr const char* kFormatVersion = "1";

// Collects output files and writes the manifest last.
class OutputSet {
public:
    OutputSet(const Options& o, std::string command) : opts_(o), command_(std::move(command)) {
        start_ = std::chrono::steady_clock::now();
        std::error_code ec;
        fs::create_directories(o.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + o.out_dir + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& text) {
        write_text((fs::path(opts_.out_dir) / name).string(), text);
        files_.push_back({{"path", name}, {"fnv1a64", hex64(fnv1a64(text))}, {"bytes", text.size()}});
    }

    void finish() {
        json m;
        m["command"] = command_;
        m["params_file"] = opts_.config_path;
        m["seed"] = opts_.seed;
        m["n"] = opts_.n;
        m["suite"] = opts_.suite;
        m["workers"] = opts_.workers;
        m["outputs"] = files_;
        m["versions"] = {{"tool", kToolVersion}, {"format", kFormatVersion}};
        m["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_text((fs::path(opts_.out_dir) / "manifest.json").string(), dump_json(m));
    }

private:
    const Options& opts_;
    std::string command_;
    json files_ = json::array();
    std::chrono::steady_clock::time_point start_;
};

Exec exec_for(int workers) { return workers == 1 ? Exec::serial : Exec::parallel; }

GridSpec default_grid(const LevyModel& m) {
    if (m.family == "brownian_drift") return {1e-3, 1e6, 600};
    if (std::holds_alternative<SpectrallyNegative>(m.params)) return {0.5, 1e4, 400};
    if (std::holds_alternative<ExpPositiveJumps>(m.params)) return {0.5, 1e4, 400};
    if (std::holds_alternative<StableLadder>(m.params)) return {0.05, 50.0, 400};
    return {0.5, 1e3, 400};
}

// Candidate density for the residual suite: the series grid, or the product of the two ladder factors
// for the gamma-power example whose series does not reach small x.
DensityGrid candidate_density(const LevyModel& model, const GridSpec& g, int workers) {
    const auto* sn = std::get_if<SpectrallyNegative>(&model.params);
    if (!sn || !sn->alpha) return density_grid(model, g.lo, g.hi, g.points, exec_for(workers), workers);
    const double a = *sn->alpha;
    const double gam = sn->gamma;
    DensityMeta ma;
    ma.source = "power_gamma";
    ma.full_support = true;
    DensityMeta mb;
    mb.source = "inverse_gamma";
    mb.upper_tail_exponent = gam + 1.0;
    mb.upper_tail_coefficient = 1.0 / gamma_fn(gam);
    const DensityGrid ga = grid_from_function([a](double x) { return power_gamma_density(1.0, a, x); }, 1e-7 , 10.0,
                                              1024, ma, exec_for(workers), workers);
    const DensityGrid gb = grid_from_function([gam](double x) { return inverse_gamma_density(gam, x); }, 1e-3, 1e8,
                                              1024, mb, exec_for(workers), workers);
    ConvolutionOptions opt;
    opt.max_refinements = 1;
    opt.exec = exec_for(workers);
    opt.workers = workers;
    const DensityGrid prod = density_mellin_convolution(ga, gb, opt);
    const GridInterpolant interp(prod);
    DensityMeta meta = prod.meta;
    meta.full_support = false;
    return grid_from_function([&](double x) { return interp.density(x); }, g.lo, g.hi, g.points, meta,
                              exec_for(workers), workers);
}

bool has_residual_candidate(const LevyModel& m) {
    const auto* sn = std::get_if<SpectrallyNegative>(&m.params);
    return std::holds_alternative<BrownianDrift>(m.params) || (sn && sn->alpha);
}

// Closed-form M(z) = E[I^{z-1}] where the family has one.
std::optional<std::function<double(double)>> closed_mellin(const LevyModel& m) {
    if (const auto* b = std::get_if<BrownianDrift>(&m.params)) {
        const double g = b->gamma;
        return [g](double z) { return std::exp(log_gamma(g + 1.0 - z) - log_gamma(g)); };
    }
    if (const auto* sn = std::get_if<SpectrallyNegative>(&m.params); sn && sn->alpha) {
        const double a = *sn->alpha;
        const double g = sn->gamma;
        return [a, g](double z) { return gamma_fn(1.0 + a * (z - 1.0)) * std::exp(log_gamma(g + 1.0 - z) - log_gamma(g)); };
    }
    return std::nullopt;
}

json factorize_suite(const Config& c, const LevyModel& model, const Options& o, bool& passed) {
    if (!model.triplet) throw ConfigError("factorize suite needs a family with a Levy triplet");
    const LadderPair pair = sampling_pair(c, model);
    PathConfig cfg = path_config(c, o.seed, o.workers);
    cfg.exec = exec_for(o.workers);
    const double significance = o.tol.value_or(c.number("significance", 0.01));
    const FactorizationReport r = factorization_test(model, pair, cfg, static_cast<std::size_t>(o.n), significance);
    passed = r.passed;
    json j = to_json(r);
    j["perturb_k_plus"] = c.number("perturb_k_plus", 1.0);
    j["sampler"] = to_json(cfg);
    return j;
}

json residual_suite(const Config& c, const LevyModel& model, const Options& o, bool& passed) {
    if (!model.triplet) throw ConfigError("residual suite needs a family with a Levy triplet");
    DensityGrid h;
    std::string source;
    if (c.has("density_csv")) {
        source = c.text("density_csv", "");
        h = read_density_csv(source);
    } else {
        const GridSpec g = o.grid        ? parse_grid(*o.grid)
                            : c.has("grid") ? parse_grid(c.text("grid", ""))
                                            : GridSpec{1e-3, 1e6, 600};
        // gamma_shift perturbs the candidate only; the operator stays that of the configured model
        const double shift = c.number("gamma_shift", 0.0);
        h = candidate_density(shift != 0.0 ? build_model_shifted(c, shift) : model, g, o.workers);
        source = h.meta.source;
    }
    const LevyModel& op_model = model;
    const double tol = o.tol.value_or(c.number("residual_tol", 1e-4));
    const ResidualReport r = residual_report(h, op_model, 0.0, std::numeric_limits<double>::infinity(), tol,
                                             exec_for(o.workers), o.workers);
    json j = to_json(r);
    j["candidate"] = source;
    j["gamma_shift"] = c.number("gamma_shift", 0.0);
    bool ok = r.certified;
    if (!c.has("density_csv")) {
        const double mtol = c.number("operator_identity_tol", 1e-5);
        json checks = json::array();
        for (double z : {0.3, 0.5}) {
            const MellinOperatorCheck m = mellin_operator_check(h, op_model, z, exec_for(o.workers));
            const double diff = std::abs(m.lhs - m.rhs);
            const bool pass = diff <= mtol * std::max({1.0, std::abs(m.lhs), std::abs(m.rhs)});
            ok = ok && pass;
            checks.push_back({{"z", z}, {"lhs", m.lhs}, {"rhs", m.rhs}, {"abs_diff", diff}, {"tol", mtol}, {"passed", pass}});
        }
        j["operator_mellin_identity"] = checks;
    }
    j["passed"] = ok;
    passed = ok;
    return j;
}

// Smallest s > 0 with Psi(s) = 0; E[I^{s}] is infinite from there on.
double moment_index(const LevyModel& m) {
    const double top = std::min(m.strip_hi, 64.0);
    double lo = 1e-3;
    if (!(psi(m, lo) < 0.0)) return 0.0;
    for (double hi = lo * 1.05; hi < top; hi *= 1.05) {
        if (psi(m, hi) >= 0.0) {
            for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
                const double mid = 0.5 * (lo + hi);
                (psi(m, mid) < 0.0 ? lo : hi) = mid;
            }
            return hi;
        }
        lo = hi;
    }
    return std::numeric_limits<double>::infinity();
}

json mellin_suite(const Config& c, const LevyModel& model, const Options& o, bool& passed) {
    const std::vector<double> zs{0.25, 0.5, 0.75};
    json j;
    bool ok = true;
    if (const auto M = closed_mellin(model)) {
        const double tol = c.number("mellin_tol", 1e-10);
        const std::vector<double> r = mellin_recursion_residual(*M, model, zs);
        json rows = json::array();
        for (std::size_t i = 0; i < zs.size(); ++i) {
            const bool pass = std::abs(r[i]) < tol;
            ok = ok && pass;
            rows.push_back({{"z", zs[i]}, {"residual", r[i]}, {"tol", tol}, {"passed", pass}});
        }
        j["analytic"] = rows;
    } else {
        j["analytic"] = "not available for this family";
    }
    if (model.triplet) {
        // bootstrap errors need a finite variance of I^z
        const double index = moment_index(model);
        std::vector<double> usable;
        for (double z : zs)
            if (2.0 * z < index) usable.push_back(z);
        j["moment_index"] = index;
        if (usable.empty()) {
            j["monte_carlo"] = "skipped: E[I^(2z)] is infinite at every Mellin point";
        } else {
            PathConfig cfg = path_config(c, o.seed, o.workers);
            cfg.exec = exec_for(o.workers);
            const SamplePool pool = sample_exp_functional(model, cfg, static_cast<std::size_t>(o.n));
            const int resamples = static_cast<int>(c.integer("mc_resamples", 200));
            const auto res = mc_mellin_residuals(pool.values, model, usable, resamples, o.seed);
            json rows = json::array();
            std::size_t k = 0;
            for (double z : zs) {
                if (k < res.size() && res[k].z == z) {
                    const auto& r = res[k++];
                    const bool pass = std::abs(r.residual) <= 3.0 * r.standard_error;
                    ok = ok && pass;
                    rows.push_back({{"z", r.z}, {"residual", r.residual}, {"standard_error", r.standard_error},
                                    {"bound", 3.0 * r.standard_error}, {"passed", pass}});
                } else {
                    rows.push_back({{"z", z}, {"skipped", "E[I^(2z)] is infinite"}});
                }
            }
            j["monte_carlo"] = rows;
        }
    }
    j["passed"] = ok;
    passed = ok;
    return j;
}

}  // namespace

GridSpec parse_grid(const std::string& spec) {
    GridSpec g;
    const auto a = spec.find(':');
    const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
    if (b == std::string::npos) throw ConfigError("grid must be lo:hi:points, got '" + spec + "'");
    try {
        std::size_t used = 0;
        g.lo = std::stod(spec.substr(0, a));
        g.hi = std::stod(spec.substr(a + 1, b - a - 1));
        const std::string p = spec.substr(b + 1);
        g.points = std::stoi(p, &used);
        if (used != p.size()) throw std::invalid_argument("points");
    } catch (const std::exception&) {
        throw ConfigError("grid must be lo:hi:points, got '" + spec + "'");
    }
    if (!(g.lo > 0.0) || !(g.hi > g.lo) || g.points < 2) throw ConfigError("grid needs 0 < lo < hi and points >= 2");
    return g;
}

int cmd_moments(const Options& o) {
    const Config c = load_config(o.config_path);
    const LevyModel model = build_model(c);
    if (!model.ladders) throw ConfigError("family has no ladder factorization");
    const int m_max = o.m_max >= 0 ? o.m_max : static_cast<int>(c.integer("m_max", 10));
    OutputSet out(o, "moments");
    const MomentTable h = moments_H(model.ladders->descending, m_max);
    const MomentTable y = neg_moments_Y(*model.ladders, m_max);
    out.write("moments_H.csv", to_csv(h));
    out.write("moments_H.json", dump_json(to_json(h)));
    out.write("neg_moments_Y.csv", to_csv(y));
    out.write("neg_moments_Y.json", dump_json(to_json(y)));
    out.finish();
    return ok;
}

int cmd_density(const Options& o) {
    const Config c = load_config(o.config_path);
    const LevyModel model = build_model(c);
    const GridSpec g = o.grid        ? parse_grid(*o.grid)
                        : c.has("grid") ? parse_grid(c.text("grid", ""))
                                        : default_grid(model);
    OutputSet out(o, "density");
    const DensityGrid d = density_grid(model, g.lo, g.hi, g.points, exec_for(o.workers), o.workers);
    json j = to_json(d);
    if (d.meta.upper_tail_exponent) {
        const double p = *d.meta.upper_tail_exponent;
        const double x = d.xs.back();
        const double w = std::pow(x, p) * d.values.back();
        const double a = d.meta.upper_tail_coefficient;
        j["tail_check"] = {{"x", x}, {"weighted_density", w}, {"coefficient", a},
                           {"relative_difference", a != 0.0 ? std::abs(w - a) / a : 0.0}};
    }
    out.write("density.csv", to_csv(d));
    out.write("density.json", dump_json(j));
    out.finish();
    return ok;
}

int cmd_verify(const Options& o) {
    const Config c = load_config(o.config_path);
    const LevyModel model = build_model(c);
    const std::string& s = o.suite;
    if (s != "all" && s != "factorize" && s != "residual" && s != "mellin") throw ConfigError("unknown suite '" + s + "'");
    if (o.n < 10) throw ConfigError("--n must be at least 10");
    OutputSet out(o, "verify");
    json report;
    report["family"] = model.family;
    report["seed"] = o.seed;
    report["n"] = o.n;
    bool all = true;
    json suites;
    auto run = [&](const std::string& name, auto&& fn, bool applicable) {
        if (s != "all" && s != name) return;
        if (!applicable) {
            if (s == name) throw ConfigError(name + " suite does not apply to family " + model.family);
            suites[name] = {{"skipped", "not applicable to this family"}};
            return;
        }
        bool passed = false;
        suites[name] = fn(c, model, o, passed);
        all = all && passed;
    };
    const bool has_triplet = model.triplet.has_value();
    run("factorize", factorize_suite, has_triplet && model.ladders.has_value());
    run("residual", residual_suite, has_triplet && (c.has("density_csv") || has_residual_candidate(model)));
    run("mellin", mellin_suite, has_triplet || closed_mellin(model).has_value());
    if (suites.empty() || std::none_of(suites.begin(), suites.end(), [](const json& v) { return !v.contains("skipped"); }))
        throw ConfigError("no verification suite applies to family " + model.family);
    report["suites"] = suites;
    report["passed"] = all;
    out.write("verify.json", dump_json(report));
    out.finish();
    if (!all) std::cerr << "verify: suite failed (see verify.json)\n";
    return all ? ok : suite_failed;
}

int cmd_sample(const Options& o) {
    const Config c = load_config(o.config_path);
    const LevyModel model = build_model(c);
    PathConfig cfg = path_config(c, o.seed, o.workers);
    cfg.exec = exec_for(o.workers);
    const auto n = static_cast<std::size_t>(o.n);
    SamplePool pool;
    if (o.sampler == "xi") {
        pool = sample_exp_functional(model, cfg, n);
    } else if (o.sampler == "H" || o.sampler == "Y" || o.sampler == "dual_Y") {
        const LadderPair pair = sampling_pair(c, model);
        if (o.sampler == "H")
            pool = sample_subordinator_functional(pair.descending, cfg, n);
        else if (o.sampler == "Y")
            pool = sample_Y_functional(pair, cfg, n);
        else
            pool = sample_dual_Y_functional(pair.descending, cfg, n);
    } else {
        throw ConfigError("unknown sampler '" + o.sampler + "'");
    }
    OutputSet out(o, "sample");
    out.write("pool.csv", to_csv(pool));
    out.write("pool.json", dump_json(sidecar_json(pool)));
    out.finish();
    return ok;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "invalid_config: " << e.what() << "\n";
        return invalid_config;
    } catch (const ValidityError& e) {
        std::cerr << "validity_radius: " << e.what() << " (offending x range [" << fmt17(e.lo()) << ", "
                  << fmt17(e.hi()) << "])\n";
        return validity_violation;
    } catch (const NumericError& e) {
        std::cerr << e.invariant() << ": " << e.what() << "\n";
        return numeric_failure;
    } catch (const std::exception& e) {
        std::cerr << "numeric_failure: " << e.what() << "\n";
        return numeric_failure;
    }
}

}  // namespace expfunc::cli

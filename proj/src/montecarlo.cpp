#include "expfunc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>

#include <omp.h>

#include "expfunc/error.hpp"
#include "expfunc/quadrature.hpp"

namespace expfunc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (0x632be59bd9b4e019ULL * (tag + 1));
    return splitmix64(s);
}

// y with tail(y) = v for v in (0, tail(lo)], by log-log interpolation in a table on [lo, hi]
std::function<double(double)> tabulated_inverse(const RealFn& tail, double lo) {
    const double top = tail(lo);
    double hi = std::max(2.0 * lo, 1.0);
    while (tail(hi) > 1e-14 * top && hi < 1e6) hi *= 2.0;
    const int n = 2048;
    std::vector<double> ly(n);
    std::vector<double> lt(n);
    const double a = std::log(lo);
    const double h = (std::log(hi) - a) / (n - 1);
    for (int i = 0; i < n; ++i) {
        ly[i] = a + h * i;
        lt[i] = std::log(std::max(tail(std::exp(ly[i])), 1e-300));
    }
    return [ly = std::move(ly), lt = std::move(lt)](double v) {
        const double l = std::log(v);
        if (l >= lt.front()) return std::exp(ly.front());
        if (l <= lt.back()) return std::exp(ly.back());
        // lt is decreasing
        const auto it = std::lower_bound(lt.begin(), lt.end(), l, [](double x, double key) { return x > key; });
        const auto j = static_cast<std::size_t>(it - lt.begin());
        const double w = (l - lt[j - 1]) / (lt[j] - lt[j - 1]);
        return std::exp(ly[j - 1] + w * (ly[j] - ly[j - 1]));
    };
}

double solve_cutoff(const RealFn& tail, double eps, double rate) {
    if (tail(eps) <= rate) return eps;
    double lo = std::log(eps);
    double hi = lo;
    while (tail(std::exp(hi)) > rate) hi += 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail(std::exp(mid)) > rate ? lo : hi) = mid;
    }
    return std::exp(hi);
}

double segment_integral(double a, double b, double dt) {
    const double d = b - a;
    const double f = std::abs(d) < 1e-6 ? 1.0 + d * (0.5 + d / 6.0) : std::expm1(d) / d;
    return dt * std::exp(a) * f;
}

}  // namespace

json to_json(const PathConfig& c) {
    json j;
    j["dt"] = c.dt;
    j["horizon"] = c.horizon == PathConfig::Horizon::fixed ? "fixed" : "adaptive";
    j["fixed_T"] = c.fixed_T;
    j["tail_eps"] = c.tail_eps;
    j["max_time"] = c.max_time;
    j["seed"] = c.seed;
    j["scheme"] = c.scheme == PathConfig::Scheme::euler ? "euler" : "exact_increments";
    j["eps_jump"] = c.eps_jump;
    j["max_jump_rate"] = c.max_jump_rate;
    return j;
}

SamplePool SamplePool::from_values(std::vector<double> v, std::string id, const PathConfig& cfg) {
    SamplePool p;
    p.n = v.size();
    p.values = std::move(v);
    p.sampler_id = std::move(id);
    p.config = cfg;
    return p;
}

std::vector<double> parallel_generate(std::size_t n, std::uint64_t seed,
                                      const std::function<double(Xoshiro256&, std::size_t)>& draw, Exec exec,
                                      int workers) {
    std::vector<double> out(n);
    const auto m = static_cast<std::ptrdiff_t>(n);
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < m; ++i) {
            Xoshiro256 rng = Xoshiro256::stream(seed, static_cast<std::uint64_t>(i));
            out[i] = draw(rng, static_cast<std::size_t>(i));
        }
        return out;
    }
    std::exception_ptr first;
    std::ptrdiff_t first_index = m;
    std::mutex mu;
#pragma omp parallel for schedule(dynamic, 64) num_threads(resolve_workers(workers))
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        try {
            Xoshiro256 rng = Xoshiro256::stream(seed, static_cast<std::uint64_t>(i));
            out[i] = draw(rng, static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (i < first_index) {
                first_index = i;
                first = std::current_exception();
            }
        }
    }
    if (first) std::rethrow_exception(first);
    return out;
}

// ---------------------------------------------------------------- path sampler

PathSampler::PathSampler(const LevyModel& model, const PathConfig& cfg) : cfg_(cfg) {
    if (!model.triplet) throw ConfigError("path sampler: model has no Levy triplet");
    if (!(cfg.dt > 0.0)) throw ConfigError("path sampler: dt must be positive");
    const LevyTriplet& t = *model.triplet;
    mean_ = t.mean;
    drift_ = t.mean;
    sigma2_ = t.sigma2;
    auto add_side = [&](const JumpSpec& spec, double sign) {
        for (const auto& c : spec.components) {
            Component k;
            k.sign = sign;
            double compensator = 0.0;
            if (c.exponential()) {
                k.cutoff = 0.0;
                k.rate = c.exp_c;
                compensator = c.exp_c / c.exp_lambda;
                const double lam = c.exp_lambda;
                const double rate = k.rate;
                k.inverse = [lam, rate](double v) { return std::log(rate / v) / lam; };
            } else {
                k.cutoff = solve_cutoff(c.tail, cfg.eps_jump, cfg.max_jump_rate);
                k.rate = c.tail(k.cutoff);
                compensator = k.cutoff * k.rate + c.double_tail(k.cutoff);
                const RealFn tail = c.tail;
                // variance of the jumps below the cutoff
                const double e = k.cutoff;
                const double small = e * e *
                                     (2.0 * integrate(
                                                [&](double u) {
                                                    const double v = u * tail(e * u);
                                                    return std::isfinite(v) ? v : 0.0;
                                                },
                                                0.0, 1.0, 1e-10) -
                                      k.rate);
                sigma2_ += std::max(0.0, small);
                if (c.inverse_tail)
                    k.inverse = c.inverse_tail;
                else
                    k.inverse = tabulated_inverse(tail, e);
            }
            drift_ -= sign * compensator;
            rate_ += k.rate;
            cutoffs_.push_back(k.cutoff);
            if (k.rate > 0.0) comps_.push_back(std::move(k));
        }
    };
    add_side(t.positive, 1.0);
    add_side(t.negative, -1.0);
}

PathResult PathSampler::run(Xoshiro256& rng, double t_end, double sign, double keep_prob) const {
    const bool adaptive = !std::isfinite(t_end);
    if (adaptive && !(mean_ < 0.0)) throw ConfigError("adaptive horizon needs a negative mean");
    const bool thin = keep_prob < 1.0;
    const double s = std::sqrt(sigma2_);
    const double bridge_var = cfg_.scheme == PathConfig::Scheme::exact_increments ? sigma2_ / 12.0 : 0.0;
    const double stop_scale = adaptive ? 1.0 / std::abs(mean_) : 0.0;
    std::normal_distribution<double> normal(0.0, 1.0);
    auto exp_draw = [&] { return -std::log(rng.uniform()); };
    auto seg = [&](double a, double b, double dt) {
        if (cfg_.scheme == PathConfig::Scheme::euler) return dt * std::exp(a);
        return segment_integral(a, b, dt) * std::exp(bridge_var * dt);
    };

    PathResult r;
    double t = 0.0;
    double xi = 0.0;
    double xt = 0.0;
    double next_jump = rate_ > 0.0 ? exp_draw() / rate_ : kInf;
    while (t < t_end) {
        const double target = std::min(next_jump, t_end);
        if (s == 0.0 && !std::isfinite(target)) {
            // deterministic drift to infinity
            if (!(drift_ < 0.0)) throw NumericError("path_drift_negative", "pure-drift path does not decrease");
            r.integral += std::exp(sign * xi) / (-sign * drift_ > 0.0 ? -drift_ : drift_);
            if (thin) r.thinned_integral += std::exp(sign * xt) / std::abs(drift_);
            t = kInf;
            break;
        }
        const double step_end = s > 0.0 ? std::min(target, t + cfg_.dt) : target;
        const double dt = step_end - t;
        const double inc = drift_ * dt + (s > 0.0 ? s * std::sqrt(dt) * normal(rng) : 0.0);
        r.integral += seg(sign * xi, sign * (xi + inc), dt);
        if (thin) r.thinned_integral += seg(sign * xt, sign * (xt + inc), dt);
        xi += inc;
        xt += inc;
        t = step_end;
        if (t == next_jump) {
            double u = rng.uniform() * rate_;
            std::size_t k = 0;
            while (k + 1 < comps_.size() && u > comps_[k].rate) {
                u -= comps_[k].rate;
                ++k;
            }
            const Component& c = comps_[k];
            const double y = c.inverse(std::clamp(u, 1e-300, c.rate));
            xi += c.sign * y;
            if (thin) {
                const bool keep = rng.uniform() < keep_prob;
                if (c.sign < 0.0 || keep) xt += c.sign * y;
            }
            next_jump = t + exp_draw() / rate_;
        }
        if (adaptive) {
            if (std::exp(xi) * stop_scale < cfg_.tail_eps * r.integral) break;
            if (t > cfg_.max_time) {
                r.flagged = true;
                break;
            }
        }
    }
    r.xi_end = xi;
    r.time = t;
    return r;
}

// ---------------------------------------------------------------- pools

namespace {

SamplePool path_pool(const LevyModel& model, const PathConfig& cfg, std::size_t n, const std::string& id) {
    const PathSampler sampler(model, cfg);
    const double t_end = cfg.horizon == PathConfig::Horizon::fixed ? cfg.fixed_T : kInf;
    std::vector<char> flags(n, 0);
    std::vector<double> v = parallel_generate(
        n, cfg.seed,
        [&](Xoshiro256& rng, std::size_t i) {
            const PathResult r = sampler.run(rng, t_end);
            flags[i] = r.flagged ? 1 : 0;
            return r.integral;
        },
        cfg.exec, cfg.workers);
    SamplePool p = SamplePool::from_values(std::move(v), id, cfg);
    p.flagged = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
    p.truncation_budget = cfg.horizon == PathConfig::Horizon::fixed ? 0.0 : cfg.tail_eps;
    return p;
}

}  // namespace

SamplePool sample_exp_functional(const LevyModel& model, const PathConfig& cfg, std::size_t n) {
    if (!(model.mean < 0.0)) throw ConfigError("sample_exp_functional: model mean must be negative");
    return path_pool(model, cfg, n, "path:" + model.family);
}

SamplePool sample_subordinator_functional(const LadderExponent& desc, const PathConfig& cfg, std::size_t n) {
    return path_pool(descending_process(desc), cfg, n, "path:descending:" + desc.tag);
}

SamplePool sample_Y_functional(const LadderPair& pair, const PathConfig& cfg, std::size_t n) {
    return path_pool(ascending_process(pair.ascending), cfg, n, "path:ascending:" + pair.ascending.tag);
}

SamplePool sample_dual_Y_functional(const LadderExponent& desc, const PathConfig& cfg, std::size_t n) {
    return path_pool(ascending_process(dual_ascending(desc)), cfg, n, "path:dual:" + desc.tag);
}

SamplePool gamma_power_pool(double shape, double power, const PathConfig& cfg, std::size_t n) {
    if (!(shape > 0.0)) throw ConfigError("gamma_power_pool: shape must be positive");
    std::vector<double> v = parallel_generate(
        n, cfg.seed,
        [&](Xoshiro256& rng, std::size_t) {
            std::gamma_distribution<double> g(shape, 1.0);
            return std::pow(g(rng), power);
        },
        cfg.exec, cfg.workers);
    return SamplePool::from_values(std::move(v), "exact:gamma_power(" + fmt17(shape) + "," + fmt17(power) + ")", cfg);
}

SamplePool exp_jumps_mixture_pool(const ExpPositiveJumps& p, const PathConfig& cfg, std::size_t n) {
    const double a = p.theta1;
    const double b = p.lambda - p.theta1;
    std::vector<double> v = parallel_generate(
        n, cfg.seed,
        [&](Xoshiro256& rng, std::size_t) {
            std::gamma_distribution<double> g2(p.theta2, 1.0);
            std::gamma_distribution<double> ga(a, 1.0);
            std::gamma_distribution<double> gb(b, 1.0);
            const double g = g2(rng);
            const double x = ga(rng);
            const double y = gb(rng);
            const double beta = x / (x + y);
            return 1.0 / (p.delta_plus * g * beta);
        },
        cfg.exec, cfg.workers);
    return SamplePool::from_values(std::move(v), "exact:exp_jumps_mixture", cfg);
}

SamplePool exponential_pool(double rate, const PathConfig& cfg, std::size_t n) {
    std::vector<double> v =
        parallel_generate(n, cfg.seed, [&](Xoshiro256& rng, std::size_t) { return -std::log(rng.uniform()) / rate; },
                          cfg.exec, cfg.workers);
    return SamplePool::from_values(std::move(v), "exact:exponential", cfg);
}

SamplePool product_pool(const SamplePool& a, const SamplePool& b, const std::string& id) {
    const std::size_t n = std::min(a.n, b.n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a.values[i] * b.values[i];
    SamplePool p = SamplePool::from_values(std::move(v), id, a.config);
    p.truncation_budget = a.truncation_budget + b.truncation_budget;
    p.flagged = a.flagged + b.flagged;
    return p;
}

SamplePool gou_iterate(const LevyModel& model, double x0, double t, const PathConfig& cfg, std::size_t n) {
    if (!(t >= 0.0)) throw ConfigError("gou_iterate: t must be nonnegative");
    const PathSampler sampler(model, cfg);
    std::vector<double> v = parallel_generate(
        n, cfg.seed,
        [&](Xoshiro256& rng, std::size_t) {
            if (t == 0.0) return x0;
            const PathResult r = sampler.run(rng, t, -1.0);
            return std::exp(r.xi_end) * (x0 + r.integral);
        },
        cfg.exec, cfg.workers);
    return SamplePool::from_values(std::move(v), "gou:" + model.family, cfg);
}

SamplePool time_reversed_pool(const LevyModel& model, double x0, double t, const PathConfig& cfg, std::size_t n) {
    if (!(t >= 0.0)) throw ConfigError("time_reversed_pool: t must be nonnegative");
    const PathSampler sampler(model, cfg);
    std::vector<double> v = parallel_generate(
        n, cfg.seed,
        [&](Xoshiro256& rng, std::size_t) {
            if (t == 0.0) return x0;
            const PathResult r = sampler.run(rng, t, 1.0);
            return x0 * std::exp(r.xi_end) + r.integral;
        },
        cfg.exec, cfg.workers);
    return SamplePool::from_values(std::move(v), "reversed:" + model.family, cfg);
}

CoupledPair thinning_coupled_pair(const LevyModel& model, double keep_prob, const PathConfig& cfg, std::size_t n) {
    if (!(keep_prob >= 0.0 && keep_prob <= 1.0)) throw ConfigError("keep probability must lie in [0,1]");
    const PathSampler sampler(model, cfg);
    CoupledPair c;
    c.thinned.resize(n);
    c.full = parallel_generate(
        n, cfg.seed,
        [&](Xoshiro256& rng, std::size_t i) {
            const PathResult r = sampler.run(rng, kInf, 1.0, std::min(keep_prob, std::nextafter(1.0, 0.0)));
            c.thinned[i] = r.thinned_integral;
            return r.integral;
        },
        cfg.exec, cfg.workers);
    for (std::size_t i = 0; i < n; ++i)
        if (c.thinned[i] > c.full[i] * (1.0 + 1e-12)) ++c.order_violations;
    return c;
}

// ---------------------------------------------------------------- tests

double kolmogorov_survival(double lambda) {
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double t = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? 2.0 : -2.0) * t;
        if (t < 1e-300) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty sample");
    std::vector<double> x = a;
    std::vector<double> y = b;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    const double en = std::sqrt(n * m / (n + m));
    return {d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d)};
}

KsResult ks_two_sample(const SamplePool& a, const SamplePool& b) { return ks_two_sample(a.values, b.values); }

KsResult ks_one_sample(const std::vector<double>& sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw ConfigError("ks_one_sample: empty sample");
    std::vector<double> x = sample;
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    const double en = std::sqrt(n);
    return {d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d)};
}

FactorizationReport factorization_test(const LevyModel& model, const LadderPair& pair, const PathConfig& cfg,
                                       std::size_t n, double significance) {
    PathConfig c1 = cfg;
    PathConfig c2 = cfg;
    PathConfig c3 = cfg;
    c1.seed = derive_seed(cfg.seed, 1);
    c2.seed = derive_seed(cfg.seed, 2);
    c3.seed = derive_seed(cfg.seed, 3);
    const SamplePool xi = sample_exp_functional(model, c1, n);
    const SamplePool h = sample_subordinator_functional(pair.descending, c2, n);
    const SamplePool y = sample_Y_functional(pair, c3, n);
    const SamplePool prod = product_pool(h, y, "product");
    FactorizationReport r;
    r.id = model.family;
    r.n = n;
    r.significance = significance;
    r.ks = ks_two_sample(xi, prod);
    const double flagged = static_cast<double>(xi.flagged + prod.flagged) / static_cast<double>(n);
    r.truncation_budget = xi.truncation_budget + prod.truncation_budget + flagged;
    const double nn = static_cast<double>(n);
    const double en = std::sqrt(nn * nn / (2.0 * nn));
    r.adjusted_p_value = kolmogorov_survival((en + 0.12 + 0.11 / en) * std::max(0.0, r.ks.statistic - r.truncation_budget));
    r.passed = r.adjusted_p_value >= significance;
    return r;
}

json to_json(const FactorizationReport& r) {
    return {{"id", r.id},
            {"n", r.n},
            {"statistic", r.ks.statistic},
            {"p_value", r.ks.p_value},
            {"truncation_budget", r.truncation_budget},
            {"adjusted_p_value", r.adjusted_p_value},
            {"significance", r.significance},
            {"passed", r.passed}};
}

std::string to_csv(const SamplePool& p) { return csv_column("value", p.values); }

json sidecar_json(const SamplePool& p) {
    return {{"sampler_id", p.sampler_id},
            {"n", p.n},
            {"seed", p.config.seed},
            {"config", to_json(p.config)},
            {"truncation_budget", p.truncation_budget},
            {"flagged", p.flagged}};
}

}  // namespace expfunc

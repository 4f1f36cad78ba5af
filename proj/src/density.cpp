#include "expfunc/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "expfunc/error.hpp"
#include "expfunc/moments.hpp"
#include "expfunc/quadrature.hpp"

namespace expfunc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

std::string range_text(double lo, double hi) { return "[" + fmt17(lo) + ", " + fmt17(hi) + "]"; }

LadderExponent stable_ascending(const StableLadder& p) {
    if (const auto* k = std::get_if<PureKill>(&p.ascending)) return ascending_pure_kill(k->k_plus);
    return ascending_gamma_ratio(std::get<GammaRatioAscending>(p.ascending).alpha_prime);
}

}  // namespace

// ---------------------------------------------------------------- grids

double DensityGrid::log_step() const { return xs.size() < 2 ? 0.0 : std::log(xs[1] / xs[0]); }

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi > lo)) throw ConfigError("grid bounds must satisfy 0 < lo < hi");
    if (points < 3) throw ConfigError("grid needs at least 3 points");
    std::vector<double> xs(static_cast<std::size_t>(points));
    const double a = std::log(lo);
    const double h = (std::log(hi) - a) / (points - 1);
    for (int i = 0; i < points; ++i) xs[i] = std::exp(a + h * i);
    xs.front() = lo;
    xs.back() = hi;
    return xs;
}

double log_trapezoid(const std::vector<double>& xs, const std::vector<double>& values) {
    if (xs.size() < 2) return 0.0;
    const double h = std::log(xs[1] / xs[0]);
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = (i == 0 || i + 1 == xs.size()) ? 0.5 : 1.0;
        s += w * xs[i] * values[i];
    }
    return h * s;
}

DensityGrid make_grid(std::vector<double> xs, std::vector<double> values, DensityMeta meta) {
    if (xs.size() != values.size()) throw ConfigError("density grid: xs and values differ in length");
    if (xs.size() < 3) throw ConfigError("density grid: at least 3 points required");
    if (!(xs.front() > 0.0)) throw ConfigError("density grid: abscissae must be positive");
    const double h = std::log(xs[1] / xs[0]);
    if (!(h > 0.0)) throw ConfigError("density grid: abscissae must increase");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double hi = std::log(xs[i] / xs[i - 1]);
        if (std::abs(hi - h) > 1e-7 * h) throw ConfigError("density grid: abscissae must be log-spaced");
    }
    double vmax = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericError("density_finite", "non-finite density value on grid");
        vmax = std::max(vmax, std::abs(v));
    }
    for (double& v : values) {
        if (v < 0.0) {
            if (v < -1e-10 * vmax) throw NumericError("density_nonnegative", "negative density value " + fmt17(v));
            v = 0.0;
        }
    }
    DensityGrid g;
    g.xs = std::move(xs);
    g.values = std::move(values);
    meta.grid_mass = log_trapezoid(g.xs, g.values);
    if (meta.upper_tail_exponent) {
        const double p = *meta.upper_tail_exponent;
        if (!(p > 1.0)) throw ConfigError("density grid: upper tail exponent must exceed 1");
        meta.upper_mass = g.values.back() * g.xs.back() / (p - 1.0);
    }
    g.mass = meta.grid_mass + meta.lower_mass + meta.upper_mass;
    g.meta = std::move(meta);
    if (g.meta.full_support && std::abs(g.mass - 1.0) > g.meta.mass_tol)
        throw NumericError("mass_normalization", "grid mass " + fmt17(g.mass) + " deviates from 1 by more than " +
                                                     fmt17(g.meta.mass_tol));
    return g;
}

DensityGrid grid_from_function(const RealFn& m, double lo, double hi, int points, DensityMeta meta, Exec exec,
                               int workers) {
    std::vector<double> xs = log_grid(lo, hi, points);
    std::vector<double> v = evaluate_points(m, xs, exec, workers);
    return make_grid(std::move(xs), std::move(v), std::move(meta));
}

struct GridInterpolant::Impl {
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
};

GridInterpolant::GridInterpolant(const DensityGrid& g) {
    std::vector<double> f(g.xs.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.xs[i] * g.values[i];
    u_lo_ = std::log(g.xs.front());
    u_hi_ = std::log(g.xs.back());
    h_ = (u_hi_ - u_lo_) / static_cast<double>(f.size() - 1);
    impl_ = std::make_unique<Impl>(Impl{{f.data(), f.size(), u_lo_, h_}});
    if (g.meta.upper_tail_exponent) {
        has_tail_ = true;
        tail_exponent_ = *g.meta.upper_tail_exponent;
        f_hi_ = f.back();
    }
}

GridInterpolant::~GridInterpolant() = default;
GridInterpolant::GridInterpolant(GridInterpolant&&) noexcept = default;
GridInterpolant& GridInterpolant::operator=(GridInterpolant&&) noexcept = default;

double GridInterpolant::weighted(double u) const {
    if (u < u_lo_) return 0.0;
    if (u > u_hi_) return has_tail_ ? f_hi_ * std::exp((1.0 - tail_exponent_) * (u - u_hi_)) : 0.0;
    return std::max(0.0, impl_->spline(std::min(u, u_hi_)));
}

double GridInterpolant::density(double x) const {
    if (!(x > 0.0)) return 0.0;
    return weighted(std::log(x)) / x;
}

// ---------------------------------------------------------------- series

SeriesEvalReport SeriesDensity::sum(double x, const SeriesOptions& opt) const {
    if (!in_radius(x))
        throw ValidityError(family + ": x = " + fmt17(x) + " outside the series region " +
                                range_text(radius_lo, radius_hi),
                            radius_lo, radius_hi);
    const double lx = power * std::log(scale * x);
    const int avail = static_cast<int>(log_env.size()) - 3;
    SeriesOptions o = opt;
    o.max_terms = std::min(o.max_terms, avail);
    auto term = [&](int n, double& lm, double& m) {
        const auto i = static_cast<std::size_t>(n - first);
        lm = log_env[i] + n * lx;
        m = mult[i];
    };
    SeriesEvalReport r = sum_log_series(first, term, o, family.c_str());
    const double pre = prefactor ? prefactor(x) : 1.0;
    r.value *= pre;
    r.tail_bound *= std::abs(pre);
    return r;
}

SeriesEvalReport SeriesDensity::evaluate(double x, const SeriesOptions& opt) const {
    SeriesEvalReport r = sum(x, opt);
    if (!r.converged)
        throw ValidityError(family + ": series cannot reach the requested accuracy at x = " + fmt17(x), radius_lo,
                            radius_hi);
    return r;
}

SeriesDensity specneg_series(const SpectrallyNegative& p, double moments_gamma, int terms) {
    if (!(p.gamma > 0.0)) throw ConfigError("specneg series: gamma must be positive");
    if (!(moments_gamma > 0.0)) throw ConfigError("specneg series: E[I_H^gamma] must be positive");
    SeriesDensity s;
    s.family = "specneg_series";
    const double g = p.gamma;
    const double c = std::log(moments_gamma) - log_gamma(g) - log_gamma(g + 1.0);
    s.prefactor = [c, g](double x) { return std::exp(c - (g + 1.0) * std::log(x)); };
    double cum = 0.0;
    for (int n = 0; n < terms; ++n) {
        if (n > 0) {
            const double v = p.psi(cplx(n + g, 0.0)).real();
            if (!(v > 0.0)) throw NumericError("psi_positive", "Psi(" + fmt17(n + g) + ") <= 0");
            cum += std::log(v);
        }
        s.log_env.push_back(log_gamma(n + g + 1.0) - cum);
        s.mult.push_back(n % 2 == 0 ? 1.0 : -1.0);
    }
    s.first = 0;
    s.power = -1;
    s.radius_lo = p.radius_limit >= 1e300 ? 0.0 : 1.0 / p.radius_limit;
    return s;
}

SeriesEvalReport density_specneg_series(const SpectrallyNegative& p, double moments_gamma, double x,
                                        SeriesOptions opt) {
    return specneg_series(p, moments_gamma, opt.max_terms + 3).evaluate(x, opt);
}

SeriesEvalReport density_gamma_power_wright(double alpha, double gamma, double x, SeriesOptions opt) {
    if (!(x > 0.0)) throw ConfigError("x must be positive");
    SeriesEvalReport r = wright_1F0(alpha, alpha * gamma + 1.0, 1.0 / x, opt);
    const double pre = std::exp(-(gamma + 1.0) * std::log(x) - log_gamma(gamma));
    r.value *= pre;
    r.tail_bound *= pre;
    if (!r.converged)
        throw ValidityError("wright series: cannot reach the requested accuracy at x = " + fmt17(x), 0.0, kInf);
    return r;
}

// ---------------------------------------------------------------- exponential positive jumps

namespace {

void check_exp_jumps(const ExpPositiveJumps& p) {
    if (!(p.theta1 > 0.0 && p.theta2 > p.theta1 && p.lambda > 0.0 && p.delta_plus > 0.0))
        throw ConfigError("exp jumps: need 0 < theta1 < theta2, lambda > 0, delta_+ > 0");
    if (is_integer(p.theta2 - p.theta1))
        throw ValidityError("exp jumps: theta2 - theta1 = " + fmt17(p.theta2 - p.theta1) +
                                " is an integer; the two-root series expansion does not apply",
                            0.0, kInf);
}

// log|Gamma(a - n) / Gamma(b - n)| and its sign; zero when b - n is a pole.
void gamma_ratio_coeff(double a, double b, int n, double& log_abs, double& sign) {
    const SignedLog ga = log_abs_gamma(a - n);
    if (b - n <= 0.0 && is_integer(b - n)) {
        log_abs = ga.log_abs;
        sign = 0.0;
        return;
    }
    const SignedLog gb = log_abs_gamma(b - n);
    log_abs = ga.log_abs - gb.log_abs;
    sign = static_cast<double>(ga.sign * gb.sign);
}

double log_moment_H(const ExpPositiveJumps& p, double s) {
    if (p.alpha) return log_gamma(*p.alpha * s + 1.0);
    return -s * std::log(p.delta_minus);
}

LadderExponent exp_jumps_descending(const ExpPositiveJumps& p) {
    return p.alpha ? descending_gamma_power(*p.alpha) : descending_pure_drift(p.delta_minus);
}

enum class ExpSeries { density_Y, survival_Y, density_xi };

SeriesDensity exp_root_series(const ExpPositiveJumps& p, int root, ExpSeries kind, int terms) {
    const double th = root == 1 ? p.theta1 : p.theta2;
    const double other = root == 1 ? p.theta2 : p.theta1;
    const double a = other - th;
    const double b = p.lambda - th;
    const double logc = std::log(exp_jumps_constant(p));
    const double dp = p.delta_plus;
    SeriesDensity s;
    s.family = "exp_jumps_root" + std::to_string(root);
    s.first = 0;
    s.power = -1;
    s.scale = dp;
    LadderExponent desc;
    if (kind == ExpSeries::density_xi) desc = exp_jumps_descending(p);
    double log_h = 0.0;  // log E[I_H^{th+n}] - log E[I_H^{th}]
    double prev_env = 0.0;
    for (int n = 0; n < terms; ++n) {
        double lb = 0.0;
        double sb = 0.0;
        gamma_ratio_coeff(a, b, n, lb, sb);
        if (sb == 0.0 && n > 0) lb = prev_env;
        double env = lb - log_gamma(n + 1.0);
        if (kind == ExpSeries::survival_Y) env -= std::log(th + n);
        if (kind == ExpSeries::density_xi) {
            if (n > 0) {
                const double f = desc(th + n);
                if (!(f < 0.0)) throw NumericError("descending_exponent_sign", "phi_-(" + fmt17(th + n) + ") >= 0");
                log_h += std::log(th + n) - std::log(-f);
            }
            env += log_h;
        }
        prev_env = lb;
        s.log_env.push_back(env);
        s.mult.push_back((n % 2 == 0 ? 1.0 : -1.0) * sb);
    }
    switch (kind) {
        case ExpSeries::density_Y:
            s.prefactor = [=](double y) { return std::exp(logc - (th + 1.0) * std::log(dp * y)); };
            break;
        case ExpSeries::survival_Y:
            s.prefactor = [=](double y) { return std::exp(logc - std::log(dp) - th * std::log(dp * y)); };
            break;
        case ExpSeries::density_xi: {
            const double lm = log_moment_H(p, th);
            s.prefactor = [=](double x) { return std::exp(logc + lm - (th + 1.0) * std::log(dp * x)); };
            break;
        }
    }
    return s;
}

SeriesEvalReport exp_pair(const ExpPositiveJumps& p, double x, ExpSeries kind, const SeriesOptions& opt) {
    check_exp_jumps(p);
    if (!(x > 0.0)) throw ConfigError("x must be positive");
    const int terms = opt.max_terms + 3;
    const SeriesEvalReport r1 = exp_root_series(p, 1, kind, terms).sum(x, opt);
    const SeriesEvalReport r2 = exp_root_series(p, 2, kind, terms).sum(x, opt);
    SeriesEvalReport r;
    r.value = r1.value + r2.value;
    r.tail_bound = r1.tail_bound + r2.tail_bound;
    r.terms_used = std::max(r1.terms_used, r2.terms_used);
    r.converged = r.tail_bound <= opt.rel_tol * std::abs(r.value) + opt.abs_tol;
    if (!r.converged)
        throw ValidityError("exp jumps: series cancellation prevents the requested accuracy at x = " + fmt17(x), 0.0,
                            kInf);
    return r;
}

}  // namespace

double exp_jumps_constant(const ExpPositiveJumps& p) {
    return std::exp(std::log(p.delta_plus) + log_gamma(p.lambda) - log_gamma(p.theta1) - log_gamma(p.theta2));
}

SeriesEvalReport density_exp_jumps_Y(const ExpPositiveJumps& p, double y, SeriesOptions opt) {
    return exp_pair(p, y, ExpSeries::density_Y, opt);
}

SeriesEvalReport survival_exp_jumps_Y(const ExpPositiveJumps& p, double y, SeriesOptions opt) {
    return exp_pair(p, y, ExpSeries::survival_Y, opt);
}

SeriesEvalReport density_exp_jumps(const ExpPositiveJumps& p, double x, SeriesOptions opt) {
    return exp_pair(p, x, ExpSeries::density_xi, opt);
}

// ---------------------------------------------------------------- stable family

double density_stable_H(double alpha, double x) {
    if (!(x > 0.0)) return 0.0;
    const double u = std::pow(x, -1.0 / alpha);
    double g = 0.0;
    try {
        const SeriesEvalReport r = stable_density(alpha, u, {600, 1e-12, 0.0});
        g = r.converged ? r.value : stable_density_integral(alpha, u);
    } catch (const ValidityError&) {
        g = stable_density_integral(alpha, u);
    } catch (const NumericError&) {
        g = stable_density_integral(alpha, u);
    }
    return std::exp(log_gamma(1.0 + alpha)) * u * g / alpha;
}

SeriesDensity stable_series(const StableLadder& p, int terms) {
    const double a = p.alpha;
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("stable family: alpha must lie in (0,1)");
    if (const auto* g = std::get_if<GammaRatioAscending>(&p.ascending)) {
        // s^{alpha-1} phi_+(-s) ~ s^{alpha + alpha' - 1}
        if (!(a + g->alpha_prime < 1.0))
            throw ValidityError("stable family: series condition lim s^{alpha-1} phi_+(-s) = 0 fails", 0.0, 0.0);
    }
    const LadderExponent asc = stable_ascending(p);
    const double kp = -asc(0.0);
    SeriesDensity s;
    s.family = "stable_series";
    const double pre = kp * std::exp(log_gamma(1.0 + a)) / a;
    s.prefactor = [pre](double) { return pre; };
    s.first = 1;
    s.power = 1;
    double cum = 0.0;
    for (int n = 1; n <= terms; ++n) {
        const double f = asc(-static_cast<double>(n));
        if (!(f < 0.0)) throw NumericError("ascending_exponent_sign", "phi_+(-" + std::to_string(n) + ") >= 0");
        cum += std::log(-f);
        s.log_env.push_back(cum + log_gamma(1.0 + a * n) - std::log(std::numbers::pi) - log_gamma(n + 1.0));
        // prod phi_+(-k) has sign (-1)^n; 1/Gamma(-a n) = -sin(pi a n) Gamma(1 + a n) / pi
        s.mult.push_back((n % 2 == 0 ? 1.0 : -1.0) * -sin_pi(a * n));
    }
    return s;
}

SeriesEvalReport density_stable_series(const StableLadder& p, double x, SeriesOptions opt) {
    if (!(x > 0.0)) throw ConfigError("x must be positive");
    return stable_series(p, opt.max_terms + 3).evaluate(x, opt);
}

double stable_family_Y_density(const StableLadder& p, double y) {
    if (const auto* g = std::get_if<GammaRatioAscending>(&p.ascending))
        return power_gamma_density(1.0 - g->alpha_prime, -g->alpha_prime, y);
    throw ConfigError("stable family: I_Y is degenerate for the pure-kill ascending ladder");
}

double density_stable_family(const StableLadder& p, const DensityGrid& mY, double x) {
    if (!(x > 0.0)) throw ConfigError("x must be positive");
    if (std::abs(mY.mass - 1.0) > mY.meta.mass_tol)
        throw NumericError("factor_mass", "m_Y grid mass " + fmt17(mY.mass) + " is not 1");
    const GridInterpolant iy(mY);
    const double a = p.alpha;
    auto f = [&](double v) { return density_stable_H(a, x * std::exp(-v)) * iy.weighted(v) * std::exp(-v); };
    const int panels = std::max(8, static_cast<int>(mY.xs.size() / 2));
    return gauss_legendre(f, iy.u_lo(), iy.u_hi(), panels);
}

double density_stable_family(const StableLadder& p, double x) {
    if (!(x > 0.0)) throw ConfigError("x must be positive");
    const double a = p.alpha;
    if (const auto* k = std::get_if<PureKill>(&p.ascending)) return k->k_plus * density_stable_H(a, k->k_plus * x);
    auto f = [&](double v) {
        const double y = std::exp(v);
        return density_stable_H(a, x / y) * stable_family_Y_density(p, y);
    };
    static constexpr double cuts[] = {-60.0, -8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0, 60.0};
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(cuts); ++i) s += integrate(f, cuts[i], cuts[i + 1], 1e-13);
    return s;
}

// ---------------------------------------------------------------- closed-form factors

double gamma_density(double a, double x) {
    if (!(x > 0.0)) return 0.0;
    return std::exp((a - 1.0) * std::log(x) - x - log_gamma(a));
}

double power_gamma_density(double a, double p, double x) {
    if (!(x > 0.0)) return 0.0;
    if (p == 0.0) throw ConfigError("power_gamma_density: exponent must be nonzero");
    const double lg = std::log(x) / p;
    const double g = std::exp(lg);
    if (g == 0.0 || !std::isfinite(g)) return 0.0;
    return std::exp(a * lg - g - log_gamma(a) - std::log(std::abs(p) * x));
}

double inverse_gamma_density(double a, double x) { return power_gamma_density(a, -1.0, x); }

double power_gamma_cdf(double a, double p, double x) {
    if (!(x > 0.0)) return 0.0;
    const double g = std::pow(x, 1.0 / p);
    return p > 0.0 ? gamma_p(a, g) : gamma_q(a, g);
}

// ---------------------------------------------------------------- family dispatch

namespace {

double specneg_moment(const LevyModel& model, const SpectrallyNegative& p) {
    if (p.alpha) return std::exp(log_gamma(*p.alpha * p.gamma + 1.0));
    if (!model.ladders) throw ConfigError("spectrally negative model without ladder exponents");
    return fractional_moment_H(model.ladders->descending, p.gamma);
}

}  // namespace

RealFn density_function(const LevyModel& model) {
    if (const auto* b = std::get_if<BrownianDrift>(&model.params)) {
        const double g = b->gamma;
        return [g](double x) { return inverse_gamma_density(g, x); };
    }
    if (const auto* s = std::get_if<SpectrallyNegative>(&model.params)) {
        const SeriesOptions opt = density_series_options();
        auto series = std::make_shared<SeriesDensity>(specneg_series(*s, specneg_moment(model, *s), opt.max_terms + 3));
        return [series, opt](double x) { return series->evaluate(x, opt).value; };
    }
    if (const auto* e = std::get_if<ExpPositiveJumps>(&model.params)) {
        const ExpPositiveJumps p = *e;
        check_exp_jumps(p);
        return [p](double x) { return density_exp_jumps(p, x).value; };
    }
    const StableLadder p = std::get<StableLadder>(model.params);
    return [p](double x) { return density_stable_family(p, x); };
}

DensityGrid density_grid(const LevyModel& model, double lo, double hi, int points, Exec exec, int workers) {
    RealFn m;
    try {
        m = density_function(model);
    } catch (const ValidityError& e) {
        throw ValidityError(std::string(e.what()) + "; requested x in " + range_text(lo, hi), lo, hi);
    }
    std::vector<double> xs = log_grid(lo, hi, points);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto guarded = [&](double x) {
        try {
            return m(x);
        } catch (const ValidityError&) {
            return nan;
        }
    };
    std::vector<double> v = evaluate_points(guarded, xs, exec, workers);
    double bad_lo = kInf;
    double bad_hi = -kInf;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::isnan(v[i])) {
            bad_lo = std::min(bad_lo, xs[i]);
            bad_hi = std::max(bad_hi, xs[i]);
        }
    if (bad_lo <= bad_hi)
        throw ValidityError(model.family + ": density representation invalid for x in " + range_text(bad_lo, bad_hi),
                            bad_lo, bad_hi);

    DensityMeta meta;
    meta.family = model.family;
    if (const auto* b = std::get_if<BrownianDrift>(&model.params)) {
        meta.source = "inverse_gamma";
        meta.params = {{"gamma", b->gamma}};
        meta.full_support = true;
        meta.lower_mass = gamma_q(b->gamma, 1.0 / lo);
        meta.upper_tail_exponent = b->gamma + 1.0;
        meta.upper_tail_coefficient = 1.0 / std::exp(log_gamma(b->gamma));
    } else if (const auto* s = std::get_if<SpectrallyNegative>(&model.params)) {
        meta.source = "specneg_series";
        const double e = specneg_moment(model, *s);
        meta.params = {{"gamma", s->gamma}, {"moment_H_gamma", e}};
        if (s->alpha) meta.params["alpha"] = *s->alpha;
        meta.upper_tail_exponent = s->gamma + 1.0;
        meta.upper_tail_coefficient = e / std::exp(log_gamma(s->gamma));
        meta.validity_lo = s->radius_limit >= 1e300 ? 0.0 : 1.0 / s->radius_limit;
    } else if (const auto* e = std::get_if<ExpPositiveJumps>(&model.params)) {
        meta.source = "exp_jumps_series";
        meta.params = {{"delta_plus", e->delta_plus}, {"k_plus", e->k_plus}, {"c_minus", e->c_minus},
                       {"lambda", e->lambda},         {"theta1", e->theta1}, {"theta2", e->theta2}};
        if (e->alpha) meta.params["alpha"] = *e->alpha;
        meta.upper_tail_exponent = e->theta1 + 1.0;
    } else {
        const auto& p = std::get<StableLadder>(model.params);
        meta.source = std::holds_alternative<PureKill>(p.ascending) ? "stable_scaled" : "stable_integral";
        meta.params = {{"alpha", p.alpha}};
        if (const auto* g = std::get_if<GammaRatioAscending>(&p.ascending)) meta.params["alpha_prime"] = g->alpha_prime;
    }
    return make_grid(std::move(xs), std::move(v), std::move(meta));
}

// ---------------------------------------------------------------- convolution

namespace {

std::vector<double> lattice_samples(const GridInterpolant& g, double h) {
    const auto n = static_cast<std::size_t>(std::floor((g.u_hi() - g.u_lo()) / h + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = g.weighted(g.u_lo() + static_cast<double>(i) * h);
    return v;
}

}  // namespace

DensityGrid density_mellin_convolution(const DensityGrid& a, const DensityGrid& b, ConvolutionOptions opt) {
    for (const DensityGrid* g : {&a, &b})
        if (std::abs(g->mass - 1.0) > opt.mass_tol)
            throw NumericError("factor_mass", "factor grid mass " + fmt17(g->mass) + " is not within " +
                                                  fmt17(opt.mass_tol) + " of 1");
    const GridInterpolant ia(a);
    const GridInterpolant ib(b);
    const double u0 = ia.u_lo() + ib.u_lo();
    double h = std::min(ia.step(), ib.step());
    std::vector<double> c;
    double h_used = h;
    for (int r = 0; r <= opt.max_refinements; ++r) {
        std::vector<double> next =
            lattice_convolve(lattice_samples(ia, h), lattice_samples(ib, h), h, opt.exec, opt.workers);
        if (r > 0) {
            double cmax = 0.0;
            for (double v : c) cmax = std::max(cmax, v);
            double err = 0.0;
            for (std::size_t k = 0; k < c.size() && 2 * k < next.size(); ++k)
                err = std::max(err, std::abs(next[2 * k] - c[k]) / std::max(c[k], 1e-8 * cmax));
            c = std::move(next);
            h_used = h;
            if (err < opt.refine_tol) break;
        } else {
            c = std::move(next);
            h_used = h;
        }
        h *= 0.5;
    }
    std::vector<double> xs(c.size());
    std::vector<double> v(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        xs[k] = std::exp(u0 + static_cast<double>(k) * h_used);
        v[k] = c[k] / xs[k];
    }
    DensityMeta meta;
    meta.source = "mellin_convolution";
    meta.family = a.meta.family.empty() ? b.meta.family : a.meta.family;
    meta.params = {{"factor_a", a.meta.source}, {"factor_b", b.meta.source}, {"log_step", h_used}};
    meta.mass_tol = opt.mass_tol;
    const double gm = log_trapezoid(xs, v);
    if (1.0 - gm > opt.mass_tol)
        throw NumericError("support_truncation", "product grid carries mass " + fmt17(gm) + "; factor supports too narrow");
    meta.full_support = a.meta.full_support && b.meta.full_support;
    return make_grid(std::move(xs), std::move(v), std::move(meta));
}

// ---------------------------------------------------------------- tilting and diagnostics

DensityGrid tilt_density(const DensityGrid& m, double beta, std::optional<double> moment) {
    std::vector<double> v(m.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(m.xs[i], beta) * m.values[i];
    DensityMeta meta = m.meta;
    meta.source = "tilt(" + m.meta.source + ")";
    meta.params["tilt_beta"] = beta;
    meta.lower_mass = 0.0;
    meta.upper_mass = 0.0;
    if (m.meta.upper_tail_exponent) {
        const double p = *m.meta.upper_tail_exponent - beta;
        if (!(p > 1.0))
            throw NumericError("tilt_moment_finite", "moment of order " + fmt17(beta) + " diverges for tail exponent " +
                                                         fmt17(*m.meta.upper_tail_exponent));
        meta.upper_tail_exponent = p;
        meta.upper_tail_coefficient = m.meta.upper_tail_coefficient;
    }
    double e = 0.0;
    if (moment) {
        e = *moment;
    } else {
        e = log_trapezoid(m.xs, v);
        if (meta.upper_tail_exponent) e += v.back() * m.xs.back() / (*meta.upper_tail_exponent - 1.0);
        if (beta == 0.0) e += m.meta.lower_mass;
    }
    if (!(e > 0.0 && std::isfinite(e))) throw NumericError("tilt_moment_finite", "moment estimate " + fmt17(e));
    for (double& x : v) x /= e;
    meta.upper_tail_coefficient /= e;
    if (beta == 0.0) meta.lower_mass = m.meta.lower_mass / e;
    return make_grid(m.xs, std::move(v), std::move(meta));
}

LogConcavityReport check_log_concavity(const DensityGrid& m, double noise_tol, double floor_rel) {
    LogConcavityReport r;
    r.noise_tol = noise_tol;
    double vmax = 0.0;
    for (double v : m.values) vmax = std::max(vmax, v);
    const double floor = floor_rel * vmax;
    for (std::size_t i = 1; i + 1 < m.values.size(); ++i) {
        if (!(m.values[i - 1] > floor && m.values[i] > floor && m.values[i + 1] > floor)) continue;
        const double d2 = std::log(m.values[i + 1]) - 2.0 * std::log(m.values[i]) + std::log(m.values[i - 1]);
        ++r.points_tested;
        if (d2 > noise_tol) {
            ++r.violations;
            if (d2 > r.max_violation) {
                r.max_violation = d2;
                r.x_at_max = m.xs[i];
            }
        }
    }
    r.fraction = r.points_tested ? static_cast<double>(r.violations) / r.points_tested : 0.0;
    return r;
}

MonotonicityReport check_complete_monotonicity(const RealFn& f, double lo, double hi, int points, int max_order,
                                               double tol) {
    if (!(hi > lo) || points < max_order + 2) throw ConfigError("complete monotonicity check: bad grid");
    MonotonicityReport r;
    r.max_order = max_order;
    std::vector<double> d(static_cast<std::size_t>(points));
    const double step = (hi - lo) / (points - 1);
    double fmax = 0.0;
    for (int i = 0; i < points; ++i) {
        d[i] = f(lo + step * i);
        fmax = std::max(fmax, std::abs(d[i]));
    }
    for (int k = 1; k <= max_order; ++k) {
        for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = d[i + 1] - d[i];
        d.pop_back();
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        int bad = 0;
        double worst = 0.0;
        for (double v : d) {
            const double s = sign * v / fmax;
            worst = std::min(worst, s);
            if (s < -tol * std::pow(2.0, k)) ++bad;
        }
        r.violations.push_back(bad);
        r.worst_relative.push_back(worst);
        if (bad) r.passed = false;
    }
    return r;
}

// ---------------------------------------------------------------- serialization

std::string to_csv(const DensityGrid& g) { return csv_two_columns("x", "density", g.xs, g.values); }

json to_json(const DensityGrid& g) {
    json meta;
    meta["source"] = g.meta.source;
    meta["family"] = g.meta.family;
    meta["params"] = g.meta.params;
    meta["full_support"] = g.meta.full_support;
    meta["validity_lo"] = g.meta.validity_lo;
    meta["validity_hi"] = std::isfinite(g.meta.validity_hi) ? json(g.meta.validity_hi) : json("inf");
    if (g.meta.upper_tail_exponent) {
        meta["upper_tail_exponent"] = *g.meta.upper_tail_exponent;
        meta["upper_tail_coefficient"] = g.meta.upper_tail_coefficient;
    } else {
        meta["upper_tail_exponent"] = nullptr;
    }
    json j;
    j["meta"] = meta;
    j["points"] = g.xs.size();
    j["x_lo"] = g.xs.front();
    j["x_hi"] = g.xs.back();
    j["log_step"] = g.log_step();
    j["normalization"] = {{"grid_mass", g.meta.grid_mass},
                          {"lower_mass", g.meta.lower_mass},
                          {"upper_mass", g.meta.upper_mass},
                          {"mass", g.mass},
                          {"mass_tol", g.meta.mass_tol}};
    return j;
}

DensityGrid read_density_csv(const std::string& path) {
    auto cols = read_csv_columns(path);
    if (cols.size() < 2) throw ConfigError("density CSV needs x and density columns: " + path);
    DensityMeta meta;
    meta.source = "file";
    return make_grid(std::move(cols[0]), std::move(cols[1]), std::move(meta));
}

}  // namespace expfunc

#include "expfunc/gou_operator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "expfunc/error.hpp"
#include "expfunc/quadrature.hpp"
#include "expfunc/rng.hpp"

namespace expfunc {

namespace {

bool cheap_component(const JumpComponent& c) { return c.exponential() || c.tag == "gamma_power_density"; }

// Cubic spline of ln f against ln w on [w_lo, w_hi]; f itself outside.
RealFn tabulate_log_log(const RealFn& f, double w_lo, double w_hi, int points) {
    std::vector<double> v(static_cast<std::size_t>(points));
    const double a = std::log(w_lo);
    const double h = (std::log(w_hi) - a) / (points - 1);
    for (int i = 0; i < points; ++i) v[i] = std::log(f(std::exp(a + h * i)));
    auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(v.begin(), v.end(), a, h);
    const double b = a + h * (points - 1);
    return [spline, f, a, b](double w) {
        const double lw = std::log(w);
        if (lw < a || lw > b) return f(w);
        return std::exp((*spline)(lw));
    };
}

RealFn double_tail_handle(const JumpSpec& spec, bool& closed) {
    closed = std::all_of(spec.components.begin(), spec.components.end(), cheap_component);
    if (closed) return [spec](double w) { return spec.double_tail(w); };
    // expensive part tabulated; the range ends where the tail is negligible
    JumpSpec slow;
    JumpSpec fast;
    for (const auto& c : spec.components) (cheap_component(c) ? fast : slow).components.push_back(c);
    double w_hi = 1.0;
    const double ref = slow.double_tail(1.0);
    while (w_hi < 1e3 && slow.double_tail(w_hi) > 1e-40 * ref) w_hi *= 2.0;
    const RealFn slow_fn = [slow](double w) { return slow.double_tail(w); };
    const RealFn table = tabulate_log_log(slow_fn, 1e-10, w_hi, 4000);
    return [fast, table, w_hi](double w) {
        if (w > w_hi) return fast.double_tail(w);
        return fast.double_tail(w) + table(w);
    };
}

// int_a^b f over cells cut at the knots of the interpolated factor; the first two cells use tanh-sinh
// when the kernel is singular at a.
double cell_integral(const std::function<double(double)>& f, double a, double b, double first_knot, double h,
                     bool singular_start) {
    if (!(b > a)) return 0.0;
    std::vector<double> cuts{a};
    for (double k = first_knot; k < b; k += h)
        if (k > a) cuts.push_back(k);
    cuts.push_back(b);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        if (singular_start && i < 2)
            s += integrate(f, cuts[i], cuts[i + 1], 1e-12);
        else
            s += boost::math::quadrature::gauss<double, 8>::integrate(f, cuts[i], cuts[i + 1]);
    }
    return s;
}

}  // namespace

TailFunctions make_tails(const LevyModel& model) {
    if (!model.triplet) throw ConfigError("make_tails: model has no Levy triplet");
    const LevyTriplet& t = *model.triplet;
    TailFunctions tf;
    auto zero = [](double) { return 0.0; };
    tf.bar_plus = zero;
    tf.bar_minus = zero;
    tf.dbar_plus = zero;
    tf.dbar_minus = zero;
    if (!t.positive.empty()) {
        const JumpSpec s = t.positive;
        tf.has_plus = true;
        tf.bar_plus = [s](double w) { return s.tail(w); };
        tf.dbar_plus = double_tail_handle(s, tf.closed_form[2]);
    }
    if (!t.negative.empty()) {
        const JumpSpec s = t.negative;
        tf.has_minus = true;
        tf.bar_minus = [s](double w) { return s.tail(w); };
        tf.dbar_minus = double_tail_handle(s, tf.closed_form[3]);
    }
    return tf;
}

double apply_L(const GridInterpolant& h, const LevyModel& model, const TailFunctions& tails, double x) {
    if (!model.triplet) throw ConfigError("apply_L: model has no Levy triplet");
    const double sigma2 = model.triplet->sigma2;
    const double mean = model.triplet->mean;
    const double u = std::log(x);
    const double step = h.step();
    // first knot strictly above u, as an offset, and below u
    const double up_knot = h.u_lo() + std::ceil((u - h.u_lo()) / step + 1e-12) * step - u;
    const double down_knot = u - (h.u_lo() + std::floor((u - h.u_lo()) / step - 1e-12) * step);

    double value = 0.5 * sigma2 * h.weighted(u);

    auto up = [&](double w) {
        double k = std::exp(-w) / x + mean;
        if (tails.has_minus) k += tails.dbar_minus(w);
        return k * h.weighted(u + w);
    };
    const double w_grid = std::max(0.0, h.u_hi() - u);
    value += cell_integral(up, 0.0, w_grid, up_knot, step, tails.has_minus);
    if (h.weighted(h.u_hi() + 1.0) > 0.0) value += integrate_to_infinity(up, w_grid, 1e-12);

    if (tails.has_plus) {
        auto down = [&](double w) { return tails.dbar_plus(w) * h.weighted(u - w); };
        value += cell_integral(down, 0.0, std::max(0.0, u - h.u_lo()), down_knot, step, true);
    }
    return value;
}

double apply_L(const DensityGrid& h, const LevyModel& model, const TailFunctions& tails, double x) {
    const GridInterpolant g(h);
    return apply_L(g, model, tails, x);
}

ResidualReport residual_report(const DensityGrid& h, const LevyModel& model, double x_lo, double x_hi,
                               double certify_tol, Exec exec, int workers) {
    const GridInterpolant g(h);
    const TailFunctions tails = make_tails(model);
    ResidualReport r;
    r.certify_tol = certify_tol;
    double fmax = 0.0;
    for (std::size_t i = 0; i < h.xs.size(); ++i) {
        fmax = std::max(fmax, h.xs[i] * h.values[i]);
        r.sup_h = std::max(r.sup_h, h.values[i]);
    }
    if (!(fmax > 0.0)) throw ConfigError("residual: density grid is identically zero");
    r.uncovered = h.xs.front() * h.values.front() / fmax;
    if (!h.meta.upper_tail_exponent) r.uncovered += h.xs.back() * h.values.back() / fmax;
    if (r.uncovered > 1e-3)
        throw NumericError("grid_support", "x h(x) at the grid ends is " + fmt17(r.uncovered) + " of its maximum");
    for (double x : h.xs)
        if (x >= x_lo && x <= x_hi) r.xs.push_back(x);
    r.residuals = evaluate_points([&](double x) { return apply_L(g, model, tails, x); }, r.xs, exec, workers);
    double sup = 0.0;
    std::vector<double> absr(r.residuals.size());
    for (std::size_t i = 0; i < absr.size(); ++i) {
        absr[i] = std::abs(r.residuals[i]);
        sup = std::max(sup, absr[i]);
    }
    r.sup_norm = sup / r.sup_h;
    r.l1_norm = r.xs.size() >= 2 ? log_trapezoid(r.xs, absr) : 0.0;
    r.certified = r.sup_norm <= certify_tol;
    return r;
}

double residual_norm(const DensityGrid& h, const LevyModel& model) { return residual_report(h, model).sup_norm; }

json to_json(const ResidualReport& r) {
    json j;
    j["sup_h"] = r.sup_h;
    j["sup_norm"] = r.sup_norm;
    j["l1_norm"] = r.l1_norm;
    j["uncovered"] = r.uncovered;
    j["certify_tol"] = r.certify_tol;
    j["certified"] = r.certified;
    json rows = json::array();
    for (std::size_t i = 0; i < r.xs.size(); ++i) rows.push_back({{"x", r.xs[i]}, {"residual", r.residuals[i]}});
    j["residuals"] = rows;
    return j;
}

MellinOperatorCheck mellin_operator_check(const DensityGrid& kappa, const LevyModel& model, double z, Exec exec) {
    if (!(z > 0.0)) throw ConfigError("mellin_operator_check: z must be positive");
    const GridInterpolant g(kappa);
    const TailFunctions tails = make_tails(model);
    const std::vector<double> lk =
        evaluate_points([&](double x) { return apply_L(g, model, tails, x); }, kappa.xs, exec);
    std::vector<double> a(kappa.xs.size());
    std::vector<double> m0(kappa.xs.size());
    std::vector<double> m1(kappa.xs.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = kappa.xs[i];
        a[i] = std::pow(x, z - 1.0) * lk[i];
        m0[i] = std::pow(x, z - 1.0) * kappa.values[i];
        m1[i] = std::pow(x, z) * kappa.values[i];
    }
    MellinOperatorCheck c;
    c.z = z;
    // L kappa is flat near 0, so the piece below the grid is L kappa(x_lo) x_lo^z / z
    c.lhs = log_trapezoid(kappa.xs, a) + lk.front() * std::pow(kappa.xs.front(), z) / z;
    double mz = log_trapezoid(kappa.xs, m0);
    double mz1 = log_trapezoid(kappa.xs, m1);
    // below the grid kappa follows the power law through its first two points
    const double v0 = kappa.values[0];
    const double v1 = kappa.values[1];
    if (v0 > 0.0 && v1 > 0.0) {
        const double xl = kappa.xs.front();
        const double q = std::log(v1 / v0) / std::log(kappa.xs[1] / xl);
        if (z + q > 0.0) {
            mz += v0 * std::pow(xl, z) / (z + q);
            mz1 += v0 * std::pow(xl, z + 1.0) / (z + 1.0 + q);
        }
    }
    // power tail beyond the grid: kappa ~ x^{-p}, L kappa ~ x^{1-p}
    if (kappa.meta.upper_tail_exponent) {
        const double p = *kappa.meta.upper_tail_exponent;
        const double xh = kappa.xs.back();
        if (!(z + 1.0 < p)) throw ConfigError("mellin_operator_check: need z + 1 below the tail exponent");
        mz += kappa.values.back() * std::pow(xh, z) / (p - z);
        mz1 += kappa.values.back() * std::pow(xh, z + 1.0) / (p - z - 1.0);
        c.lhs += lk.back() * std::pow(xh, z) / (p - 1.0 - z);
    }
    c.rhs = psi(model, z) / (z * z) * mz1 + mz / z;
    return c;
}

DensityGrid kde_density(const std::vector<double>& sample, double lo, double hi, int points, double bandwidth) {
    if (sample.size() < 2) throw ConfigError("kde: sample too small");
    std::vector<double> v(sample.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(sample[i] > 0.0)) throw ConfigError("kde: sample values must be positive");
        v[i] = std::log(sample[i]);
    }
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    if (bandwidth <= 0.0) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        const double sd = std::sqrt(var / (n - 1.0));
        const double iqr = v[static_cast<std::size_t>(0.75 * (n - 1))] - v[static_cast<std::size_t>(0.25 * (n - 1))];
        bandwidth = 0.9 * std::min(sd, iqr / 1.34) * std::pow(n, -0.2);
    }
    const double b = bandwidth;
    std::vector<double> xs = log_grid(lo, hi, points);
    std::vector<double> m(xs.size());
    const double norm = 1.0 / (n * b * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double u = std::log(xs[i]);
        auto first = std::lower_bound(v.begin(), v.end(), u - 8.0 * b);
        auto last = std::upper_bound(v.begin(), v.end(), u + 8.0 * b);
        double s = 0.0;
        for (auto it = first; it != last; ++it) {
            const double d = (u - *it) / b;
            s += std::exp(-0.5 * d * d);
        }
        m[i] = s * norm / xs[i];
    }
    DensityMeta meta;
    meta.source = "kde";
    meta.params = {{"bandwidth", b}, {"n", sample.size()}};
    return make_grid(std::move(xs), std::move(m), std::move(meta));
}

std::vector<double> kde_standard_error(const std::vector<double>& sample, double lo, double hi, int points,
                                       double bandwidth, int resamples, std::uint64_t seed) {
    std::vector<double> sum(static_cast<std::size_t>(points), 0.0);
    std::vector<double> sum2(sum.size(), 0.0);
    std::vector<double> boot(sample.size());
    for (int r = 0; r < resamples; ++r) {
        Xoshiro256 rng = Xoshiro256::stream(seed, static_cast<std::uint64_t>(r));
        for (auto& b : boot) b = sample[rng() % sample.size()];
        const DensityGrid g = kde_density(boot, lo, hi, points, bandwidth);
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += g.values[i];
            sum2[i] += g.values[i] * g.values[i];
        }
    }
    std::vector<double> se(sum.size());
    for (std::size_t i = 0; i < se.size(); ++i) {
        const double mean = sum[i] / resamples;
        se[i] = std::sqrt(std::max(0.0, sum2[i] / resamples - mean * mean));
    }
    return se;
}

}  // namespace expfunc

#include "expfunc/special_fn.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "expfunc/error.hpp"
#include "expfunc/quadrature.hpp"

namespace expfunc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kEulerGamma = 0.5772156649015328606065;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

// zeta(k) - 1 for k = 2..41
constexpr std::array<double, 40> kZetaMinusOne = {
    0.64493406684822643647,     0.2020569031595942854,      0.082323233711138191516,
    0.036927755143369926331,    0.017343061984449139715,    0.0083492773819228268398,
    0.0040773561979443393787,   0.0020083928260822144179,   0.00099457512781808533715,
    0.0004941886041194645587,   0.00024608655330804829864,  0.00012271334757848914675,
    0.000061248135058704829259, 0.000030588236307020493552, 0.000015282259408651871733,
    7.6371976378997622736e-6,   3.8172932649998398565e-6,   1.9082127165539389257e-6,
    9.5396203387279611315e-7,   4.7693298678780646312e-7,   2.3845050272773299e-7,
    1.1921992596531107307e-7,   5.9608189051259479612e-8,   2.9803503514652280186e-8,
    1.4901554828365041235e-8,   7.450711789835429492e-9,    3.7253340247884570548e-9,
    1.8626597235130490064e-9,   9.3132743241966818287e-10,  4.656629065033784073e-10,
    2.328311833676505492e-10,   1.1641550172700519776e-10,  5.8207720879027008893e-11,
    2.9103850444970996869e-11,  1.4551921891041984236e-11,  7.2759598350574810145e-12,
    3.6379795473786511902e-12,  1.8189896503070659477e-12,  9.0949478402638892829e-13,
    4.547473783042154027e-13};

// B_{2k} / (2k (2k-1)), k = 1..8
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,        -1.0 / 360.0,          1.0 / 1260.0,  -1.0 / 1680.0,
    1.0 / 1188.0,      -691.0 / 360360.0,     1.0 / 156.0,   -3617.0 / 122400.0};

// ln Gamma(2 + e) for |e| <= 0.5
double log_gamma_near_two(double e) {
    double sum = 0.0;
    double p = -e;
    for (std::size_t j = 0; j < kZetaMinusOne.size(); ++j) {
        p *= -e;
        const double k = static_cast<double>(j + 2);
        const double t = kZetaMinusOne[j] * p / k;
        sum += t;
        if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    }
    return (1.0 - kEulerGamma) * e + sum;
}

double stirling_correction(double x) {
    const double r = 1.0 / x;
    const double r2 = r * r;
    double s = 0.0;
    for (int k = static_cast<int>(kStirling.size()) - 1; k >= 0; --k) s = s * r2 + kStirling[k];
    return s * r;
}

double log_gamma_large(double x) {
    return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + stirling_correction(x);
}

// Lanczos g = 7, n = 9
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

std::complex<double> log_gamma_lanczos(std::complex<double> z) {
    z -= 1.0;
    std::complex<double> a = kLanczos[0];
    const std::complex<double> t = z + 7.5;
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + static_cast<double>(i));
    return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(a);
}

std::complex<double> log_gamma_stirling(std::complex<double> z) {
    const std::complex<double> r = 1.0 / z;
    const std::complex<double> r2 = r * r;
    std::complex<double> s = 0.0;
    for (int k = static_cast<int>(kStirling.size()) - 1; k >= 0; --k) s = s * r2 + kStirling[k];
    return (z - 0.5) * std::log(z) - z + kHalfLog2Pi + s * r;
}

// Neumaier compensated accumulator.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Generic driver for series sum_n sign_n exp(logmag_n) whose envelope ratio eventually decreases.
// `term(n, logmag, sign)` fills the log-magnitude of the envelope and the signed multiplier.
template <class Term>
SeriesEvalReport sum_series(int n0, Term term, const SeriesOptions& opt, const char* name) {
    Accumulator acc;
    double rounding = 0.0;
    SeriesEvalReport rep;
    double prev_log = -std::numeric_limits<double>::infinity();
    int rising = 0;
    for (int n = n0; n < n0 + opt.max_terms; ++n) {
        double logmag = 0.0;
        double mult = 0.0;
        term(n, logmag, mult);
        const double env = std::exp(logmag);
        const double t = mult * env;
        acc.add(t);
        rounding += std::abs(t) * (4.0 + std::abs(logmag)) * kEps;
        rep.terms_used = n - n0 + 1;

        double next_log = 0.0;
        double next_mult = 0.0;
        term(n + 1, next_log, next_mult);
        const double ratio = std::exp(next_log - logmag);
        rising = (next_log >= prev_log && n > n0) ? rising + 1 : 0;
        prev_log = logmag;

        const double s = std::abs(acc.value());
        const double next_env = std::exp(next_log);
        if (ratio < 1.0 && next_env <= 1e-3 * (opt.rel_tol * s + opt.abs_tol) + kEps * kEps * s) {
            double after_log = 0.0;
            double after_mult = 0.0;
            term(n + 2, after_log, after_mult);
            const double r2 = std::min(std::exp(after_log - next_log), 0.99);
            rep.value = acc.value();
            rep.tail_bound = next_env / (1.0 - r2) + rounding;
            rep.converged = rep.tail_bound <= opt.rel_tol * std::abs(rep.value) + opt.abs_tol;
            return rep;
        }
        if (n == n0 + opt.max_terms - 1) {
            rep.value = acc.value();
            if (ratio >= 1.0 && rising >= std::min(10, opt.max_terms / 2))
                throw NumericError("series_divergence", std::string(name) + ": term ratio >= 1 persistently");
            rep.tail_bound = ratio < 1.0 ? next_env / (1.0 - ratio) + rounding
                                         : std::numeric_limits<double>::infinity();
            rep.converged = false;
        }
    }
    return rep;
}

}  // namespace

SeriesEvalReport sum_log_series(int first, const SeriesTerm& term, const SeriesOptions& opt, const char* name) {
    return sum_series(first, term, opt, name);
}

double sin_pi(double x) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
    double r = std::fmod(x, 2.0);
    if (r > 1.0) r -= 2.0;
    if (r < -1.0) r += 2.0;
    if (r > 0.5) r = 1.0 - r;
    if (r < -0.5) r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
    if (x >= 10.0) return log_gamma_large(x);
    if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
    if (x < 1.5) return log_gamma_near_two(x - 1.0) - std::log1p(x - 1.0);
    if (x <= 2.5) return log_gamma_near_two(x - 2.0);
    double y = x;
    double prod = 1.0;
    while (y > 2.5) {
        y -= 1.0;
        prod *= y;
    }
    return log_gamma_near_two(y - 2.0) + std::log(prod);
}

SignedLog log_abs_gamma(double x) {
    if (x > 0.0) return {log_gamma(x), 1};
    if (x == std::floor(x)) throw std::domain_error("log_abs_gamma: pole at non-positive integer");
    const double s = sin_pi(x);
    return {std::log(std::numbers::pi) - std::log(std::abs(s)) - log_gamma(1.0 - x), s < 0.0 ? -1 : 1};
}

double gamma_fn(double x) {
    const SignedLog g = log_abs_gamma(x);
    return g.sign * std::exp(g.log_abs);
}

double rgamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    if (x > 0.0) return std::exp(-log_gamma(x));
    return sin_pi(x) * std::exp(log_gamma(1.0 - x)) / std::numbers::pi;
}

std::complex<double> log_gamma(std::complex<double> z) {
    if (z.real() < 0.5) {
        const std::complex<double> pi = std::numbers::pi;
        return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
    }
    if (std::abs(z) > 15.0) return log_gamma_stirling(z);
    return log_gamma_lanczos(z);
}

std::complex<double> gamma_quotient(std::complex<double> a, std::complex<double> b) {
    if (a.imag() == 0.0 && b.imag() == 0.0) {
        const SignedLog la = log_abs_gamma(a.real());
        const SignedLog lb = log_abs_gamma(b.real());
        return la.sign * lb.sign * std::exp(la.log_abs - lb.log_abs);
    }
    return std::exp(log_gamma(a) - log_gamma(b));
}

double log_gamma_ratio(double a, double b, double z) {
    const double za = z + a;
    const double zb = z + b;
    if (!(za > 0.0) || !(zb > 0.0)) throw std::domain_error("gamma_ratio: pole argument");
    if (a == b) return 0.0;
    if (z > 1e4) {
        return (a - b) * std::log(z) + (za - 0.5) * std::log1p(a / z) - (zb - 0.5) * std::log1p(b / z) -
               (a - b) + (stirling_correction(za) - stirling_correction(zb));
    }
    return log_gamma(za) - log_gamma(zb);
}

double gamma_ratio(double a, double b, double z) { return std::exp(log_gamma_ratio(a, b, z)); }

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < 10000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-17) break;
        }
        return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
    return 1.0 - gamma_q(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: need a > 0, x >= 0");
    if (x < a + 1.0) return 1.0 - gamma_p(a, x);
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-17) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

SeriesEvalReport wright_1F0(double alpha, double beta, double x, SeriesOptions opt) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("wright_1F0: alpha must lie in (0,1)");
    if (x == 0.0) {
        SeriesEvalReport rep;
        rep.value = gamma_fn(beta);
        rep.terms_used = 1;
        rep.converged = true;
        return rep;
    }
    const double lx = std::log(std::abs(x));
    const bool alternating = x > 0.0;
    auto term = [&](int n, double& logmag, double& mult) {
        const double arg = alpha * n + beta;
        if (arg <= 0.0 && arg == std::floor(arg)) {
            logmag = -std::numeric_limits<double>::infinity();
            mult = 0.0;
            return;
        }
        const SignedLog g = log_abs_gamma(arg);
        logmag = g.log_abs - log_gamma(n + 1.0) + n * lx;
        mult = g.sign * ((alternating && (n & 1)) ? -1.0 : 1.0);
    };
    return sum_series(0, term, opt, "wright_1F0");
}

SeriesEvalReport stable_density(double alpha, double x, SeriesOptions opt) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("stable_density: alpha must lie in (0,1)");
    if (!(x > 0.0)) throw std::domain_error("stable_density: x must be positive");
    if (opt.rel_tol < 1e-12) opt.rel_tol = 1e-12;
    const double lx = std::log(x);
    const double log_pi = std::log(std::numbers::pi);
    auto term = [&](int n, double& logmag, double& mult) {
        logmag = log_gamma(1.0 + alpha * n) - log_gamma(n + 1.0) - (1.0 + alpha * n) * lx - log_pi;
        mult = ((n & 1) ? 1.0 : -1.0) * sin_pi(alpha * n);
    };
    SeriesEvalReport rep = sum_series(1, term, opt, "stable_density");
    if (!rep.converged)
        throw ValidityError("stable_density: x below the series-validity floor",
                            stable_series_floor(alpha, opt.rel_tol, opt.max_terms),
                            std::numeric_limits<double>::infinity());
    return rep;
}

SeriesEvalReport stable_survival(double alpha, double x, SeriesOptions opt) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("stable_survival: alpha must lie in (0,1)");
    if (!(x > 0.0)) throw std::domain_error("stable_survival: x must be positive");
    if (opt.rel_tol < 1e-12) opt.rel_tol = 1e-12;
    const double lx = std::log(x);
    const double log_pi = std::log(std::numbers::pi);
    auto term = [&](int n, double& logmag, double& mult) {
        logmag = log_gamma(alpha * n) - log_gamma(n + 1.0) - alpha * n * lx - log_pi;
        mult = ((n & 1) ? 1.0 : -1.0) * sin_pi(alpha * n);
    };
    // survival values near 1 need an absolute floor on accuracy
    opt.abs_tol = std::max(opt.abs_tol, opt.rel_tol);
    SeriesEvalReport rep = sum_series(1, term, opt, "stable_survival");
    if (!rep.converged)
        throw ValidityError("stable_survival: x below the series-validity floor",
                            stable_series_floor(alpha, opt.rel_tol, opt.max_terms),
                            std::numeric_limits<double>::infinity());
    return rep;
}

double kanter_a(double alpha, double phi) {
    if (phi < 1e-8) return std::pow(alpha, alpha / (1.0 - alpha)) * (1.0 - alpha);
    const double s1 = std::sin(alpha * phi);
    const double s2 = std::sin((1.0 - alpha) * phi);
    const double s0 = std::sin(phi);
    return std::pow(s1, alpha / (1.0 - alpha)) * s2 / std::pow(s0, 1.0 / (1.0 - alpha));
}

double stable_density_integral(double alpha, double x) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("stable_density_integral: alpha must lie in (0,1)");
    if (!(x > 0.0)) throw std::domain_error("stable_density_integral: x must be positive");
    const double c = std::pow(x, -alpha / (1.0 - alpha));
    auto f = [&](double phi) {
        if (phi <= 0.0 || phi >= std::numbers::pi) return 0.0;
        const double a = kanter_a(alpha, phi);
        const double e = a * c;
        if (!std::isfinite(e) || e > 745.0) return 0.0;
        return e * std::exp(-e);
    };
    const double v = integrate(f, 0.0, std::numbers::pi, 1e-13);
    return alpha / (1.0 - alpha) / x / std::numbers::pi * v;
}

double stable_series_floor(double alpha, double rel_tol, int max_terms) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("stable_series_floor: alpha must lie in (0,1)");
    SeriesOptions opt;
    opt.rel_tol = std::max(rel_tol, 1e-12);
    opt.max_terms = max_terms;
    auto ok = [&](double x) {
        const double l = std::log(x);
        const double log_pi = std::log(std::numbers::pi);
        auto term = [&](int n, double& logmag, double& mult) {
            logmag = log_gamma(1.0 + alpha * n) - log_gamma(n + 1.0) - (1.0 + alpha * n) * l - log_pi;
            mult = ((n & 1) ? 1.0 : -1.0) * sin_pi(alpha * n);
        };
        try {
            return sum_series(1, term, opt, "stable_density").converged;
        } catch (const NumericError&) {
            return false;
        }
    };
    double lo = std::log(1e-8);
    double hi = std::log(1e4);
    if (ok(std::exp(lo))) return std::exp(lo);
    if (!ok(std::exp(hi))) return std::numeric_limits<double>::infinity();
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ok(std::exp(mid)))
            hi = mid;
        else
            lo = mid;
    }
    return std::exp(hi);
}

}  // namespace expfunc

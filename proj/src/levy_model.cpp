#include "expfunc/levy_model.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "expfunc/error.hpp"
#include "expfunc/special_fn.hpp"

namespace expfunc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

cplx laplace_of(const RealFn& g, cplx s) {
    // int_0^inf e^{-s y} g(y) dy
    auto weighted = [&](double y, double w) {
        const double gy = g(y);
        return gy == 0.0 ? 0.0 : std::exp(-s.real() * y) * w * gy;
    };
    if (s.imag() == 0.0) return integrate_to_infinity([&](double y) { return weighted(y, 1.0); }, 0.0, 1e-11);
    const double re = integrate_to_infinity([&](double y) { return weighted(y, std::cos(s.imag() * y)); }, 0.0, 1e-11);
    const double im = integrate_to_infinity([&](double y) { return weighted(y, -std::sin(s.imag() * y)); }, 0.0, 1e-11);
    return {re, im};
}

cplx dtail_laplace(const JumpSpec& spec, cplx s) {
    cplx acc = 0.0;
    for (const auto& c : spec.components) {
        if (c.exponential())
            acc += (c.exp_c / c.exp_lambda) / (c.exp_lambda + s);
        else
            acc += laplace_of(c.double_tail, s);
    }
    return acc;
}

cplx psi_triplet(const LevyTriplet& t, cplx z) {
    cplx v = t.mean * z + 0.5 * t.sigma2 * z * z;
    if (!t.positive.empty()) v += z * z * dtail_laplace(t.positive, -z);
    if (!t.negative.empty()) v += z * z * dtail_laplace(t.negative, z);
    return v;
}


double log_expm1(double t) { return t > 30.0 ? t + std::log1p(-std::exp(-t)) : std::log(std::expm1(t)); }

}  // namespace

JumpComponent JumpComponent::make_exponential(double c, double lambda) {
    if (!(c >= 0.0) || !(lambda > 0.0)) throw ConfigError("exponential jumps need c >= 0 and lambda > 0");
    JumpComponent j;
    j.tag = "exponential";
    j.exp_c = c;
    j.exp_lambda = lambda;
    j.tail = [c, lambda](double y) { return c * std::exp(-lambda * y); };
    j.double_tail = [c, lambda](double y) { return c / lambda * std::exp(-lambda * y); };
    j.inverse_tail = [c, lambda](double v) { return std::log(c / v) / lambda; };
    return j;
}

double JumpSpec::tail(double y) const {
    double s = 0.0;
    for (const auto& c : components) s += c.tail(y);
    return s;
}

double JumpSpec::double_tail(double y) const {
    double s = 0.0;
    for (const auto& c : components) s += c.double_tail(y);
    return s;
}

double JumpSpec::dtail_laplace(double s) const { return expfunc::dtail_laplace(*this, cplx(s, 0.0)).real(); }

LevyTriplet make_triplet(double mean, double sigma2, JumpSpec positive, JumpSpec negative) {
    if (!(sigma2 >= 0.0)) throw ConfigError("sigma2 must be nonnegative");
    if (!std::isfinite(mean) || !(mean < 0.0)) throw ConfigError("mean must be finite and negative");
    LevyTriplet t;
    t.mean = mean;
    t.sigma2 = sigma2;
    t.positive = std::move(positive);
    t.negative = std::move(negative);
    double big_pos = 0.0;
    double big_neg = 0.0;
    if (!t.positive.empty()) big_pos = t.positive.tail(1.0) + t.positive.double_tail(1.0);
    if (!t.negative.empty()) big_neg = t.negative.tail(1.0) + t.negative.double_tail(1.0);
    t.drift_b = mean - big_pos + big_neg;
    return t;
}

double LadderPair::psi_plus(double s) const { return -s * ascending(-s); }

// ---------------------------------------------------------------- gamma-power subordinator

double gamma_power_density(double alpha, double y) {
    const double t = y / alpha;
    const double l = t - (2.0 - alpha) * log_expm1(t);
    return (1.0 - alpha) / (alpha * gamma_fn(alpha + 1.0)) * std::exp(l);
}

double gamma_power_tail(double alpha, double y) {
    return std::exp((alpha - 1.0) * log_expm1(y / alpha)) / gamma_fn(alpha + 1.0);
}

double gamma_power_tail_inverse(double alpha, double v) {
    return alpha * std::log1p(std::pow(gamma_fn(alpha + 1.0) * v, 1.0 / (alpha - 1.0)));
}

double gamma_power_tail_integral(double alpha, double y) {
    return integrate_to_infinity([alpha](double u) { return gamma_power_tail(alpha, u); }, y, 1e-12);
}

// ---------------------------------------------------------------- ladder exponents

LadderExponent descending_pure_drift(double delta) {
    if (!(delta > 0.0)) throw ConfigError("descending drift must be positive");
    LadderExponent e;
    e.side = LadderExponent::Side::descending;
    e.tag = "pure_drift";
    e.drift_delta = delta;
    e.exponent = [delta](cplx z) { return -delta * z; };
    e.class_p = true;
    return e;
}

LadderExponent descending_gamma_power(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    LadderExponent e;
    e.side = LadderExponent::Side::descending;
    e.tag = "gamma_power";
    e.exponent = [alpha](cplx z) {
        if (z == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
        return -z * gamma_quotient(alpha * (z - 1.0) + 1.0, alpha * z + 1.0);
    };
    e.levy_density = [alpha](double y) { return gamma_power_density(alpha, y); };
    e.tail = [alpha](double y) { return gamma_power_tail(alpha, y); };
    e.tail_integral = [alpha](double y) { return gamma_power_tail_integral(alpha, y); };
    e.inverse_tail = [alpha](double v) { return gamma_power_tail_inverse(alpha, v); };
    e.class_p = true;
    e.strip_lo = 1.0 - 1.0 / alpha;
    return e;
}

LadderExponent descending_stable(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    LadderExponent e;
    e.side = LadderExponent::Side::descending;
    e.tag = "stable_transform";
    e.exponent = [alpha](cplx z) {
        if (z == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
        return -z / (1.0 + z) * gamma_quotient(alpha * (z + 1.0) + 1.0, alpha * z + 1.0);
    };
    e.class_p = true;
    e.strip_lo = -1.0;
    return e;
}

LadderExponent ascending_pure_kill(double k_plus) {
    if (!(k_plus > 0.0)) throw ConfigError("ascending kill must be positive");
    LadderExponent e;
    e.side = LadderExponent::Side::ascending;
    e.tag = "pure_kill";
    e.kill = k_plus;
    e.exponent = [k_plus](cplx) { return cplx(-k_plus, 0.0); };
    e.class_p = true;
    return e;
}

LadderExponent ascending_linear(double delta_plus, double k_plus) {
    if (!(delta_plus >= 0.0)) throw ConfigError("ascending drift must be nonnegative");
    LadderExponent e;
    e.side = LadderExponent::Side::ascending;
    e.tag = "linear";
    e.drift_delta = delta_plus;
    e.kill = k_plus;
    e.exponent = [delta_plus, k_plus](cplx z) { return delta_plus * z - k_plus; };
    e.class_p = true;
    return e;
}

LadderExponent ascending_exponential(double delta_plus, double k_plus, double c_minus, double lambda) {
    if (!(delta_plus >= 0.0) || !(c_minus >= 0.0) || !(lambda > 0.0))
        throw ConfigError("ascending exponential ladder needs delta >= 0, c >= 0, lambda > 0");
    LadderExponent e;
    e.side = LadderExponent::Side::ascending;
    e.tag = "exponential";
    e.drift_delta = delta_plus;
    e.kill = k_plus;
    e.exponent = [=](cplx z) { return -k_plus + delta_plus * z + c_minus * z / (lambda - z); };
    e.levy_density = [=](double y) { return c_minus * lambda * std::exp(-lambda * y); };
    e.tail = [=](double y) { return c_minus * std::exp(-lambda * y); };
    e.class_p = true;
    e.strip_hi = lambda;
    return e;
}

LadderExponent ascending_gamma_ratio(double alpha_prime) {
    if (!(alpha_prime > 0.0 && alpha_prime < 1.0)) throw ConfigError("alpha_prime must lie in (0,1)");
    LadderExponent e;
    e.side = LadderExponent::Side::ascending;
    e.tag = "gamma_ratio";
    e.kill = rgamma(1.0 - alpha_prime);
    e.exponent = [alpha_prime](cplx z) {
        return -gamma_quotient(1.0 - alpha_prime * z, 1.0 - alpha_prime - alpha_prime * z);
    };
    e.class_p = true;
    e.strip_hi = 1.0 / alpha_prime;
    return e;
}

LadderExponent dual_ascending(const LadderExponent& desc) {
    if (desc.side != LadderExponent::Side::descending) throw ConfigError("dual_ascending needs a descending exponent");
    LadderExponent e;
    e.side = LadderExponent::Side::ascending;
    e.tag = "dual_" + desc.tag;
    e.drift_delta = desc.drift_delta;
    e.kill = -desc(1.0);
    const ComplexFn phi = desc.exponent;
    e.exponent = [phi](cplx z) { return phi(1.0 - z); };
    if (desc.levy_density) {
        const RealFn mu = desc.levy_density;
        e.levy_density = [mu](double y) { return std::exp(-y) * mu(y); };
        e.tail = [mu](double y) {
            return integrate_to_infinity([&](double u) { return std::exp(-u) * mu(u); }, y, 1e-12);
        };
    }
    e.class_p = desc.class_p;
    e.strip_hi = 1.0 - desc.strip_lo;
    return e;
}

// ---------------------------------------------------------------- checks

bool is_class_p(const LadderExponent& e) {
    if (!e.levy_density) return e.class_p;
    double prev = kInf;
    for (int i = 0; i < 64; ++i) {
        const double y = 1e-6 * std::pow(1e9, i / 63.0);
        const double d = e.levy_density(y);
        if (!(d >= 0.0)) return false;
        if (d > prev * (1.0 + 1e-12)) return false;
        prev = d;
    }
    return true;
}

double small_jump_integral(const LadderExponent& e) {
    if (!e.tail) return 0.0;
    const RealFn tail = e.tail;
    return integrate([&](double y) { return tail(y); }, 0.0, 1.0, 1e-10);
}

double derivative_at_zero(const LadderExponent& e, double h) {
    const double scale = std::max(1.0, std::abs(e(1.0)));
    const double step = h * scale;
    return (e(step) - e(-step)) / (2.0 * step);
}

LadderPair build_from_ladders(const LadderExponent& asc, const LadderExponent& desc) {
    if (asc.side != LadderExponent::Side::ascending || desc.side != LadderExponent::Side::descending)
        throw ConfigError("build_from_ladders: sides are swapped");
    if (!(asc.kill > 0.0)) throw ConfigError("build_from_ladders: ascending kill must be positive");
    if (!asc.class_p || !is_class_p(asc)) throw ConfigError("build_from_ladders: ascending Levy density is not non-increasing");
    if (!desc.class_p || !is_class_p(desc))
        throw ConfigError("build_from_ladders: descending Levy density is not non-increasing");
    LadderPair p{asc, desc};
    const double mean = p.k_plus() * derivative_at_zero(desc);
    if (!std::isfinite(mean) || !(mean < 0.0)) throw NumericError("negative_finite_mean", "derived mean is " + std::to_string(mean));
    return p;
}

// ---------------------------------------------------------------- families

namespace {

LevyModel with_ladders(LevyModel m, const LadderExponent& asc, const LadderExponent& desc) {
    m.ladders = build_from_ladders(asc, desc);
    m.strip_lo = std::max(m.strip_lo, desc.strip_lo);
    m.strip_hi = std::min(m.strip_hi, asc.strip_hi);
    return m;
}

}  // namespace

LevyModel brownian_drift(double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    LevyModel m;
    m.family = "brownian_drift";
    m.params = BrownianDrift{gamma};
    m.triplet = make_triplet(-gamma, 2.0, {}, {});
    m.psi_closed = [gamma](cplx z) { return z * z - gamma * z; };
    m.mean = -gamma;
    m.spectrally_negative = true;
    return with_ladders(std::move(m), ascending_linear(1.0, gamma), descending_pure_drift(1.0));
}

LevyModel spectrally_negative(double mean, double sigma2, double c_neg, double lambda_neg) {
    JumpSpec neg;
    if (c_neg > 0.0) neg.components.push_back(JumpComponent::make_exponential(c_neg, lambda_neg));
    LevyModel m;
    m.family = "spectrally_negative";
    m.triplet = make_triplet(mean, sigma2, {}, neg);
    const LevyTriplet t = *m.triplet;
    m.psi_closed = [t](cplx z) { return psi_triplet(t, z); };
    m.mean = mean;
    m.spectrally_negative = true;
    if (c_neg > 0.0) m.strip_lo = -lambda_neg;
    const double radius = sigma2 > 0.0 ? kInf : mean + c_neg / lambda_neg;
    if (!(radius > 0.0)) throw ConfigError("spectrally_negative: Psi never becomes positive on (0, inf)");
    m.params = SpectrallyNegative{m.psi_closed, 0.0, std::nullopt, radius};
    const double gamma = find_gamma(m);
    std::get<SpectrallyNegative>(m.params).gamma = gamma;

    const ComplexFn psi_fn = m.psi_closed;
    LadderExponent desc;
    desc.side = LadderExponent::Side::descending;
    desc.tag = "spectrally_negative_quotient";
    desc.drift_delta = 0.5 * sigma2;
    desc.exponent = [psi_fn, gamma](cplx z) {
        if (std::abs(z - gamma) < 1e-7 * std::max(1.0, gamma)) {
            const double h = 1e-5 * std::max(1.0, gamma);
            return -(psi_fn(gamma + h) - psi_fn(gamma - h)) / (2.0 * h);
        }
        return -psi_fn(z) / (z - gamma);
    };
    desc.class_p = true;
    desc.strip_lo = m.strip_lo;
    return with_ladders(std::move(m), ascending_linear(1.0, gamma), desc);
}

LevyModel gamma_power_example(double alpha, double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    const LadderExponent desc = descending_gamma_power(alpha);
    LevyModel m;
    m.family = "gamma_power_example";
    m.psi_closed = [desc, gamma](cplx z) { return -(z - gamma) * desc(z); };
    m.mean = -gamma * gamma_fn(1.0 - alpha);
    m.spectrally_negative = true;

    JumpSpec neg;
    JumpComponent a;
    a.tag = "gamma_power_density";
    a.tail = [alpha](double y) { return gamma_power_density(alpha, y); };
    a.double_tail = [alpha](double y) { return gamma_power_tail(alpha, y); };
    JumpComponent b;
    b.tag = "gamma_power_tail";
    b.tail = [alpha, gamma](double y) { return gamma * gamma_power_tail(alpha, y); };
    b.double_tail = [alpha, gamma](double y) { return gamma * gamma_power_tail_integral(alpha, y); };
    b.inverse_tail = [alpha, gamma](double v) { return gamma_power_tail_inverse(alpha, v / gamma); };
    neg.components = {a, b};
    m.triplet = make_triplet(m.mean, 0.0, {}, neg);
    m.params = SpectrallyNegative{m.psi_closed, gamma, alpha, kInf};
    return with_ladders(std::move(m), ascending_linear(1.0, gamma), desc);
}

std::pair<double, double> find_theta_roots(const ExpPositiveJumps& p) {
    const double d = p.delta_plus;
    const double k = p.k_plus;
    const double c = p.c_minus;
    const double l = p.lambda;
    if (!(d > 0.0 && k > 0.0 && c > 0.0 && l > 0.0))
        throw ConfigError("find_theta_roots: delta_plus, k_plus, c_minus, lambda must be positive");
    const double b = d * l + k + c;
    const double disc = b * b - 4.0 * d * k * l;
    if (disc < 0.0) throw NumericError("theta_root_ordering", "complex roots");
    const double s = b + std::sqrt(disc);
    const double t1 = 2.0 * k * l / s;
    const double t2 = s / (2.0 * d);
    if (!(0.0 < t1 && t1 < l && l < t2)) throw NumericError("theta_root_ordering", "need 0 < theta1 < lambda < theta2");
    for (double t : {t1, t2}) {
        const double v = d * t * t - k * t + c * t * t / (l - t);
        const double scale = d * t * t + k * t + std::abs(c * t * t / (l - t));
        if (std::abs(v) > 1e-10 * scale) throw NumericError("theta_root_residual", "psi_+ does not vanish at the root");
    }
    return {t1, t2};
}

LevyModel exp_positive_jumps(double delta_plus, double k_plus, double c_minus, double lambda,
                             std::optional<double> alpha, double delta_minus) {
    ExpPositiveJumps p;
    p.delta_plus = delta_plus;
    p.k_plus = k_plus;
    p.c_minus = c_minus;
    p.lambda = lambda;
    p.alpha = alpha;
    p.delta_minus = delta_minus;
    std::tie(p.theta1, p.theta2) = find_theta_roots(p);
    const LadderExponent asc = ascending_exponential(delta_plus, k_plus, c_minus, lambda);
    const LadderExponent desc = alpha ? descending_gamma_power(*alpha) : descending_pure_drift(delta_minus);
    p.c = -c_minus * desc(lambda);

    LevyModel m;
    m.family = "exp_positive_jumps";
    m.spectrally_negative = false;
    if (!alpha) {
        JumpSpec pos;
        pos.components.push_back(JumpComponent::make_exponential(p.c, lambda));
        m.triplet = make_triplet(-delta_minus * k_plus, 2.0 * delta_plus * delta_minus, pos, {});
        const LevyTriplet t = *m.triplet;
        m.psi_closed = [t](cplx z) { return psi_triplet(t, z); };
    } else {
        m.psi_closed = [asc, desc](cplx z) { return -asc(z) * desc(z); };
    }
    m.mean = k_plus * derivative_at_zero(desc);
    if (alpha) m.mean = -k_plus * gamma_fn(1.0 - *alpha);
    m.params = p;
    m.strip_hi = lambda;
    return with_ladders(std::move(m), asc, desc);
}

LevyModel stable_ladder(double alpha, StableLadderVariant ascending) {
    const LadderExponent desc = descending_stable(alpha);
    LadderExponent asc;
    if (const auto* pk = std::get_if<PureKill>(&ascending))
        asc = ascending_pure_kill(pk->k_plus);
    else
        asc = ascending_gamma_ratio(std::get<GammaRatioAscending>(ascending).alpha_prime);
    StableLadder p{alpha, ascending, asc.kill};
    LevyModel m;
    m.family = "stable_ladder";
    m.params = p;
    m.psi_closed = [asc, desc](cplx z) { return -asc(z) * desc(z); };
    m.mean = -asc.kill * gamma_fn(1.0 + alpha);
    return with_ladders(std::move(m), asc, desc);
}

LevyModel ascending_process(const LadderExponent& asc) {
    if (asc.side != LadderExponent::Side::ascending) throw ConfigError("ascending_process needs an ascending exponent");
    LevyModel m;
    m.family = "ascending_process_" + asc.tag;
    JumpSpec pos;
    if (asc.levy_density) {
        JumpComponent j;
        j.tag = "ladder_density";
        j.tail = asc.levy_density;
        j.double_tail = asc.tail;
        if (asc.tag == "exponential") {
            const double lam = asc.strip_hi;
            const double c = asc.levy_density(0.0);
            j = JumpComponent::make_exponential(c, lam);
        }
        pos.components.push_back(j);
    }
    m.triplet = make_triplet(-asc.kill, 2.0 * asc.drift_delta, pos, {});
    const ComplexFn phi = asc.exponent;
    m.psi_closed = [phi](cplx z) { return z * phi(z); };
    m.mean = -asc.kill;
    m.strip_hi = asc.strip_hi;
    return m;
}

LevyModel descending_process(const LadderExponent& desc) {
    if (desc.side != LadderExponent::Side::descending) throw ConfigError("descending_process needs a descending exponent");
    LevyModel m;
    m.family = "descending_process_" + desc.tag;
    JumpSpec neg;
    if (desc.tail) {
        JumpComponent j;
        j.tag = "ladder_tail";
        j.tail = desc.tail;
        if (desc.tail_integral) {
            j.double_tail = desc.tail_integral;
        } else {
            const RealFn tail = desc.tail;
            j.double_tail = [tail](double y) { return integrate_to_infinity(tail, y, 1e-12); };
        }
        j.inverse_tail = desc.inverse_tail;
        neg.components.push_back(j);
    }
    m.mean = derivative_at_zero(desc);
    m.triplet = make_triplet(m.mean, 0.0, {}, neg);
    m.psi_closed = desc.exponent;
    m.strip_lo = desc.strip_lo;
    return m;
}

// ---------------------------------------------------------------- exponent evaluation

cplx psi(const LevyModel& model, cplx z) {
    if (!(z.real() > model.strip_lo && z.real() < model.strip_hi))
        throw ValidityError("psi: Re z outside the analyticity strip", model.strip_lo, model.strip_hi);
    if (model.psi_closed) return model.psi_closed(z);
    if (model.triplet) return psi_triplet(*model.triplet, z);
    throw ConfigError("psi: model has neither a closed form nor a triplet");
}

double psi(const LevyModel& model, double z) { return psi(model, cplx(z, 0.0)).real(); }

double find_gamma(const LevyModel& model) {
    if (!model.spectrally_negative) throw ConfigError("find_gamma: model is not spectrally negative");
    if (!(model.mean < 0.0)) throw ConfigError("find_gamma: mean must be negative");
    auto f = [&](double s) { return psi(model, s); };
    const double hi_limit = std::min(model.strip_hi, 1e12);
    double lo = 1.0;
    double hi = 1.0;
    double flo = f(lo);
    if (flo == 0.0) return lo;
    if (flo < 0.0) {
        double fhi = flo;
        int k = 0;
        while (fhi < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (++k > 60 || hi >= hi_limit) throw NumericError("gamma_bracket", "no sign change within bracket growth limit");
            fhi = f(hi);
        }
        if (fhi == 0.0) return hi;
    } else {
        int k = 0;
        while (flo >= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (++k > 60) throw NumericError("gamma_bracket", "no sign change within bracket growth limit");
            flo = f(lo);
        }
    }
    auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    const double g = 0.5 * (r.first + r.second);
    if (std::abs(f(g)) > 1e-10) throw NumericError("gamma_root_residual", "|Psi(gamma)| exceeds 1e-10");
    return g;
}

double wiener_hopf_defect(const LevyModel& model, int points) {
    if (!model.ladders) throw ConfigError("wiener_hopf_defect: model has no ladder pair");
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = -5.0 + 10.0 * i / (points - 1);
        const cplx z(0.0, t);
        const cplx d = psi(model, z) + model.ladders->ascending(z) * model.ladders->descending(z);
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

}  // namespace expfunc

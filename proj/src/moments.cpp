#include "expfunc/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "expfunc/error.hpp"
#include "expfunc/quadrature.hpp"
#include "expfunc/rng.hpp"
#include "expfunc/special_fn.hpp"

namespace expfunc {

double MomentTable::at(int m) const {
    for (const auto& [k, v] : values)
        if (k == m) return v;
    throw std::out_of_range("MomentTable: order not tabulated");
}

MomentTable moments_H(const LadderExponent& desc, int m_max) {
    if (m_max < 0) throw ConfigError("m_max must be nonnegative");
    MomentTable t;
    t.kind = MomentKind::positive_of_IHminus;
    t.params = desc.tag;
    t.values.emplace_back(0, 1.0);
    double v = 1.0;
    for (int k = 1; k <= m_max; ++k) {
        const double phi = desc(static_cast<double>(k));
        if (!(phi < 0.0)) throw NumericError("descending_exponent_sign", "phi_-(" + std::to_string(k) + ") >= 0");
        v *= k / -phi;
        t.values.emplace_back(k, v);
    }
    return t;
}

MomentTable neg_moments_Y(const LadderPair& pair, int m_max) {
    if (m_max < 0) throw ConfigError("m_max must be nonnegative");
    MomentTable t;
    t.kind = MomentKind::negative_of_IY;
    t.params = pair.ascending.tag;
    t.values.emplace_back(0, 1.0);
    const double kp = pair.k_plus();
    if (!(kp > 0.0)) throw NumericError("ascending_kill_positive", "k_+ must be positive");
    double v = kp;
    for (int m = 1; m <= m_max; ++m) {
        if (m >= 2) {
            const double p = pair.psi_plus(m - 1.0);
            if (!(p > 0.0)) throw NumericError("psi_plus_positive", "psi_+(-" + std::to_string(m - 1) + ") <= 0");
            v *= p / (m - 1.0);
        }
        t.values.emplace_back(m, v);
    }
    return t;
}

double fractional_moment_H(const LadderExponent& desc, double s, int terms) {
    if (!(s >= 0.0)) throw ConfigError("fractional_moment_H: order must be nonnegative");
    if (s == 0.0) return 1.0;
    auto F = [&](double u) { return std::log(-desc(u)); };
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) sum += F(k) - F(k + s);
    const double a = terms + 0.5;
    const double b = a + s;
    const int panels = static_cast<int>(std::ceil(s)) + 1;
    const double tail = gauss_legendre(F, a, b, panels);
    // midpoint-rule correction, -(F'(b) - F'(a)) / 24
    const double h = 1e-3 * a;
    const double dfa = (F(a + h) - F(a - h)) / (2.0 * h);
    const double dfb = (F(b + h) - F(b - h)) / (2.0 * h);
    const double log_w = sum + tail - (dfb - dfa) / 24.0;
    return std::exp(log_gamma(s + 1.0) - log_w);
}

std::vector<double> mellin_recursion_residual(const std::function<double(double)>& M, const LevyModel& model,
                                              const std::vector<double>& z_grid) {
    std::vector<double> r;
    r.reserve(z_grid.size());
    for (double z : z_grid) {
        const double p = psi(model, z);
        if (p == 0.0) throw NumericError("mellin_grid_avoids_root", "Psi vanishes at z = " + fmt17(z));
        r.push_back(M(z + 1.0) + z / p * M(z));
    }
    return r;
}

std::vector<MellinResidual> mc_mellin_residuals(const std::vector<double>& sample, const LevyModel& model,
                                                const std::vector<double>& z_grid, int resamples,
                                                std::uint64_t seed) {
    if (sample.empty()) throw ConfigError("mc_mellin_residuals: empty sample");
    const std::size_t n = sample.size();
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sample[i] > 0.0)) throw NumericError("sample_positive", "non-positive sample value");
        logs[i] = std::log(sample[i]);
    }
    auto residual = [&](double z, const std::vector<std::size_t>* idx) {
        double a = 0.0;
        double b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double l = logs[idx ? (*idx)[i] : i];
            a += std::exp(z * l);
            b += std::exp((z - 1.0) * l);
        }
        return (a + z / psi(model, z) * b) / static_cast<double>(n);
    };
    std::vector<MellinResidual> out;
    for (double z : z_grid) out.push_back({z, residual(z, nullptr), 0.0});
    std::vector<double> sum(z_grid.size(), 0.0);
    std::vector<double> sum2(z_grid.size(), 0.0);
    std::vector<std::size_t> idx(n);
    for (int b = 0; b < resamples; ++b) {
        Xoshiro256 rng = Xoshiro256::stream(seed, static_cast<std::uint64_t>(b));
        for (auto& i : idx) i = static_cast<std::size_t>(rng() % n);
        for (std::size_t j = 0; j < z_grid.size(); ++j) {
            const double r = residual(z_grid[j], &idx);
            sum[j] += r;
            sum2[j] += r * r;
        }
    }
    for (std::size_t j = 0; j < z_grid.size(); ++j) {
        const double mean = sum[j] / resamples;
        out[j].standard_error = std::sqrt(std::max(0.0, sum2[j] / resamples - mean * mean));
    }
    return out;
}

double factorized_neg_first_moment(const LadderPair& pair) {
    return pair.k_plus() * (-derivative_at_zero(pair.descending));
}

double carleman_partial_sum(const MomentTable& t) {
    double s = 0.0;
    for (const auto& [m, v] : t.values)
        if (m > 0) s += std::pow(v, -1.0 / (2.0 * m));
    return s;
}

const char* kind_name(MomentKind k) {
    switch (k) {
        case MomentKind::positive_of_IHminus:
            return "positive_of_IHminus";
        case MomentKind::negative_of_IY:
            return "negative_of_IY";
        case MomentKind::factorized_Ixi:
            return "factorized_Ixi";
    }
    return "unknown";
}

std::string to_csv(const MomentTable& t) {
    std::string out = "order,value\n";
    for (const auto& [m, v] : t.values) out += std::to_string(m) + "," + fmt17(v) + "\n";
    return out;
}

json to_json(const MomentTable& t) {
    json j;
    j["kind"] = kind_name(t.kind);
    j["params"] = t.params;
    json rows = json::array();
    for (const auto& [m, v] : t.values) rows.push_back({{"order", m}, {"value", v}});
    j["values"] = rows;
    return j;
}

}  // namespace expfunc

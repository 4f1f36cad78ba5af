#include "config.hpp"

#include <set>
#include <sstream>

#include "expfunc/error.hpp"
#include "expfunc/io.hpp"

namespace expfunc::cli {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "family",     "gamma",         "alpha",          "alpha_prime",    "ascending",     "k_plus",
        "mean",       "sigma2",        "c_neg",          "lambda_neg",     "delta_plus",    "c_minus",
        "lambda",     "delta_minus",   "m_max",          "perturb_k_plus", "density_csv",   "grid",
        "dt",         "tail_eps",      "max_time",       "eps_jump",       "max_jump_rate", "scheme",
        "horizon",    "fixed_T",       "significance",   "residual_tol",   "mellin_tol",    "mc_resamples",
        "sampler",    "gamma_shift",   "operator_identity_tol"};
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string Config::text(const std::string& key, const std::string& fallback) const {
    const auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second;
}

std::optional<double> Config::optional_number(const std::string& key) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(source + ": '" + key + "' is not a number: " + it->second);
    }
}

double Config::number(const std::string& key, double fallback) const {
    return optional_number(key).value_or(fallback);
}

long Config::integer(const std::string& key, long fallback) const {
    const auto v = optional_number(key);
    if (!v) return fallback;
    if (*v != static_cast<double>(static_cast<long>(*v))) throw ConfigError(source + ": '" + key + "' must be an integer");
    return static_cast<long>(*v);
}

Config parse_config(const std::string& text, const std::string& source) {
    Config c;
    c.source = source;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty value for '" + key + "'");
        if (c.entries.count(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        c.entries[key] = value;
    }
    if (!c.has("family")) throw ConfigError(source + ": missing 'family'");
    return c;
}

Config load_config(const std::string& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const std::exception& e) {
        throw ConfigError("cannot read config " + path + ": " + e.what());
    }
    return parse_config(text, path);
}

LevyModel build_model_shifted(const Config& c, double shift) {
    const std::string f = c.text("family", "");
    if (f == "brownian") return brownian_drift(c.number("gamma", 1.0) + shift);
    if (f == "gamma_power_example") return gamma_power_example(c.number("alpha", 0.5), c.number("gamma", 1.0) + shift);
    if (shift != 0.0) throw ConfigError("gamma_shift needs a family with a gamma parameter");
    if (f == "spectrally_negative")
        return spectrally_negative(c.number("mean", -1.0), c.number("sigma2", 0.0), c.number("c_neg", 0.0),
                                   c.number("lambda_neg", 1.0));
    if (f == "exp_positive_jumps")
        return exp_positive_jumps(c.number("delta_plus", 1.0), c.number("k_plus", 1.0), c.number("c_minus", 1.0),
                                  c.number("lambda", 1.0), c.optional_number("alpha"), c.number("delta_minus", 1.0));
    if (f == "stable") {
        const std::string asc = c.text("ascending", "pure_kill");
        if (asc == "pure_kill") return stable_ladder(c.number("alpha", 0.5), PureKill{c.number("k_plus", 1.0)});
        if (asc == "gamma_ratio")
            return stable_ladder(c.number("alpha", 0.5), GammaRatioAscending{c.number("alpha_prime", 0.25)});
        throw ConfigError("unknown stable ascending ladder '" + asc + "'");
    }
    throw ConfigError("unknown family '" + f + "'");
}

LevyModel build_model(const Config& c) { return build_model_shifted(c, 0.0); }

LadderExponent scale_kill(const LadderExponent& asc, double factor) {
    if (!(factor > 0.0)) throw ConfigError("perturb_k_plus must be positive");
    LadderExponent e = asc;
    const double extra = (factor - 1.0) * asc.kill;
    e.kill = asc.kill * factor;
    const ComplexFn phi = asc.exponent;
    e.exponent = [phi, extra](cplx z) { return phi(z) - extra; };
    e.tag = asc.tag + "_perturbed";
    return e;
}

LadderPair sampling_pair(const Config& c, const LevyModel& model) {
    if (!model.ladders) throw ConfigError("family has no ladder factorization");
    LadderPair p = *model.ladders;
    const double f = c.number("perturb_k_plus", 1.0);
    if (f != 1.0) p.ascending = scale_kill(p.ascending, f);
    return p;
}

PathConfig path_config(const Config& c, std::uint64_t seed, int workers) {
    PathConfig p;
    p.seed = seed;
    p.workers = workers;
    p.dt = c.number("dt", p.dt);
    p.tail_eps = c.number("tail_eps", p.tail_eps);
    p.max_time = c.number("max_time", p.max_time);
    p.eps_jump = c.number("eps_jump", p.eps_jump);
    p.max_jump_rate = c.number("max_jump_rate", p.max_jump_rate);
    p.fixed_T = c.number("fixed_T", p.fixed_T);
    const std::string scheme = c.text("scheme", "exact_increments");
    if (scheme == "euler")
        p.scheme = PathConfig::Scheme::euler;
    else if (scheme != "exact_increments")
        throw ConfigError("unknown scheme '" + scheme + "'");
    const std::string horizon = c.text("horizon", "adaptive");
    if (horizon == "fixed")
        p.horizon = PathConfig::Horizon::fixed;
    else if (horizon != "adaptive")
        throw ConfigError("unknown horizon '" + horizon + "'");
    if (!(p.dt > 0.0) || !(p.tail_eps > 0.0) || !(p.max_time > 0.0)) throw ConfigError("sampler settings must be positive");
    return p;
}

}  // namespace expfunc::cli

#pragma once

#include <map>
#include <optional>
#include <string>

#include "expfunc/levy_model.hpp"
#include "expfunc/montecarlo.hpp"

namespace expfunc::cli {

// Flat `key = value` text, one pair per line, `#` starts a comment.
struct Config {
    std::map<std::string, std::string> entries;
    std::string source;

    bool has(const std::string& key) const { return entries.count(key) > 0; }
    std::string text(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key, double fallback) const;
    std::optional<double> optional_number(const std::string& key) const;
    long integer(const std::string& key, long fallback) const;
};

Config parse_config(const std::string& text, const std::string& source = "<string>");
Config load_config(const std::string& path);

// family = brownian | spectrally_negative | gamma_power_example | exp_positive_jumps | stable
LevyModel build_model(const Config& c);
// Same family with gamma shifted by the given amount (families with a gamma parameter only).
// build_model ignores gamma_shift; the residual suite applies it to the candidate density.
LevyModel build_model_shifted(const Config& c, double gamma_shift);
// Ladder pair used for sampling I_Y; perturb_k_plus != 1 scales the killing rate.
LadderPair sampling_pair(const Config& c, const LevyModel& model);
PathConfig path_config(const Config& c, std::uint64_t seed, int workers);

// kill -> factor * kill, exponent shifted accordingly.
LadderExponent scale_kill(const LadderExponent& asc, double factor);

}  // namespace expfunc::cli

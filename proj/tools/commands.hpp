#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace expfunc::cli {

enum ExitCode : int { ok = 0, suite_failed = 1, invalid_config = 2, numeric_failure = 3, validity_violation = 4 };

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    long n = 20000;
    std::optional<std::string> grid;  // "lo:hi:points"
    std::string suite = "all";        // factorize | residual | mellin | all
    std::string sampler = "xi";       // xi | H | Y | dual_Y
    int workers = 0;
    std::optional<double> tol;
    int m_max = -1;                   // < 0: config value or 10
};

int cmd_moments(const Options& o);
int cmd_density(const Options& o);
int cmd_verify(const Options& o);
int cmd_sample(const Options& o);

// Runs a command, mapping library exceptions to exit codes and printing the failing invariant to stderr.
int run_guarded(const std::function<int()>& body);

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int points = 0;
};
GridSpec parse_grid(const std::string& spec);

}  // namespace expfunc::cli

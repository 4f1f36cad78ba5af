#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "expfunc/io.hpp"
#include "expfunc/kernels.hpp"
#include "expfunc/levy_model.hpp"
#include "expfunc/rng.hpp"

namespace expfunc {

struct PathConfig {
    enum class Horizon { fixed, adaptive };
    enum class Scheme { euler, exact_increments };

    double dt = 0.01;
    Horizon horizon = Horizon::adaptive;
    double fixed_T = 50.0;
    double tail_eps = 1e-6;
    double max_time = 2000.0;       // adaptive paths still running here are flagged
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::exact_increments;
    double eps_jump = 1e-4;         // smallest jump cutoff for infinite-activity parts
    double max_jump_rate = 300.0;   // per infinite-activity component; raises the cutoff when needed
    Exec exec = Exec::parallel;
    int workers = 0;
};

json to_json(const PathConfig& c);

struct SamplePool {
    std::vector<double> values;
    std::size_t n = 0;
    std::string sampler_id;
    PathConfig config;
    double truncation_budget = 0.0;  // CDF shift allowance from truncated paths
    std::size_t flagged = 0;         // paths stopped at max_time

    static SamplePool from_values(std::vector<double> v, std::string id, const PathConfig& cfg);
};

// Per-sample substreams: sample i always uses Xoshiro256::stream(seed, i).
std::vector<double> parallel_generate(std::size_t n, std::uint64_t seed,
                                      const std::function<double(Xoshiro256&, std::size_t)>& draw,
                                      Exec exec = Exec::parallel, int workers = 0);

struct PathResult {
    double integral = 0.0;     // int_0^T e^{sign xi_t} dt
    double xi_end = 0.0;       // xi_T
    double time = 0.0;         // T
    bool flagged = false;
    double thinned_integral = 0.0;  // coupled path with thinned positive jumps, when requested
};

// Simulates xi with exact Gaussian-drift increments on a dt grid, exact jump times for jumps above a
// per-component cutoff, and compensated small jumps replaced by a Gaussian with matching variance.
class PathSampler {
public:
    PathSampler(const LevyModel& model, const PathConfig& cfg);

    // t_end = infinity selects the adaptive horizon. keep_prob < 1 also integrates a coupled path in
    // which each positive jump is kept with that probability.
    PathResult run(Xoshiro256& rng, double t_end = std::numeric_limits<double>::infinity(), double sign = 1.0,
                   double keep_prob = 1.0) const;

    double effective_drift() const { return drift_; }
    double effective_sigma2() const { return sigma2_; }
    double total_jump_rate() const { return rate_; }
    const std::vector<double>& cutoffs() const { return cutoffs_; }

private:
    struct Component {
        double rate = 0.0;
        double sign = 1.0;  // +1 positive jumps, -1 negative jumps
        double cutoff = 0.0;
        std::function<double(double)> inverse;  // jump size for tail value v in (0, rate]
    };
    std::vector<Component> comps_;
    std::vector<double> cutoffs_;
    double drift_ = 0.0;
    double sigma2_ = 0.0;
    double rate_ = 0.0;
    double mean_ = 0.0;
    PathConfig cfg_;
};

SamplePool sample_exp_functional(const LevyModel& model, const PathConfig& cfg, std::size_t n);
SamplePool sample_subordinator_functional(const LadderExponent& desc, const PathConfig& cfg, std::size_t n);
SamplePool sample_Y_functional(const LadderPair& pair, const PathConfig& cfg, std::size_t n);
// I of the process with ascending exponent z -> phi_-(1 - z).
SamplePool sample_dual_Y_functional(const LadderExponent& desc, const PathConfig& cfg, std::size_t n);

// Exact samplers for laws known in closed form.
SamplePool gamma_power_pool(double shape, double power, const PathConfig& cfg, std::size_t n);  // G_shape^power
SamplePool exp_jumps_mixture_pool(const ExpPositiveJumps& p, const PathConfig& cfg, std::size_t n);
SamplePool product_pool(const SamplePool& a, const SamplePool& b, const std::string& id);
SamplePool exponential_pool(double rate, const PathConfig& cfg, std::size_t n);

// U_t(x0) = x0 e^{xi_t} + e^{xi_t} int_0^t e^{-xi_s} ds
SamplePool gou_iterate(const LevyModel& model, double x0, double t, const PathConfig& cfg, std::size_t n);
// x0 e^{xi_t} + int_0^t e^{xi_s} ds
SamplePool time_reversed_pool(const LevyModel& model, double x0, double t, const PathConfig& cfg, std::size_t n);

struct CoupledPair {
    std::vector<double> full;
    std::vector<double> thinned;
    std::size_t order_violations = 0;  // thinned > full
};
CoupledPair thinning_coupled_pair(const LevyModel& model, double keep_prob, const PathConfig& cfg, std::size_t n);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);
KsResult ks_two_sample(const SamplePool& a, const SamplePool& b);
KsResult ks_one_sample(const std::vector<double>& sample, const std::function<double(double)>& cdf);
// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_survival(double lambda);

struct FactorizationReport {
    KsResult ks;
    std::size_t n = 0;
    double significance = 0.01;
    double truncation_budget = 0.0;  // CDF shift allowance subtracted from the statistic
    double adjusted_p_value = 1.0;
    bool passed = false;
    std::string id;
};
// KS of pool(I_xi) against pool(I_H) x pool(I_Y), all from path samplers.
FactorizationReport factorization_test(const LevyModel& model, const LadderPair& pair, const PathConfig& cfg,
                                       std::size_t n, double significance = 0.01);
json to_json(const FactorizationReport& r);

std::string to_csv(const SamplePool& p);
json sidecar_json(const SamplePool& p);

}  // namespace expfunc

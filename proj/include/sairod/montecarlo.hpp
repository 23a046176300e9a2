#pragma once

#include <cstdint>
#include <random>

#include "sairod/policy.hpp"

namespace sairod {

using Rng = std::mt19937_64;

// Uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// SplitMix64 finalizer; stream i of a master seed is finalize(master + i*phi).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

// One exact draw from the transition distribution: samples the same
// conditional chain the closed-form decomposition uses (infection binomial,
// testing/health outcome for A, capacity-folded split for I, then O and Q),
// so the induced next-state law equals transition_distribution.
StateVector sample_transition(const StateVector& v, const Action& action,
                              const Parameters& params, ModelKind kind, Rng& rng);

struct McConfig {
    Parameters params;
    ModelKind kind = ModelKind::simplified;
    std::vector<std::pair<StateVector, double>> initial;  // weighted mixture
    Policy policy;
    int runs = 1;
    int depth = 1;
    std::uint64_t seed = 0;
    long long real_population = 0;  // N-hat; 0 means equal to params.population
    double benchmark_fraction = 0.2;
    bool benchmark_strict = true;  // D > frac*N (false: >=)
    bool parallel = true;

    void validate() const;
};

// Proportional quantization scaling: N, C, every initial compartment and
// every meeting allowance multiplied by `factor`; thresholds (fractions)
// unchanged.
McConfig scale_config(McConfig config, int factor);

struct McStepStats {
    double mean[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    int q10[8] = {0};
    int q50[8] = {0};
    int q90[8] = {0};
    double benchmark = 0.0;  // empirical Pr{D (>|>=) frac*N} at this step
};

struct McReport {
    std::string rng_name = "mt19937_64 (per-run streams via splitmix64)";
    std::uint64_t seed = 0;
    int runs = 0;
    int depth = 0;
    long long real_population = 0;
    double benchmark_fraction = 0.2;
    bool benchmark_strict = true;
    std::vector<McStepStats> steps;  // depth + 1 entries (step 0 = initial)
    double final_benchmark = 0.0;
    double expected_meetings_first = 0.0;  // mean applied M at step 0
};

// Executes `runs` independent trajectories. Bit-reproducible for a given
// config: per-run seeds derive from the master seed, and aggregation is in
// run order regardless of the execution schedule.
McReport run_monte_carlo(const McConfig& config);

// (absolute subjects, relative fraction) = (N-hat / 2N, 1 / 2N).
std::pair<double, double> quantization_error(long long real_population, int representatives);

}  // namespace sairod

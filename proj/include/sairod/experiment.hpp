#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sairod/explicit_io.hpp"
#include "sairod/montecarlo.hpp"
#include "sairod/solver.hpp"

namespace sairod {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuerySpec {
    enum class Kind { deaths_ge_frac, compartment_ge, cdf, expected_meetings };
    Kind kind = Kind::deaths_ge_frac;
    double fraction = 0.2;        // deaths_ge_frac
    Compartment compartment = Compartment::D;  // compartment_ge / cdf
    int threshold = 0;            // compartment_ge
    bool strict = false;          // > instead of >=

    std::string name() const;
    StatePredicate predicate(const Parameters& params) const;  // not for cdf/expected
};

struct McSpec {
    int runs = 1000;
    int depth = 100;
    int scale = 1;
    long long real_population = 0;
};

struct ExperimentConfig {
    ModelKind kind = ModelKind::simplified;
    Parameters params;
    std::vector<std::pair<StateVector, double>> initial;
    std::vector<Action> actions;
    std::optional<Policy> policy;
    std::vector<QuerySpec> queries;
    int steps = 0;         // transient series length (0 = none)
    double tolerance = 1e-9;
    int max_iterations = 10000;
    std::uint64_t seed = 0;
    std::optional<McSpec> monte_carlo;

    void validate() const;  // throws ConfigError
};

ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    std::optional<int> runs;
    std::optional<int> depth;
    std::optional<int> scale;
};

// Full pipeline: build (policy-closed), transient series, limit queries,
// CDFs, optional Monte Carlo; emits CSV files plus manifest.json into
// `out_dir`. Returns the list of files written.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config,
                                                  const std::filesystem::path& out_dir,
                                                  const RunOverrides& overrides = {});

// Writes the per-step statistics and the summary of a Monte Carlo report.
std::vector<std::filesystem::path> write_mc_report(const McReport& report,
                                                   const std::filesystem::path& out_dir,
                                                   const std::string& tag);

}  // namespace sairod

#pragma once

#include <memory>
#include <string>

#include "sairod/state_space.hpp"

namespace sairod {

enum class PolicyKind { constant, adaptive_symptomatic, adaptive_asymptomatic };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& s);

// How the interpolated meeting count is mapped to an integer action.
// The paper's tool evidently truncates: that choice is what reproduces its
// reported average-M trajectory, so it is the default.
enum class MeetingRounding { truncate, half_up };

struct AdaptiveConfig {
    double threshold_low = 0.0;   // f below this: no restrictions (m_high)
    double threshold_high = 1.0;  // f above this: full restrictions (m_low)
    int m_low = 0;
    int m_high = 0;
    MeetingRounding rounding = MeetingRounding::truncate;

    void validate() const;  // throws std::domain_error
};

// Occupancy fraction driving the adaptive policies: (I+O)/(N-D) for the
// symptomatic signal, A/(N-D) for the asymptomatic one.
double adaptive_signal(const StateVector& v, PolicyKind kind, int population);

// Meeting allowance per the threshold/interpolation rule. Throws
// std::domain_error when the whole population is deceased.
int adaptive_m(const StateVector& v, const AdaptiveConfig& cfg, PolicyKind kind,
               int population);
double adaptive_m_unrounded(const StateVector& v, const AdaptiveConfig& cfg,
                            PolicyKind kind, int population);

// Total map from states to actions.
struct Policy {
    PolicyKind kind = PolicyKind::constant;
    Action constant{};          // used when kind == constant
    AdaptiveConfig adaptive{};  // used otherwise
    int tests = 0;              // tests attached to adaptive actions
    std::string name;

    Action action_for(const StateVector& v, int population) const;
    void validate() const;
};

// DTMC: the transition table restricted to the policy-selected action per
// state. Keeps both orientations of the edge list; the incoming (transposed)
// layout makes the parallel step deterministic.
struct Dtmc {
    std::shared_ptr<const StateSpace> space;
    std::vector<Action> chosen;  // action applied in each state

    std::vector<std::uint64_t> offsets;  // outgoing rows, CSR
    std::vector<StateIndex> targets;
    std::vector<double> probs;

    std::vector<std::uint64_t> in_offsets;  // incoming edges per target
    std::vector<StateIndex> in_sources;
    std::vector<double> in_probs;

    std::size_t size() const { return space ? space->size() : 0; }
    void build_transpose();
};

// Selects the policy's action row for every state of a built table.
// Throws std::invalid_argument if some selected action is absent.
Dtmc apply_policy(const BuiltModel& model, const Policy& policy);

// Builds the DTMC directly, exploring only the policy-selected action per
// state (the table rows are computed on demand). Equivalent to
// build_reachable + apply_policy restricted to the policy-reachable set.
Dtmc build_policy_dtmc(std::span<const StateVector> initial, const Policy& policy,
                       const Parameters& params, ModelKind kind,
                       const BuildOptions& options = {});

}  // namespace sairod

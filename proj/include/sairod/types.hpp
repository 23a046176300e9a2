#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace sairod {

// Which variant of the chain a state belongs to. The simplified model keeps
// only the first six compartments and requires Q = Ra = 0.
enum class ModelKind { full, simplified };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Compartment cardinalities at one step. Comparison order doubles as the
// canonical (lexicographic) state order used everywhere for indexing.
struct StateVector {
    int S = 0;   // susceptible
    int A = 0;   // asymptomatic infectious
    int I = 0;   // symptomatic
    int R = 0;   // recovered from known illness
    int O = 0;   // hospitalised
    int D = 0;   // deceased
    int Q = 0;   // quarantined (tested positive)
    int Ra = 0;  // recovered from the asymptomatic state, untested

    int sum() const { return S + A + I + R + O + D + Q + Ra; }

    // Pool of subjects a meeting partner is drawn from.
    int meeting_pool() const { return S + A + R + Ra; }
    // Subjects eligible for testing (not already diagnosed).
    int testable_pool() const { return A + S + Ra; }

    // Collapse to the six-compartment view: R and Ra merge.
    StateVector merged_recovered() const {
        StateVector m{S, A, I, R + Ra, O, D, 0, 0};
        return m;
    }

    friend auto operator<=>(const StateVector&, const StateVector&) = default;

    // Dense key for hashing; valid while every compartment fits one byte.
    std::uint64_t pack() const;
    static StateVector unpack(std::uint64_t key);
};

std::ostream& operator<<(std::ostream& os, const StateVector& v);

// Signed state change v' - v.
struct StateDelta {
    int S = 0, A = 0, I = 0, R = 0, O = 0, D = 0, Q = 0, Ra = 0;

    static StateDelta between(const StateVector& from, const StateVector& to) {
        return {to.S - from.S, to.A - from.A, to.I - from.I, to.R - from.R,
                to.O - from.O, to.D - from.D, to.Q - from.Q, to.Ra - from.Ra};
    }
    int sum() const { return S + A + I + R + O + D + Q + Ra; }
};

// The eleven inter-compartment flows of one step.
//   d1:  S -> A      d2:  A -> I      d3:  A -> Ra (R in simplified)
//   d4:  I -> R      d5:  I -> O      d6:  I -> D
//   d7:  O -> D      d8:  O -> R      d9:  A -> Q
//   d10: Q -> I      d11: Q -> R
struct FlowVector {
    int d1 = 0, d2 = 0, d3 = 0, d4 = 0, d5 = 0, d6 = 0, d7 = 0, d8 = 0,
        d9 = 0, d10 = 0, d11 = 0;

    bool non_negative() const;
    // Flow constraints against the originating state.
    bool feasible_from(const StateVector& v) const;
    // Balance equations; asymptomatic recoveries land in Ra (full model)
    // or in R (simplified model).
    StateDelta delta(ModelKind kind) const;
    StateVector apply(const StateVector& v, ModelKind kind) const;
};

// Control input attached to a state: meetings allowed and tests administered.
struct Action {
    int meetings = 0;
    int tests = 0;

    friend auto operator<=>(const Action&, const Action&) = default;
};

std::ostream& operator<<(std::ostream& os, const Action& a);

// Thrown when a requested construction would exceed the configured budget.
class BudgetError : public std::runtime_error {
public:
    BudgetError(std::uint64_t count, std::uint64_t limit);
    std::uint64_t count;
    std::uint64_t limit;
};

// Thrown when an internally computed quantity violates a numeric invariant
// (e.g. a transition row whose mass is not 1). Indicates a bug, not bad input.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sairod

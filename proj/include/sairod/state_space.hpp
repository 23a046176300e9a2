#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sairod/kernels.hpp"
#include "sairod/params.hpp"
#include "sairod/types.hpp"

namespace sairod {

using StateIndex = std::uint32_t;

// Immutable, canonically ordered list of states plus the configuration that
// produced it.
struct StateSpace {
    ModelKind kind = ModelKind::simplified;
    Parameters params;
    std::vector<Action> actions;
    std::vector<StateVector> states;  // sorted in canonical (lexicographic) order

    std::size_t size() const { return states.size(); }
    int tuple_width() const { return kind == ModelKind::full ? 8 : 6; }

    // Dense index of a state; throws std::out_of_range for unknown states.
    StateIndex rank(const StateVector& v) const;
    std::optional<StateIndex> try_rank(const StateVector& v) const;
    const StateVector& unrank(StateIndex i) const;

    std::optional<std::size_t> action_index(const Action& a) const;
};

// Sparse (state, action) -> next-state rows in CSR layout; row entries are
// sorted by target index and each row sums to 1 within kRowMassTolerance.
struct TransitionTable {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<std::uint64_t> offsets;  // num_states * num_actions + 1
    std::vector<StateIndex> targets;
    std::vector<double> probs;

    std::size_t row_count() const { return num_states * num_actions; }
    std::size_t entries() const { return targets.size(); }

    std::span<const StateIndex> row_targets(std::size_t state, std::size_t action) const {
        auto r = state * num_actions + action;
        return {targets.data() + offsets[r], targets.data() + offsets[r + 1]};
    }
    std::span<const double> row_probs(std::size_t state, std::size_t action) const {
        auto r = state * num_actions + action;
        return {probs.data() + offsets[r], probs.data() + offsets[r + 1]};
    }
};

struct BuiltModel {
    StateSpace space;
    TransitionTable table;
};

struct BuildOptions {
    std::uint64_t max_states = 20'000'000;
    // Materialize rows in parallel across frontier states (OpenMP).
    bool parallel = true;
};

// Every state satisfying the domain invariants, in canonical order.
// Throws BudgetError when the closed-form count exceeds max_states.
std::vector<StateVector> enumerate_all(const Parameters& params, ModelKind kind,
                                       std::uint64_t max_states = BuildOptions{}.max_states);

// Breadth-first closure of `initial` under every action in `actions`,
// with the transition table for all (state, action) pairs. Output is
// deterministic: canonical state order, given action order.
BuiltModel build_reachable(std::span<const StateVector> initial,
                           std::vector<Action> actions, const Parameters& params,
                           ModelKind kind, const BuildOptions& options = {});

// Single-threaded reference implementation; produces bit-identical output.
BuiltModel build_reachable_serial(std::span<const StateVector> initial,
                                  std::vector<Action> actions, const Parameters& params,
                                  ModelKind kind, const BuildOptions& options = {});

}  // namespace sairod

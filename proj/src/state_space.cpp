#include "sairod/state_space.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "sairod/combinatorics.hpp"

namespace sairod {

StateIndex StateSpace::rank(const StateVector& v) const {
    auto it = std::lower_bound(states.begin(), states.end(), v);
    if (it == states.end() || *it != v) {
        std::ostringstream os;
        os << "state " << v << " is not in the space";
        throw std::out_of_range(os.str());
    }
    return static_cast<StateIndex>(it - states.begin());
}

std::optional<StateIndex> StateSpace::try_rank(const StateVector& v) const {
    auto it = std::lower_bound(states.begin(), states.end(), v);
    if (it == states.end() || *it != v) return std::nullopt;
    return static_cast<StateIndex>(it - states.begin());
}

const StateVector& StateSpace::unrank(StateIndex i) const {
    if (i >= states.size()) throw std::out_of_range("state index out of range");
    return states[i];
}

std::optional<std::size_t> StateSpace::action_index(const Action& a) const {
    for (std::size_t i = 0; i < actions.size(); ++i)
        if (actions[i] == a) return i;
    return std::nullopt;
}

std::vector<StateVector> enumerate_all(const Parameters& params, ModelKind kind,
                                       std::uint64_t max_states) {
    params.validate();
    const int width = kind == ModelKind::full ? 8 : 6;
    const std::uint64_t upper = state_count(width, params.population);
    if (upper > max_states) throw BudgetError(upper, max_states);

    std::vector<StateVector> out;
    for_each_composition(width, params.population, [&](std::span<const int> c) {
        StateVector v;
        v.S = c[0];
        v.A = c[1];
        v.I = c[2];
        v.R = c[3];
        v.O = c[4];
        v.D = c[5];
        if (width == 8) {
            v.Q = c[6];
            v.Ra = c[7];
        }
        if (v.O <= params.hospital_capacity) out.push_back(v);
    });
    return out;
}

namespace {

struct ClosureResult {
    std::vector<std::uint64_t> keys;           // discovery order
    std::vector<detail::PackedRow> rows;       // keys.size() * num_actions
};

// Breadth-first closure; row computation fans out per (state, action), the
// merge that assigns discovery indices is serial and schedule-independent.
ClosureResult close_over(std::span<const StateVector> initial,
                         std::span<const Action> actions, const Parameters& params,
                         ModelKind kind, const BuildOptions& options) {
    params.validate();
    if (actions.empty()) throw std::invalid_argument("empty action set");
    for (const Action& a : actions) {
        if (a.meetings < 0 || a.tests < 0)
            throw std::invalid_argument("negative action component");
        if (kind == ModelKind::simplified && a.tests != 0)
            throw std::invalid_argument("simplified model requires t = 0 actions");
    }
    if (initial.empty()) throw std::invalid_argument("no initial states");

    ClosureResult result;
    std::unordered_map<std::uint64_t, StateIndex> discovered;
    auto discover = [&](std::uint64_t key) {
        auto [it, fresh] = discovered.emplace(key, static_cast<StateIndex>(result.keys.size()));
        if (fresh) {
            result.keys.push_back(key);
            if (result.keys.size() > options.max_states)
                throw BudgetError(result.keys.size(), options.max_states);
        }
        return fresh;
    };

    std::vector<std::uint64_t> frontier;
    for (const StateVector& v : initial) {
        validate_state(v, params, kind);
        if (discover(v.pack())) frontier.push_back(v.pack());
    }

    const std::size_t na = actions.size();
    while (!frontier.empty()) {
        const std::size_t base = result.rows.size();
        result.rows.resize(base + frontier.size() * na);
        const std::int64_t tasks = static_cast<std::int64_t>(frontier.size() * na);
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel)
        for (std::int64_t task = 0; task < tasks; ++task) {
            try {
                const StateVector v =
                    StateVector::unpack(frontier[static_cast<std::size_t>(task) / na]);
                const Action& a = actions[static_cast<std::size_t>(task) % na];
                result.rows[base + static_cast<std::size_t>(task)] =
                    detail::packed_transition_row(v, a, params, kind);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);

        std::vector<std::uint64_t> next;
        for (std::size_t i = 0; i < frontier.size() * na; ++i)
            for (const auto& [key, p] : result.rows[base + i].entries)
                if (discover(key)) next.push_back(key);
        frontier = std::move(next);
    }
    return result;
}

BuiltModel finalize(ClosureResult&& closure, std::vector<Action> actions,
                    const Parameters& params, ModelKind kind) {
    const std::size_t n = closure.keys.size();
    const std::size_t na = actions.size();

    // canonical order = ascending packed key
    std::vector<StateIndex> by_key(n);
    std::iota(by_key.begin(), by_key.end(), 0);
    std::sort(by_key.begin(), by_key.end(), [&](StateIndex a, StateIndex b) {
        return closure.keys[a] < closure.keys[b];
    });

    BuiltModel model;
    model.space.kind = kind;
    model.space.params = params;
    model.space.actions = std::move(actions);
    model.space.states.reserve(n);
    for (StateIndex old : by_key)
        model.space.states.push_back(StateVector::unpack(closure.keys[old]));

    // packed key -> final index (states are sorted, so a lookup table keyed by
    // the sorted keys serves as the rank function during assembly)
    std::unordered_map<std::uint64_t, StateIndex> final_index;
    final_index.reserve(n * 2);
    for (StateIndex i = 0; i < n; ++i)
        final_index.emplace(model.space.states[i].pack(), i);

    TransitionTable& table = model.table;
    table.num_states = n;
    table.num_actions = na;
    table.offsets.assign(n * na + 1, 0);

    std::size_t total = 0;
    for (const auto& row : closure.rows) total += row.entries.size();
    table.targets.reserve(total);
    table.probs.reserve(total);

    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t old_row_base = static_cast<std::size_t>(by_key[s]) * na;
        for (std::size_t a = 0; a < na; ++a) {
            const auto& row = closure.rows[old_row_base + a];
            for (const auto& [key, p] : row.entries) {
                table.targets.push_back(final_index.at(key));
                table.probs.push_back(p);
            }
            table.offsets[s * na + a + 1] = table.targets.size();
        }
    }
    return model;
}

}  // namespace

BuiltModel build_reachable(std::span<const StateVector> initial, std::vector<Action> actions,
                           const Parameters& params, ModelKind kind,
                           const BuildOptions& options) {
    auto closure = close_over(initial, actions, params, kind, options);
    return finalize(std::move(closure), std::move(actions), params, kind);
}

BuiltModel build_reachable_serial(std::span<const StateVector> initial,
                                  std::vector<Action> actions, const Parameters& params,
                                  ModelKind kind, const BuildOptions& options) {
    BuildOptions serial = options;
    serial.parallel = false;
    auto closure = close_over(initial, actions, params, kind, serial);
    return finalize(std::move(closure), std::move(actions), params, kind);
}

}  // namespace sairod

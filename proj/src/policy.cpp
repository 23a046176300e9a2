#include "sairod/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace sairod {

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::constant: return "constant";
        case PolicyKind::adaptive_symptomatic: return "adaptive-symptomatic";
        case PolicyKind::adaptive_asymptomatic: return "adaptive-asymptomatic";
    }
    return "?";
}

PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "constant") return PolicyKind::constant;
    if (s == "adaptive-symptomatic" || s == "AS") return PolicyKind::adaptive_symptomatic;
    if (s == "adaptive-asymptomatic" || s == "AA") return PolicyKind::adaptive_asymptomatic;
    throw std::invalid_argument("unknown policy kind: " + s);
}

void AdaptiveConfig::validate() const {
    if (!(threshold_low >= 0.0 && threshold_low <= 1.0) ||
        !(threshold_high >= 0.0 && threshold_high <= 1.0))
        throw std::domain_error("adaptive thresholds must lie in [0,1]");
    if (!(threshold_low < threshold_high))
        throw std::domain_error("adaptive policy requires threshold_low < threshold_high");
    if (m_low < 0 || m_low > m_high)
        throw std::domain_error("adaptive policy requires 0 <= m_low <= m_high");
}

double adaptive_signal(const StateVector& v, PolicyKind kind, int population) {
    const int living = population - v.D;
    if (living < 1) throw std::domain_error("adaptive signal undefined: everyone is deceased");
    switch (kind) {
        case PolicyKind::adaptive_symptomatic:
            return static_cast<double>(v.I + v.O) / living;
        case PolicyKind::adaptive_asymptomatic:
            return static_cast<double>(v.A) / living;
        default:
            throw std::invalid_argument("constant policies have no adaptive signal");
    }
}

double adaptive_m_unrounded(const StateVector& v, const AdaptiveConfig& cfg,
                            PolicyKind kind, int population) {
    cfg.validate();
    const double f = adaptive_signal(v, kind, population);
    if (f <= cfg.threshold_low) return cfg.m_high;
    if (f >= cfg.threshold_high) return cfg.m_low;
    return cfg.m_high + (cfg.m_low - cfg.m_high) * (f - cfg.threshold_low) /
                            (cfg.threshold_high - cfg.threshold_low);
}

int adaptive_m(const StateVector& v, const AdaptiveConfig& cfg, PolicyKind kind,
               int population) {
    const double m = adaptive_m_unrounded(v, cfg, kind, population);
    // the signal lives on the grid k/(N-D), so a ulp-scale nudge keeps exact
    // integer crossings from truncating one short
    int rounded;
    switch (cfg.rounding) {
        case MeetingRounding::truncate: rounded = static_cast<int>(std::floor(m + 1e-9)); break;
        case MeetingRounding::half_up: rounded = static_cast<int>(std::floor(m + 0.5)); break;
        default: rounded = static_cast<int>(std::floor(m + 1e-9)); break;
    }
    return std::clamp(rounded, cfg.m_low, cfg.m_high);
}

void Policy::validate() const {
    if (kind == PolicyKind::constant) {
        if (constant.meetings < 0 || constant.tests < 0)
            throw std::domain_error("constant policy with negative action");
    } else {
        adaptive.validate();
        if (tests < 0) throw std::domain_error("negative test count in policy");
    }
}

Action Policy::action_for(const StateVector& v, int population) const {
    if (kind == PolicyKind::constant) return constant;
    // every compartment is absorbed once the population is gone; the meeting
    // allowance is irrelevant there, so pin it to the most restrictive action
    if (population - v.D < 1) return Action{adaptive.m_low, tests};
    return Action{adaptive_m(v, adaptive, kind, population), tests};
}

void Dtmc::build_transpose() {
    const std::size_t n = size();
    in_offsets.assign(n + 1, 0);
    for (StateIndex t : targets) ++in_offsets[t + 1];
    for (std::size_t i = 0; i < n; ++i) in_offsets[i + 1] += in_offsets[i];
    in_sources.resize(targets.size());
    in_probs.resize(targets.size());
    std::vector<std::uint64_t> cursor(in_offsets.begin(), in_offsets.end() - 1);
    // iterating sources in ascending order keeps each incoming list sorted,
    // which pins the summation order of the parallel step
    for (std::size_t src = 0; src < n; ++src) {
        for (std::uint64_t e = offsets[src]; e < offsets[src + 1]; ++e) {
            const StateIndex dst = targets[e];
            in_sources[cursor[dst]] = static_cast<StateIndex>(src);
            in_probs[cursor[dst]] = probs[e];
            ++cursor[dst];
        }
    }
}

Dtmc apply_policy(const BuiltModel& model, const Policy& policy) {
    policy.validate();
    Dtmc dtmc;
    dtmc.space = std::make_shared<StateSpace>(model.space);
    const StateSpace& space = *dtmc.space;
    const std::size_t n = space.size();

    dtmc.chosen.reserve(n);
    dtmc.offsets.assign(n + 1, 0);
    std::vector<std::size_t> selected(n);
    for (std::size_t s = 0; s < n; ++s) {
        const Action a = policy.action_for(space.states[s], space.params.population);
        const auto idx = space.action_index(a);
        if (!idx) {
            std::ostringstream os;
            os << "policy '" << policy.name << "' selects action " << a << " for state "
               << space.states[s] << ", which is not in the table";
            throw std::invalid_argument(os.str());
        }
        selected[s] = *idx;
        dtmc.chosen.push_back(a);
        dtmc.offsets[s + 1] =
            dtmc.offsets[s] + model.table.row_targets(s, *idx).size();
    }
    dtmc.targets.reserve(dtmc.offsets[n]);
    dtmc.probs.reserve(dtmc.offsets[n]);
    for (std::size_t s = 0; s < n; ++s) {
        auto t = model.table.row_targets(s, selected[s]);
        auto p = model.table.row_probs(s, selected[s]);
        dtmc.targets.insert(dtmc.targets.end(), t.begin(), t.end());
        dtmc.probs.insert(dtmc.probs.end(), p.begin(), p.end());
    }
    dtmc.build_transpose();
    return dtmc;
}

Dtmc build_policy_dtmc(std::span<const StateVector> initial, const Policy& policy,
                       const Parameters& params, ModelKind kind,
                       const BuildOptions& options) {
    params.validate();
    policy.validate();
    if (initial.empty()) throw std::invalid_argument("no initial states");

    std::vector<std::uint64_t> keys;
    std::vector<detail::PackedRow> rows;
    std::unordered_map<std::uint64_t, StateIndex> discovered;
    auto discover = [&](std::uint64_t key) {
        auto [it, fresh] = discovered.emplace(key, static_cast<StateIndex>(keys.size()));
        if (fresh) {
            keys.push_back(key);
            if (keys.size() > options.max_states)
                throw BudgetError(keys.size(), options.max_states);
        }
        return fresh;
    };

    std::vector<std::uint64_t> frontier;
    for (const StateVector& v : initial) {
        validate_state(v, params, kind);
        if (discover(v.pack())) frontier.push_back(v.pack());
    }

    while (!frontier.empty()) {
        const std::size_t base = rows.size();
        rows.resize(base + frontier.size());
        const std::int64_t tasks = static_cast<std::int64_t>(frontier.size());
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel)
        for (std::int64_t task = 0; task < tasks; ++task) {
            try {
                const StateVector v = StateVector::unpack(frontier[static_cast<std::size_t>(task)]);
                const Action a = policy.action_for(v, params.population);
                rows[base + static_cast<std::size_t>(task)] =
                    detail::packed_transition_row(v, a, params, kind);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);

        std::vector<std::uint64_t> next;
        for (std::size_t i = 0; i < frontier.size(); ++i)
            for (const auto& [key, p] : rows[base + i].entries)
                if (discover(key)) next.push_back(key);
        frontier = std::move(next);
    }

    const std::size_t n = keys.size();
    std::vector<StateIndex> by_key(n);
    std::iota(by_key.begin(), by_key.end(), 0);
    std::sort(by_key.begin(), by_key.end(),
              [&](StateIndex a, StateIndex b) { return keys[a] < keys[b]; });

    auto space = std::make_shared<StateSpace>();
    space->kind = kind;
    space->params = params;
    space->states.reserve(n);
    for (StateIndex old : by_key) space->states.push_back(StateVector::unpack(keys[old]));

    std::unordered_map<std::uint64_t, StateIndex> final_index;
    final_index.reserve(n * 2);
    for (StateIndex i = 0; i < n; ++i) final_index.emplace(space->states[i].pack(), i);

    Dtmc dtmc;
    dtmc.space = space;
    dtmc.offsets.assign(n + 1, 0);
    dtmc.chosen.reserve(n);
    std::size_t total = 0;
    for (const auto& row : rows) total += row.entries.size();
    dtmc.targets.reserve(total);
    dtmc.probs.reserve(total);
    for (std::size_t s = 0; s < n; ++s) {
        const StateVector& v = space->states[s];
        dtmc.chosen.push_back(policy.action_for(v, params.population));
        const auto& row = rows[by_key[s]];
        for (const auto& [key, p] : row.entries) {
            dtmc.targets.push_back(final_index.at(key));
            dtmc.probs.push_back(p);
        }
        dtmc.offsets[s + 1] = dtmc.targets.size();
    }
    // the union of chosen actions doubles as the space's action list
    std::vector<Action> actions = dtmc.chosen;
    std::sort(actions.begin(), actions.end());
    actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
    space->actions = std::move(actions);

    dtmc.build_transpose();
    return dtmc;
}

}  // namespace sairod

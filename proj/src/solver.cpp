#include "sairod/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sairod {

std::string to_string(Compartment c) {
    switch (c) {
        case Compartment::S: return "S";
        case Compartment::A: return "A";
        case Compartment::I: return "I";
        case Compartment::R: return "R";
        case Compartment::O: return "O";
        case Compartment::D: return "D";
        case Compartment::Q: return "Q";
        case Compartment::Ra: return "Ra";
    }
    return "?";
}

Compartment compartment_from_string(const std::string& s) {
    if (s == "S") return Compartment::S;
    if (s == "A") return Compartment::A;
    if (s == "I") return Compartment::I;
    if (s == "R") return Compartment::R;
    if (s == "O") return Compartment::O;
    if (s == "D") return Compartment::D;
    if (s == "Q") return Compartment::Q;
    if (s == "Ra") return Compartment::Ra;
    throw std::invalid_argument("unknown compartment: " + s);
}

int compartment_value(const StateVector& v, Compartment c) {
    switch (c) {
        case Compartment::S: return v.S;
        case Compartment::A: return v.A;
        case Compartment::I: return v.I;
        case Compartment::R: return v.R;
        case Compartment::O: return v.O;
        case Compartment::D: return v.D;
        case Compartment::Q: return v.Q;
        case Compartment::Ra: return v.Ra;
    }
    return 0;
}

Distribution make_distribution(const StateSpace& space,
                               std::span<const std::pair<StateVector, double>> weighted) {
    Distribution dist(space.size(), 0.0);
    double total = 0.0;
    for (const auto& [state, weight] : weighted) {
        if (weight < 0) throw std::domain_error("negative initial weight");
        dist[space.rank(state)] += weight;
        total += weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "initial weights sum to " << total << ", expected 1";
        throw std::domain_error(os.str());
    }
    for (double& w : dist) w /= total;
    return dist;
}

namespace {

void check_dimension(const Dtmc& dtmc, const Distribution& dist) {
    if (dist.size() != dtmc.size())
        throw std::invalid_argument("distribution dimension does not match the chain");
}

void check_mass(double in, double out) {
    if (std::abs(out - in) > 1e-9) {
        std::ostringstream os;
        os << "probability mass not conserved by step: " << in << " -> " << out;
        throw NumericError(os.str());
    }
}

}  // namespace

Distribution step(const Dtmc& dtmc, const Distribution& dist) {
    check_dimension(dtmc, dist);
    const std::int64_t n = static_cast<std::int64_t>(dtmc.size());
    Distribution out(static_cast<std::size_t>(n), 0.0);
    // gather over incoming edges: each target is owned by exactly one task and
    // its sum runs in fixed (ascending source) order, so results do not depend
    // on the schedule
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::uint64_t e = dtmc.in_offsets[t]; e < dtmc.in_offsets[t + 1]; ++e)
            acc += dist[dtmc.in_sources[e]] * dtmc.in_probs[e];
        out[static_cast<std::size_t>(t)] = acc;
    }
    double mass_in = 0.0, mass_out = 0.0;
    for (double w : dist) mass_in += w;
    for (double w : out) mass_out += w;
    check_mass(mass_in, mass_out);
    return out;
}

Distribution step_serial(const Dtmc& dtmc, const Distribution& dist) {
    check_dimension(dtmc, dist);
    Distribution out(dist.size(), 0.0);
    for (std::size_t src = 0; src < dist.size(); ++src) {
        const double w = dist[src];
        if (w == 0.0) continue;
        for (std::uint64_t e = dtmc.offsets[src]; e < dtmc.offsets[src + 1]; ++e)
            out[dtmc.targets[e]] += w * dtmc.probs[e];
    }
    double mass_in = 0.0, mass_out = 0.0;
    for (double w : dist) mass_in += w;
    for (double w : out) mass_out += w;
    check_mass(mass_in, mass_out);
    return out;
}

ConvergeResult converge(const Dtmc& dtmc, Distribution dist0, double tol, int max_iter) {
    if (!(tol > 0)) throw std::domain_error("convergence tolerance must be positive");
    check_dimension(dtmc, dist0);
    ConvergeResult result;
    Distribution current = std::move(dist0);
    for (int k = 0; k < max_iter; ++k) {
        Distribution next = step(dtmc, current);
        double delta = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) delta += std::abs(next[i] - current[i]);
        current = std::move(next);
        if (delta < tol) {
            result.dist = std::move(current);
            result.iterations = k;
            result.converged = true;
            result.last_delta = delta;
            return result;
        }
        result.last_delta = delta;
    }
    result.dist = std::move(current);
    result.iterations = max_iter;
    result.converged = false;
    return result;
}

double query_probability(const StateSpace& space, const Distribution& dist,
                         const StatePredicate& predicate) {
    double total = 0.0;
    const std::size_t n = std::min(space.size(), dist.size());
    for (std::size_t i = 0; i < n; ++i)
        if (predicate(space.states[i])) total += dist[i];
    return total;
}

std::vector<double> marginal_cdf(const StateSpace& space, const Distribution& dist,
                                 Compartment c) {
    std::vector<double> cdf(static_cast<std::size_t>(space.params.population) + 1, 0.0);
    for (std::size_t i = 0; i < space.size(); ++i)
        cdf[static_cast<std::size_t>(compartment_value(space.states[i], c))] += dist[i];
    for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
    const double total = cdf.back();
    if (total > 0)
        for (double& x : cdf) x /= total;
    return cdf;
}

double expected_action(const StateSpace& space, const Distribution& dist,
                       const Policy& policy) {
    double total = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (dist[i] == 0.0) continue;
        total += dist[i] * policy.action_for(space.states[i], space.params.population).meetings;
    }
    return total;
}

}  // namespace sairod

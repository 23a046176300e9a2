#pragma once

#include <functional>
#include <vector>

#include "sairod/policy.hpp"

namespace sairod {

// Probability vector over the indices of a state space.
using Distribution = std::vector<double>;

enum class Compartment { S, A, I, R, O, D, Q, Ra };

std::string to_string(Compartment c);
Compartment compartment_from_string(const std::string& s);
int compartment_value(const StateVector& v, Compartment c);

// Point-mass / weighted-mixture constructors. Weights must sum to 1 within
// 1e-9 and every state must belong to the space.
Distribution make_distribution(const StateSpace& space,
                               std::span<const std::pair<StateVector, double>> weighted);

// dist' = dist * P, one synchronous step. Deterministic regardless of thread
// count (per-target gather in fixed source order).
Distribution step(const Dtmc& dtmc, const Distribution& dist);

// Row-major scatter reference implementation (serial).
Distribution step_serial(const Dtmc& dtmc, const Distribution& dist);

struct ConvergeResult {
    Distribution dist;
    int iterations = 0;
    bool converged = false;
    double last_delta = 0.0;
};

// Iterates `step` until the L1 change drops below tol (or max_iter).
// With multiple absorbing states the limit depends on dist0; this computes
// exactly that initial-distribution-dependent limit.
ConvergeResult converge(const Dtmc& dtmc, Distribution dist0, double tol = 1e-9,
                        int max_iter = 10000);

using StatePredicate = std::function<bool(const StateVector&)>;

double query_probability(const StateSpace& space, const Distribution& dist,
                         const StatePredicate& predicate);

// CDF of one compartment's marginal; indices 0..N, final entry 1.
std::vector<double> marginal_cdf(const StateSpace& space, const Distribution& dist,
                                 Compartment c);

// Expected meeting allowance sum_v M(v) dist(v) under a policy.
double expected_action(const StateSpace& space, const Distribution& dist,
                       const Policy& policy);

}  // namespace sairod

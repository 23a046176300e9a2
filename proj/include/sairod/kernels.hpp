#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sairod/params.hpp"
#include "sairod/types.hpp"

namespace sairod {

// Sparse next-state distribution, sorted by state in canonical order.
using TransitionRow = std::vector<std::pair<StateVector, double>>;

// A row whose mass deviates from 1 by no more than this is renormalized;
// larger deviations abort with NumericError.
inline constexpr double kRowMassTolerance = 1e-9;

// Probability that one susceptible subject contracts the infection during a
// step with `meetings` encounters, under uniform mixing:
//   1 - (1 - omega * A / (N - D - I - O - Q))^meetings.
// Returns 0 when A = 0 or meetings = 0. Throws std::domain_error on the
// degenerate combination of an empty meeting pool with A > 0 and meetings > 0
// (impossible for a valid state).
double infection_probability(const StateVector& v, int meetings, const Parameters& params);

// Same closed form with a fractional exponent, for sensitivity studies on
// interpolated (unrounded) meeting counts.
double infection_probability(const StateVector& v, double meetings, const Parameters& params);

// Distribution of the number H of positive test outcomes when `tests` swabs
// are spread uniformly over the undiagnosed pool A + S + Ra. Entry [H] is
// Pr{H positives}; the vector has tests + 1 entries and sums to 1.
// Throws std::domain_error unless 0 <= tests <= A + S + Ra.
std::vector<double> positive_test_pmf(const StateVector& v, int tests, const Parameters& params);

// Probability that exactly d3 asymptomatic subjects recover and d2 develop
// symptoms in one step; 0 when d2 + d3 > A or either count is negative.
double rho(int d2, int d3, const StateVector& v, const Parameters& params);

// Probability that, with `tests` swabs administered, exactly d2 asymptomatic
// subjects develop symptoms, d3 recover unquarantined, and d9 are quarantined
// on a positive test. Reduces to rho(d2, d3) when tests = 0.
// Throws std::domain_error unless 0 <= tests <= A + S + Ra.
double rho_e(int d2, int d3, int d9, const StateVector& v, int tests, const Parameters& params);

// Probability that exactly d4 symptomatic subjects recover, d5 are
// hospitalised and d6 die. When the residual hospital capacity saturates
// (d5 = C - O), the mass of every outcome that would overflow the capacity is
// folded in: turned-down patients remain symptomatic.
double phi(int d4, int d5, int d6, const StateVector& v, const Parameters& params);

// Probability that exactly d7 hospitalised subjects die and d8 recover.
double zeta(int d7, int d8, const StateVector& v, const Parameters& params);

// Probability that exactly d10 quarantined subjects develop symptoms and d11
// recover.
double chi(int d10, int d11, const StateVector& v, const Parameters& params);

// One-step transition probability between two full-model states under the
// given action. Tests beyond the testable pool are vacuous and ignored.
double transition_probability(const StateVector& from, const StateVector& to,
                              const Action& action, const Parameters& params);

// Complete one-step distribution from a full-model state: enumerates every
// feasible flow assignment exactly once and accumulates by landing state.
// The returned row is renormalized; if raw_mass is non-null it receives the
// pre-normalization mass.
TransitionRow transition_distribution(const StateVector& from, const Action& action,
                                      const Parameters& params, double* raw_mass = nullptr);

// Six-compartment variant (Q = Ra = 0, action.tests must be 0): asymptomatic
// recoveries flow directly into R.
TransitionRow simplified_transition_distribution(const StateVector& from, const Action& action,
                                                 const Parameters& params,
                                                 double* raw_mass = nullptr);

TransitionRow transition_distribution(const StateVector& from, const Action& action,
                                      const Parameters& params, ModelKind kind,
                                      double* raw_mass = nullptr);

namespace detail {

// rho_e evaluated with the outer sum running from H = 0 instead of H = d9.
// The extra terms vanish through the binomial conventions; kept as a
// reference form and asserted equal in debug builds.
double rho_e_full_sum(int d2, int d3, int d9, const StateVector& v, int tests,
                      const Parameters& params);

// Row keyed by packed states (already sorted, which coincides with the
// canonical state order); used by the space builders to avoid repacking.
struct PackedRow {
    std::vector<std::pair<std::uint64_t, double>> entries;
    double raw_mass = 0.0;
};

PackedRow packed_transition_row(const StateVector& from, const Action& action,
                                const Parameters& params, ModelKind kind);

}  // namespace detail

}  // namespace sairod

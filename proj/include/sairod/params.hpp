#pragma once

#include "sairod/types.hpp"

namespace sairod {

// Model parameters: demographic constants plus the per-step transition
// probabilities of single subjects.
struct Parameters {
    int population = 0;         // N
    int hospital_capacity = 0;  // C

    double omega = 0;    // infection in one meeting with an infectious subject
    double beta = 0;     // asymptomatic -> recovered
    double delta = 0;    // asymptomatic -> symptomatic
    double mu = 0;       // symptomatic -> recovered
    double alpha = 0;    // symptomatic -> deceased
    double sigma = 0;    // hospitalised -> deceased
    double xi = 0;       // hospitalised -> recovered
    double gamma = 0;    // tested infectious subject found positive
    double psi = 0;      // symptomatic -> hospitalised
    double iota = 0;     // quarantined -> symptomatic
    double upsilon = 0;  // quarantined -> recovered

    // Stay-put residuals. Clamped at zero so that sums like 0.4+0.35+0.25
    // do not leak a negative ulp into probability products.
    double residual_beta_delta() const { return clamp0(1.0 - beta - delta); }
    double residual_mu_psi_alpha() const { return clamp0(1.0 - mu - psi - alpha); }
    double residual_sigma_xi() const { return clamp0(1.0 - sigma - xi); }
    double residual_iota_upsilon() const { return clamp0(1.0 - iota - upsilon); }

    // Throws std::domain_error on any violated constraint.
    void validate() const;

private:
    static double clamp0(double x) { return x < 0 ? 0.0 : x; }
};

// Throws std::domain_error unless v is a valid state for (params, kind):
// non-negative counts, sum N, O <= C, and Q = Ra = 0 for the simplified model.
void validate_state(const StateVector& v, const Parameters& params, ModelKind kind);

}  // namespace sairod

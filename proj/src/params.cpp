#include "sairod/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sairod {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << "parameter " << name << " = " << p << " is not a probability";
        throw std::domain_error(os.str());
    }
}

void check_residual(double r, const char* name) {
    // allow a negative ulp from summing decimal literals
    if (r < -1e-9) {
        std::ostringstream os;
        os << "constraint " << name << " >= 0 violated (" << r << ")";
        throw std::domain_error(os.str());
    }
}

}  // namespace

void Parameters::validate() const {
    if (population < 1) throw std::domain_error("population must be >= 1");
    if (hospital_capacity < 0) throw std::domain_error("hospital capacity must be >= 0");
    if (population > 255)
        throw std::domain_error("population above 255 is outside the supported range");
    check_probability(omega, "omega");
    check_probability(beta, "beta");
    check_probability(delta, "delta");
    check_probability(mu, "mu");
    check_probability(alpha, "alpha");
    check_probability(sigma, "sigma");
    check_probability(xi, "xi");
    check_probability(gamma, "gamma");
    check_probability(psi, "psi");
    check_probability(iota, "iota");
    check_probability(upsilon, "upsilon");
    check_residual(1.0 - beta - delta, "C_{beta,delta}");
    check_residual(1.0 - mu - psi - alpha, "C_{mu,psi,alpha}");
    check_residual(1.0 - sigma - xi, "C_{sigma,xi}");
    check_residual(1.0 - iota - upsilon, "C_{iota,upsilon}");
}

void validate_state(const StateVector& v, const Parameters& params, ModelKind kind) {
    auto fail = [&](const char* what) {
        std::ostringstream os;
        os << "invalid state " << v << ": " << what;
        throw std::domain_error(os.str());
    };
    if (v.S < 0 || v.A < 0 || v.I < 0 || v.R < 0 || v.O < 0 || v.D < 0 || v.Q < 0 || v.Ra < 0)
        fail("negative compartment");
    if (v.sum() != params.population) fail("compartments do not sum to N");
    if (v.O > params.hospital_capacity) fail("hospitalised beyond capacity");
    if (kind == ModelKind::simplified && (v.Q != 0 || v.Ra != 0))
        fail("Q and Ra must be 0 in the simplified model");
}

}  // namespace sairod

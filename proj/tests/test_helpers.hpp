#pragma once

#include <random>
#include <vector>

#include "sairod/params.hpp"

namespace sairod::test {

// The probability vector used throughout the numeric experiments:
// (alpha, beta, delta, mu, omega, psi, sigma, xi) =
// (0.25, 0.45, 0.25, 0.4, 0.5, 0.35, 0.1, 0.65); testing-related
// probabilities are free and default to an arbitrary valid choice.
inline Parameters paper_parameters(int population, int capacity, double gamma = 0.8,
                                   double iota = 0.3, double upsilon = 0.5) {
    Parameters p;
    p.population = population;
    p.hospital_capacity = capacity;
    p.alpha = 0.25;
    p.beta = 0.45;
    p.delta = 0.25;
    p.mu = 0.4;
    p.omega = 0.5;
    p.psi = 0.35;
    p.sigma = 0.1;
    p.xi = 0.65;
    p.gamma = gamma;
    p.iota = iota;
    p.upsilon = upsilon;
    return p;
}

// Uniformly random parameter draw satisfying every residual constraint.
inline Parameters random_parameters(std::mt19937_64& rng, int population, int capacity) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto split2 = [&](double& a, double& b) {
        // uniform over the simplex a + b <= 1
        double x = u(rng), y = u(rng);
        if (x + y > 1.0) {
            x = 1.0 - x;
            y = 1.0 - y;
        }
        a = x;
        b = y;
    };
    Parameters p;
    p.population = population;
    p.hospital_capacity = capacity;
    p.omega = u(rng);
    p.gamma = u(rng);
    split2(p.beta, p.delta);
    split2(p.sigma, p.xi);
    split2(p.iota, p.upsilon);
    // three-way split for (mu, psi, alpha)
    double x = u(rng), y = u(rng), z = u(rng);
    const double s = x + y + z;
    const double scale = s > 0 ? u(rng) / s : 0.0;
    p.mu = x * scale;
    p.psi = y * scale;
    p.alpha = z * scale;
    p.validate();
    return p;
}

// All states with the given total and capacity bound.
inline std::vector<StateVector> all_states(int population, int capacity, ModelKind kind) {
    std::vector<StateVector> out;
    const int width = kind == ModelKind::full ? 8 : 6;
    std::vector<int> c(static_cast<std::size_t>(width), 0);
    auto rec = [&](auto&& self, int idx, int remaining) -> void {
        if (idx == width - 1) {
            c[static_cast<std::size_t>(idx)] = remaining;
            StateVector v{c[0], c[1], c[2], c[3], c[4], c[5],
                          width == 8 ? c[6] : 0, width == 8 ? c[7] : 0};
            if (v.O <= capacity) out.push_back(v);
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            c[static_cast<std::size_t>(idx)] = k;
            self(self, idx + 1, remaining - k);
        }
    };
    rec(rec, 0, population);
    return out;
}

}  // namespace sairod::test

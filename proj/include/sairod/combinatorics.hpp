#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace sairod {

// Binomial coefficient with the extended convention: 0 when b > a or b < 0,
// 1 when a = b = 0. Exact (integer-path) results for all values that occur
// at desk-scale populations.
double binom(long long a, long long b);

// Exact binomial coefficient; throws std::overflow_error if the value does
// not fit. Intended for counting, not for probability products.
std::uint64_t binom_exact(int a, int b);

// C(x,k) p^k (1-p)^(x-k); zero when k > x or k < 0.
// Throws std::domain_error when p is outside [0,1] or x < 0.
double binomial_pmf(long long x, double p, long long k);

// Multinomial coefficient n! / (parts_0! ... parts_k! rem!) with the
// remainder part implied; 0 for negative parts or when the remainder
// would be negative.
double multinom(long long n, std::span<const long long> parts);
double multinom(long long n, std::initializer_list<long long> parts);

// Probability that n independent subjects split into |counts| classes with
// the given per-class probabilities (stay-put remainder implied).
double multinomial_pmf(long long n, std::span<const long long> counts,
                       std::span<const double> probs);

// Number of length-`compartments` compositions of `population`, i.e.
// C(population + compartments - 1, compartments - 1).
std::uint64_t state_count(int compartments, int population);

// Visits every length-`parts` composition of `total` in lexicographic order.
template <typename Fn>
void for_each_composition(int parts, int total, Fn&& fn) {
    if (parts <= 0) return;
    std::vector<int> c(static_cast<std::size_t>(parts), 0);
    auto rec = [&](auto&& self, int idx, int remaining) -> void {
        if (idx == parts - 1) {
            c[static_cast<std::size_t>(idx)] = remaining;
            fn(std::span<const int>(c.data(), c.size()));
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            c[static_cast<std::size_t>(idx)] = k;
            self(self, idx + 1, remaining - k);
        }
    };
    rec(rec, 0, total);
}

}  // namespace sairod

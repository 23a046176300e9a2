#include "sairod/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sairod {

namespace {

using uint128 = unsigned __int128;

// Multiplicative evaluation in 128-bit integers; every intermediate
// res * (a-k+i) / i is itself a binomial coefficient, so the divisions are
// exact. Returns false on overflow.
bool binom_u128(long long a, long long k, uint128& out) {
    uint128 res = 1;
    for (long long i = 1; i <= k; ++i) {
        uint128 factor = static_cast<uint128>(a - k + i);
        if (factor != 0 && res > (std::numeric_limits<uint128>::max)() / factor) return false;
        res = res * factor / static_cast<uint128>(i);
    }
    out = res;
    return true;
}

}  // namespace

double binom(long long a, long long b) {
    if (b < 0 || b > a || a < 0) return 0.0;
    long long k = std::min(b, a - b);
    if (k == 0) return 1.0;
    uint128 exact = 0;
    if (binom_u128(a, k, exact)) {
        return static_cast<double>(exact);
    }
    double res = 1.0;
    for (long long i = 1; i <= k; ++i)
        res *= static_cast<double>(a - k + i) / static_cast<double>(i);
    return res;
}

std::uint64_t binom_exact(int a, int b) {
    if (b < 0 || b > a || a < 0) return 0;
    long long k = std::min<long long>(b, a - b);
    uint128 exact = 0;
    if (!binom_u128(a, k, exact) || exact > (std::numeric_limits<std::uint64_t>::max)())
        throw std::overflow_error("binom_exact overflow");
    return static_cast<std::uint64_t>(exact);
}

double binomial_pmf(long long x, double p, long long k) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_pmf: p outside [0,1]");
    if (x < 0) throw std::domain_error("binomial_pmf: negative trial count");
    if (k < 0 || k > x) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == x ? 1.0 : 0.0;
    return binom(x, k) * std::pow(p, static_cast<double>(k)) *
           std::pow(1.0 - p, static_cast<double>(x - k));
}

double multinom(long long n, std::span<const long long> parts) {
    if (n < 0) return 0.0;
    long long used = 0;
    for (long long p : parts) {
        if (p < 0) return 0.0;
        used += p;
    }
    if (used > n) return 0.0;
    double res = 1.0;
    long long left = n;
    for (long long p : parts) {
        res *= binom(left, p);
        left -= p;
    }
    return res;
}

double multinom(long long n, std::initializer_list<long long> parts) {
    return multinom(n, std::span<const long long>(parts.begin(), parts.size()));
}

double multinomial_pmf(long long n, std::span<const long long> counts,
                       std::span<const double> probs) {
    long long used = 0;
    for (long long c : counts) {
        if (c < 0) return 0.0;
        used += c;
    }
    if (used > n) return 0.0;
    double rest_p = 1.0;
    for (double p : probs) rest_p -= p;
    if (rest_p < 0) rest_p = 0;
    double res = multinom(n, counts);
    for (std::size_t i = 0; i < counts.size(); ++i)
        res *= std::pow(probs[i], static_cast<double>(counts[i]));
    res *= std::pow(rest_p, static_cast<double>(n - used));
    return res;
}

std::uint64_t state_count(int compartments, int population) {
    if (compartments < 1) throw std::domain_error("state_count: need at least one compartment");
    if (population < 0) throw std::domain_error("state_count: negative population");
    return binom_exact(population + compartments - 1, compartments - 1);
}

}  // namespace sairod

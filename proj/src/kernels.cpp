#include "sairod/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <vector>

#include "sairod/combinatorics.hpp"

namespace sairod {

namespace {

double infection_probability_impl(const StateVector& v, double meetings,
                                  const Parameters& params) {
    if (meetings < 0) throw std::domain_error("negative meeting count");
    if (v.A == 0 || meetings == 0) return 0.0;
    const int pool = params.population - v.D - v.I - v.O - v.Q;
    if (pool < 1)
        throw std::domain_error(
            "degenerate meeting pool: no candidates to meet but A > 0 and M > 0");
    const double per_meeting = params.omega * static_cast<double>(v.A) / pool;
    return 1.0 - std::pow(1.0 - per_meeting, meetings);
}

void check_tests(const StateVector& v, int tests) {
    if (tests < 0) throw std::domain_error("negative test count");
    if (tests > v.testable_pool()) {
        std::ostringstream os;
        os << "tests (" << tests << ") exceed the testable pool A+S+Ra = "
           << v.testable_pool();
        throw std::domain_error(os.str());
    }
}

// Eq-level core of rho_e with the positive-test pmf precomputed.
double rho_e_impl(int d2, int d3, int d9, const StateVector& v, int tests,
                  const Parameters& params, std::span<const double> s_pmf,
                  bool sum_from_zero) {
    if (d2 < 0 || d3 < 0 || d9 < 0) return 0.0;
    if (d2 + d3 + d9 > v.A || d9 > tests) return 0.0;
    double total = 0.0;
    for (int H = sum_from_zero ? 0 : d9; H <= tests; ++H) {
        if (H > v.A) continue;  // Pr{s_H} = 0: no conditional contribution
        const double picked_sym = binom(d2, H - d9);
        if (picked_sym == 0.0) continue;
        double inner = 0.0;
        for (int F = 0; F <= d9; ++F) {
            const double k_factor = binom(d3 + F, F) *
                                    binom(v.A - (d2 + d3 + F), d9 - F) * picked_sym;
            if (k_factor == 0.0) continue;
            inner += rho(d2, d3 + F, v, params) * k_factor;
        }
        total += s_pmf[static_cast<std::size_t>(H)] * inner / binom(v.A, H);
    }
    return total;
}

}  // namespace

double infection_probability(const StateVector& v, int meetings, const Parameters& params) {
    return infection_probability_impl(v, static_cast<double>(meetings), params);
}

double infection_probability(const StateVector& v, double meetings, const Parameters& params) {
    return infection_probability_impl(v, meetings, params);
}

std::vector<double> positive_test_pmf(const StateVector& v, int tests,
                                      const Parameters& params) {
    check_tests(v, tests);
    const int negatives = v.S + v.Ra;
    const double all_subsets = binom(v.testable_pool(), tests);
    std::vector<double> out(static_cast<std::size_t>(tests) + 1, 0.0);
    for (int H = 0; H <= tests; ++H) {
        double sum = 0.0;
        for (int p = 0; p <= tests; ++p) {
            const double ways = binom(negatives, tests - p) * binom(v.A, p);
            if (ways == 0.0) continue;
            sum += ways * binomial_pmf(p, params.gamma, H);
        }
        out[static_cast<std::size_t>(H)] = sum / all_subsets;
    }
    return out;
}

double rho(int d2, int d3, const StateVector& v, const Parameters& params) {
    if (d2 < 0 || d3 < 0 || d2 + d3 > v.A) return 0.0;
    const long long counts[] = {d2, d3};
    const double probs[] = {params.delta, params.beta};
    return multinomial_pmf(v.A, counts, probs);
}

double rho_e(int d2, int d3, int d9, const StateVector& v, int tests,
             const Parameters& params) {
    check_tests(v, tests);
    if (d2 < 0 || d3 < 0 || d9 < 0) return 0.0;
    if (d2 + d3 + d9 > v.A || d9 > tests) return 0.0;
    const auto s_pmf = positive_test_pmf(v, tests, params);
    const double value = rho_e_impl(d2, d3, d9, v, tests, params, s_pmf, false);
#ifndef NDEBUG
    const double full = rho_e_impl(d2, d3, d9, v, tests, params, s_pmf, true);
    assert(std::abs(value - full) <= 1e-12);
#endif
    return value;
}

double detail::rho_e_full_sum(int d2, int d3, int d9, const StateVector& v, int tests,
                              const Parameters& params) {
    check_tests(v, tests);
    if (d2 < 0 || d3 < 0 || d9 < 0) return 0.0;
    if (d2 + d3 + d9 > v.A || d9 > tests) return 0.0;
    const auto s_pmf = positive_test_pmf(v, tests, params);
    return rho_e_impl(d2, d3, d9, v, tests, params, s_pmf, true);
}

double phi(int d4, int d5, int d6, const StateVector& v, const Parameters& params) {
    const int residual_capacity = params.hospital_capacity - v.O;
    if (d4 < 0 || d5 < 0 || d6 < 0) return 0.0;
    if (d4 + d5 + d6 > v.I || d5 > residual_capacity) return 0.0;

    const double probs[] = {params.mu, params.psi, params.alpha};
    auto unsaturated = [&](int a4, int a5, int a6) {
        const long long counts[] = {a4, a5, a6};
        return multinomial_pmf(v.I, counts, probs);
    };

    if (d5 < residual_capacity) return unsaturated(d4, d5, d6);
    // capacity saturated: every outcome with more hospitalisable patients
    // keeps the excess in I and lands on this same state change
    double total = 0.0;
    for (int h = 0; h <= v.I - d4 - d6 - residual_capacity; ++h)
        total += unsaturated(d4, residual_capacity + h, d6);
    return total;
}

double zeta(int d7, int d8, const StateVector& v, const Parameters& params) {
    if (d7 < 0 || d8 < 0 || d7 + d8 > v.O) return 0.0;
    const long long counts[] = {d7, d8};
    const double probs[] = {params.sigma, params.xi};
    return multinomial_pmf(v.O, counts, probs);
}

double chi(int d10, int d11, const StateVector& v, const Parameters& params) {
    if (d10 < 0 || d11 < 0 || d10 + d11 > v.Q) return 0.0;
    const long long counts[] = {d10, d11};
    const double probs[] = {params.iota, params.upsilon};
    return multinomial_pmf(v.Q, counts, probs);
}

double transition_probability(const StateVector& from, const StateVector& to,
                              const Action& action, const Parameters& params) {
    params.validate();
    validate_state(from, params, ModelKind::full);
    validate_state(to, params, ModelKind::full);
    if (action.meetings < 0 || action.tests < 0)
        throw std::domain_error("negative action component");
    const int tests = std::min(action.tests, from.testable_pool());

    const StateDelta dv = StateDelta::between(from, to);
    const double pg = infection_probability(from, action.meetings, params);
    const double p1 = binomial_pmf(from.S, pg, -dv.S);
    if (p1 == 0.0) return 0.0;

    const int d2_max = -dv.S - dv.A - dv.Ra;  // leaves d9 >= 0 per balance B2
    if (d2_max < 0) return 0.0;
    const auto s_pmf = positive_test_pmf(from, tests, params);
    const int residual_capacity = params.hospital_capacity - from.O;

    double total = 0.0;
    for (int d2 = 0; d2 <= d2_max; ++d2) {
        const int d9 = d2_max - d2;
        const double p2 = rho_e_impl(d2, dv.Ra, d9, from, tests, params, s_pmf, false);
        if (p2 == 0.0) continue;
        double inner = 0.0;
        for (int d4 = 0; d4 <= from.I; ++d4) {
            const int d5_cap = std::min(residual_capacity, from.I - d4);
            for (int d5 = 0; d5 <= d5_cap; ++d5) {
                for (int d6 = 0; d6 <= from.I - d4 - d5; ++d6) {
                    const double p3 = phi(d4, d5, d6, from, params);
                    if (p3 == 0.0) continue;
                    const double p4 =
                        zeta(dv.D - d6, d5 + d6 - dv.D - dv.O, from, params);
                    if (p4 == 0.0) continue;
                    const double p5 = chi(dv.I - d2 + d4 + d5 + d6,
                                          dv.R + dv.D + dv.O - d4 - d5 - d6, from, params);
                    inner += p3 * p4 * p5;
                }
            }
        }
        total += p2 * inner;
    }
    return p1 * total;
}

namespace {

// Open-addressing accumulator keyed by packed states. The all-ones key is
// unreachable for any valid state (compartments would sum past N).
class ProbAccumulator {
public:
    explicit ProbAccumulator(std::size_t expected) { rehash(round_up(expected * 2)); }

    void add(std::uint64_t key, double p) {
        if (size_ * 2 >= keys_.size()) rehash(keys_.size() * 2);
        std::size_t slot = index_of(key);
        while (keys_[slot] != kEmpty) {
            if (keys_[slot] == key) {
                vals_[slot] += p;
                return;
            }
            slot = (slot + 1) & mask_;
        }
        keys_[slot] = key;
        vals_[slot] = p;
        ++size_;
    }

    std::vector<std::pair<std::uint64_t, double>> sorted_entries() const {
        std::vector<std::pair<std::uint64_t, double>> out;
        out.reserve(size_);
        for (std::size_t i = 0; i < keys_.size(); ++i)
            if (keys_[i] != kEmpty) out.emplace_back(keys_[i], vals_[i]);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

    static std::size_t round_up(std::size_t n) {
        std::size_t c = 64;
        while (c < n) c <<= 1;
        return c;
    }

    std::size_t index_of(std::uint64_t key) const {
        std::uint64_t h = key;
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 33;
        return static_cast<std::size_t>(h) & mask_;
    }

    void rehash(std::size_t capacity) {
        std::vector<std::uint64_t> old_keys = std::move(keys_);
        std::vector<double> old_vals = std::move(vals_);
        keys_.assign(capacity, kEmpty);
        vals_.assign(capacity, 0.0);
        mask_ = capacity - 1;
        size_ = 0;
        for (std::size_t i = 0; i < old_keys.size(); ++i)
            if (old_keys[i] != kEmpty) add(old_keys[i], old_vals[i]);
    }

    std::vector<std::uint64_t> keys_;
    std::vector<double> vals_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

struct BlockEntry3 {
    int a, b, c;
    double p;
};
struct BlockEntry2 {
    int a, b;
    double p;
};

detail::PackedRow distribution_rows(const StateVector& v, const Action& action,
                                    const Parameters& params, ModelKind kind) {
    params.validate();
    validate_state(v, params, kind);
    if (action.meetings < 0 || action.tests < 0)
        throw std::domain_error("negative action component");
    if (kind == ModelKind::simplified && action.tests != 0)
        throw std::domain_error("the simplified model admits only t = 0 actions");
    const int tests = std::min(action.tests, v.testable_pool());

    // per-block outcome tables; zero-probability entries pruned up front
    const double pg = infection_probability(v, action.meetings, params);
    std::vector<double> l1(static_cast<std::size_t>(v.S) + 1);
    for (int d1 = 0; d1 <= v.S; ++d1)
        l1[static_cast<std::size_t>(d1)] = binomial_pmf(v.S, pg, d1);

    std::vector<BlockEntry3> a_block;  // (d2, d3, d9)
    if (tests == 0) {
        for (int d2 = 0; d2 <= v.A; ++d2)
            for (int d3 = 0; d3 + d2 <= v.A; ++d3) {
                const double p = rho(d2, d3, v, params);
                if (p != 0.0) a_block.push_back({d2, d3, 0, p});
            }
    } else {
        const auto s_pmf = positive_test_pmf(v, tests, params);
        for (int d2 = 0; d2 <= v.A; ++d2)
            for (int d3 = 0; d3 + d2 <= v.A; ++d3)
                for (int d9 = 0; d9 <= std::min(tests, v.A - d2 - d3); ++d9) {
                    const double p = rho_e_impl(d2, d3, d9, v, tests, params, s_pmf, false);
                    if (p != 0.0) a_block.push_back({d2, d3, d9, p});
                }
    }

    const int residual_capacity = params.hospital_capacity - v.O;
    std::vector<BlockEntry3> i_block;  // (d4, d5, d6), d5 capped by capacity
    for (int d4 = 0; d4 <= v.I; ++d4)
        for (int d5 = 0; d5 <= std::min(residual_capacity, v.I - d4); ++d5)
            for (int d6 = 0; d6 + d4 + d5 <= v.I; ++d6) {
                const double p = phi(d4, d5, d6, v, params);
                if (p != 0.0) i_block.push_back({d4, d5, d6, p});
            }

    std::vector<BlockEntry2> o_block;  // (d7, d8)
    for (int d7 = 0; d7 <= v.O; ++d7)
        for (int d8 = 0; d8 + d7 <= v.O; ++d8) {
            const double p = zeta(d7, d8, v, params);
            if (p != 0.0) o_block.push_back({d7, d8, p});
        }

    std::vector<BlockEntry2> q_block;  // (d10, d11)
    for (int d10 = 0; d10 <= v.Q; ++d10)
        for (int d11 = 0; d11 + d10 <= v.Q; ++d11) {
            const double p = chi(d10, d11, v, params);
            if (p != 0.0) q_block.push_back({d10, d11, p});
        }

    const std::size_t flows = static_cast<std::size_t>(v.S + 1) * a_block.size() *
                              i_block.size() * o_block.size() * q_block.size();
    ProbAccumulator acc(std::min<std::size_t>(flows, 4096));

    const bool merge_recoveries = kind == ModelKind::simplified;
    for (int d1 = 0; d1 <= v.S; ++d1) {
        const double p1 = l1[static_cast<std::size_t>(d1)];
        if (p1 == 0.0) continue;
        const int s_after = v.S - d1;
        const int a_in = v.A + d1;
        for (const auto& ab : a_block) {
            const double p2 = p1 * ab.p;
            const int a_after = a_in - ab.a - ab.b - ab.c;
            const int i_in = v.I + ab.a;
            const int q_in = v.Q + ab.c;
            const int ra_after = merge_recoveries ? 0 : v.Ra + ab.b;
            const int r_in = merge_recoveries ? v.R + ab.b : v.R;
            for (const auto& ib : i_block) {
                const double p3 = p2 * ib.p;
                const int i_mid = i_in - ib.a - ib.b - ib.c;
                const int r_mid = r_in + ib.a;
                const int o_in = v.O + ib.b;
                const int d_in = v.D + ib.c;
                for (const auto& ob : o_block) {
                    const double p4 = p3 * ob.p;
                    const int o_after = o_in - ob.a - ob.b;
                    const int d_after = d_in + ob.a;
                    const int r_o = r_mid + ob.b;
                    for (const auto& qb : q_block) {
                        const StateVector next{s_after,
                                               a_after,
                                               i_mid + qb.a,
                                               r_o + qb.b,
                                               o_after,
                                               d_after,
                                               q_in - qb.a - qb.b,
                                               ra_after};
                        acc.add(next.pack(), p4 * qb.p);
                    }
                }
            }
        }
    }

    detail::PackedRow row;
    row.entries = acc.sorted_entries();
    double mass = 0.0;
    for (const auto& [key, p] : row.entries) mass += p;
    row.raw_mass = mass;
    if (std::abs(mass - 1.0) > kRowMassTolerance) {
        std::ostringstream os;
        os << "transition row from " << v << " under " << action
           << " has mass " << mass << " (|mass-1| > " << kRowMassTolerance << ")";
        throw NumericError(os.str());
    }
    for (auto& [key, p] : row.entries) p /= mass;
    return row;
}

TransitionRow to_state_row(detail::PackedRow&& packed) {
    TransitionRow row;
    row.reserve(packed.entries.size());
    for (const auto& [key, p] : packed.entries)
        row.emplace_back(StateVector::unpack(key), p);
    return row;
}

}  // namespace

namespace detail {

PackedRow packed_transition_row(const StateVector& from, const Action& action,
                                const Parameters& params, ModelKind kind) {
    return distribution_rows(from, action, params, kind);
}

}  // namespace detail

TransitionRow transition_distribution(const StateVector& from, const Action& action,
                                      const Parameters& params, double* raw_mass) {
    return transition_distribution(from, action, params, ModelKind::full, raw_mass);
}

TransitionRow simplified_transition_distribution(const StateVector& from, const Action& action,
                                                 const Parameters& params, double* raw_mass) {
    return transition_distribution(from, action, params, ModelKind::simplified, raw_mass);
}

TransitionRow transition_distribution(const StateVector& from, const Action& action,
                                      const Parameters& params, ModelKind kind,
                                      double* raw_mass) {
    auto packed = distribution_rows(from, action, params, kind);
    if (raw_mass) *raw_mass = packed.raw_mass;
    return to_state_row(std::move(packed));
}

}  // namespace sairod

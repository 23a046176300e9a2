#include "sairod/montecarlo.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "sairod/combinatorics.hpp"
#include "sairod/kernels.hpp"

namespace sairod {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master + stream * 0x9e3779b97f4a7c15ULL);
}

namespace {

double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

// Inverse-CDF walk; mirrored for p > 1/2 so the starting mass never
// underflows at desk-scale n.
int sample_binomial(int n, double p, Rng& rng) {
    if (n <= 0) return 0;
    p = clamp01(p);
    if (p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
    const double u = uniform01(rng);
    const double ratio = p / (1.0 - p);
    double pmf = std::pow(1.0 - p, n);
    double cdf = pmf;
    int k = 0;
    while (u > cdf && k < n) {
        ++k;
        pmf *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
        cdf += pmf;
    }
    return k;
}

// Number of marked subjects among `draws` taken uniformly without
// replacement from a population of `total` containing `marked`.
int sample_hypergeometric(int marked, int total, int draws, Rng& rng) {
    assert(marked >= 0 && total >= marked && draws >= 0 && draws <= total);
    if (draws == 0 || marked == 0) return 0;
    if (marked == total) return draws;
    const int k_min = std::max(0, draws - (total - marked));
    const int k_max = std::min(draws, marked);
    if (k_min == k_max) return k_min;
    const double u = uniform01(rng);
    double pmf = binom(marked, k_min) * binom(total - marked, draws - k_min) /
                 binom(total, draws);
    double cdf = pmf;
    int k = k_min;
    while (u > cdf && k < k_max) {
        pmf *= static_cast<double>(marked - k) * static_cast<double>(draws - k) /
               (static_cast<double>(k + 1) *
                static_cast<double>(total - marked - draws + k + 1));
        ++k;
        cdf += pmf;
    }
    return k;
}

// (x, y) with x ~ B(n, px) and y ~ B(n - x, py / (1 - px)): the conditional
// decomposition of the trinomial (px, py, rest).
std::pair<int, int> sample_trinomial(int n, double px, double py, Rng& rng) {
    const int x = sample_binomial(n, px, rng);
    if (n - x == 0) return {x, 0};
    const double rest = 1.0 - px;
    const double cond = rest > 0 ? py / rest : 1.0;
    return {x, sample_binomial(n - x, cond, rng)};
}

}  // namespace

StateVector sample_transition(const StateVector& v, const Action& action,
                              const Parameters& params, ModelKind kind, Rng& rng) {
    validate_state(v, params, kind);
    if (action.meetings < 0 || action.tests < 0)
        throw std::domain_error("negative action component");
    if (kind == ModelKind::simplified && action.tests != 0)
        throw std::domain_error("the simplified model admits only t = 0 actions");
    const int tests = std::min(action.tests, v.testable_pool());

    FlowVector flow;

    // S: each susceptible contracts the infection independently
    flow.d1 = sample_binomial(v.S, infection_probability(v, action.meetings, params), rng);

    // A: health outcome first (symptoms / recovery / stay), then the positive
    // tests land uniformly across the asymptomatic subjects
    auto [d2, recovered] = sample_trinomial(v.A, params.delta, params.beta, rng);
    flow.d2 = d2;
    if (tests > 0 && v.A > 0) {
        const int infected_tested = sample_hypergeometric(v.A, v.testable_pool(), tests, rng);
        const int positives = sample_binomial(infected_tested, params.gamma, rng);
        // split the positives over the health classes (hypergeometric chain)
        const int pos_symptomatic = sample_hypergeometric(d2, v.A, positives, rng);
        const int pos_recovered =
            sample_hypergeometric(recovered, v.A - d2, positives - pos_symptomatic, rng);
        const int pos_stay = positives - pos_symptomatic - pos_recovered;
        flow.d9 = pos_recovered + pos_stay;  // quarantined
        flow.d3 = recovered - pos_recovered; // recover unobserved
    } else {
        flow.d3 = recovered;
    }

    // I: recoveries, hospitalisation candidates, deaths; the capacity folds
    // excess candidates back into I
    auto [d4, candidates] = sample_trinomial(v.I, params.mu, params.psi, rng);
    flow.d4 = d4;
    const int after_mu_psi = v.I - d4 - candidates;
    const double rest = 1.0 - params.mu - params.psi;
    flow.d6 = sample_binomial(after_mu_psi, rest > 0 ? params.alpha / rest : 1.0, rng);
    flow.d5 = std::min(candidates, params.hospital_capacity - v.O);

    // O and Q
    auto [d7, d8] = sample_trinomial(v.O, params.sigma, params.xi, rng);
    flow.d7 = d7;
    flow.d8 = d8;
    auto [d10, d11] = sample_trinomial(v.Q, params.iota, params.upsilon, rng);
    flow.d10 = d10;
    flow.d11 = d11;

    assert(flow.feasible_from(v));
    StateVector next = flow.apply(v, kind);
    assert(next.sum() == params.population);
    assert(next.O <= params.hospital_capacity);
    return next;
}

void McConfig::validate() const {
    params.validate();
    policy.validate();
    if (runs < 1) throw std::domain_error("monte carlo needs runs >= 1");
    if (depth < 0) throw std::domain_error("negative depth");
    if (initial.empty()) throw std::domain_error("no initial states");
    double total = 0.0;
    for (const auto& [state, weight] : initial) {
        validate_state(state, params, kind);
        if (weight < 0) throw std::domain_error("negative initial weight");
        total += weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::domain_error("initial weights must sum to 1");
    if (real_population != 0 && real_population < params.population)
        throw std::domain_error("real population smaller than the representative count");
}

McConfig scale_config(McConfig config, int factor) {
    if (factor < 1) throw std::domain_error("scale factor must be >= 1");
    if (factor == 1) return config;
    config.params.population *= factor;
    config.params.hospital_capacity *= factor;
    for (auto& [state, weight] : config.initial) {
        state.S *= factor;
        state.A *= factor;
        state.I *= factor;
        state.R *= factor;
        state.O *= factor;
        state.D *= factor;
        state.Q *= factor;
        state.Ra *= factor;
    }
    if (config.policy.kind == PolicyKind::constant) {
        config.policy.constant.meetings *= factor;
    } else {
        config.policy.adaptive.m_low *= factor;
        config.policy.adaptive.m_high *= factor;
        // thresholds are fractions of the population and stay put
    }
    return config;
}

McReport run_monte_carlo(const McConfig& config) {
    config.validate();
    const int n_runs = config.runs;
    const int depth = config.depth;
    const int N = config.params.population;

    // per-run compartment trajectories, filled independently and reduced in
    // run order afterwards (reproducible under any schedule)
    const std::size_t steps = static_cast<std::size_t>(depth) + 1;
    std::vector<std::uint8_t> traj(static_cast<std::size_t>(n_runs) * steps * 8);
    std::vector<int> meetings_first(static_cast<std::size_t>(n_runs), 0);

    std::vector<double> weights_cdf;
    double acc = 0.0;
    for (const auto& [state, weight] : config.initial) {
        acc += weight;
        weights_cdf.push_back(acc);
    }

    std::exception_ptr failure;
#pragma omp parallel for schedule(static) if (config.parallel)
    for (int run = 0; run < n_runs; ++run) {
        try {
            Rng rng(stream_seed(config.seed, static_cast<std::uint64_t>(run)));
            const double u = uniform01(rng) * weights_cdf.back();
            std::size_t pick = 0;
            while (pick + 1 < weights_cdf.size() && u > weights_cdf[pick]) ++pick;
            StateVector v = config.initial[pick].first;

            auto record = [&](int step, const StateVector& s) {
                std::uint8_t* slot =
                    traj.data() + (static_cast<std::size_t>(run) * steps +
                                   static_cast<std::size_t>(step)) * 8;
                slot[0] = static_cast<std::uint8_t>(s.S);
                slot[1] = static_cast<std::uint8_t>(s.A);
                slot[2] = static_cast<std::uint8_t>(s.I);
                slot[3] = static_cast<std::uint8_t>(s.R);
                slot[4] = static_cast<std::uint8_t>(s.O);
                slot[5] = static_cast<std::uint8_t>(s.D);
                slot[6] = static_cast<std::uint8_t>(s.Q);
                slot[7] = static_cast<std::uint8_t>(s.Ra);
            };
            record(0, v);
            for (int k = 0; k < depth; ++k) {
                const Action a = config.policy.action_for(v, N);
                if (k == 0) meetings_first[static_cast<std::size_t>(run)] = a.meetings;
                v = sample_transition(v, a, config.params, config.kind, rng);
                record(k + 1, v);
            }
            if (depth == 0)
                meetings_first[static_cast<std::size_t>(run)] =
                    config.policy.action_for(v, N).meetings;
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    McReport report;
    report.seed = config.seed;
    report.runs = n_runs;
    report.depth = depth;
    report.real_population = config.real_population ? config.real_population : N;
    report.benchmark_fraction = config.benchmark_fraction;
    report.benchmark_strict = config.benchmark_strict;
    report.steps.resize(steps);

    const double threshold = config.benchmark_fraction * N;
    std::vector<int> column(static_cast<std::size_t>(n_runs));
    for (std::size_t step = 0; step < steps; ++step) {
        McStepStats& stats = report.steps[step];
        for (int c = 0; c < 8; ++c) {
            double sum = 0.0;
            for (int run = 0; run < n_runs; ++run) {
                const int value =
                    traj[(static_cast<std::size_t>(run) * steps + step) * 8 +
                         static_cast<std::size_t>(c)];
                column[static_cast<std::size_t>(run)] = value;
                sum += value;
            }
            std::sort(column.begin(), column.end());
            stats.mean[c] = sum / n_runs;
            stats.q10[c] = column[static_cast<std::size_t>((n_runs - 1) / 10)];
            stats.q50[c] = column[static_cast<std::size_t>((n_runs - 1) / 2)];
            stats.q90[c] = column[static_cast<std::size_t>((n_runs - 1) * 9 / 10)];
        }
        int hits = 0;
        for (int run = 0; run < n_runs; ++run) {
            const int deaths =
                traj[(static_cast<std::size_t>(run) * steps + step) * 8 + 5];
            const bool hit = config.benchmark_strict ? (deaths > threshold)
                                                     : (deaths >= threshold);
            hits += hit ? 1 : 0;
        }
        stats.benchmark = static_cast<double>(hits) / n_runs;
    }
    report.final_benchmark = report.steps.back().benchmark;
    double m_sum = 0.0;
    for (int run = 0; run < n_runs; ++run) m_sum += meetings_first[static_cast<std::size_t>(run)];
    report.expected_meetings_first = m_sum / n_runs;
    return report;
}

std::pair<double, double> quantization_error(long long real_population, int representatives) {
    if (representatives < 1)
        throw std::domain_error("need at least one representative");
    const double absolute =
        static_cast<double>(real_population) / (2.0 * representatives);
    const double relative = 1.0 / (2.0 * representatives);
    return {absolute, relative};
}

}  // namespace sairod

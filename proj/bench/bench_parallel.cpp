// Timing comparison of the OpenMP kernels against their serial references:
// space construction, distribution stepping, and Monte Carlo simulation.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sairod/montecarlo.hpp"
#include "sairod/solver.hpp"
#include "sairod/state_space.hpp"

using namespace sairod;

namespace {

Parameters paper_parameters(int population, int capacity) {
    Parameters p;
    p.population = population;
    p.hospital_capacity = capacity;
    p.omega = 0.5;
    p.beta = 0.45;
    p.delta = 0.25;
    p.mu = 0.4;
    p.alpha = 0.25;
    p.psi = 0.35;
    p.sigma = 0.1;
    p.xi = 0.65;
    return p;
}

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

template <typename Fn>
double timed(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return seconds(t0, std::chrono::steady_clock::now());
}

}  // namespace

int main(int argc, char** argv) {
    const int population = argc > 1 ? std::stoi(argv[1]) : 18;
    const int capacity = argc > 2 ? std::stoi(argv[2]) : 4;
    const Parameters params = paper_parameters(population, capacity);
    const StateVector initial{population - 1, 1, 0, 0, 0, 0, 0, 0};
    const std::vector<Action> actions{{2, 0}, {5, 0}};

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
    std::printf("compiled without OpenMP\n");
#endif
    std::printf("model: simplified, N=%d, C=%d, |actions|=%zu\n\n", population, capacity,
                actions.size());

    BuiltModel parallel_model, serial_model;
    const double t_build_par = timed([&] {
        parallel_model =
            build_reachable({&initial, 1}, actions, params, ModelKind::simplified);
    });
    const double t_build_ser = timed([&] {
        serial_model =
            build_reachable_serial({&initial, 1}, actions, params, ModelKind::simplified);
    });
    const bool build_match = parallel_model.space.states == serial_model.space.states &&
                             parallel_model.table.targets == serial_model.table.targets &&
                             parallel_model.table.probs == serial_model.table.probs;
    std::printf("build_reachable   %8zu states %10zu entries  parallel %7.3fs  serial %7.3fs  speedup %5.2fx  %s\n",
                parallel_model.space.size(), parallel_model.table.entries(), t_build_par,
                t_build_ser, t_build_ser / t_build_par,
                build_match ? "bit-identical" : "MISMATCH");

    Policy policy;
    policy.kind = PolicyKind::constant;
    policy.constant = actions[1];
    policy.name = "bench";
    const Dtmc dtmc = apply_policy(parallel_model, policy);
    Distribution dist(dtmc.size(), 0.0);
    dist[dtmc.space->rank(initial)] = 1.0;

    const int step_reps = 200;
    Distribution out_par, out_ser;
    const double t_step_par = timed([&] {
        Distribution d = dist;
        for (int i = 0; i < step_reps; ++i) d = step(dtmc, d);
        out_par = std::move(d);
    });
    const double t_step_ser = timed([&] {
        Distribution d = dist;
        for (int i = 0; i < step_reps; ++i) d = step_serial(dtmc, d);
        out_ser = std::move(d);
    });
    double max_diff = 0;
    for (std::size_t i = 0; i < out_par.size(); ++i)
        max_diff = std::max(max_diff, std::abs(out_par[i] - out_ser[i]));
    std::printf("step x%-4d        %8zu states %10zu edges    parallel %7.3fs  serial %7.3fs  speedup %5.2fx  max|diff|=%.2e\n",
                step_reps, dtmc.size(), dtmc.targets.size(), t_step_par, t_step_ser,
                t_step_ser / t_step_par, max_diff);

    McConfig mc;
    mc.params = params;
    mc.kind = ModelKind::simplified;
    mc.initial = {{initial, 1.0}};
    mc.policy = policy;
    mc.runs = 2000;
    mc.depth = 100;
    mc.seed = 42;
    McReport rep_par, rep_ser;
    const double t_mc_par = timed([&] { rep_par = run_monte_carlo(mc); });
    mc.parallel = false;
    const double t_mc_ser = timed([&] { rep_ser = run_monte_carlo(mc); });
    const bool mc_match = rep_par.final_benchmark == rep_ser.final_benchmark &&
                          rep_par.steps.back().mean[5] == rep_ser.steps.back().mean[5];
    std::printf("monte carlo       %8d runs   depth %-6d       parallel %7.3fs  serial %7.3fs  speedup %5.2fx  %s\n",
                mc.runs, mc.depth, t_mc_par, t_mc_ser, t_mc_ser / t_mc_par,
                mc_match ? "bit-identical" : "MISMATCH");
    return (build_match && mc_match) ? 0 : 1;
}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sairod/experiment.hpp"
#include "sairod/version.hpp"

namespace fs = std::filesystem;
using namespace sairod;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tol = 0;
    bool tol_set = false;
    bool serial = false;
};

RunOverrides overrides_of(const CommonArgs& args) {
    RunOverrides o;
    if (args.seed_set) o.seed = args.seed;
    if (args.tol_set) o.tolerance = args.tol;
    return o;
}

std::vector<StateVector> initial_states_of(const ExperimentConfig& config) {
    std::vector<StateVector> states;
    for (const auto& [state, weight] : config.initial) states.push_back(state);
    return states;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_build(const CommonArgs& args, bool prism) {
    const ExperimentConfig config = load_config(args.config_path);
    if (config.actions.empty())
        throw ConfigError("build requires an action set ('actions' in the config)");
    BuildOptions options;
    options.parallel = !args.serial;
    const BuiltModel model = build_reachable(initial_states_of(config), config.actions,
                                             config.params, config.kind, options);
    std::vector<StateIndex> init;
    for (const auto& [state, weight] : config.initial)
        init.push_back(model.space.rank(state));
    const LabelSet labels = default_labels(model.space, init);
    fs::create_directories(args.out_dir);
    export_mdp(model, labels, fs::path(args.out_dir) / "model", {prism});
    std::cout << "built " << model.space.size() << " states, " << model.table.entries()
              << " transition entries -> " << args.out_dir << "/model.{sta,tra,lab,json}\n";
    return kExitOk;
}

int run_solve(const CommonArgs& args) {
    const ExperimentConfig config = load_config(args.config_path);
    const auto written = run_experiment(config, args.out_dir, overrides_of(args));
    std::cout << "wrote " << written.size() << " files to " << args.out_dir << "\n";
    return kExitOk;
}

int run_policy_eval(const CommonArgs& args) {
    ExperimentConfig config = load_config(args.config_path);
    if (!config.policy) throw ConfigError("policy-eval requires a policy");
    bool has_expected = false;
    for (const auto& q : config.queries)
        has_expected |= q.kind == QuerySpec::Kind::expected_meetings;
    if (!has_expected) {
        QuerySpec q;
        q.kind = QuerySpec::Kind::expected_meetings;
        config.queries.push_back(q);
    }
    const auto written = run_experiment(config, args.out_dir, overrides_of(args));

    // per-state action dump for auditing the control law
    const Dtmc dtmc = build_policy_dtmc(initial_states_of(config), *config.policy,
                                        config.params, config.kind);
    std::ostringstream os;
    os << "state_index,S,A,I,R,O,D,Q,Ra,meetings,tests\n";
    for (std::size_t i = 0; i < dtmc.size(); ++i) {
        const StateVector& v = dtmc.space->states[i];
        const Action a = dtmc.chosen[i];
        os << i << ',' << v.S << ',' << v.A << ',' << v.I << ',' << v.R << ',' << v.O << ','
           << v.D << ',' << v.Q << ',' << v.Ra << ',' << a.meetings << ',' << a.tests << '\n';
    }
    write_file_atomic(fs::path(args.out_dir) / "policy_actions.csv", os.str());
    std::cout << "wrote " << written.size() + 1 << " files to " << args.out_dir << "\n";
    return kExitOk;
}

int run_mc(const CommonArgs& args, std::optional<int> runs, std::optional<int> depth,
           std::optional<int> scale) {
    const ExperimentConfig config = load_config(args.config_path);
    if (!config.policy) throw ConfigError("mc requires a policy");
    if (!config.monte_carlo && !(runs && depth))
        throw ConfigError("mc requires a 'monte_carlo' config section or --runs/--depth");

    McConfig mc;
    mc.params = config.params;
    mc.kind = config.kind;
    mc.initial = config.initial;
    mc.policy = *config.policy;
    mc.runs = runs.value_or(config.monte_carlo ? config.monte_carlo->runs : 1000);
    mc.depth = depth.value_or(config.monte_carlo ? config.monte_carlo->depth : 100);
    mc.seed = args.seed_set ? args.seed : config.seed;
    mc.real_population = config.monte_carlo ? config.monte_carlo->real_population : 0;
    mc.parallel = !args.serial;
    const int factor = scale.value_or(config.monte_carlo ? config.monte_carlo->scale : 1);
    mc = scale_config(std::move(mc), factor);

    const McReport report = run_monte_carlo(mc);
    write_mc_report(report, args.out_dir, config.policy->name);
    std::cout << "mc " << config.policy->name << ": runs=" << report.runs
              << " depth=" << report.depth << " seed=" << report.seed
              << " Pr{benchmark}=" << report.final_benchmark << "\n";
    return kExitOk;
}

int run_export(const CommonArgs& args, bool prism) {
    const ExperimentConfig config = load_config(args.config_path);
    fs::create_directories(args.out_dir);
    const fs::path base = fs::path(args.out_dir) / "model";
    BuildOptions options;
    options.parallel = !args.serial;

    double deaths_fraction = 0.2;
    for (const auto& q : config.queries)
        if (q.kind == QuerySpec::Kind::deaths_ge_frac) deaths_fraction = q.fraction;

    if (config.policy) {
        const Dtmc dtmc = build_policy_dtmc(initial_states_of(config), *config.policy,
                                            config.params, config.kind, options);
        std::vector<StateIndex> init;
        for (const auto& [state, weight] : config.initial)
            init.push_back(dtmc.space->rank(state));
        export_dtmc(dtmc, default_labels(*dtmc.space, init, deaths_fraction), base, {prism});
        std::cout << "exported DTMC (" << dtmc.size() << " states) to " << base
                  << ".{sta,tra,lab,json}\n";
    } else {
        if (config.actions.empty())
            throw ConfigError("export requires a policy or an action set");
        const BuiltModel model = build_reachable(initial_states_of(config), config.actions,
                                                 config.params, config.kind, options);
        std::vector<StateIndex> init;
        for (const auto& [state, weight] : config.initial)
            init.push_back(model.space.rank(state));
        export_mdp(model, default_labels(model.space, init, deaths_fraction), base, {prism});
        std::cout << "exported MDP (" << model.space.size() << " states) to " << base
                  << ".{sta,tra,lab,json}\n";
    }
    return kExitOk;
}

int run_roundtrip(const std::string& in_base, const std::string& out_dir) {
    // import, re-export, compare byte-for-byte
    std::ifstream header_in(in_base + ".json");
    if (!header_in) throw IoError("cannot open " + in_base + ".json");
    std::string type;
    {
        std::ostringstream os;
        os << header_in.rdbuf();
        const auto pos = os.str().find("\"type\"");
        if (pos == std::string::npos) throw IoError("header lacks a type field");
        type = os.str().find("\"mdp\"", pos) != std::string::npos ? "mdp" : "dtmc";
    }

    fs::create_directories(out_dir);
    const fs::path copy_base = fs::path(out_dir) / "roundtrip";
    if (type == "dtmc") {
        const ImportedDtmc imported = import_dtmc(in_base);
        export_dtmc(imported.dtmc, imported.labels, copy_base);
    } else {
        const ImportedMdp imported = import_mdp(in_base);
        export_mdp(imported.model, imported.labels, copy_base);
    }

    bool identical = true;
    for (const char* ext : {".sta", ".tra", ".lab", ".json"}) {
        const std::string a = read_file(in_base + ext);
        const std::string b = read_file(copy_base.string() + ext);
        if (a != b) {
            identical = false;
            std::cerr << "mismatch in " << ext << "\n";
        }
    }
    if (!identical) {
        std::cerr << "roundtrip check FAILED\n";
        return kExitNumeric;
    }
    std::cout << "roundtrip check passed (" << type << ", byte-identical re-export)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact discrete-time Markov engine for the extended SAIROD epidemic model"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    std::optional<int> mc_runs, mc_depth, mc_scale;
    bool prism = false;
    std::string roundtrip_in;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", args.config_path, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("-o,--out", args.out_dir, "output directory");
        cmd->add_option("--seed", args.seed, "seed override")
            ->each([&](const std::string&) { args.seed_set = true; });
        cmd->add_option("--tol", args.tol, "convergence tolerance override")
            ->each([&](const std::string&) { args.tol_set = true; });
        cmd->add_flag("--serial", args.serial, "disable OpenMP parallel paths");
    };

    CLI::App* build = app.add_subcommand("build", "reachability analysis + transition table");
    add_common(build);
    build->add_flag("--prism", prism, "emit PRISM-style headers");

    CLI::App* solve = app.add_subcommand("solve", "apply policy, transient + limit queries");
    add_common(solve);

    CLI::App* policy_eval =
        app.add_subcommand("policy-eval", "policy evaluation: expected action + queries");
    add_common(policy_eval);

    CLI::App* mc = app.add_subcommand("mc", "seeded Monte Carlo simulation");
    add_common(mc);
    mc->add_option("--runs", mc_runs, "number of runs");
    mc->add_option("--depth", mc_depth, "steps per run");
    mc->add_option("--scale", mc_scale, "proportional scaling factor");

    CLI::App* exp = app.add_subcommand("export", "explicit-state export for model checking");
    add_common(exp);
    exp->add_flag("--prism", prism, "emit PRISM-style headers");

    CLI::App* roundtrip = app.add_subcommand("roundtrip-check", "import + re-export + compare");
    roundtrip->add_option("-i,--in", roundtrip_in, "base path of an exported model")->required();
    roundtrip->add_option("-o,--out", args.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return run_build(args, prism);
        if (solve->parsed()) return run_solve(args);
        if (policy_eval->parsed()) return run_policy_eval(args);
        if (mc->parsed()) return run_mc(args, mc_runs, mc_depth, mc_scale);
        if (exp->parsed()) return run_export(args, prism);
        if (roundtrip->parsed()) return run_roundtrip(roundtrip_in, args.out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::domain_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

#include "sairod/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sairod/version.hpp"

namespace sairod {

using nlohmann::json;

std::string QuerySpec::name() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::deaths_ge_frac:
            os << "deaths_" << (strict ? "gt" : "ge") << "_" << fraction;
            break;
        case Kind::compartment_ge:
            os << to_string(compartment) << (strict ? "_gt_" : "_ge_") << threshold;
            break;
        case Kind::cdf:
            os << "cdf_" << to_string(compartment);
            break;
        case Kind::expected_meetings:
            os << "expected_meetings";
            break;
    }
    return os.str();
}

StatePredicate QuerySpec::predicate(const Parameters& params) const {
    switch (kind) {
        case Kind::deaths_ge_frac: {
            const double bound = fraction * params.population;
            const bool gt = strict;
            return [bound, gt](const StateVector& v) {
                return gt ? v.D > bound : v.D >= bound;
            };
        }
        case Kind::compartment_ge: {
            const Compartment c = compartment;
            const int bound = threshold;
            const bool gt = strict;
            return [c, bound, gt](const StateVector& v) {
                const int value = compartment_value(v, c);
                return gt ? value > bound : value >= bound;
            };
        }
        default:
            throw ConfigError("query '" + name() + "' has no state predicate");
    }
}

void ExperimentConfig::validate() const {
    try {
        params.validate();
        if (initial.empty()) throw std::domain_error("no initial states");
        double total = 0.0;
        for (const auto& [state, weight] : initial) {
            validate_state(state, params, kind);
            if (weight < 0) throw std::domain_error("negative initial weight");
            total += weight;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::domain_error("initial weights must sum to 1");
        if (policy) policy->validate();
        if (steps < 0) throw std::domain_error("negative step count");
        if (!(tolerance > 0)) throw std::domain_error("tolerance must be positive");
        if (max_iterations < 1) throw std::domain_error("max_iterations must be >= 1");
        if (monte_carlo) {
            if (monte_carlo->runs < 1) throw std::domain_error("monte carlo runs must be >= 1");
            if (monte_carlo->depth < 1) throw std::domain_error("monte carlo depth must be >= 1");
            if (monte_carlo->scale < 1) throw std::domain_error("monte carlo scale must be >= 1");
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
}

namespace {

StateVector state_from_json(const json& j, ModelKind kind) {
    if (!j.is_array() || (j.size() != 6 && j.size() != 8))
        throw ConfigError("state must be an array of 6 or 8 integers");
    if (kind == ModelKind::full && j.size() != 8)
        throw ConfigError("full-model states need 8 components");
    StateVector v;
    v.S = j.at(0).get<int>();
    v.A = j.at(1).get<int>();
    v.I = j.at(2).get<int>();
    v.R = j.at(3).get<int>();
    v.O = j.at(4).get<int>();
    v.D = j.at(5).get<int>();
    if (j.size() == 8) {
        v.Q = j.at(6).get<int>();
        v.Ra = j.at(7).get<int>();
    }
    return v;
}

Policy policy_from_json(const json& j) {
    Policy policy;
    policy.name = j.value("name", "");
    policy.kind = policy_kind_from_string(j.at("kind").get<std::string>());
    if (policy.kind == PolicyKind::constant) {
        policy.constant.meetings = j.at("meetings").get<int>();
        policy.constant.tests = j.value("tests", 0);
        if (policy.name.empty())
            policy.name = "constant_M" + std::to_string(policy.constant.meetings);
    } else {
        policy.adaptive.threshold_low = j.at("threshold_low").get<double>();
        policy.adaptive.threshold_high = j.at("threshold_high").get<double>();
        policy.adaptive.m_low = j.at("meetings_min").get<int>();
        policy.adaptive.m_high = j.at("meetings_max").get<int>();
        const std::string rounding = j.value("rounding", "truncate");
        if (rounding == "truncate")
            policy.adaptive.rounding = MeetingRounding::truncate;
        else if (rounding == "half-up")
            policy.adaptive.rounding = MeetingRounding::half_up;
        else
            throw ConfigError("unknown rounding mode: " + rounding);
        policy.tests = j.value("tests", 0);
        if (policy.name.empty()) policy.name = to_string(policy.kind);
    }
    return policy;
}

json policy_to_json(const Policy& policy) {
    json j{{"kind", to_string(policy.kind)}, {"name", policy.name}};
    if (policy.kind == PolicyKind::constant) {
        j["meetings"] = policy.constant.meetings;
        j["tests"] = policy.constant.tests;
    } else {
        j["threshold_low"] = policy.adaptive.threshold_low;
        j["threshold_high"] = policy.adaptive.threshold_high;
        j["meetings_min"] = policy.adaptive.m_low;
        j["meetings_max"] = policy.adaptive.m_high;
        j["rounding"] = policy.adaptive.rounding == MeetingRounding::truncate
                            ? "truncate"
                            : "half-up";
        j["tests"] = policy.tests;
    }
    return j;
}

json config_to_json(const ExperimentConfig& config) {
    json j;
    j["model"] = to_string(config.kind);
    j["population"] = config.params.population;
    j["capacity"] = config.params.hospital_capacity;
    j["parameters"] = {{"omega", config.params.omega},   {"beta", config.params.beta},
                       {"delta", config.params.delta},   {"mu", config.params.mu},
                       {"alpha", config.params.alpha},   {"sigma", config.params.sigma},
                       {"xi", config.params.xi},         {"gamma", config.params.gamma},
                       {"psi", config.params.psi},       {"iota", config.params.iota},
                       {"upsilon", config.params.upsilon}};
    j["initial"] = json::array();
    for (const auto& [state, weight] : config.initial) {
        json entry;
        entry["state"] = {state.S, state.A, state.I, state.R, state.O, state.D};
        if (config.kind == ModelKind::full) {
            entry["state"].push_back(state.Q);
            entry["state"].push_back(state.Ra);
        }
        entry["weight"] = weight;
        j["initial"].push_back(entry);
    }
    j["actions"] = json::array();
    for (const Action& a : config.actions) j["actions"].push_back({a.meetings, a.tests});
    if (config.policy) j["policy"] = policy_to_json(*config.policy);
    j["steps"] = config.steps;
    j["tolerance"] = config.tolerance;
    j["max_iterations"] = config.max_iterations;
    j["seed"] = config.seed;
    if (config.monte_carlo) {
        j["monte_carlo"] = {{"runs", config.monte_carlo->runs},
                            {"depth", config.monte_carlo->depth},
                            {"scale", config.monte_carlo->scale},
                            {"real_population", config.monte_carlo->real_population}};
    }
    return j;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }

    ExperimentConfig config;
    try {
        config.kind = model_kind_from_string(j.value("model", "simplified"));
        config.params.population = j.at("population").get<int>();
        config.params.hospital_capacity = j.at("capacity").get<int>();
        const json& p = j.at("parameters");
        config.params.omega = p.value("omega", 0.0);
        config.params.beta = p.value("beta", 0.0);
        config.params.delta = p.value("delta", 0.0);
        config.params.mu = p.value("mu", 0.0);
        config.params.alpha = p.value("alpha", 0.0);
        config.params.sigma = p.value("sigma", 0.0);
        config.params.xi = p.value("xi", 0.0);
        config.params.gamma = p.value("gamma", 0.0);
        config.params.psi = p.value("psi", 0.0);
        config.params.iota = p.value("iota", 0.0);
        config.params.upsilon = p.value("upsilon", 0.0);

        for (const auto& entry : j.at("initial"))
            config.initial.emplace_back(state_from_json(entry.at("state"), config.kind),
                                        entry.value("weight", 1.0));

        if (j.contains("actions")) {
            const json& actions = j.at("actions");
            if (actions.is_object()) {
                const int lo = actions.at("meetings_min").get<int>();
                const int hi = actions.at("meetings_max").get<int>();
                const int tests = actions.value("tests", 0);
                for (int m = lo; m <= hi; ++m) config.actions.push_back(Action{m, tests});
            } else {
                for (const auto& a : actions)
                    config.actions.push_back(Action{a.at(0).get<int>(), a.at(1).get<int>()});
            }
        }
        if (j.contains("policy")) config.policy = policy_from_json(j.at("policy"));

        if (j.contains("queries")) {
            for (const auto& q : j.at("queries")) {
                QuerySpec spec;
                const std::string kind = q.at("kind").get<std::string>();
                if (kind == "deaths_ge_frac") {
                    spec.kind = QuerySpec::Kind::deaths_ge_frac;
                    spec.fraction = q.value("fraction", 0.2);
                    spec.strict = q.value("strict", false);
                } else if (kind == "compartment_ge") {
                    spec.kind = QuerySpec::Kind::compartment_ge;
                    spec.compartment =
                        compartment_from_string(q.at("compartment").get<std::string>());
                    spec.threshold = q.at("threshold").get<int>();
                    spec.strict = q.value("strict", false);
                } else if (kind == "cdf") {
                    spec.kind = QuerySpec::Kind::cdf;
                    spec.compartment =
                        compartment_from_string(q.at("compartment").get<std::string>());
                } else if (kind == "expected_meetings") {
                    spec.kind = QuerySpec::Kind::expected_meetings;
                } else {
                    throw ConfigError("unknown query kind: " + kind);
                }
                config.queries.push_back(spec);
            }
        }
        config.steps = j.value("steps", 0);
        config.tolerance = j.value("tolerance", 1e-9);
        config.max_iterations = j.value("max_iterations", 10000);
        config.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("monte_carlo")) {
            McSpec mc;
            const json& m = j.at("monte_carlo");
            mc.runs = m.value("runs", 1000);
            mc.depth = m.value("depth", 100);
            mc.scale = m.value("scale", 1);
            mc.real_population = m.value("real_population", 0LL);
            config.monte_carlo = mc;
        }
    } catch (const json::exception& e) {
        throw ConfigError("config error in " + path.string() + ": " + e.what());
    }
    config.validate();
    return config;
}

namespace {

std::string csv_series(const std::vector<std::pair<int, double>>& rows,
                       const std::string& value_name) {
    std::ostringstream os;
    os << "iteration," << value_name << '\n';
    for (const auto& [k, v] : rows) os << k << ',' << format_probability(v) << '\n';
    return os.str();
}

}  // namespace

std::vector<std::filesystem::path> write_mc_report(const McReport& report,
                                                   const std::filesystem::path& out_dir,
                                                   const std::string& tag) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    std::ostringstream csv;
    csv << "step";
    const char* comps[] = {"S", "A", "I", "R", "O", "D", "Q", "Ra"};
    for (const char* c : comps) csv << ",mean_" << c << ",q10_" << c << ",q50_" << c << ",q90_" << c;
    csv << ",benchmark\n";
    for (std::size_t k = 0; k < report.steps.size(); ++k) {
        const McStepStats& s = report.steps[k];
        csv << k;
        for (int c = 0; c < 8; ++c)
            csv << ',' << format_probability(s.mean[c]) << ',' << s.q10[c] << ',' << s.q50[c]
                << ',' << s.q90[c];
        csv << ',' << format_probability(s.benchmark) << '\n';
    }
    const auto csv_path = out_dir / ("mc_" + tag + ".csv");
    write_file_atomic(csv_path, csv.str());
    written.push_back(csv_path);

    json summary{{"rng", report.rng_name},
                 {"seed", report.seed},
                 {"runs", report.runs},
                 {"depth", report.depth},
                 {"real_population", report.real_population},
                 {"benchmark_fraction", report.benchmark_fraction},
                 {"benchmark_strict", report.benchmark_strict},
                 {"final_benchmark", report.final_benchmark},
                 {"expected_meetings_first", report.expected_meetings_first}};
    const auto json_path = out_dir / ("mc_" + tag + ".json");
    write_file_atomic(json_path, summary.dump(2) + "\n");
    written.push_back(json_path);
    return written;
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config_in,
                                                  const std::filesystem::path& out_dir,
                                                  const RunOverrides& overrides) {
    ExperimentConfig config = config_in;
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.tolerance) config.tolerance = *overrides.tolerance;
    if (config.monte_carlo) {
        if (overrides.runs) config.monte_carlo->runs = *overrides.runs;
        if (overrides.depth) config.monte_carlo->depth = *overrides.depth;
        if (overrides.scale) config.monte_carlo->scale = *overrides.scale;
    }
    config.validate();
    if (!config.policy) throw ConfigError("this pipeline requires a policy");

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    std::vector<StateVector> initial_states;
    for (const auto& [state, weight] : config.initial) initial_states.push_back(state);

    const Dtmc dtmc = build_policy_dtmc(initial_states, *config.policy, config.params,
                                        config.kind);
    const auto t_build = clock::now();

    Distribution dist = make_distribution(*dtmc.space, config.initial);
    const Distribution dist0 = dist;

    std::vector<std::filesystem::path> written;
    std::filesystem::create_directories(out_dir);

    // transient series
    std::vector<QuerySpec> scalar_queries, cdf_queries;
    for (const QuerySpec& q : config.queries)
        (q.kind == QuerySpec::Kind::cdf ? cdf_queries : scalar_queries).push_back(q);

    std::vector<std::vector<std::pair<int, double>>> series(scalar_queries.size());
    for (int k = 0; k <= config.steps; ++k) {
        for (std::size_t qi = 0; qi < scalar_queries.size(); ++qi) {
            const QuerySpec& q = scalar_queries[qi];
            double value = q.kind == QuerySpec::Kind::expected_meetings
                               ? expected_action(*dtmc.space, dist, *config.policy)
                               : query_probability(*dtmc.space, dist,
                                                   q.predicate(config.params));
            series[qi].emplace_back(k, value);
        }
        if (k < config.steps) dist = step(dtmc, dist);
    }
    for (std::size_t qi = 0; qi < scalar_queries.size(); ++qi) {
        const auto path = out_dir / ("series_" + scalar_queries[qi].name() + ".csv");
        write_file_atomic(path, csv_series(series[qi], scalar_queries[qi].name()));
        written.push_back(path);
    }

    // limit behaviour
    const ConvergeResult limit =
        converge(dtmc, dist0, config.tolerance, config.max_iterations);
    const auto t_solve = clock::now();

    json summary;
    summary["space_size"] = dtmc.size();
    summary["edges"] = dtmc.targets.size();
    summary["policy"] = policy_to_json(*config.policy);
    summary["converged"] = limit.converged;
    summary["iterations"] = limit.iterations;
    summary["last_delta"] = limit.last_delta;
    for (const QuerySpec& q : scalar_queries) {
        const double value = q.kind == QuerySpec::Kind::expected_meetings
                                 ? expected_action(*dtmc.space, limit.dist, *config.policy)
                                 : query_probability(*dtmc.space, limit.dist,
                                                     q.predicate(config.params));
        summary["limit"][q.name()] = value;
    }

    for (const QuerySpec& q : cdf_queries) {
        const auto cdf = marginal_cdf(*dtmc.space, limit.dist, q.compartment);
        std::ostringstream os;
        os << to_string(q.compartment) << ",cdf\n";
        for (std::size_t i = 0; i < cdf.size(); ++i)
            os << i << ',' << format_probability(cdf[i]) << '\n';
        const auto path = out_dir / (q.name() + ".csv");
        write_file_atomic(path, os.str());
        written.push_back(path);
    }

    const auto summary_path = out_dir / "summary.json";
    write_file_atomic(summary_path, summary.dump(2) + "\n");
    written.push_back(summary_path);

    // Monte Carlo leg
    if (config.monte_carlo) {
        McConfig mc;
        mc.params = config.params;
        mc.kind = config.kind;
        mc.initial = config.initial;
        mc.policy = *config.policy;
        mc.runs = config.monte_carlo->runs;
        mc.depth = config.monte_carlo->depth;
        mc.seed = config.seed;
        mc.real_population = config.monte_carlo->real_population;
        mc = scale_config(std::move(mc), config.monte_carlo->scale);
        const McReport report = run_monte_carlo(mc);
        for (auto& p : write_mc_report(report, out_dir, config.policy->name))
            written.push_back(std::move(p));
    }
    const auto t_end = clock::now();

    auto ms = [](auto a, auto b) {
        return std::chrono::duration_cast<std::chrono::milliseconds>(b - a).count();
    };
    json manifest;
    manifest["tool"] = "sairod";
    manifest["version"] = kVersion;
    manifest["seed"] = config.seed;
    manifest["config"] = config_to_json(config);
    manifest["timings_ms"] = {{"build", ms(t0, t_build)},
                              {"solve", ms(t_build, t_solve)},
                              {"total", ms(t0, t_end)}};
    manifest["outputs"] = json::array();
    for (const auto& p : written) manifest["outputs"].push_back(p.filename().string());
    const auto manifest_path = out_dir / "manifest.json";
    write_file_atomic(manifest_path, manifest.dump(2) + "\n");
    written.push_back(manifest_path);
    return written;
}

}  // namespace sairod

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sairod/explicit_io.hpp"
#include "sairod/solver.hpp"
#include "test_helpers.hpp"

using namespace sairod;
using test::paper_parameters;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("sairod_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Dtmc one_state_chain() {
    Parameters p = paper_parameters(4, 2);
    StateVector v{0, 0, 0, 4, 0, 0, 0, 0};
    Policy policy;
    policy.kind = PolicyKind::constant;
    policy.constant = {1, 0};
    policy.name = "const1";
    return build_policy_dtmc({&v, 1}, policy, p, ModelKind::simplified);
}

Dtmc epidemic_chain(int population, int capacity, int meetings) {
    Parameters p = paper_parameters(population, capacity);
    StateVector v{population - 1, 1, 0, 0, 0, 0, 0, 0};
    Policy policy;
    policy.kind = PolicyKind::constant;
    policy.constant = {meetings, 0};
    policy.name = "const";
    return build_policy_dtmc({&v, 1}, policy, p, ModelKind::simplified);
}

}  // namespace

TEST_CASE("probability formatting") {
    CHECK(format_probability(1.0) == "1");
    CHECK(format_probability(0.5) == "0.5");
    CHECK(format_probability(0.1) == "0.10000000000000001");
    // 17 significant digits round-trip exactly
    const double x = 0.12345678901234567;
    CHECK(std::stod(format_probability(x)) == x);
}

TEST_CASE("single self-loop exports the exact line") {
    const Dtmc dtmc = one_state_chain();
    const fs::path dir = temp_dir("selfloop");
    const LabelSet labels = default_labels(*dtmc.space, std::vector<StateIndex>{0});
    export_dtmc(dtmc, labels, dir / "model");
    CHECK(slurp(dir / "model.tra") == "0 0 1\n");
    CHECK(slurp(dir / "model.sta") == "0 0 0 4 0 0\n");
}

TEST_CASE("dtmc round trip") {
    const Dtmc dtmc = epidemic_chain(5, 2, 2);
    const fs::path dir = temp_dir("dtmc_rt");
    std::vector<StateIndex> init{dtmc.space->rank(StateVector{4, 1, 0, 0, 0, 0, 0, 0})};
    const LabelSet labels = default_labels(*dtmc.space, init);
    export_dtmc(dtmc, labels, dir / "model");

    const ImportedDtmc imported = import_dtmc(dir / "model");
    REQUIRE(imported.dtmc.size() == dtmc.size());
    CHECK(imported.dtmc.targets == dtmc.targets);
    CHECK(imported.dtmc.probs == dtmc.probs);
    CHECK(imported.labels.names == labels.names);
    CHECK(imported.labels.members == labels.members);

    SUBCASE("re-export is byte-identical") {
        export_dtmc(imported.dtmc, imported.labels, dir / "copy");
        for (const char* ext : {".sta", ".tra", ".lab", ".json"})
            CHECK(slurp(dir / ("model" + std::string(ext))) ==
                  slurp(dir / ("copy" + std::string(ext))));
    }
    SUBCASE("imported chain answers queries identically") {
        Distribution dist(dtmc.size(), 0.0);
        dist[init[0]] = 1.0;
        const ConvergeResult a = converge(dtmc, dist, 1e-10, 5000);
        const ConvergeResult b = converge(imported.dtmc, dist, 1e-10, 5000);
        const auto deaths = [](const StateVector& v) { return v.D >= 1; };
        CHECK(query_probability(*dtmc.space, a.dist, deaths) ==
              doctest::Approx(query_probability(*imported.dtmc.space, b.dist, deaths))
                  .epsilon(1e-12));
    }
    SUBCASE("tampered row mass is rejected") {
        std::string tra = slurp(dir / "model.tra");
        const auto pos = tra.find('\n');
        std::string first = tra.substr(0, pos);
        const auto last_space = first.rfind(' ');
        first = first.substr(0, last_space) + " 0.9999";
        write_file_atomic(dir / "model.tra", first + tra.substr(pos));
        CHECK_THROWS_AS(import_dtmc(dir / "model"), NumericError);
    }
}

TEST_CASE("mdp round trip") {
    Parameters p = paper_parameters(4, 1);
    StateVector v{3, 1, 0, 0, 0, 0, 0, 0};
    const auto model =
        build_reachable({&v, 1}, {{1, 0}, {2, 0}}, p, ModelKind::simplified);
    const fs::path dir = temp_dir("mdp_rt");
    const LabelSet labels =
        default_labels(model.space, std::vector<StateIndex>{model.space.rank(v)});
    export_mdp(model, labels, dir / "model");

    const ImportedMdp imported = import_mdp(dir / "model");
    CHECK(imported.model.space.states == model.space.states);
    CHECK(imported.model.space.actions == model.space.actions);
    CHECK(imported.model.table.targets == model.table.targets);
    CHECK(imported.model.table.probs == model.table.probs);

    export_mdp(imported.model, imported.labels, dir / "copy");
    for (const char* ext : {".sta", ".tra", ".lab", ".json"})
        CHECK(slurp(dir / ("model" + std::string(ext))) ==
              slurp(dir / ("copy" + std::string(ext))));
}

TEST_CASE("default labels") {
    const Dtmc dtmc = epidemic_chain(5, 1, 3);
    const StateSpace& space = *dtmc.space;
    const LabelSet labels = default_labels(space, std::vector<StateIndex>{0}, 0.2);
    REQUIRE(labels.names.size() == 4);
    CHECK(labels.names[0] == "init");
    CHECK(labels.names[1] == "hospital_full");
    CHECK(labels.names[2] == "deaths_ge_0.2");
    CHECK(labels.names[3] == "all_absorbed");
    for (StateIndex i : labels.members[1]) CHECK(space.states[i].O == 1);
    for (StateIndex i : labels.members[2]) CHECK(space.states[i].D >= 1);
    for (StateIndex i : labels.members[3]) {
        CHECK(space.states[i].A == 0);
        CHECK(space.states[i].I == 0);
        CHECK(space.states[i].O == 0);
    }
}

TEST_CASE("prism flavoured headers") {
    const Dtmc dtmc = epidemic_chain(4, 2, 2);
    const fs::path dir = temp_dir("prism");
    const LabelSet labels = default_labels(*dtmc.space, std::vector<StateIndex>{0});
    ExportOptions options;
    options.prism_headers = true;
    export_dtmc(dtmc, labels, dir / "model", options);
    const std::string tra = slurp(dir / "model.tra");
    std::istringstream is(tra);
    std::size_t states, transitions;
    REQUIRE((is >> states >> transitions));
    CHECK(states == dtmc.size());
    CHECK(transitions == dtmc.targets.size());
    const std::string sta = slurp(dir / "model.sta");
    CHECK(sta.substr(0, sta.find('\n')) == "(S,A,I,R,O,D)");
}

TEST_CASE("import failures carry line numbers") {
    const fs::path dir = temp_dir("parse_err");
    const Dtmc dtmc = one_state_chain();
    const LabelSet labels = default_labels(*dtmc.space, std::vector<StateIndex>{0});
    export_dtmc(dtmc, labels, dir / "model");
    write_file_atomic(dir / "model.tra", "0 zero 1\n");
    try {
        import_dtmc(dir / "model");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }
}

#include "doctest.h"

#include <algorithm>

#include "oracle.hpp"
#include "sairod/combinatorics.hpp"
#include "sairod/state_space.hpp"
#include "test_helpers.hpp"

using namespace sairod;
using test::paper_parameters;

TEST_CASE("enumerate_all") {
    SUBCASE("one subject occupies each compartment once") {
        Parameters p = paper_parameters(1, 1);
        const auto states = enumerate_all(p, ModelKind::full);
        CHECK(states.size() == 8);
    }
    SUBCASE("simplified space matches the closed-form count when C >= N") {
        Parameters p = paper_parameters(20, 20);
        const auto states = enumerate_all(p, ModelKind::simplified);
        CHECK(states.size() == 53130);
    }
    SUBCASE("capacity zero excludes hospitalised states") {
        Parameters p = paper_parameters(2, 0);
        const auto states = enumerate_all(p, ModelKind::full);
        for (const StateVector& v : states) CHECK(v.O == 0);
        CHECK(states.size() == state_count(7, 2));
    }
    SUBCASE("canonical order is sorted") {
        Parameters p = paper_parameters(3, 3);
        const auto states = enumerate_all(p, ModelKind::full);
        CHECK(std::is_sorted(states.begin(), states.end()));
    }
    SUBCASE("budget guard") {
        Parameters p = paper_parameters(200, 200);
        CHECK_THROWS_AS(enumerate_all(p, ModelKind::full, 1000), BudgetError);
    }
}

TEST_CASE("rank and unrank") {
    Parameters p = paper_parameters(3, 2);
    StateSpace space;
    space.kind = ModelKind::full;
    space.params = p;
    space.states = enumerate_all(p, ModelKind::full);

    SUBCASE("mutually inverse") {
        for (StateIndex i = 0; i < space.size(); ++i)
            CHECK(space.rank(space.unrank(i)) == i);
    }
    SUBCASE("first state has rank zero") { CHECK(space.rank(space.states.front()) == 0); }
    SUBCASE("unknown state") {
        StateVector foreign{3, 3, 0, 0, 0, 0, 0, 0};
        CHECK_THROWS_AS(space.rank(foreign), std::out_of_range);
        CHECK(!space.try_rank(foreign).has_value());
        CHECK_THROWS_AS(space.unrank(static_cast<StateIndex>(space.size())), std::out_of_range);
    }
}

TEST_CASE("build_reachable") {
    SUBCASE("absorbing initial state yields a singleton space") {
        Parameters p = paper_parameters(4, 2);
        StateVector v{0, 0, 0, 4, 0, 0, 0, 0};
        const auto model = build_reachable({&v, 1}, {{2, 0}, {5, 0}}, p, ModelKind::full);
        REQUIRE(model.space.size() == 1);
        for (std::size_t a = 0; a < 2; ++a) {
            auto probs = model.table.row_probs(0, a);
            REQUIRE(probs.size() == 1);
            CHECK(probs[0] == 1.0);
            CHECK(model.table.row_targets(0, a)[0] == 0);
        }
    }
    SUBCASE("omega = 0 pins a pure susceptible population") {
        Parameters p = paper_parameters(6, 2);
        p.omega = 0;
        StateVector v{5, 1, 0, 0, 0, 0, 0, 0};
        const auto model =
            build_reachable({&v, 1}, {{3, 0}}, p, ModelKind::simplified);
        for (const StateVector& s : model.space.states) CHECK(s.S == 5);
    }
    SUBCASE("rows are stochastic and targets sorted") {
        Parameters p = paper_parameters(6, 2);
        StateVector v{5, 1, 0, 0, 0, 0, 0, 0};
        const auto model =
            build_reachable({&v, 1}, {{1, 0}, {3, 0}}, p, ModelKind::simplified);
        for (std::size_t s = 0; s < model.space.size(); ++s)
            for (std::size_t a = 0; a < 2; ++a) {
                auto targets = model.table.row_targets(s, a);
                auto probs = model.table.row_probs(s, a);
                CHECK(std::is_sorted(targets.begin(), targets.end()));
                double mass = 0;
                for (double x : probs) {
                    CHECK(x > 0);
                    mass += x;
                }
                CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
            }
    }
    SUBCASE("reachable set is inside the exhaustive space") {
        Parameters p = paper_parameters(5, 1);
        StateVector v{4, 1, 0, 0, 0, 0, 0, 0};
        const auto model = build_reachable({&v, 1}, {{2, 1}}, p, ModelKind::full);
        const auto everything = enumerate_all(p, ModelKind::full);
        for (const StateVector& s : model.space.states) {
            CHECK(std::binary_search(everything.begin(), everything.end(), s));
            CHECK(s.O <= p.hospital_capacity);
            CHECK(s.sum() == p.population);
        }
        CHECK(model.space.size() <= everything.size());
    }
    SUBCASE("serial and parallel builds are bit-identical") {
        Parameters p = paper_parameters(7, 2);
        StateVector v{6, 1, 0, 0, 0, 0, 0, 0};
        const std::vector<Action> actions{{1, 0}, {2, 0}, {4, 0}};
        const auto par = build_reachable({&v, 1}, actions, p, ModelKind::simplified);
        const auto ser = build_reachable_serial({&v, 1}, actions, p, ModelKind::simplified);
        CHECK(par.space.states == ser.space.states);
        CHECK(par.table.offsets == ser.table.offsets);
        CHECK(par.table.targets == ser.table.targets);
        CHECK(par.table.probs == ser.table.probs);
    }
    SUBCASE("edge probabilities match the per-subject oracle") {
        Parameters p = paper_parameters(3, 1);
        StateVector v{2, 1, 0, 0, 0, 0, 0, 0};
        const auto model = build_reachable({&v, 1}, {{1, 0}, {2, 1}}, p, ModelKind::full);
        for (std::size_t s = 0; s < model.space.size(); ++s)
            for (std::size_t a = 0; a < model.space.actions.size(); ++a) {
                const auto ref = test::oracle_distribution(
                    model.space.states[s], model.space.actions[a], p, ModelKind::full);
                auto targets = model.table.row_targets(s, a);
                auto probs = model.table.row_probs(s, a);
                REQUIRE(targets.size() == ref.size());
                for (std::size_t e = 0; e < targets.size(); ++e)
                    CHECK(probs[e] ==
                          doctest::Approx(ref.at(model.space.unrank(targets[e]))).epsilon(1e-11));
            }
    }
    SUBCASE("invalid initial state is rejected") {
        Parameters p = paper_parameters(5, 1);
        StateVector bad{4, 0, 0, 0, 2, 0, 0, 0};  // beyond capacity and wrong sum
        CHECK_THROWS_AS(build_reachable({&bad, 1}, {{1, 0}}, p, ModelKind::full),
                        std::domain_error);
    }
    SUBCASE("budget enforcement") {
        Parameters p = paper_parameters(12, 3);
        StateVector v{11, 1, 0, 0, 0, 0, 0, 0};
        BuildOptions options;
        options.max_states = 10;
        CHECK_THROWS_AS(build_reachable({&v, 1}, {{3, 0}}, p, ModelKind::simplified, options),
                        BudgetError);
    }
}

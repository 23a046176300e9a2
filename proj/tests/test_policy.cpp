#include "doctest.h"

#include "sairod/policy.hpp"
#include "test_helpers.hpp"

using namespace sairod;
using test::paper_parameters;

namespace {

AdaptiveConfig fig5_config() {
    AdaptiveConfig cfg;
    cfg.threshold_low = 0.05;
    cfg.threshold_high = 0.15;
    cfg.m_low = 1;
    cfg.m_high = 5;
    return cfg;
}

}  // namespace

TEST_CASE("adaptive meeting rule") {
    const AdaptiveConfig cfg = fig5_config();
    const int n = 20;

    SUBCASE("below the low threshold") {
        StateVector v{20, 0, 0, 0, 0, 0, 0, 0};  // f = 0
        CHECK(adaptive_m(v, cfg, PolicyKind::adaptive_asymptomatic, n) == 5);
        CHECK(adaptive_m(v, cfg, PolicyKind::adaptive_symptomatic, n) == 5);
    }
    SUBCASE("above the high threshold") {
        StateVector v{0, 20, 0, 0, 0, 0, 0, 0};  // f = 1
        CHECK(adaptive_m(v, cfg, PolicyKind::adaptive_asymptomatic, n) == 1);
    }
    SUBCASE("midpoint interpolation") {
        // f = 2/20 = 0.10 -> 5 + (1-5) * 0.05/0.10 = 3 exactly
        StateVector v{18, 2, 0, 0, 0, 0, 0, 0};
        CHECK(adaptive_m_unrounded(v, cfg, PolicyKind::adaptive_asymptomatic, n) ==
              doctest::Approx(3.0).epsilon(1e-12));
        CHECK(adaptive_m(v, cfg, PolicyKind::adaptive_asymptomatic, n) == 3);
        AdaptiveConfig half = cfg;
        half.rounding = MeetingRounding::half_up;
        CHECK(adaptive_m(v, half, PolicyKind::adaptive_asymptomatic, n) == 3);
    }
    SUBCASE("truncation versus half-up") {
        // f = 1/18: unrounded M = 5 - 40*(1/18 - 0.05) = 4.777...
        StateVector v{15, 1, 0, 0, 0, 2, 0, 0};
        CHECK(adaptive_m_unrounded(v, cfg, PolicyKind::adaptive_asymptomatic, n) ==
              doctest::Approx(4.7777777777777777).epsilon(1e-12));
        CHECK(adaptive_m(v, cfg, PolicyKind::adaptive_asymptomatic, n) == 4);
        AdaptiveConfig half = cfg;
        half.rounding = MeetingRounding::half_up;
        CHECK(adaptive_m(v, half, PolicyKind::adaptive_asymptomatic, n) == 5);
    }
    SUBCASE("output always within the configured band and nonincreasing in f") {
        for (int a = 0; a <= 20; ++a) {
            StateVector v{20 - a, a, 0, 0, 0, 0, 0, 0};
            const int m = adaptive_m(v, cfg, PolicyKind::adaptive_asymptomatic, n);
            CHECK(m >= cfg.m_low);
            CHECK(m <= cfg.m_high);
            if (a > 0) {
                StateVector prev{20 - a + 1, a - 1, 0, 0, 0, 0, 0, 0};
                CHECK(m <= adaptive_m(prev, cfg, PolicyKind::adaptive_asymptomatic, n));
            }
        }
    }
    SUBCASE("signals coincide when A = I = O = 0") {
        StateVector v{10, 0, 0, 6, 0, 4, 0, 0};
        CHECK(adaptive_m(v, cfg, PolicyKind::adaptive_asymptomatic, n) ==
              adaptive_m(v, cfg, PolicyKind::adaptive_symptomatic, n));
    }
    SUBCASE("all-deceased is rejected by the raw rule") {
        StateVector v{0, 0, 0, 0, 0, 20, 0, 0};
        CHECK_THROWS_AS(adaptive_m(v, cfg, PolicyKind::adaptive_asymptomatic, n),
                        std::domain_error);
        // ... while the total policy map falls back to the restrictive action
        Policy policy;
        policy.kind = PolicyKind::adaptive_asymptomatic;
        policy.adaptive = cfg;
        CHECK(policy.action_for(v, n).meetings == cfg.m_low);
    }
    SUBCASE("config validation") {
        AdaptiveConfig bad = cfg;
        bad.threshold_low = 0.3;
        bad.threshold_high = 0.2;
        CHECK_THROWS_AS(bad.validate(), std::domain_error);
        AdaptiveConfig bad2 = cfg;
        bad2.m_low = 7;
        CHECK_THROWS_AS(bad2.validate(), std::domain_error);
    }
}

TEST_CASE("apply_policy") {
    Parameters p = paper_parameters(6, 2);
    StateVector v{5, 1, 0, 0, 0, 0, 0, 0};
    const std::vector<Action> actions{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}};
    const auto model = build_reachable({&v, 1}, actions, p, ModelKind::simplified);

    SUBCASE("constant policy selects exactly its action's rows") {
        Policy policy;
        policy.kind = PolicyKind::constant;
        policy.constant = {2, 0};
        const Dtmc dtmc = apply_policy(model, policy);
        REQUIRE(dtmc.size() == model.space.size());
        for (std::size_t s = 0; s < dtmc.size(); ++s) {
            auto expected = model.table.row_probs(s, 1);
            REQUIRE(dtmc.offsets[s + 1] - dtmc.offsets[s] == expected.size());
            for (std::size_t e = 0; e < expected.size(); ++e)
                CHECK(dtmc.probs[dtmc.offsets[s] + e] == expected[e]);
        }
    }
    SUBCASE("policies agreeing everywhere give identical chains") {
        Policy one;
        one.kind = PolicyKind::constant;
        one.constant = {5, 0};
        Policy other;
        other.kind = PolicyKind::adaptive_asymptomatic;
        other.adaptive = {0.99, 1.0, 5, 5, MeetingRounding::truncate};
        const Dtmc a = apply_policy(model, one);
        const Dtmc b = apply_policy(model, other);
        CHECK(a.targets == b.targets);
        CHECK(a.probs == b.probs);
    }
    SUBCASE("adaptive selections stay within the band") {
        Policy policy;
        policy.kind = PolicyKind::adaptive_asymptomatic;
        policy.adaptive = fig5_config();
        const Dtmc dtmc = apply_policy(model, policy);
        for (const Action& a : dtmc.chosen) {
            CHECK(a.meetings >= 1);
            CHECK(a.meetings <= 5);
        }
    }
    SUBCASE("row stochasticity is preserved") {
        Policy policy;
        policy.kind = PolicyKind::adaptive_symptomatic;
        policy.adaptive = fig5_config();
        const Dtmc dtmc = apply_policy(model, policy);
        for (std::size_t s = 0; s < dtmc.size(); ++s) {
            double mass = 0;
            for (std::uint64_t e = dtmc.offsets[s]; e < dtmc.offsets[s + 1]; ++e)
                mass += dtmc.probs[e];
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("missing action is reported") {
        Policy policy;
        policy.kind = PolicyKind::constant;
        policy.constant = {9, 0};
        CHECK_THROWS_AS(apply_policy(model, policy), std::invalid_argument);
    }
}

TEST_CASE("policy-closed build agrees with build + apply") {
    Parameters p = paper_parameters(6, 1);
    StateVector v{5, 1, 0, 0, 0, 0, 0, 0};
    Policy policy;
    policy.kind = PolicyKind::adaptive_asymptomatic;
    policy.adaptive = fig5_config();

    const auto model = build_reachable({&v, 1}, {{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}},
                                       p, ModelKind::simplified);
    const Dtmc via_table = apply_policy(model, policy);
    const Dtmc direct = build_policy_dtmc({&v, 1}, policy, p, ModelKind::simplified);

    // the direct build only visits policy-reachable states; every one of its
    // rows must match the corresponding row of the full table
    REQUIRE(direct.size() <= via_table.size());
    for (std::size_t s = 0; s < direct.size(); ++s) {
        const StateVector& state = direct.space->states[s];
        const StateIndex t = via_table.space->rank(state);
        const std::size_t dn = direct.offsets[s + 1] - direct.offsets[s];
        const std::size_t tn = via_table.offsets[t + 1] - via_table.offsets[t];
        REQUIRE(dn == tn);
        for (std::size_t e = 0; e < dn; ++e) {
            const StateVector& dst = direct.space->states[direct.targets[direct.offsets[s] + e]];
            CHECK(dst == via_table.space->states[via_table.targets[via_table.offsets[t] + e]]);
            CHECK(direct.probs[direct.offsets[s] + e] ==
                  via_table.probs[via_table.offsets[t] + e]);
        }
    }
}

#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "sairod/combinatorics.hpp"

using namespace sairod;

TEST_CASE("binomial coefficient conventions") {
    CHECK(binom(3, 5) == 0.0);
    CHECK(binom(0, 0) == 1.0);
    CHECK(binom(5, 2) == 10.0);
    CHECK(binom(5, -1) == 0.0);
    CHECK(binom(-2, 0) == 0.0);
    CHECK(binom(7, 0) == 1.0);
    CHECK(binom(7, 7) == 1.0);
    // desk-scale values stay exact
    CHECK(binom(30, 15) == 155117520.0);
    CHECK(binom(100, 50) == doctest::Approx(1.0089134454556417e29).epsilon(1e-12));
}

TEST_CASE("binomial pmf") {
    CHECK(binomial_pmf(2, 0.5, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(binomial_pmf(3, 0.2, 5) == 0.0);
    CHECK(binomial_pmf(4, 0.3, 0) == doctest::Approx(0.2401).epsilon(1e-12));
    CHECK(binomial_pmf(4, 0.0, 0) == 1.0);
    CHECK(binomial_pmf(4, 1.0, 4) == 1.0);
    CHECK(binomial_pmf(4, 1.0, 3) == 0.0);
    CHECK(binomial_pmf(5, 0.3, -1) == 0.0);
    CHECK_THROWS_AS(binomial_pmf(3, 1.5, 1), std::domain_error);
    CHECK_THROWS_AS(binomial_pmf(-1, 0.5, 0), std::domain_error);

    SUBCASE("rows sum to one") {
        for (int n : {0, 1, 5, 20, 100}) {
            double total = 0;
            for (int k = 0; k <= n; ++k) total += binomial_pmf(n, 0.37, k);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("multinomial coefficient") {
    CHECK(multinom(2, {1, 1}) == 2.0);
    CHECK(multinom(3, {3}) == 1.0);
    CHECK(multinom(4, {2, 1}) == 12.0);
    CHECK(multinom(3, {2, 2}) == 0.0);
    CHECK(multinom(3, {-1, 1}) == 0.0);
    CHECK(multinom(0, {0, 0}) == 1.0);
}

TEST_CASE("multinomial pmf sums to one") {
    const double probs[] = {0.4, 0.35, 0.25};
    for (int n : {0, 1, 3, 9}) {
        double total = 0;
        for (int a = 0; a <= n; ++a)
            for (int b = 0; a + b <= n; ++b)
                for (int c = 0; a + b + c <= n; ++c) {
                    const long long counts[] = {a, b, c};
                    total += multinomial_pmf(n, counts, probs);
                }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("state count formula") {
    CHECK(state_count(1, 17) == 1);
    CHECK(state_count(3, 7) == 36);  // (N+2)(N+1)/2
    CHECK(state_count(6, 20) == 53130);
    CHECK(state_count(8, 4) == 330);
    CHECK_THROWS_AS(state_count(0, 3), std::domain_error);
}

TEST_CASE("composition enumeration matches the closed-form count") {
    for (int parts = 1; parts <= 8; ++parts)
        for (int total : {0, 1, 4, 9}) {
            std::uint64_t seen = 0;
            int last_first = -1;
            bool ordered = true;
            for_each_composition(parts, total, [&](std::span<const int> c) {
                ++seen;
                int sum = 0;
                for (int x : c) sum += x;
                REQUIRE(sum == total);
                ordered &= c[0] >= last_first;
                last_first = c[0];
            });
            CHECK(seen == state_count(parts, total));
            CHECK(ordered);
        }
}

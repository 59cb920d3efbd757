#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "alphacross/analytic.hpp"
#include "alphacross/error.hpp"
#include "support/oracles.hpp"

using namespace alphacross;
using namespace alphacross::analytic;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("combine_alphas", "[analytic]") {
    CHECK(combine_alphas(PortfolioWeights({1.0}), std::vector{0.01}) == 0.01);
    CHECK(combine_alphas(PortfolioWeights({0.5, 0.5}), std::vector{0.02, 0.0}) == 0.01);
    CHECK_THROWS_AS(PortfolioWeights({0.3, 0.3}), InputError);
    CHECK_THROWS_AS(PortfolioWeights({1.5, -0.5}), InputError);
    CHECK_THROWS_AS(combine_alphas(PortfolioWeights({0.5, 0.5}), std::vector{0.1}), InputError);
}

TEST_CASE("uniform weights normalize for many streams", "[analytic]") {
    for (std::size_t n : {1u, 3u, 7u, 100u, 657u, 100000u}) {
        auto w = PortfolioWeights::uniform(n);
        CHECK(w.size() == n);
    }
}

TEST_CASE("pair_turnover", "[analytic]") {
    CHECK_THAT(pair_turnover(0.5, 0.2, 0.5, 0.16, 0.125), WithinRel(0.11, 1e-14));
    CHECK_THAT(pair_turnover(0.5, 0.2, 0.5, 0.16, 1.0), WithinRel(0.18, 1e-14));
    CHECK_THAT(pair_turnover(0.5, 0.2, 0.5, 0.16, -1.0), WithinRel(0.02, 1e-12));
    CHECK_THROWS_AS(pair_turnover(0.5, 0.2, 0.5, 0.16, 1.01), InputError);
    CHECK_THROWS_AS(pair_turnover(0.5, 0.2, 0.6, 0.16, 0.0), InputError);
    CHECK_THROWS_AS(pair_turnover(0.5, -0.2, 0.5, 0.16, 0.0), InputError);
}

TEST_CASE("equal_pair_turnover", "[analytic]") {
    CHECK(equal_pair_turnover(0.1, 1.0) == 0.1);
    CHECK(equal_pair_turnover(0.1, -1.0) == 0.0);
    CHECK_THAT(equal_pair_turnover(0.1, 0.125), WithinRel(0.05625, 1e-15));
    CHECK_THAT(equal_pair_turnover(0.1, 0.125), WithinRel(pair_turnover(0.5, 0.1, 0.5, 0.1, 0.125), 1e-15));
    CHECK_THROWS_AS(equal_pair_turnover(-0.1, 0.0), InputError);
}

TEST_CASE("pair_turnover reduces to the equal form", "[analytic][property]") {
    for (double rho = -1.0; rho <= 1.0; rho += 0.05) {
        for (double t : {0.0, 0.01, 0.1, 0.7, 3.0}) {
            CHECK_THAT(pair_turnover(0.5, t, 0.5, t, rho), WithinAbs(equal_pair_turnover(t, rho), 1e-15));
        }
    }
}

TEST_CASE("correlation_of_halves", "[analytic]") {
    CHECK(correlation_of_halves(0.0) == 0.0);
    CHECK(correlation_of_halves(1.0) == 1.0);
    // brute-force covariance of the four-variable construction
    CHECK_THAT(oracle::halves_correlation(0.5), WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(correlation_of_halves(0.5), WithinAbs(2.0 / 3.0, 1e-15));
    for (double g = -1.0 / 3.0 + 1e-9; g <= 1.0; g += 0.01) {
        CHECK_THAT(correlation_of_halves(g), WithinAbs(oracle::halves_correlation(g), 1e-12));
    }
    CHECK_NOTHROW(correlation_of_halves(-1.0 / 3.0));
    CHECK_THROWS_AS(correlation_of_halves(-1.0), InputError);
    CHECK_THROWS_AS(correlation_of_halves(-0.34), InputError);
    CHECK_THROWS_AS(correlation_of_halves(1.01), InputError);
}

TEST_CASE("rho_after_doublings", "[analytic]") {
    CHECK(rho_after_doublings(0.37, 0) == 0.37);
    for (int k = 0; k <= 30; ++k) CHECK(rho_after_doublings(1.0, k) == 1.0);
    double iterated = correlation_of_halves(correlation_of_halves(0.5));
    CHECK_THAT(iterated, WithinAbs(0.8, 1e-15));
    CHECK_THAT(rho_after_doublings(0.5, 2), WithinAbs(0.8, 1e-15));
    CHECK_THROWS_AS(rho_after_doublings(-1.0 / 3.0, 2), InputError); // denominator zero
    CHECK_THROWS_AS(rho_after_doublings(-0.5, 2), InputError);
    CHECK_NOTHROW(rho_after_doublings(-0.3, 2));
    CHECK_THROWS_AS(rho_after_doublings(0.5, -1), InputError);
}

TEST_CASE("recursion matches closed form", "[analytic][property]") {
    for (int i = 1; i <= 100; ++i) {
        const double rho0 = i / 100.0;
        double r = rho0;
        for (int k = 1; k <= 20; ++k) {
            r = correlation_of_halves(r);
            CHECK_THAT(rho_after_doublings(rho0, k), WithinAbs(r, 1e-12));
        }
    }
}

TEST_CASE("rho after doublings rises monotonically toward one", "[analytic][property]") {
    for (double rho0 : {0.01, 0.1, 0.3, 0.9}) {
        double prev = rho0;
        for (int k = 1; k <= 40; ++k) {
            double r = rho_after_doublings(rho0, k);
            CHECK(r >= prev);
            CHECK(r <= 1.0);
            prev = r;
        }
        CHECK(prev > 0.999);
    }
}

TEST_CASE("turnover_closed", "[analytic]") {
    CHECK(turnover_closed(0.1, 0.3, 1) == 0.1);
    CHECK_THAT(turnover_closed(0.1, 0.125, 2), WithinRel(0.05625, 1e-15));
    CHECK_THAT(turnover_closed(0.1, 0.3, 1'000'000), WithinRel(0.03000007, 1e-12));
    CHECK(turnover_closed(UniformModel{0.1, 0.125, 2}) == turnover_closed(0.1, 0.125, 2));
    CHECK_THROWS_AS(turnover_closed(0.1, -0.5, 4), InputError);
    CHECK_NOTHROW(turnover_closed(0.1, -1.0 / 3.0, 4));
    CHECK_THROWS_AS(turnover_closed(0.1, 0.3, 0), InputError);
    CHECK_THROWS_AS(turnover_closed(-0.1, 0.3, 2), InputError);
    CHECK_THROWS_AS(turnover_closed(0.1, -1.0, 1), InputError);
}

TEST_CASE("turnover_closed agrees with the pairwise form at N = 2", "[analytic][property]") {
    for (double rho = -0.95; rho <= 1.0; rho += 0.05) {
        for (double tau : {0.0, 0.05, 0.1, 1.0}) {
            CHECK_THAT(turnover_closed(tau, rho, 2), WithinRel(equal_pair_turnover(tau, rho), 1e-15));
        }
    }
}

TEST_CASE("telescoping product equals the closed form", "[analytic][property]") {
    for (double rho0 : {0.01, 0.2, 0.5, 0.99}) {
        double product = 1.0;
        for (int k = 0; k <= 20; ++k) {
            product *= 1.0 + rho_after_doublings(rho0, k);
            const int n = 1 << (k + 1);
            const double telescoped = 0.1 / n * product;
            CHECK_THAT(telescoped, WithinRel(turnover_closed(0.1, rho0, n), 1e-12));
        }
    }
}

TEST_CASE("turnover approaches its floor from above", "[analytic][property]") {
    for (double tau : {0.05, 0.1, 0.2, 1.0}) {
        for (double rho : {0.0, 0.1, 0.3, 0.75, 0.999}) {
            double prev = turnover_closed(tau, rho, 1);
            for (int n = 2; n <= 4096; ++n) {
                const double t = turnover_closed(tau, rho, n);
                const double floor = turnover_limit(tau, rho);
                const double excess = tau * (1 - rho) / n;
                CHECK(t < prev);
                CHECK(t >= floor);
                // T - tau*rho carries the rounding of T itself: at most ulp(T) / excess relative.
                const double conditioning = std::ldexp(std::numeric_limits<double>::epsilon(), std::ilogb(t)) / excess;
                const double tol = conditioning <= 1e-15 ? 1e-14 : 2.0 * conditioning;
                CHECK_THAT(t - floor, WithinRel(excess, tol));
                prev = t;
            }
        }
    }
}

TEST_CASE("turnover_limit", "[analytic]") {
    CHECK(turnover_limit(0.1, 0.0) == 0.0);
    CHECK(turnover_limit(0.2, 1.0) == 0.2);
    CHECK_THAT(turnover_limit(0.1, 0.3), WithinRel(0.03, 1e-15));
    CHECK_THROWS_AS(turnover_limit(0.1, -0.1), InputError);
}

TEST_CASE("weighted_average_turnover", "[analytic]") {
    std::vector<double> flat(5, 0.1);
    CHECK_THAT(weighted_average_turnover(PortfolioWeights::uniform(5), flat), WithinRel(0.1, 1e-15));
    CHECK(weighted_average_turnover(PortfolioWeights({0.25, 0.75}), std::vector{0.2, 0.1}) == 0.125);
    CHECK(weighted_average_turnover(PortfolioWeights({0.5, 0.5}), std::vector{0.0, 0.2}) == 0.1);
    CHECK_THROWS_AS(weighted_average_turnover(PortfolioWeights({0.5, 0.5}), std::vector{0.1}), InputError);
    CHECK_THROWS_AS(weighted_average_turnover(PortfolioWeights({0.5, 0.5}), std::vector{0.1, -0.1}), InputError);
}

TEST_CASE("limit_interval", "[analytic]") {
    auto iv = limit_interval(0.1, 0.2, 0.4);
    CHECK_THAT(iv.lower, WithinRel(0.02, 1e-15));
    CHECK_THAT(iv.upper, WithinRel(0.04, 1e-15));
    auto point = limit_interval(0.1, 0.3, 0.3);
    CHECK(point.lower == point.upper);
    CHECK_THROWS_AS(limit_interval(0.1, 0.0, 0.4), InputError);
    CHECK_THROWS_AS(limit_interval(0.1, 0.5, 0.4), InputError);
    CHECK_THROWS_AS(limit_interval(0.1, 0.5, 1.4), InputError);
}

TEST_CASE("min_uniform_correlation", "[analytic]") {
    CHECK(min_uniform_correlation(4) == -1.0 / 3.0);
    CHECK(min_uniform_correlation(2) == -1.0);
    for (int k = 1; k <= 20; ++k) CHECK(min_uniform_correlation(1 << k) == -1.0 / ((1 << k) - 1));
    CHECK_THROWS_AS(min_uniform_correlation(1), InputError);
}

TEST_CASE("netting_factor", "[analytic]") {
    for (int n : {1, 2, 10, 1000}) CHECK(netting_factor({1.0, n}).zeta == 1.0);

    auto full = netting_factor({-1.0, 2});
    CHECK(full.fully_netted);
    CHECK(full.zeta == 0.0);
    CHECK_FALSE(full.enhancement().has_value());

    auto boundary = netting_factor({-1.0 / 3.0, 4});
    CHECK(boundary.fully_netted);

    // same recursion as turnover with tau -> 1
    for (int n : {2, 16, 1024, 1 << 20}) {
        CHECK(netting_factor({0.5, n}).zeta == turnover_closed(1.0, 0.5, n));
    }
    CHECK_THAT(netting_factor({0.5, 1 << 20}).zeta, WithinAbs(0.5, 1e-6));

    auto half = netting_factor({0.5, 2});
    CHECK_THAT(*half.enhancement(), WithinRel(1.0 / 0.75, 1e-15));

    CHECK_THROWS_AS(netting_factor({-0.5, 4}), InputError);
    CHECK_THROWS_AS(netting_factor({1.5, 4}), InputError);
    CHECK_THROWS_AS(netting_factor({0.5, 0}), InputError);
}

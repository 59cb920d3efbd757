#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "alphacross/analytic.hpp"
#include "alphacross/blotter.hpp"
#include "alphacross/error.hpp"
#include "alphacross/numeric.hpp"
#include "alphacross/simulate.hpp"
#include "support/oracles.hpp"

using namespace alphacross;
using namespace alphacross::sim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EnsembleConfig base_config() {
    EnsembleConfig c;
    c.n_streams = 8;
    c.n_stocks = 64;
    c.base_correlation = 0.25;
    c.tau = 0.1;
    c.total_investment = 1e9;
    c.paths = 50;
    c.seed = 42;
    return c;
}

double sample_correlation(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

MeanStdErr mean_pairwise_raw_correlation(const EnsembleConfig& c) {
    std::vector<double> per_path;
    for (int p = 0; p < c.paths; ++p) {
        auto m = raw_draws(c, p);
        double s = 0;
        int pairs = 0;
        for (int i = 0; i < m.streams(); ++i)
            for (int j = i + 1; j < m.streams(); ++j, ++pairs) s += sample_correlation(m.row(i), m.row(j));
        per_path.push_back(s / pairs);
    }
    return mean_and_stderr(per_path);
}

// Two paths of a stream and its exact mirror image.
AlphaEnsemble mirrored_pair() {
    std::vector<TradeMatrix> paths;
    for (int p = 0; p < 2; ++p) {
        TradeMatrix m(2, 4);
        for (int s = 0; s < 4; ++s) {
            m(0, s) = (s % 2 ? 1.0 : -1.0) * (p + 1) * 10'000.0 * (s + 1);
            m(1, s) = -m(0, s);
        }
        paths.push_back(m);
    }
    return AlphaEnsemble::from_paths(base_config(), std::move(paths));
}

AlphaEnsemble identical_streams(int n) {
    auto c = base_config();
    c.n_streams = n;
    c.base_correlation = 1.0;
    return generate_ensemble(c);
}

double gaussian_oracle(double tau, double c0, int n) { return tau * std::sqrt((1.0 + (n - 1) * c0) / n); }

} // namespace

TEST_CASE("EnsembleConfig validation", "[simulate]") {
    auto c = base_config();
    CHECK_NOTHROW(c.validate());
    c.base_correlation = -0.1;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = base_config();
    c.base_correlation = 1.1;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = base_config();
    c.n_stocks = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = base_config();
    c.paths = 0;
    CHECK_THROWS_AS(generate_ensemble(c), InputError);
    c = base_config();
    c.tau = -1;
    CHECK_THROWS_AS(generate_ensemble(c), InputError);
    CHECK(parse_gross_scaling("expected") == GrossScaling::expected);
    CHECK_THROWS_AS(parse_gross_scaling("approx"), InputError);
}

TEST_CASE("generated streams have the target gross", "[simulate]") {
    auto e = generate_ensemble(base_config());
    const double target = 0.1 * 1e9 / 8;
    for (int p = 0; p < 5; ++p) {
        auto m = e.path(p);
        for (int i = 0; i < m.streams(); ++i) {
            double g = 0;
            for (double x : m.row(i)) g += std::abs(x);
            CHECK_THAT(g, WithinRel(target, 1e-9));
        }
    }
}

TEST_CASE("generation is deterministic per seed and path", "[simulate]") {
    auto c = base_config();
    CHECK(generate_ensemble(c).path(3) == generate_ensemble(c).path(3));
    CHECK_FALSE(generate_ensemble(c).path(3) == generate_ensemble(c).path(4));
    auto other = c;
    other.seed = 43;
    CHECK_FALSE(generate_ensemble(c).path(0) == generate_ensemble(other).path(0));
}

TEST_CASE("c0 = 1 makes every stream identical", "[simulate]") {
    auto m = identical_streams(8).path(0);
    for (int i = 1; i < m.streams(); ++i) {
        for (int s = 0; s < m.stocks(); ++s) CHECK(m(i, s) == m(0, s));
    }
}

TEST_CASE("raw draws carry the configured pairwise correlation", "[simulate][statistical]") {
    auto c = base_config();
    c.paths = 200;
    c.base_correlation = 0.0;
    auto zero = mean_pairwise_raw_correlation(c);
    CHECK(std::abs(zero.mean) <= 3 * zero.std_error);

    c.base_correlation = 0.25;
    c.n_stocks = 256;
    auto quarter = mean_pairwise_raw_correlation(c);
    CHECK(std::abs(quarter.mean - 0.25) <= 3 * quarter.std_error);
}

TEST_CASE("tournament fixtures", "[simulate]") {
    SECTION("mirrored streams cross completely") {
        auto curve = tournament_turnover(mirrored_pair());
        REQUIRE(curve.points.size() == 2);
        CHECK(curve.points[1].n == 2);
        CHECK(curve.points[1].mean == 0.0);
    }
    SECTION("level 0 is the per-stream turnover") {
        auto curve = tournament_turnover(generate_ensemble(base_config()));
        CHECK_THAT(curve.points[0].mean, WithinRel(0.1, 1e-12));
        CHECK(curve.points[0].std_error < 1e-15);
        CHECK(curve.points.back().n == 8);
        CHECK_NOTHROW(curve.validate());
    }
    SECTION("identical streams never cross") {
        auto curve = tournament_turnover(identical_streams(8));
        for (const auto& p : curve.points) CHECK_THAT(p.mean, WithinRel(0.1, 1e-12));
    }
    SECTION("N must be a power of two") {
        auto c = base_config();
        c.n_streams = 6;
        CHECK_THROWS_WITH(tournament_turnover(generate_ensemble(c)), Catch::Matchers::ContainsSubstring("power of two"));
        CHECK_THROWS_AS(measure_netting(generate_ensemble(c)), InputError);
        CHECK(combined_turnover_per_path(generate_ensemble(c)).size() == 50u);
    }
}

TEST_CASE("Gaussian turnover oracle is itself validated", "[simulate][statistical]") {
    // Independent Cholesky-based Monte Carlo of E|sum of g equicorrelated normals|.
    for (int g : {1, 2, 4, 8, 16, 32}) {
        auto est = oracle::mc_group_turnover_ratio(g, 0.25, 200'000, 1000 + g);
        const double closed = gaussian_oracle(1.0, 0.25, g);
        CHECK(std::abs(est.mean - closed) <= 3 * est.std_error + 1e-12);
    }
}

TEST_CASE("tournament curve follows the Gaussian oracle", "[simulate][statistical]") {
    auto c = base_config();
    c.n_streams = 64;
    c.paths = 2000;
    c.scaling = GrossScaling::expected;
    auto curve = tournament_turnover(generate_ensemble(c));
    for (const auto& p : curve.points) {
        INFO("n = " << p.n);
        CHECK(std::abs(p.mean - gaussian_oracle(0.1, 0.25, p.n)) <= 3 * p.std_error);
    }
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        CHECK(b.mean <= a.mean + 3 * std::hypot(a.std_error, b.std_error));
    }
    CHECK(curve.points.back().mean >= 0.9 * 0.1 * std::sqrt(0.25));
}

TEST_CASE("statistics do not depend on the worker count", "[simulate]") {
    auto c = base_config();
    c.n_streams = 16;
    c.paths = 64;
    auto e = generate_ensemble(c);
    auto one = tournament_turnover(e, {1});
    auto many = tournament_turnover(e, {7});
    REQUIRE(one.points.size() == many.points.size());
    for (std::size_t i = 0; i < one.points.size(); ++i) {
        CHECK(one.points[i].mean == many.points[i].mean);
        CHECK(one.points[i].std_error == many.points[i].std_error);
    }
    CHECK(curve_to_csv(one) == curve_to_csv(many));
    CHECK(empirical_crossing_params(e, 1, {1}) == empirical_crossing_params(e, 1, {5}));
    auto lc1 = level_correlations(e, 8, {1});
    auto lc2 = level_correlations(e, 8, {3});
    CHECK(lc1.pooled == lc2.pooled);
}

TEST_CASE("top of the tournament equals direct netting of cent blotters", "[simulate]") {
    auto c = base_config();
    c.n_streams = 16;
    c.paths = 20;
    auto generated = generate_ensemble(c);
    const double per_stream = c.investment_per_stream();
    for (int p = 0; p < c.paths; ++p) {
        TradeMatrix m = generated.path(p);
        std::vector<Blotter> blotters;
        for (int i = 0; i < m.streams(); ++i) {
            Blotter b("s" + std::to_string(i), Cents{std::llround(per_stream * 100)});
            for (int s = 0; s < m.stocks(); ++s) {
                m(i, s) = std::round(m(i, s) * 100.0) / 100.0;
                b.add("S" + std::to_string(s), Cents{std::llround(m(i, s) * 100.0)});
            }
            blotters.push_back(std::move(b));
        }
        auto single = AlphaEnsemble::from_paths(c, {m});
        const double top = tournament_turnover(single).points.back().mean;
        const double direct = gross_and_turnover(cross_many(blotters)).turnover;
        CHECK_THAT(top, WithinRel(direct, 1e-9));
        CHECK_THAT(combined_turnover_per_path(single)[0], WithinRel(direct, 1e-9));
    }
}

TEST_CASE("empirical crossing parameters", "[simulate]") {
    SECTION("identical streams") {
        for (double r : empirical_crossing_params(identical_streams(4), 0)) CHECK(r == 1.0);
        for (double r : empirical_crossing_params(identical_streams(4), 1)) CHECK(r == 1.0);
    }
    SECTION("mirrored streams") {
        auto rho = empirical_crossing_params(mirrored_pair(), 0);
        REQUIRE(rho.size() == 2u);
        for (double r : rho) CHECK(r == -1.0);
    }
    SECTION("invalid level") {
        CHECK_THROWS_AS(empirical_crossing_params(identical_streams(4), 2), InputError);
        CHECK_THROWS_AS(empirical_crossing_params(identical_streams(4), -1), InputError);
    }
    SECTION("independent streams cross at rho = sqrt(2) - 1") {
        const double xi = oracle::crossed_fraction_independent();
        CHECK_THAT(1.0 - 2.0 * xi, WithinAbs(std::sqrt(2.0) - 1.0, 1e-6));

        auto c = base_config();
        c.n_streams = 2;
        c.n_stocks = 1024;
        c.base_correlation = 0.0;
        c.paths = 1000;
        auto rho = empirical_crossing_params(generate_ensemble(c), 0);
        auto est = mean_and_stderr(rho);
        CHECK(std::abs(est.mean - (std::sqrt(2.0) - 1.0)) <= 3 * est.std_error);
    }
}

TEST_CASE("measure_netting", "[simulate]") {
    SECTION("mirrored pair nets completely") {
        auto zeta = measure_netting(mirrored_pair());
        CHECK(zeta.points[0].mean == 1.0);
        CHECK(zeta.points[1].mean == 0.0);
    }
    SECTION("identical streams do not net") {
        for (const auto& p : measure_netting(identical_streams(8)).points) CHECK_THAT(p.mean, WithinRel(1.0, 1e-12));
    }
    SECTION("decreasing toward a positive plateau") {
        auto c = base_config();
        c.n_streams = 64;
        c.paths = 400;
        auto zeta = measure_netting(generate_ensemble(c));
        for (std::size_t i = 1; i < zeta.points.size(); ++i) {
            const auto& a = zeta.points[i - 1];
            const auto& b = zeta.points[i];
            CHECK(b.mean <= a.mean + 3 * std::hypot(a.std_error, b.std_error));
        }
        CHECK(zeta.points.back().mean >= 0.9 * std::sqrt(0.25));
    }
}

TEST_CASE("fit_inverse_n", "[simulate]") {
    SECTION("exact 1/N data") {
        TurnoverCurve curve;
        for (int n = 1; n <= 256; n *= 2) curve.points.push_back({n, analytic::turnover_closed(0.1, 0.3, n), 0.0});
        auto fit = fit_inverse_n(curve);
        CHECK_THAT(fit.a0, WithinAbs(0.03, 1e-10));
        CHECK_THAT(fit.a1, WithinAbs(0.07, 1e-10));
        CHECK(fit.residual_norm < 1e-12);
    }
    SECTION("flat curve") {
        TurnoverCurve curve{{{1, 0.04, 0}, {3, 0.04, 0}, {10, 0.04, 0}}};
        auto fit = fit_inverse_n(curve);
        CHECK_THAT(fit.a0, WithinAbs(0.04, 1e-15));
        CHECK_THAT(fit.a1, WithinAbs(0.0, 1e-15));
    }
    SECTION("underdetermined") {
        CHECK_THROWS_AS(fit_inverse_n(TurnoverCurve{{{4, 0.05, 0}}}), InputError);
        CHECK_THROWS_AS(fit_inverse_n(TurnoverCurve{{{4, 0.05, 0}, {4, 0.06, 0}}}), DegenerateError);
    }
    SECTION("recovers tau*rho and tau*(1-rho) across parameters") {
        for (double tau : {0.05, 0.1, 0.3}) {
            for (double rho : {0.0, 0.2, 0.6, 0.95}) {
                TurnoverCurve curve;
                for (int n = 1; n <= 256; n *= 2) curve.points.push_back({n, analytic::turnover_closed(tau, rho, n), 0.0});
                auto fit = fit_inverse_n(curve);
                CHECK_THAT(fit.a0, WithinAbs(tau * rho, 1e-10));
                CHECK_THAT(fit.a1, WithinAbs(tau * (1 - rho), 1e-10));
            }
        }
    }
}

TEST_CASE("level correlations follow the halves map", "[simulate][statistical]") {
    auto c = base_config();
    c.n_streams = 32;
    c.n_stocks = 64;
    c.paths = 2000;
    c.scaling = GrossScaling::expected;
    const int batches = 40;
    auto lc = level_correlations(generate_ensemble(c), batches);
    REQUIRE(lc.pooled.size() == 5u);
    CHECK(std::abs(lc.pooled[0] - 0.25) < 0.01);
    for (int k = 1; k <= 4; ++k) {
        const double diff = lc.pooled[k] - analytic::correlation_of_halves(lc.pooled[k - 1]);
        std::vector<double> per_batch;
        for (const auto& b : lc.per_batch) per_batch.push_back(b[k] - analytic::correlation_of_halves(b[k - 1]));
        auto est = mean_and_stderr(per_batch);
        INFO("level " << k << " diff " << diff << " se " << est.std_error);
        CHECK(std::abs(diff) <= 3 * est.std_error);
    }
}

TEST_CASE("curve CSV and fit JSON", "[simulate]") {
    TurnoverCurve curve{{{1, 0.1, 0.0}, {2, 0.0625, 0.001}}};
    CHECK(curve_to_csv(curve) == "n,turnover_mean,turnover_stderr\n1,0.1,0\n2,0.0625,0.001\n");
    auto j = to_json(FitResult{0.03, 0.07, 0.0});
    CHECK(j["a0"] == 0.03);
    CHECK(j.contains("residual_norm"));
    TurnoverCurve bad{{{2, 0.1, 0.0}, {1, 0.1, 0.0}}};
    CHECK_THROWS_AS(bad.validate(), InputError);
}

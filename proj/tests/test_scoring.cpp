#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lrbench/errors.hpp"
#include "lrbench/scoring.hpp"

using namespace lrbench;
using namespace lrbench::scoring;
using genmodel::Hypothesis;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("logarithmic rule") {
    CHECK(score(ScoringRule::Logarithmic, 0.5, Hypothesis::H1) == -1.0);
    CHECK(score(ScoringRule::Logarithmic, 0.5, Hypothesis::H2) == -1.0);
    CHECK(score(ScoringRule::Logarithmic, 1.0, Hypothesis::H1) == 0.0);
    CHECK(score(ScoringRule::Logarithmic, 1.0, Hypothesis::H2) == -INFINITY);
    CHECK_THAT(score(ScoringRule::Logarithmic, 0.25, Hypothesis::H2), WithinAbs(std::log2(0.75), 1e-15));
    CHECK(expected_score(ScoringRule::Logarithmic, 0.5, 0.5) == -1.0);
}

TEST_CASE("Brier rule in reward form") {
    CHECK(score(ScoringRule::Brier, 1.0, Hypothesis::H1) == 0.0);
    CHECK(score(ScoringRule::Brier, 0.0, Hypothesis::H1) == -2.0);
    CHECK_THAT(score(ScoringRule::Brier, 0.7, Hypothesis::H2), WithinAbs(-2.0 * 0.7 * 0.7, 1e-15));
}

TEST_CASE("out-of-range stated probabilities are errors") {
    CHECK_THROWS_AS(score(ScoringRule::Brier, 1.1, Hypothesis::H1), ConfigError);
    CHECK_THROWS_AS(score(ScoringRule::Logarithmic, -0.1, Hypothesis::H1), ConfigError);
    CHECK_THROWS_AS(expected_score(ScoringRule::Brier, 0.5, 2.0), ConfigError);
}

TEST_CASE("ImproperTable3 rule") {
    CHECK(score(ScoringRule::ImproperTable3, 0.0, Hypothesis::H2) == 3.0);
    CHECK(score(ScoringRule::ImproperTable3, 0.0, Hypothesis::H1) == 0.0);
    CHECK(score(ScoringRule::ImproperTable3, 0.3, Hypothesis::H1) == 1.48);
    CHECK(score(ScoringRule::ImproperTable3, 0.71, Hypothesis::H2) == 1.48);
    CHECK(kTable3.size() == 11);
    // Rows are symmetric under p -> 1 - p with the columns swapped.
    for (std::size_t k = 0; k < kTable3.size(); ++k) {
        CHECK(kTable3[k].score_rain == kTable3[10 - k].score_no_rain);
    }
}

TEST_CASE("ImproperTable3 worked arithmetic") {
    // 0.1 x 0 + 0.9 x 3 = 2.7
    CHECK_THAT(expected_score(ScoringRule::ImproperTable3, 0.0, 0.1), WithinAbs(2.7, 1e-12));
    // 0.1 x 1 + 0.9 x 1.95 = 1.855, quoted to two decimals as 1.86
    const double honest = expected_score(ScoringRule::ImproperTable3, 0.1, 0.1);
    CHECK_THAT(honest, WithinAbs(1.855, 1e-12));
    // 1.855 sits on the rounding boundary; allow for the binary representation.
    CHECK(std::fabs(honest - 1.86) <= 0.005 + 1e-12);
}

TEST_CASE("honesty check") {
    SECTION("logarithmic") {
        const auto r = honesty_check(ScoringRule::Logarithmic, 0.01);
        CHECK(r.is_honest);
        CHECK(r.counterexamples.empty());
    }
    SECTION("Brier") {
        const auto r = honesty_check(ScoringRule::Brier, 0.01);
        CHECK(r.is_honest);
        CHECK(r.counterexamples.empty());
    }
    SECTION("ImproperTable3") {
        const auto r = honesty_check(ScoringRule::ImproperTable3, 0.1);
        CHECK_FALSE(r.is_honest);
        bool found = false;
        for (const auto& v : r.counterexamples) {
            if (std::fabs(v.believed - 0.1) < 1e-12 && v.stated == 0.0) {
                found = true;
                CHECK_THAT(v.expected_stated, WithinAbs(2.7, 1e-12));
            }
        }
        CHECK(found);
    }
    CHECK_THROWS_AS(honesty_check(ScoringRule::Brier, 0.2), ConfigError);
}

TEST_CASE("strict propriety by brute force") {
    for (ScoringRule rule : {ScoringRule::Logarithmic, ScoringRule::Brier}) {
        for (int pi = 1; pi <= 99; ++pi) {
            const double p = pi / 100.0;
            const double best = expected_score(rule, p, p);
            for (int qi = 0; qi <= 100; ++qi) {
                if (qi == pi) continue;
                REQUIRE(expected_score(rule, qi / 100.0, p) < best);
            }
        }
    }
}

TEST_CASE("honest expected log score is lowest at 0.5") {
    auto e = [](double p) { return expected_score(ScoringRule::Logarithmic, p, p); };
    for (int i = 1; i < 50; ++i) {
        CHECK(e(i / 100.0) > e((i + 1) / 100.0));
        CHECK(e(1.0 - i / 100.0) > e(1.0 - (i + 1) / 100.0));
    }
}

TEST_CASE("mean score") {
    std::vector<ScoredRecord> perfect(10, {1.0, Hypothesis::H1});
    const auto m = mean_score(ScoringRule::Logarithmic, perfect);
    CHECK(m.mean == 0.0);
    CHECK(m.std_error == 0.0);

    // log2(0.5) = -1 and log2(0.125) = -3
    const auto two = mean_score(ScoringRule::Logarithmic, {{0.5, Hypothesis::H1}, {0.125, Hypothesis::H1}});
    CHECK(two.mean == -2.0);

    const auto with_inf = mean_score(ScoringRule::Logarithmic, {{0.5, Hypothesis::H1}, {0.0, Hypothesis::H1}});
    CHECK(with_inf.n_neg_inf == 1);
    CHECK(with_inf.n == 1);
    CHECK(with_inf.mean == -1.0);

    CHECK_THROWS_AS(mean_score(ScoringRule::Brier, {}), ConfigError);
}

TEST_CASE("mean score of calibrated forecasts matches the analytic expectation") {
    // Forecast p ~ U(0.05, 0.95), truth ~ Bernoulli(p).
    Rng rng(10);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<ScoredRecord> recs(10000);
    for (auto& r : recs) {
        r.stated_p_h1 = u(rng);
        r.realized = std::bernoulli_distribution(r.stated_p_h1)(rng) ? Hypothesis::H1 : Hypothesis::H2;
    }
    // E[p log2 p + (1-p) log2 (1-p)] over U(a, b), by the antiderivative
    // of t ln t: t^2 ln t / 2 - t^2 / 4, doubled for symmetry.
    auto F = [](double t) { return t * t * std::log(t) / 2.0 - t * t / 4.0; };
    const double a = 0.05, b = 0.95;
    const double analytic = 2.0 * (F(b) - F(a)) / (b - a) / std::log(2.0);
    const auto m = mean_score(ScoringRule::Logarithmic, recs);
    CHECK(std::fabs(m.mean - analytic) < 3.0 * m.std_error);
}

TEST_CASE("calibration report") {
    SECTION("calibrated by construction") {
        Rng rng(12);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<ScoredRecord> recs(100000);
        for (auto& r : recs) {
            r.stated_p_h1 = u(rng);
            r.realized = u(rng) < r.stated_p_h1 ? Hypothesis::H1 : Hypothesis::H2;
        }
        const auto c = calibration_report(recs);
        CHECK(c.passes(3.0));
        std::size_t total = 0;
        for (auto n : c.bin_counts) total += n;
        CHECK(total == recs.size());
        CHECK(c.bin_edges.size() == 11);
        CHECK(c.bin_edges.front() == 0.0);
        CHECK(c.bin_edges.back() == 1.0);
        for (double f : c.bin_empirical_freq) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
        }
    }
    SECTION("constant 0.5 with balanced truths") {
        std::vector<ScoredRecord> recs;
        for (int i = 0; i < 1000; ++i) recs.push_back({0.5, i % 2 ? Hypothesis::H1 : Hypothesis::H2});
        const auto c = calibration_report(recs);
        CHECK_THAT(c.max_abs_gap, WithinAbs(0.0, 1e-12));
        CHECK(c.passes());
    }
    SECTION("overconfident forecasts are caught") {
        std::vector<ScoredRecord> recs;
        for (int i = 0; i < 1000; ++i) recs.push_back({0.9, i % 2 ? Hypothesis::H1 : Hypothesis::H2});
        const auto c = calibration_report(recs);
        CHECK_THAT(c.max_abs_gap, WithinAbs(0.4, 1e-12));
        CHECK_FALSE(c.passes());
    }
    SECTION("sparse bins are flagged, not assessed") {
        std::vector<ScoredRecord> recs(10, {0.95, Hypothesis::H2});
        const auto c = calibration_report(recs);
        CHECK_FALSE(c.bin_assessed[9]);
        CHECK(c.passes());
        CHECK(c.max_abs_gap == 0.0);
    }
    SECTION("stated 1 lands in the last bin") {
        const auto c = calibration_report({{1.0, Hypothesis::H1}});
        CHECK(c.bin_counts.back() == 1);
    }
    CHECK_THROWS_AS(calibration_report({}, 1), ConfigError);
}

TEST_CASE("rule names") {
    CHECK(rule_from_string("log") == ScoringRule::Logarithmic);
    CHECK(rule_from_string("brier") == ScoringRule::Brier);
    for (auto r : {ScoringRule::Logarithmic, ScoringRule::Brier, ScoringRule::ImproperTable3}) {
        CHECK(rule_from_string(to_string(r)) == r);
    }
    CHECK_THROWS_AS(rule_from_string("spherical"), ConfigError);
}

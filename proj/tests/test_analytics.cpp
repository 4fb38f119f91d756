#include <doctest.h>

#include <cmath>

#include "xts/analytics.hpp"
#include "xts/common.hpp"
#include "test_support.hpp"

using namespace xts;

namespace {

LpdSeries as_series(Eigen::MatrixXd m) {
    LpdSeries s;
    s.per_output.push_back(std::move(m));
    return s;
}

}  // namespace

TEST_CASE("pearson basics") {
    Eigen::VectorXd a(4), b(4);
    a << 1, 2, 3, 4;
    b << 2, 4, 6, 8;
    CHECK(pearson(a, b) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson(a, (-b).eval()) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(pearson(a, b) == pearson(b, a));

    Eigen::VectorXd c = Eigen::VectorXd::Constant(4, 3.0);
    CHECK(std::isnan(pearson(a, c)));

    Eigen::VectorXd d(3);
    d << 1, 2, 3;
    CHECK_THROWS_AS(pearson(a, d), UsageError);

    // hand-computed example
    Eigen::VectorXd u(3), v(3);
    u << 0, 1, 2;
    v << 1, 0, 2;
    // cov = ((-1)(0) + 0(-1) + (1)(1))/.. = 1 / sqrt(2 * 2) = 0.5
    CHECK(pearson(u, v) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("ensemble stats match a naive loop") {
    testsup::Rng rng(51);
    const long T = 8, C = 4;
    std::vector<LpdSeries> members;
    for (int m = 0; m < 5; ++m) {
        Eigen::MatrixXd mat(T, C);
        for (long t = 0; t < T; ++t)
            for (long c = 0; c < C; ++c) mat(t, c) = rng.uniform(-2.0, 2.0);
        members.push_back(as_series(std::move(mat)));
    }
    const EnsembleLpdStats s = ensemble_lpd_stats(members);
    for (long t = 0; t < T; ++t)
        for (long c = 0; c < C; ++c) {
            double sum = 0.0;
            for (const auto& m : members) sum += m.matrix()(t, c);
            const double mean = sum / 5.0;
            double var = 0.0;
            for (const auto& m : members) {
                const double d = m.matrix()(t, c) - mean;
                var += d * d;
            }
            var /= 5.0;  // population variance over the members
            CHECK(std::abs(s.mean(t, c) - mean) < 1e-12);
            CHECK(std::abs(s.sigma(t, c) - std::sqrt(var)) < 1e-12);
            CHECK(std::abs(s.tstat(t, c) - mean / std::sqrt(var)) < 1e-9);
            CHECK(s.tstat_defined(t, c));
        }
}

TEST_CASE("identical members give zero sigma and undefined t-stats") {
    Eigen::MatrixXd m(3, 2);
    m << 1, 2, 3, 4, 5, 6;
    const std::vector<LpdSeries> members{as_series(m), as_series(m), as_series(m)};
    const EnsembleLpdStats s = ensemble_lpd_stats(members);
    CHECK((s.mean - m).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.sigma.cwiseAbs().maxCoeff() == 0.0);
    for (long t = 0; t < 3; ++t)
        for (long c = 0; c < 2; ++c) {
            CHECK_FALSE(s.tstat_defined(t, c));
            CHECK(std::isnan(s.tstat(t, c)));
        }
}

TEST_CASE("ensemble stats reject shape mismatches and tiny ensembles") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 2);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 2);
    CHECK_THROWS_AS(ensemble_lpd_stats({as_series(a), as_series(b)}), UsageError);
    CHECK_THROWS_AS(ensemble_lpd_stats({as_series(a)}), UsageError);
}

TEST_CASE("cross correlations: reference column and member-vs-mean agreement") {
    testsup::Rng rng(52);
    const long T = 20;
    Eigen::MatrixXd base(T, 3);
    for (long t = 0; t < T; ++t) {
        base(t, 0) = rng.uniform(-1.0, 1.0);
        base(t, 1) = 2.0 * base(t, 0) + 1.0;   // perfectly correlated with col 0
        base(t, 2) = rng.uniform(-1.0, 1.0);
    }
    // identical members: member-vs-mean correlation is exactly 1
    const std::vector<LpdSeries> members{as_series(base), as_series(base)};
    const Eigen::MatrixXd cc = lpd_cross_correlations(members, 0);
    REQUIRE(cc.rows() == 2);
    REQUIRE(cc.cols() == 3);
    CHECK(cc(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cc(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(cc(0, 2)) < 1.0);
    for (long c = 0; c < 3; ++c) CHECK(cc(1, c) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(lpd_cross_correlations(members, 5), UsageError);
}

TEST_CASE("rolling quantile order statistics on a ramp") {
    Eigen::VectorXd ramp(30);
    for (long t = 0; t < 30; ++t) ramp[t] = static_cast<double>(t + 1);
    const int W = 10;

    // rank ceil(0.05 * 10) = 1: the window minimum
    const MaskedSeries lo = rolling_quantile(ramp, W, 0.05);
    // rank ceil(0.95 * 10) = 10: the window maximum
    const MaskedSeries hi = rolling_quantile(ramp, W, 0.95);
    // rank ceil(0.5 * 10) = 5
    const MaskedSeries mid = rolling_quantile(ramp, W, 0.5);

    for (long t = 0; t < W; ++t) {
        CHECK_FALSE(lo.defined[static_cast<std::size_t>(t)]);
        CHECK(std::isnan(lo.values[t]));
    }
    for (long t = W; t < 30; ++t) {
        CHECK(lo.defined[static_cast<std::size_t>(t)]);
        CHECK(lo.values[t] == ramp[t - W]);       // min of the prior 10
        CHECK(hi.values[t] == ramp[t - 1]);       // max of the prior 10
        CHECK(mid.values[t] == ramp[t - W + 4]);  // 5th smallest
    }

    CHECK_THROWS_AS(rolling_quantile(ramp, 30, 0.5), UsageError);
    CHECK_THROWS_AS(rolling_quantile(ramp, 1, 0.5), UsageError);
    CHECK_THROWS_AS(rolling_quantile(ramp, 10, 0.0), UsageError);
    CHECK_THROWS_AS(rolling_quantile(ramp, 10, 1.0), UsageError);
}

TEST_CASE("rolling quantile uses only strictly prior data") {
    testsup::Rng rng(53);
    Eigen::VectorXd s = rng.vector(60, -1.0, 1.0);
    const MaskedSeries q = rolling_quantile(s, 15, 0.2);

    Eigen::VectorXd tampered = s;
    for (long t = 40; t < 60; ++t) tampered[t] = 1e6;  // future rewritten
    const MaskedSeries q2 = rolling_quantile(tampered, 15, 0.2);
    for (long t = 0; t < 40; ++t) {
        if (!q.defined[static_cast<std::size_t>(t)]) continue;
        CHECK(q.values[t] == q2.values[t]);
    }
}

TEST_CASE("rolling quantile exceedance rate approaches q") {
    testsup::Rng rng(54);
    Eigen::VectorXd s(3000);
    for (long t = 0; t < s.size(); ++t) s[t] = rng.gaussian();
    const int W = 200;
    const double q = 0.1;
    const MaskedSeries roll = rolling_quantile(s, W, q);
    long below = 0, total = 0;
    for (long t = W; t < s.size(); ++t) {
        ++total;
        if (s[t] < roll.values[t]) ++below;
    }
    const double rate = static_cast<double>(below) / static_cast<double>(total);
    CHECK(rate > 0.05);
    CHECK(rate < 0.16);
}

TEST_CASE("exit signals: warm-up, dips and spikes") {
    // constant background with one dip and one spike after the warm-up
    Eigen::VectorXd s(40);
    for (long t = 0; t < 40; ++t) s[t] = 10.0 + 0.01 * std::sin(0.7 * t);
    s[25] = 5.0;   // dip far below any prior value
    s[32] = 20.0;  // spike far above

    const SignalSeries below = exit_signals(s, 10, 0.1, ExitSide::Below, false);
    REQUIRE(below.exposure.size() == 40);
    for (long t = 0; t < 10; ++t) {
        CHECK_FALSE(below.defined[static_cast<std::size_t>(t)]);
        CHECK(below.exposure[t] == 1.0);  // warm-up stays invested
    }
    CHECK(below.exposure[25] == 0.0);
    CHECK(below.exposure[32] == 1.0);
    CHECK(below.exposure[24] == 1.0);

    const SignalSeries above = exit_signals(s, 10, 0.1, ExitSide::Above, false);
    CHECK(above.exposure[25] == 1.0);
    CHECK(above.exposure[32] == 0.0);

    // flat background: only the dip and spike cross either quantile
    Eigen::VectorXd flat = Eigen::VectorXd::Constant(40, 10.0);
    flat[25] = 5.0;
    flat[32] = 20.0;
    const SignalSeries both = exit_signals(flat, 10, 0.1, ExitSide::TwoSided, false);
    CHECK(both.exposure[25] == 0.0);
    CHECK(both.exposure[32] == 0.0);
    CHECK(both.exposure[20] == 1.0);
    CHECK(both.trigger_kind == TriggerKind::TwoSided);
}

TEST_CASE("exit signals honour the absolute-value switch") {
    Eigen::VectorXd s(40);
    for (long t = 0; t < 40; ++t) s[t] = (t % 2 == 0 ? 1.0 : -1.0) * (1.0 + 0.001 * t);
    s[30] = -9.0;  // large magnitude, negative sign

    const SignalSeries raw = exit_signals(s, 10, 0.1, ExitSide::Above, false);
    const SignalSeries abs = exit_signals(s, 10, 0.1, ExitSide::Above, true);
    CHECK(raw.exposure[30] == 1.0);  // -9 is not above anything raw
    CHECK(abs.exposure[30] == 0.0);  // |-9| spikes above prior magnitudes
}

TEST_CASE("aggregate exposure is the mean of per-column indicators") {
    Eigen::VectorXd up(30), down(30);
    for (long t = 0; t < 30; ++t) {
        up[t] = static_cast<double>(t);     // always above its prior quantile
        down[t] = static_cast<double>(-t);  // never above
    }
    const SignalSeries agg = aggregate_exposure({up, down}, 10, 0.5);
    for (long t = 10; t < 30; ++t) {
        CHECK(agg.defined[static_cast<std::size_t>(t)]);
        CHECK(agg.exposure[t] == 0.5);
    }
    for (long t = 0; t < 10; ++t) CHECK(agg.exposure[t] == 1.0);
    CHECK(agg.trigger_kind == TriggerKind::Aggregate);

    const SignalSeries solo = aggregate_exposure({up}, 10, 0.5);
    for (long t = 10; t < 30; ++t) CHECK(solo.exposure[t] == 1.0);

    CHECK_THROWS_AS(aggregate_exposure({}, 10, 0.5), UsageError);
    CHECK_THROWS_AS(aggregate_exposure({up, down.head(10).eval()}, 5, 0.5), UsageError);
}

TEST_CASE("regimes partition the defined points") {
    testsup::Rng rng(55);
    Eigen::VectorXd s(200);
    for (long t = 0; t < 200; ++t) s[t] = rng.gaussian();
    const auto regimes = classify_regimes(s, 50, 0.1, 0.9, true);
    REQUIRE(regimes.size() == 200);
    long critical = 0, neutral = 0, auspicious = 0, undefined = 0;
    for (const Regime r : regimes) {
        if (r == Regime::Critical) ++critical;
        else if (r == Regime::Neutral) ++neutral;
        else if (r == Regime::Auspicious) ++auspicious;
        else ++undefined;
    }
    CHECK(undefined == 50);
    CHECK(critical + neutral + auspicious == 150);
    CHECK(neutral > 0);

    // strictly increasing magnitudes always exceed the upper quantile
    Eigen::VectorXd ramp(30);
    for (long t = 0; t < 30; ++t) ramp[t] = static_cast<double>(t);
    const auto up = classify_regimes(ramp, 10, 0.1, 0.9, false);
    for (long t = 10; t < 30; ++t) CHECK(up[static_cast<std::size_t>(t)] == Regime::Auspicious);

    CHECK_THROWS_AS(classify_regimes(ramp, 10, 0.9, 0.1, false), UsageError);
}

TEST_CASE("drift analysis on a hand-built table") {
    std::vector<Regime> regimes{Regime::Undefined, Regime::Critical, Regime::Critical,
                                Regime::Neutral,   Regime::Neutral,  Regime::Neutral,
                                Regime::Auspicious};
    Eigen::VectorXd next(7);
    next << 99.0, 0.01, -0.03, 0.02, 0.02, -0.01, 0.05;  // index 0 is ignored

    const DriftReport rep = drift_analysis(regimes, next);
    CHECK(rep.critical.count == 2);
    CHECK(rep.critical.proportion_positive == doctest::Approx(50.0));
    CHECK(rep.critical.average_return == doctest::Approx(100.0 * (0.01 - 0.03) / 2.0));
    CHECK(rep.neutral.count == 3);
    CHECK(rep.neutral.proportion_positive == doctest::Approx(100.0 * 2.0 / 3.0));
    CHECK(rep.auspicious.count == 1);
    CHECK(rep.auspicious.average_return == doctest::Approx(5.0));
    CHECK(rep.all.count == 6);
    CHECK(rep.all.average_return ==
          doctest::Approx(100.0 * (0.01 - 0.03 + 0.02 + 0.02 - 0.01 + 0.05) / 6.0));

    // regimes with no members are flagged undefined
    const DriftReport none = drift_analysis({Regime::Neutral}, Eigen::VectorXd::Zero(1));
    CHECK_FALSE(none.critical.defined);
    CHECK(none.neutral.defined);

    CHECK_THROWS_AS(drift_analysis(regimes, Eigen::VectorXd::Zero(3)), UsageError);
}

TEST_CASE("heuristic summary echoes constant replications") {
    Eigen::MatrixXd m(4, 3);
    for (long t = 0; t < 4; ++t) {
        m(t, 0) = 0.25;
        m(t, 1) = 1.5;
        m(t, 2) = -0.5;
    }
    const EnsembleLpdStats s = ensemble_lpd_stats({as_series(m), as_series(m)});
    auto [intercept, weights] = heuristic_summary(s);
    CHECK(intercept == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(weights.size() == 2);
    CHECK(weights[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(weights[1] == doctest::Approx(-0.5).epsilon(1e-15));
}

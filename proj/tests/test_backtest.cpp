#include <doctest.h>

#include <cmath>

#include "xts/backtest.hpp"
#include "xts/common.hpp"
#include "test_support.hpp"

using namespace xts;

TEST_CASE("sign rule accrual matches a hand loop") {
    testsup::Rng rng(61);
    const long T = 50;
    Eigen::VectorXd f = rng.vector(T, -1.0, 1.0);
    Eigen::VectorXd r = rng.vector(T, -0.05, 0.05);
    const BacktestResult bt = sign_rule(f, r);
    REQUIRE(bt.positions.size() == T);
    CHECK(bt.period_returns[0] == 0.0);
    CHECK(bt.cumulative[0] == 0.0);
    double acc = 0.0;
    for (long t = 1; t < T; ++t) {
        const double pos = f[t - 1] > 0.0 ? 1.0 : (f[t - 1] < 0.0 ? -1.0 : 1.0);
        const double want = pos * r[t];
        acc += want;
        CHECK(std::abs(bt.period_returns[t] - want) < 1e-15);
        CHECK(std::abs(bt.cumulative[t] - acc) < 1e-12);
    }
}

TEST_CASE("sign(0) is long by default and flat on request") {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd r(3);
    r << 0.0, 0.02, -0.01;
    const BacktestResult lng = sign_rule(f, r);
    CHECK(lng.positions.minCoeff() == 1.0);
    CHECK(lng.cumulative[2] == doctest::Approx(0.01).epsilon(1e-15));
    const BacktestResult flat = sign_rule(f, r, false);
    CHECK(flat.positions.cwiseAbs().maxCoeff() == 0.0);
    CHECK(flat.cumulative[2] == 0.0);
}

TEST_CASE("all-positive forecasts reproduce buy and hold") {
    testsup::Rng rng(62);
    Eigen::VectorXd r = rng.vector(40, -0.03, 0.03);
    const BacktestResult a = sign_rule(Eigen::VectorXd::Ones(40), r);
    const BacktestResult b = buy_and_hold(r);
    CHECK((a.cumulative - b.cumulative).cwiseAbs().maxCoeff() == 0.0);
    // buy and hold accrues the sum of returns after the first period
    CHECK(b.cumulative[39] == doctest::Approx(r.tail(39).sum()).epsilon(1e-12));
}

TEST_CASE("perfect foresight collects the absolute returns") {
    testsup::Rng rng(63);
    Eigen::VectorXd r = rng.vector(30, -0.05, 0.05);
    Eigen::VectorXd f(30);
    for (long t = 0; t < 29; ++t) f[t] = r[t + 1];  // next-period return as forecast
    f[29] = 0.0;
    const BacktestResult bt = sign_rule(f, r);
    CHECK(bt.cumulative[29] ==
          doctest::Approx(r.tail(29).cwiseAbs().sum()).epsilon(1e-12));
}

TEST_CASE("flipping forecast signs flips the performance") {
    testsup::Rng rng(64);
    Eigen::VectorXd f = rng.vector(25, -1.0, 1.0);
    Eigen::VectorXd r = rng.vector(25, -0.05, 0.05);
    const BacktestResult a = sign_rule(f, r);
    const BacktestResult b = sign_rule((-f).eval(), r);
    CHECK((a.cumulative + b.cumulative).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("positions act with a one-period delay (no look-ahead)") {
    Eigen::VectorXd f = Eigen::VectorXd::Ones(5);
    Eigen::VectorXd r(5);
    r << 0.9, 0.01, 0.01, 0.01, 0.01;
    // the t=0 return never accrues; changing f at the last step changes nothing
    Eigen::VectorXd f2 = f;
    f2[4] = -5.0;
    const BacktestResult a = sign_rule(f, r);
    const BacktestResult b = sign_rule(f2, r);
    CHECK(a.cumulative[4] == doctest::Approx(0.04).epsilon(1e-15));
    CHECK((a.cumulative - b.cumulative).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exposure and long-short strategies") {
    SignalSeries s;
    s.exposure.resize(5);
    s.exposure << 1.0, 0.0, 0.5, 1.0, 0.0;
    s.defined.assign(5, true);
    Eigen::VectorXd r(5);
    r << 0.0, 0.02, 0.04, -0.02, 0.06;

    const BacktestResult exp = exposure_strategy(s, r);
    CHECK(exp.period_returns[1] == doctest::Approx(0.02));
    CHECK(exp.period_returns[2] == doctest::Approx(0.0));
    CHECK(exp.period_returns[3] == doctest::Approx(-0.01));
    CHECK(exp.period_returns[4] == doctest::Approx(0.06));

    const BacktestResult ls = long_short_strategy(s, r);
    CHECK(ls.positions[0] == 1.0);
    CHECK(ls.positions[1] == -1.0);
    CHECK(ls.positions[2] == 1.0);  // fractional exposure counts as invested
    CHECK(ls.period_returns[2] == doctest::Approx(-0.04));
    CHECK(ls.period_returns[4] == doctest::Approx(0.06));

    SignalSeries bad;
    bad.exposure.resize(3);
    CHECK_THROWS_AS(exposure_strategy(bad, r), UsageError);
    CHECK_THROWS_AS(long_short_strategy(bad, r), UsageError);
    CHECK_THROWS_AS(sign_rule(Eigen::VectorXd::Zero(3), r), UsageError);
}

TEST_CASE("sharpe ratio against a hand computation") {
    Eigen::VectorXd p(4);
    p << 0.01, 0.03, -0.01, 0.01;
    const double mean = 0.01;
    const double var = (0.0 + 0.02 * 0.02 + 0.02 * 0.02 + 0.0) / 4.0;
    const double want = mean / std::sqrt(var) * std::sqrt(252.0);
    CHECK(sharpe_ratio(p, 0.0, 252.0) == doctest::Approx(want).epsilon(1e-12));

    // risk-free shift lowers the numerator only
    const double rf = 0.005;
    const double want_rf = (mean - rf) / std::sqrt(var) * std::sqrt(252.0);
    CHECK(sharpe_ratio(p, rf, 252.0) == doctest::Approx(want_rf).epsilon(1e-12));

    CHECK(std::isnan(sharpe_ratio(Eigen::VectorXd::Constant(5, 0.01), 0.0, 252.0)));
}

TEST_CASE("metrics: drawdown oracle and zero-variance flag") {
    BacktestResult r;
    r.positions = Eigen::VectorXd::Ones(6);
    r.period_returns.resize(6);
    r.period_returns << 0.0, 0.10, -0.04, -0.08, 0.05, 0.01;
    r.cumulative.resize(6);
    r.cumulative << 0.0, 0.10, 0.06, -0.02, 0.03, 0.04;
    const Metrics m = metrics(r, 0.0, 365.0);
    CHECK(m.max_drawdown == doctest::Approx(0.12).epsilon(1e-15));  // 0.10 peak to -0.02
    CHECK(m.sharpe_defined);
    CHECK(m.sharpe ==
          doctest::Approx(sharpe_ratio(r.period_returns, 0.0, 365.0)).epsilon(1e-15));
    CHECK(std::isnan(m.mse));

    BacktestResult flat;
    flat.positions = Eigen::VectorXd::Zero(4);
    flat.period_returns = Eigen::VectorXd::Zero(4);
    flat.cumulative = Eigen::VectorXd::Zero(4);
    const Metrics fm = metrics(flat);
    CHECK_FALSE(fm.sharpe_defined);
    CHECK(fm.max_drawdown == 0.0);

    // a rising curve never draws down
    BacktestResult up;
    up.positions = Eigen::VectorXd::Ones(4);
    up.period_returns = Eigen::VectorXd::Constant(4, 0.01);
    up.cumulative.resize(4);
    up.cumulative << 0.0, 0.01, 0.02, 0.03;
    CHECK(metrics(up).max_drawdown == 0.0);
}

#include "xts/backtest.hpp"

#include <cmath>
#include <limits>

#include "xts/common.hpp"

namespace xts {

namespace {

// Accrue position_t * return_{t+1}; cumulative log curve starts at 0.
BacktestResult accrue(const Eigen::VectorXd& positions, const Eigen::VectorXd& returns) {
    const long T = returns.size();
    BacktestResult r;
    r.positions = positions;
    r.period_returns = Eigen::VectorXd::Zero(T);
    r.cumulative = Eigen::VectorXd::Zero(T);
    for (long t = 1; t < T; ++t) {
        r.period_returns[t] = positions[t - 1] * returns[t];
        r.cumulative[t] = r.cumulative[t - 1] + r.period_returns[t];
    }
    return r;
}

}  // namespace

BacktestResult sign_rule(const Eigen::VectorXd& forecasts, const Eigen::VectorXd& returns,
                         bool zero_is_long) {
    if (forecasts.size() != returns.size())
        throw UsageError("sign_rule: forecast/return length mismatch");
    Eigen::VectorXd pos(forecasts.size());
    for (long t = 0; t < forecasts.size(); ++t) {
        if (forecasts[t] > 0.0)
            pos[t] = 1.0;
        else if (forecasts[t] < 0.0)
            pos[t] = -1.0;
        else
            pos[t] = zero_is_long ? 1.0 : 0.0;
    }
    return accrue(pos, returns);
}

BacktestResult exposure_strategy(const SignalSeries& signals, const Eigen::VectorXd& returns) {
    if (signals.exposure.size() != returns.size())
        throw UsageError("exposure_strategy: signal/return length mismatch");
    return accrue(signals.exposure, returns);
}

BacktestResult long_short_strategy(const SignalSeries& signals, const Eigen::VectorXd& returns) {
    if (signals.exposure.size() != returns.size())
        throw UsageError("long_short_strategy: signal/return length mismatch");
    Eigen::VectorXd pos(returns.size());
    for (long t = 0; t < returns.size(); ++t)
        pos[t] = signals.exposure[t] == 0.0 ? -1.0 : 1.0;
    return accrue(pos, returns);
}

BacktestResult buy_and_hold(const Eigen::VectorXd& returns) {
    return accrue(Eigen::VectorXd::Ones(returns.size()), returns);
}

double sharpe_ratio(const Eigen::VectorXd& period_returns, double risk_free_per_period,
                    double periods_per_year) {
    const Eigen::ArrayXd excess = period_returns.array() - risk_free_per_period;
    const double m = excess.mean();
    const double var = (excess - m).square().sum() / static_cast<double>(excess.size());
    const double sd = std::sqrt(var);
    if (sd == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return m / sd * std::sqrt(periods_per_year);
}

Metrics metrics(const BacktestResult& result, double risk_free_per_period,
                double periods_per_year) {
    if (result.period_returns.size() == 0) throw UsageError("metrics: empty result");
    Metrics m;
    m.sharpe = sharpe_ratio(result.period_returns, risk_free_per_period, periods_per_year);
    m.sharpe_defined = std::isfinite(m.sharpe);

    double peak = result.cumulative[0];
    double dd = 0.0;
    for (long t = 0; t < result.cumulative.size(); ++t) {
        peak = std::max(peak, result.cumulative[t]);
        dd = std::max(dd, peak - result.cumulative[t]);
    }
    m.max_drawdown = dd;
    m.mse = std::numeric_limits<double>::quiet_NaN();
    return m;
}

}  // namespace xts

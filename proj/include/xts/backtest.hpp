#pragma once

#include <Eigen/Dense>
#include <vector>

#include "xts/analytics.hpp"

namespace xts {

// Cumulative log performance of a positioned strategy. positions[t] is the
// exposure decided at t and applied to returns[t+1]; cumulative[0] = 0.
struct BacktestResult {
    Eigen::VectorXd positions;       // length T
    Eigen::VectorXd period_returns;  // length T, strategy return accrued at t
    Eigen::VectorXd cumulative;      // length T, cumulative log performance
};

// position_t = sign(forecast_t), applied to return_{t+1}; sign(0) treated as
// +1 by default (flag for flat).
BacktestResult sign_rule(const Eigen::VectorXd& forecasts, const Eigen::VectorXd& returns,
                         bool zero_is_long = true);

// position_t = exposure_t in [0,1]; warm-up (undefined) points are fully
// invested.
BacktestResult exposure_strategy(const SignalSeries& signals, const Eigen::VectorXd& returns);

// Short (-1) where exposure is 0, long (+1) otherwise.
BacktestResult long_short_strategy(const SignalSeries& signals, const Eigen::VectorXd& returns);

BacktestResult buy_and_hold(const Eigen::VectorXd& returns);

struct Metrics {
    double sharpe = 0.0;
    bool sharpe_defined = true;  // false when period-return stdev is zero
    double max_drawdown = 0.0;   // on the cumulative log curve, >= 0
    double mse = 0.0;            // optional forecast MSE, NaN when absent
};

Metrics metrics(const BacktestResult& result, double risk_free_per_period = 0.0,
                double periods_per_year = 365.0);

double sharpe_ratio(const Eigen::VectorXd& period_returns, double risk_free_per_period,
                    double periods_per_year);

}  // namespace xts

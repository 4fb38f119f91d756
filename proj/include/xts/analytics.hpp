#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "xts/time_series.hpp"
#include "xts/xai.hpp"

namespace xts {

// Cross-ensemble mean, dispersion and synthetic t-statistics of the LPD.
// sigma is the population standard deviation (divisor = member count);
// t-stat entries where sigma == 0 are NaN and flagged in `tstat_defined`.
struct EnsembleLpdStats {
    Eigen::MatrixXd mean;    // T x (n+1)
    Eigen::MatrixXd sigma;   // T x (n+1)
    Eigen::MatrixXd tstat;   // T x (n+1)
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> tstat_defined;
    std::vector<Date> timestamps;
};

EnsembleLpdStats ensemble_lpd_stats(const std::vector<LpdSeries>& lpds, int j = 0);

// Row 1: corr over time of each column's mean-LPD against the reference
// column. Row 2: per column, mean over members of corr(member, mean).
// Zero-variance columns are NaN.
Eigen::MatrixXd lpd_cross_correlations(const std::vector<LpdSeries>& lpds,
                                       int reference, int j = 0);

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Rolling empirical quantile over the W observations strictly before t
// (no look-ahead): lower order statistic at rank ceil(q * W). The first W
// entries are undefined.
struct MaskedSeries {
    Eigen::VectorXd values;
    std::vector<bool> defined;
};

MaskedSeries rolling_quantile(const Eigen::VectorXd& series, int window, double q);

enum class TriggerKind { Lower, Upper, TwoSided, Aggregate };

// Per-time-point market exposure in [0,1]. Warm-up points are flagged
// undefined and carry exposure 1 (fully invested).
struct SignalSeries {
    std::vector<Date> timestamps;  // may be empty
    Eigen::VectorXd exposure;
    std::vector<bool> defined;
    TriggerKind trigger_kind = TriggerKind::Lower;
};

enum class ExitSide { Below, Above, TwoSided };

// Exposure 0 where the (optionally absolute) series crosses its rolling
// quantile(s) of its own strictly-prior history, 1 otherwise.
SignalSeries exit_signals(const Eigen::VectorXd& series, int window, double q,
                          ExitSide side, bool use_absolute,
                          std::vector<Date> timestamps = {});

// Mean of per-column indicators {column above its own rolling q-quantile}.
SignalSeries aggregate_exposure(const std::vector<Eigen::VectorXd>& columns,
                                int window, double q,
                                std::vector<Date> timestamps = {});

// Regime classification against lower/upper rolling quantiles of |series|.
enum class Regime { Critical, Neutral, Auspicious, Undefined };

std::vector<Regime> classify_regimes(const Eigen::VectorXd& series, int window,
                                     double q_lower, double q_upper,
                                     bool use_absolute);

struct DriftRow {
    long count = 0;
    double proportion_positive = 0.0;  // percent
    double average_return = 0.0;       // percent
    bool defined = false;              // false for an empty regime
};

// Proportion of positive next-day returns and mean next-day return per
// regime; regimes partition the defined time points.
struct DriftReport {
    DriftRow critical, neutral, auspicious, all;
};

DriftReport drift_analysis(const std::vector<Regime>& regimes,
                           const Eigen::VectorXd& next_day_returns);

// Time-averages of the mean-LPD columns: the consensus linear replication.
std::pair<double, Eigen::VectorXd> heuristic_summary(const EnsembleLpdStats& stats);

}  // namespace xts

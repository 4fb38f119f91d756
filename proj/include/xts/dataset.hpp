#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "xts/time_series.hpp"

namespace xts {

// Affine map onto the unit interval: v' = (v - min) / (max - min).
struct ScalingParams {
    double min = 0.0;
    double max = 1.0;

    double scale(double v) const { return (v - min) / (max - min); }
    double unscale(double v) const { return v * (max - min) + min; }
    double range() const { return max - min; }
};

// Scale a vector to [0,1]; fails on a constant vector ("degenerate range").
std::pair<Eigen::VectorXd, ScalingParams> scale_unit(const Eigen::VectorXd& v);

// Lagged design matrix with targets, both mapped to the unit interval.
// Row t of X holds [y_{t-1}, ..., y_{t-n}] of the source series.
struct LaggedDataset {
    Eigen::MatrixXd X;        // T x n, scaled
    Eigen::VectorXd y;        // T, scaled
    int n = 0;                // lag count
    ScalingParams scaling_x;
    ScalingParams scaling_y;
    std::vector<Date> timestamps;  // aligned to targets

    long rows() const { return X.rows(); }
    Eigen::MatrixXd X_unscaled() const;
    Eigen::VectorXd y_unscaled() const;
};

LaggedDataset build_lagged(const TimeSeries& s, int n);

// Order-preserving partition at `boundary` (first out-of-sample target date).
// Scaling params are re-estimated on the in-sample rows only and reused
// out-of-sample; out-of-sample values may fall outside [0,1] and are kept.
std::pair<LaggedDataset, LaggedDataset> split(const LaggedDataset& d, Date boundary);

void write_dataset_csv(const LaggedDataset& d, const std::string& path);
LaggedDataset read_dataset_csv(const std::string& path);

}  // namespace xts

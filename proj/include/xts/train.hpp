#pragma once

#include <cstdint>
#include <vector>

#include "xts/dataset.hpp"
#include "xts/net.hpp"

namespace xts {

// Full-batch steepest descent with constant learning rate.
struct TrainConfig {
    double learning_rate = 0.5;   // on scaled data
    int max_epochs = 5000;
    double tolerance = 1e-8;      // gradient-norm stop threshold
    std::uint64_t seed = 1;

    void validate() const;
};

struct FitReport {
    double final_mse_scaled = 0.0;
    double final_mse_original = 0.0;  // back-transformed units
    int epochs_run = 0;
    bool converged = false;
};

// MSE of the net on a dataset, on both scales.
std::pair<double, double> mse_scaled_original(const FeedforwardNet& net,
                                              const LaggedDataset& d);

// Parameter gradient of the full-batch MSE (ordinary backpropagation w.r.t.
// weights and biases; distinct from the input sensitivities in xai).
Eigen::VectorXd mse_parameter_gradient(const FeedforwardNet& net,
                                       const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& y);

std::pair<FeedforwardNet, FitReport> train(const FeedforwardNet& net,
                                           const LaggedDataset& d,
                                           const TrainConfig& cfg);

struct Ensemble {
    std::vector<FeedforwardNet> nets;
    std::vector<FitReport> reports;
    std::vector<std::uint64_t> seeds;

    std::size_t size() const { return nets.size(); }
};

// Member i uses seed = cfg.seed + i. `jobs` caps worker threads; results are
// identical regardless of parallelism.
Ensemble train_ensemble(const NetArchitecture& arch, const LaggedDataset& d,
                        const TrainConfig& cfg, int members, int jobs = 1);

// Pearson correlations across ensemble members of in- vs out-of-sample
// performances (sign-rule trading for the Sharpe legs).
struct InOutCorrelations {
    double mse_in_mse_out = 0.0;
    double mse_in_sharpe_out = 0.0;
    double sharpe_in_sharpe_out = 0.0;
};

InOutCorrelations in_out_correlations(const Ensemble& e,
                                      const LaggedDataset& in_sample,
                                      const LaggedDataset& out_sample,
                                      double periods_per_year = 365.0);

}  // namespace xts

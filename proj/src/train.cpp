#include "xts/train.hpp"

#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "xts/backtest.hpp"
#include "xts/common.hpp"

namespace xts {

namespace {

struct BatchActivations {
    std::vector<Eigen::MatrixXd> A;  // A[k] is T x n_k, A[0] = X
};

BatchActivations forward_batch(const FeedforwardNet& net, const Eigen::MatrixXd& X) {
    const auto& arch = net.architecture();
    BatchActivations acts;
    acts.A.reserve(arch.layer_dims.size());
    acts.A.push_back(X);
    for (int k = 1; k <= arch.depth(); ++k) {
        Eigen::MatrixXd Z =
            (acts.A.back() * net.weights()[k - 1]).rowwise() + net.biases()[k - 1].transpose();
        if (arch.activation_at(k) == Activation::Sigmoid)
            Z = Z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
        acts.A.push_back(std::move(Z));
    }
    return acts;
}

// Parameter gradients per layer for the full-batch MSE (1/T) sum (y - o)^2.
struct ParamGrads {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;

    double norm() const {
        double s = 0.0;
        for (const auto& g : dW) s += g.squaredNorm();
        for (const auto& g : db) s += g.squaredNorm();
        return std::sqrt(s);
    }
};

ParamGrads backprop(const FeedforwardNet& net, const BatchActivations& acts,
                    const Eigen::VectorXd& y) {
    const auto& arch = net.architecture();
    const int p = arch.depth();
    const double T = static_cast<double>(y.size());

    Eigen::MatrixXd delta = (2.0 / T) * (acts.A.back().col(0) - y);  // T x n_p (single output)
    if (arch.output_dim() > 1)
        throw UsageError("training expects a single output neuron");
    if (arch.activation_at(p) == Activation::Sigmoid)
        delta = delta.cwiseProduct(
            (acts.A.back().array() * (1.0 - acts.A.back().array())).matrix());

    ParamGrads g;
    g.dW.resize(static_cast<std::size_t>(p));
    g.db.resize(static_cast<std::size_t>(p));
    for (int k = p; k >= 1; --k) {
        g.dW[static_cast<std::size_t>(k - 1)] =
            acts.A[static_cast<std::size_t>(k - 1)].transpose() * delta;
        g.db[static_cast<std::size_t>(k - 1)] = delta.colwise().sum().transpose();
        if (k > 1) {
            const auto& A = acts.A[static_cast<std::size_t>(k - 1)];
            delta = (delta * net.weights()[static_cast<std::size_t>(k - 1)].transpose())
                        .cwiseProduct((A.array() * (1.0 - A.array())).matrix());
        }
    }
    return g;
}

double mse_of(const Eigen::MatrixXd& out, const Eigen::VectorXd& y) {
    return (out.col(0) - y).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace

void TrainConfig::validate() const {
    if (learning_rate < 0.0) throw UsageError("learning_rate must be >= 0");
    if (max_epochs < 0) throw UsageError("max_epochs must be >= 0");
    if (tolerance < 0.0) throw UsageError("tolerance must be >= 0");
}

std::pair<double, double> mse_scaled_original(const FeedforwardNet& net,
                                              const LaggedDataset& d) {
    const Eigen::MatrixXd out = predict_series(net, d.X);
    const double scaled = mse_of(out, d.y);
    const double r = d.scaling_y.range();
    return {scaled, scaled * r * r};
}

Eigen::VectorXd mse_parameter_gradient(const FeedforwardNet& net, const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& y) {
    const ParamGrads g = backprop(net, forward_batch(net, X), y);
    Eigen::VectorXd flat(net.parameter_count());
    long at = 0;
    for (std::size_t k = 0; k < g.dW.size(); ++k) {
        Eigen::Map<const Eigen::VectorXd> w(g.dW[k].data(), g.dW[k].size());
        flat.segment(at, w.size()) = w;
        at += w.size();
        flat.segment(at, g.db[k].size()) = g.db[k];
        at += g.db[k].size();
    }
    return flat;
}

std::pair<FeedforwardNet, FitReport> train(const FeedforwardNet& net, const LaggedDataset& d,
                                           const TrainConfig& cfg) {
    cfg.validate();
    if (d.rows() == 0) throw UsageError("train: empty dataset");
    if (d.X.cols() != net.architecture().input_dim())
        throw UsageError("train: dataset/net input dimension mismatch");

    std::vector<Eigen::MatrixXd> W = net.weights();
    std::vector<Eigen::VectorXd> b = net.biases();
    FeedforwardNet current(net.architecture(), W, b);

    FitReport report;
    double last_finite_mse = mse_of(predict_series(current, d.X), d.y);
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const BatchActivations acts = forward_batch(current, d.X);
        const double mse = mse_of(acts.A.back(), d.y);
        if (!std::isfinite(mse))
            throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                               " (last finite MSE " + std::to_string(last_finite_mse) + ")");
        last_finite_mse = mse;
        const ParamGrads g = backprop(current, acts, d.y);
        report.epochs_run = epoch;
        if (g.norm() <= cfg.tolerance) {
            report.converged = true;
            break;
        }
        for (std::size_t k = 0; k < W.size(); ++k) {
            W[k] -= cfg.learning_rate * g.dW[k];
            b[k] -= cfg.learning_rate * g.db[k];
        }
        current = FeedforwardNet(net.architecture(), W, b);
    }
    auto [scaled, original] = mse_scaled_original(current, d);
    if (!std::isfinite(scaled))
        throw NumericError("training diverged (last finite MSE " +
                           std::to_string(last_finite_mse) + ")");
    report.final_mse_scaled = scaled;
    report.final_mse_original = original;
    return {std::move(current), report};
}

Ensemble train_ensemble(const NetArchitecture& arch, const LaggedDataset& d,
                        const TrainConfig& cfg, int members, int jobs) {
    if (members < 1) throw UsageError("ensemble size must be >= 1");
    if (jobs < 1) jobs = 1;

    std::vector<std::optional<std::pair<FeedforwardNet, FitReport>>> results(
        static_cast<std::size_t>(members));
    std::vector<std::string> errors(static_cast<std::size_t>(members));
    std::atomic<int> next{0};

    const auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= members) return;
            const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
            try {
                TrainConfig member_cfg = cfg;
                member_cfg.seed = seed;
                results[static_cast<std::size_t>(i)] =
                    train(init_random(arch, seed), d, member_cfg);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(i)] =
                    "member seed " + std::to_string(seed) + ": " + e.what();
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < std::min(jobs, members); ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    Ensemble e;
    for (int i = 0; i < members; ++i) {
        if (!errors[static_cast<std::size_t>(i)].empty())
            throw NumericError("ensemble training failed: " + errors[static_cast<std::size_t>(i)]);
        auto& [net, report] = *results[static_cast<std::size_t>(i)];
        e.nets.push_back(std::move(net));
        e.reports.push_back(report);
        e.seeds.push_back(cfg.seed + static_cast<std::uint64_t>(i));
    }
    return e;
}

InOutCorrelations in_out_correlations(const Ensemble& e, const LaggedDataset& in_sample,
                                      const LaggedDataset& out_sample,
                                      double periods_per_year) {
    const long M = static_cast<long>(e.size());
    if (M < 3) throw UsageError("insufficient members: need at least 3");

    Eigen::VectorXd mse_in(M), mse_out(M), sharpe_in(M), sharpe_out(M);
    const auto run = [&](const FeedforwardNet& net, const LaggedDataset& d, double& mse_v,
                         double& sharpe_v) {
        const Eigen::MatrixXd out = predict_series(net, d.X);
        const double r = d.scaling_y.range();
        mse_v = (out.col(0) - d.y).squaredNorm() / static_cast<double>(d.rows()) * r * r;
        const Eigen::VectorXd forecasts =
            (out.col(0).array() * r + d.scaling_y.min).matrix();
        const BacktestResult bt = sign_rule(forecasts, d.y_unscaled());
        sharpe_v = sharpe_ratio(bt.period_returns, 0.0, periods_per_year);
    };
    for (long i = 0; i < M; ++i) {
        run(e.nets[static_cast<std::size_t>(i)], in_sample, mse_in[i], sharpe_in[i]);
        run(e.nets[static_cast<std::size_t>(i)], out_sample, mse_out[i], sharpe_out[i]);
    }

    InOutCorrelations c;
    c.mse_in_mse_out = pearson(mse_in, mse_out);
    c.mse_in_sharpe_out = pearson(mse_in, sharpe_out);
    c.sharpe_in_sharpe_out = pearson(sharpe_in, sharpe_out);
    if (!std::isfinite(c.mse_in_mse_out) || !std::isfinite(c.mse_in_sharpe_out) ||
        !std::isfinite(c.sharpe_in_sharpe_out))
        throw NumericError("zero variance across ensemble members");
    return c;
}

}  // namespace xts

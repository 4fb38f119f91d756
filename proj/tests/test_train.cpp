#include <doctest.h>

#include <cstdio>

#include "xts/common.hpp"
#include "xts/train.hpp"
#include "test_support.hpp"

using namespace xts;

namespace {

LaggedDataset sine_dataset(int points = 60, int lags = 2) {
    std::vector<std::pair<std::string, double>> rows;
    for (int i = 0; i < points; ++i) {
        char date[16];
        std::snprintf(date, sizeof(date), "2019-%02d-%02d", 1 + i / 28, 1 + i % 28);
        rows.emplace_back(date, 10.0 + std::sin(0.3 * i) + 0.1 * std::cos(1.7 * i));
    }
    return build_lagged(make_series(rows), lags);
}

}  // namespace

TEST_CASE("mse_scaled_original relates through the squared y-range") {
    const LaggedDataset d = sine_dataset();
    testsup::Rng rng(41);
    const FeedforwardNet net = testsup::random_net(rng, {2, 3, 1});
    auto [scaled, original] = mse_scaled_original(net, d);
    // independent loop accounting
    const Eigen::VectorXd o = predict_series(net, d.X).col(0);
    double acc = 0.0;
    for (long t = 0; t < d.rows(); ++t) acc += (d.y[t] - o[t]) * (d.y[t] - o[t]);
    acc /= static_cast<double>(d.rows());
    CHECK(scaled == doctest::Approx(acc).epsilon(1e-14));
    const double range = d.scaling_y.range();
    CHECK(original == doctest::Approx(scaled * range * range).epsilon(1e-14));
}

TEST_CASE("parameter gradient matches central finite differences") {
    const LaggedDataset d = sine_dataset(40);
    testsup::Rng rng(42);
    const FeedforwardNet net = testsup::random_net(rng, {2, 4, 1});
    const Eigen::VectorXd g = mse_parameter_gradient(net, d.X, d.y);
    REQUIRE(g.size() == net.parameter_count());

    const Eigen::VectorXd theta = net.parameters();
    const auto mse_at = [&](const Eigen::VectorXd& p) {
        FeedforwardNet perturbed = net;
        perturbed.set_parameters(p);
        return mse_scaled_original(perturbed, d).first;
    };
    const Eigen::VectorXd fd = testsup::fd_gradient(mse_at, theta, 1e-6);
    CHECK((g - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("parameter gradient vanishes on an exact fit") {
    const LaggedDataset d = sine_dataset(30);
    testsup::Rng rng(43);
    const FeedforwardNet net = testsup::random_net(rng, {2, 3, 1});
    const Eigen::VectorXd o = predict_series(net, d.X).col(0);
    CHECK(mse_parameter_gradient(net, d.X, o).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("zero-epoch training is the identity") {
    const LaggedDataset d = sine_dataset(30);
    TrainConfig cfg;
    cfg.max_epochs = 0;
    const FeedforwardNet net = init_random({{2, 3, 1}}, 7);
    auto [fitted, report] = train(net, d, cfg);
    CHECK(fitted.parameters() == net.parameters());
    CHECK(report.epochs_run == 0);
}

TEST_CASE("training decreases the MSE monotonically in short runs") {
    const LaggedDataset d = sine_dataset();
    const FeedforwardNet net = init_random({{2, 4, 1}}, 11);
    double prev = mse_scaled_original(net, d).first;
    TrainConfig cfg;
    cfg.learning_rate = 0.2;
    for (int epochs : {1, 2, 5, 10, 50, 200}) {
        cfg.max_epochs = epochs;
        auto [fitted, report] = train(net, d, cfg);
        const double now = report.final_mse_scaled;
        CHECK(now <= prev + 1e-15);
        CHECK(now == doctest::Approx(mse_scaled_original(fitted, d).first).epsilon(1e-14));
        prev = now;
    }
}

TEST_CASE("one gradient step matches the hand-applied update") {
    const LaggedDataset d = sine_dataset(25);
    const FeedforwardNet net = init_random({{2, 3, 1}}, 13);
    TrainConfig cfg;
    cfg.max_epochs = 1;
    cfg.learning_rate = 0.3;
    auto [fitted, report] = train(net, d, cfg);
    const Eigen::VectorXd want =
        net.parameters() - 0.3 * mse_parameter_gradient(net, d.X, d.y);
    CHECK((fitted.parameters() - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("training rejects bad configs and multi-output nets") {
    const LaggedDataset d = sine_dataset(25);
    TrainConfig bad;
    bad.learning_rate = -1.0;
    CHECK_THROWS_AS(train(init_random({{2, 3, 1}}, 1), d, bad), UsageError);
    CHECK_THROWS_AS(mse_parameter_gradient(init_random({{2, 3, 2}}, 1), d.X, d.y),
                    UsageError);
}

TEST_CASE("divergent training raises a numeric error") {
    const LaggedDataset d = sine_dataset(25);
    TrainConfig cfg;
    cfg.learning_rate = 1e12;
    cfg.max_epochs = 200;
    // an unbounded (identity) output lets the oscillation blow up
    CHECK_THROWS_AS(train(init_random({{2, 6, 1}, Activation::Identity}, 3), d, cfg),
                    NumericError);
}

TEST_CASE("different seeds land on different parameters with similar fit") {
    const LaggedDataset d = sine_dataset();
    TrainConfig cfg;
    cfg.max_epochs = 1500;
    auto [a, ra] = train(init_random({{2, 3, 1}}, 100), d, cfg);
    auto [b, rb] = train(init_random({{2, 3, 1}}, 200), d, cfg);
    CHECK((a.parameters() - b.parameters()).norm() > 1e-3);
    CHECK(ra.final_mse_scaled < 0.05);
    CHECK(rb.final_mse_scaled < 0.05);
}

TEST_CASE("ensembles are deterministic and thread-count independent") {
    const LaggedDataset d = sine_dataset(40);
    NetArchitecture arch;
    arch.layer_dims = {2, 3, 1};
    TrainConfig cfg;
    cfg.max_epochs = 300;
    cfg.seed = 10;
    const Ensemble serial = train_ensemble(arch, d, cfg, 6, 1);
    const Ensemble threaded = train_ensemble(arch, d, cfg, 6, 4);
    REQUIRE(serial.size() == 6);
    REQUIRE(threaded.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(serial.seeds[i] == 10 + i);
        CHECK(serial.nets[i].parameters() == threaded.nets[i].parameters());
        CHECK(serial.reports[i].final_mse_scaled == threaded.reports[i].final_mse_scaled);
    }

    // member i equals a lone run with the member seed
    auto [lone, lone_report] = train(init_random(arch, 12), d, cfg);
    CHECK(serial.nets[2].parameters() == lone.parameters());

    const Ensemble single = train_ensemble(arch, d, cfg, 1, 8);
    CHECK(single.size() == 1);
    CHECK(single.nets[0].parameters() ==
          train(init_random(arch, 10), d, cfg).first.parameters());

    CHECK_THROWS_AS(train_ensemble(arch, d, cfg, 0, 1), UsageError);
}

TEST_CASE("in/out correlations hit +-1 on synthetic rankings") {
    // zero-mean target so the sign rule produces varying positions
    std::vector<std::pair<std::string, double>> rows;
    for (int i = 0; i < 50; ++i) {
        char date[16];
        std::snprintf(date, sizeof(date), "2019-%02d-%02d", 1 + i / 28, 1 + i % 28);
        rows.emplace_back(date, std::sin(0.25 * i) + 0.3 * std::sin(1.3 * i));
    }
    const LaggedDataset d = build_lagged(make_series(rows), 2);
    auto [in, out] = split(d, d.timestamps[30]);
    NetArchitecture arch;
    arch.layer_dims = {2, 3, 1};
    TrainConfig cfg;
    // partial fits: member forecasts cross zero at different points, so the
    // sign-rule positions (and hence the sharpe legs) vary across members
    cfg.max_epochs = 200;
    const Ensemble e = train_ensemble(arch, in, cfg, 5, 2);
    const InOutCorrelations c = in_out_correlations(e, in, out);
    CHECK(std::abs(c.mse_in_mse_out) <= 1.0 + 1e-12);
    CHECK(std::abs(c.mse_in_sharpe_out) <= 1.0 + 1e-12);
    CHECK(std::abs(c.sharpe_in_sharpe_out) <= 1.0 + 1e-12);

    // perfect self-correlation when out-of-sample equals in-sample
    const InOutCorrelations self = in_out_correlations(e, in, in);
    CHECK(self.mse_in_mse_out == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self.sharpe_in_sharpe_out == doctest::Approx(1.0).epsilon(1e-12));

    Ensemble tiny;
    tiny.nets = {e.nets[0], e.nets[1]};
    tiny.reports = {e.reports[0], e.reports[1]};
    tiny.seeds = {e.seeds[0], e.seeds[1]};
    CHECK_THROWS_WITH_AS(in_out_correlations(tiny, in, out),
                         doctest::Contains("insufficient members"), UsageError);
}

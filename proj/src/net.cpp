#include "xts/net.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "xts/common.hpp"

namespace xts {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// splitmix64; deterministic parameter stream independent of libstdc++.
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

}  // namespace

void NetArchitecture::validate() const {
    if (layer_dims.size() < 2) throw UsageError("architecture needs input and output layers");
    for (int d : layer_dims)
        if (d < 1) throw UsageError("layer dimensions must be >= 1");
}

FeedforwardNet::FeedforwardNet(NetArchitecture arch,
                               std::vector<Eigen::MatrixXd> weights,
                               std::vector<Eigen::VectorXd> biases)
    : arch_(std::move(arch)), weights_(std::move(weights)), biases_(std::move(biases)) {
    arch_.validate();
    const int p = arch_.depth();
    if (static_cast<int>(weights_.size()) != p || static_cast<int>(biases_.size()) != p)
        throw UsageError("weight/bias layer count does not match the architecture");
    for (int k = 0; k < p; ++k) {
        if (weights_[k].rows() != arch_.layer_dims[k] ||
            weights_[k].cols() != arch_.layer_dims[k + 1] ||
            biases_[k].size() != arch_.layer_dims[k + 1])
            throw UsageError("parameter shapes do not match the architecture at layer " +
                             std::to_string(k + 1));
        if (!weights_[k].allFinite() || !biases_[k].allFinite())
            throw NumericError("non-finite parameter at layer " + std::to_string(k + 1));
    }
}

Eigen::VectorXd FeedforwardNet::parameters() const {
    Eigen::VectorXd out(parameter_count());
    long at = 0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        Eigen::Map<const Eigen::VectorXd> w(weights_[k].data(), weights_[k].size());
        out.segment(at, w.size()) = w;
        at += w.size();
        out.segment(at, biases_[k].size()) = biases_[k];
        at += biases_[k].size();
    }
    return out;
}

void FeedforwardNet::set_parameters(const Eigen::VectorXd& flat) {
    if (flat.size() != parameter_count())
        throw UsageError("parameter vector has length " + std::to_string(flat.size()) +
                         ", expected " + std::to_string(parameter_count()));
    if (!flat.allFinite()) throw NumericError("non-finite parameter update");
    long at = 0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        Eigen::Map<Eigen::VectorXd>(weights_[k].data(), weights_[k].size()) =
            flat.segment(at, weights_[k].size());
        at += weights_[k].size();
        biases_[k] = flat.segment(at, biases_[k].size());
        at += biases_[k].size();
    }
}

long FeedforwardNet::parameter_count() const {
    long c = 0;
    for (std::size_t k = 0; k < weights_.size(); ++k)
        c += weights_[k].size() + biases_[k].size();
    return c;
}

FeedforwardNet init_random(const NetArchitecture& arch, std::uint64_t seed) {
    arch.validate();
    SplitMix64 rng{seed};
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;
    for (int k = 1; k <= arch.depth(); ++k) {
        Eigen::MatrixXd w(arch.layer_dims[k - 1], arch.layer_dims[k]);
        for (long c = 0; c < w.cols(); ++c)
            for (long r = 0; r < w.rows(); ++r)
                w(r, c) = uniform_from_bits(rng.next(), -0.7, 0.7);
        Eigen::VectorXd bv(arch.layer_dims[k]);
        for (long i = 0; i < bv.size(); ++i) bv[i] = uniform_from_bits(rng.next(), -0.7, 0.7);
        W.push_back(std::move(w));
        b.push_back(std::move(bv));
    }
    return FeedforwardNet(arch, std::move(W), std::move(b));
}

LayerActivations forward(const FeedforwardNet& net, const Eigen::VectorXd& x) {
    const auto& arch = net.architecture();
    if (x.size() != arch.input_dim())
        throw UsageError("input dimension " + std::to_string(x.size()) +
                         " does not match n_0 = " + std::to_string(arch.input_dim()));
    LayerActivations acts;
    acts.A.reserve(arch.layer_dims.size());
    acts.A.push_back(x);
    for (int k = 1; k <= arch.depth(); ++k) {
        Eigen::VectorXd z = net.weights()[k - 1].transpose() * acts.A.back() + net.biases()[k - 1];
        if (arch.activation_at(k) == Activation::Sigmoid)
            z = z.unaryExpr([](double v) { return sigmoid(v); });
        acts.A.push_back(std::move(z));
    }
    return acts;
}

Eigen::MatrixXd predict_series(const FeedforwardNet& net, const Eigen::MatrixXd& X) {
    const auto& arch = net.architecture();
    if (X.cols() != arch.input_dim())
        throw UsageError("design matrix has " + std::to_string(X.cols()) +
                         " columns, expected " + std::to_string(arch.input_dim()));
    Eigen::MatrixXd A = X;
    for (int k = 1; k <= arch.depth(); ++k) {
        Eigen::MatrixXd Z = (A * net.weights()[k - 1]).rowwise() + net.biases()[k - 1].transpose();
        if (arch.activation_at(k) == Activation::Sigmoid)
            Z = Z.unaryExpr([](double v) { return sigmoid(v); });
        A = std::move(Z);
    }
    return A;
}

std::string net_to_json(const FeedforwardNet& net, const NetJsonMeta& meta) {
    nlohmann::json j;
    j["layer_dims"] = net.architecture().layer_dims;
    j["output_activation"] =
        net.architecture().output_activation == Activation::Sigmoid ? "sigmoid" : "identity";
    j["seed"] = meta.seed;
    j["scaling_x"] = {{"min", meta.scaling_x.min}, {"max", meta.scaling_x.max}};
    j["scaling_y"] = {{"min", meta.scaling_y.min}, {"max", meta.scaling_y.max}};
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases = nlohmann::json::array();
    for (int k = 0; k < net.depth(); ++k) {
        const auto& W = net.weights()[k];
        nlohmann::json rows = nlohmann::json::array();
        for (long r = 0; r < W.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (long c = 0; c < W.cols(); ++c) row.push_back(W(r, c));
            rows.push_back(std::move(row));
        }
        weights.push_back(std::move(rows));
        const auto& b = net.biases()[k];
        biases.push_back(std::vector<double>(b.data(), b.data() + b.size()));
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    return j.dump(2);
}

std::pair<FeedforwardNet, NetJsonMeta> net_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    NetArchitecture arch;
    arch.layer_dims = j.at("layer_dims").get<std::vector<int>>();
    arch.output_activation =
        j.at("output_activation").get<std::string>() == "identity" ? Activation::Identity
                                                                   : Activation::Sigmoid;
    NetJsonMeta meta;
    meta.seed = j.value("seed", 0ULL);
    if (j.contains("scaling_x")) {
        meta.scaling_x = {j["scaling_x"]["min"].get<double>(), j["scaling_x"]["max"].get<double>()};
        meta.scaling_y = {j["scaling_y"]["min"].get<double>(), j["scaling_y"]["max"].get<double>()};
    }
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;
    for (const auto& rows : j.at("weights")) {
        Eigen::MatrixXd w(rows.size(), rows[0].size());
        for (long r = 0; r < w.rows(); ++r)
            for (long c = 0; c < w.cols(); ++c) w(r, c) = rows[r][c].get<double>();
        W.push_back(std::move(w));
    }
    for (const auto& vec : j.at("biases")) {
        Eigen::VectorXd bv(vec.size());
        for (long i = 0; i < bv.size(); ++i) bv[i] = vec[i].get<double>();
        b.push_back(std::move(bv));
    }
    return {FeedforwardNet(std::move(arch), std::move(W), std::move(b)), meta};
}

}  // namespace xts

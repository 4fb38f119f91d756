#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "xts/dataset.hpp"

namespace xts {

enum class Activation { Sigmoid, Identity };

// Fully-connected feedforward architecture: layer_dims = [n_0, n_1, ..., n_p].
// Hidden layers are sigmoid; the output layer defaults to sigmoid and may be
// switched to identity.
struct NetArchitecture {
    std::vector<int> layer_dims;
    Activation output_activation = Activation::Sigmoid;

    int depth() const { return static_cast<int>(layer_dims.size()) - 1; }  // p
    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    void validate() const;
    Activation activation_at(int k) const {
        return k == depth() ? output_activation : Activation::Sigmoid;
    }
};

// Per-layer outputs of a forward pass; A[0] is the input itself.
struct LayerActivations {
    std::vector<Eigen::VectorXd> A;  // A[k], k = 0..p
    const Eigen::VectorXd& output() const { return A.back(); }
};

class FeedforwardNet {
public:
    FeedforwardNet(NetArchitecture arch,
                   std::vector<Eigen::MatrixXd> weights,
                   std::vector<Eigen::VectorXd> biases);

    const NetArchitecture& architecture() const { return arch_; }
    // W[k-1] has dims (n_{k-1}, n_k), linking layer k-1 to layer k.
    const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
    int depth() const { return arch_.depth(); }

    // Flattened parameter vector (weights then biases, layer by layer).
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& flat);
    long parameter_count() const;

private:
    NetArchitecture arch_;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
};

// Deterministic i.i.d. uniform [-0.7, 0.7] initialization.
FeedforwardNet init_random(const NetArchitecture& arch, std::uint64_t seed);

// A^(k) = act(W^k' A^(k-1) + b^k), k = 1..p.
LayerActivations forward(const FeedforwardNet& net, const Eigen::VectorXd& x);

// Row-wise forward over a T x n design matrix (first/single output neuron
// per column of the result: T x n_p).
Eigen::MatrixXd predict_series(const FeedforwardNet& net, const Eigen::MatrixXd& X);

// Lossless JSON round-trip (architecture, row-major weights, biases, plus
// optional training metadata: seed and data scaling).
struct NetJsonMeta {
    std::uint64_t seed = 0;
    ScalingParams scaling_x;
    ScalingParams scaling_y;
};
std::string net_to_json(const FeedforwardNet& net, const NetJsonMeta& meta = {});
std::pair<FeedforwardNet, NetJsonMeta> net_from_json(const std::string& json_text);

}  // namespace xts

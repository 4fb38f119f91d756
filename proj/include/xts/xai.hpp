#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "xts/net.hpp"

namespace xts {

// Differentiable function of the net output whose input sensitivities form
// the explanation. `value` maps the n_p-dim output vector to a real.
struct XFunction {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;  // optional
};

// Built-in catalog.
XFunction xf_identity();        // single output: xf(o) = o_0
XFunction xf_squared_output();  // xf(o) = o_0^2
// Sharpe over the output vector treated as a window of period returns:
// xf(o) = (mean(o) - rf) / stdev(o); needs n_p >= 2.
XFunction xf_window_sharpe(double risk_free = 0.0);

// Per-layer input-Jacobians, forward direction: dA_f[k-1] is the (n, n_k)
// matrix of d A^(k)_j / d x_i, k = 1..p.
struct LayerJacobians {
    std::vector<Eigen::MatrixXd> dA_f;
    const Eigen::MatrixXd& output_jacobian() const { return dA_f.back(); }
};

// Forward-sequence Jacobian of the net output w.r.t. the input (n x n_p),
// together with all intermediate layer Jacobians.
std::pair<Eigen::MatrixXd, LayerJacobians> lpd_forward(const FeedforwardNet& net,
                                                       const Eigen::VectorXd& x);

// Backward-sequence Jacobian (n x n_p); agrees with lpd_forward to round-off.
Eigen::MatrixXd lpd_backward(const FeedforwardNet& net, const Eigen::VectorXd& x);

// b_jt = o_jt - sum_i w_ijt x_it, completing the exact linear replication.
double synthetic_intercept(double o_jt, const Eigen::VectorXd& lpd_row,
                           const Eigen::VectorXd& x);

// T x (n+1) flow per output neuron: column 0 synthetic intercept, columns
// 1..n the input sensitivities at each time point.
struct LpdSeries {
    std::vector<Eigen::MatrixXd> per_output;  // one T x (n+1) matrix per output neuron
    std::vector<Date> timestamps;             // may be empty when unknown

    const Eigen::MatrixXd& matrix(int j = 0) const { return per_output.at(j); }
};

LpdSeries lpd_series(const FeedforwardNet& net, const Eigen::MatrixXd& X,
                     std::vector<Date> timestamps = {});

// First-order sensitivities of xf(o(x)): n x 1 vector.
Eigen::VectorXd xf_first_order(const FeedforwardNet& net, const Eigen::VectorXd& x,
                               const XFunction& xf);

// Second-order input sensitivities of output neuron j: the n x n QPD matrix.
// Symmetrized by averaging; asymmetry beyond 1e-8 raises NumericError.
Eigen::MatrixXd qpd(const FeedforwardNet& net, const Eigen::VectorXd& x, int j = 0);

// Gradient of the synthetic intercept w.r.t. the input: -QPD_jt x_t.
Eigen::VectorXd intercept_gradient(const Eigen::MatrixXd& qpd_jt, const Eigen::VectorXd& x);

// Second-order sensitivities of xf(o_j(x)) for a scalar X-function of a
// single output neuron; xf.hessian must be set.
Eigen::MatrixXd xf_second_order(const FeedforwardNet& net, const Eigen::VectorXd& x,
                                int j, const XFunction& xf);

struct QpdSeries {
    Eigen::MatrixXd diagonal;                 // T x n
    std::vector<Eigen::MatrixXd> full;        // optional, T matrices of n x n
    std::vector<Date> timestamps;
};

QpdSeries qpd_series(const FeedforwardNet& net, const Eigen::MatrixXd& X,
                     bool keep_full = false, int j = 0,
                     std::vector<Date> timestamps = {});

// d MSE / d x_it = (2/T)(o_t - y_t) * dA^(p)/dx_i, per design-matrix entry.
struct IpdSeries {
    Eigen::MatrixXd dmse;  // T x n
    std::vector<Date> timestamps;
};

IpdSeries ipd_series(const FeedforwardNet& net, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y, std::vector<Date> timestamps = {});

// One-sided difference quotient (f(x_t + delta e_i) - f(x_t)) / delta for
// X-functions that are not differentiable; delta-dependent by nature.
double discrete_proxy(const std::function<double(const Eigen::VectorXd&)>& evaluator,
                      const Eigen::MatrixXd& X, int i, int t, double delta);

// Sensitivities of the layer-k neurons to the inputs: dA^f(k), (n, n_k).
// k in [1, p]; k = p is the full output Jacobian before the intercept.
Eigen::MatrixXd layer_intercept(const FeedforwardNet& net, const Eigen::VectorXd& x, int k);

}  // namespace xts

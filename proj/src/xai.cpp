#include "xts/xai.hpp"

#include <cmath>

#include "xts/common.hpp"

namespace xts {

namespace {

// First and second sigmoid derivatives from the stored activation value:
// sigma' = a(1-a), sigma'' = a(1-a)(1-2a). Identity layers: 1 and 0.
Eigen::ArrayXd act_d1(const Eigen::VectorXd& a, Activation act) {
    if (act == Activation::Identity) return Eigen::ArrayXd::Ones(a.size());
    return a.array() * (1.0 - a.array());
}

Eigen::ArrayXd act_d2(const Eigen::VectorXd& a, Activation act) {
    if (act == Activation::Identity) return Eigen::ArrayXd::Zero(a.size());
    return a.array() * (1.0 - a.array()) * (1.0 - 2.0 * a.array());
}

struct QpdSeed {
    double g = 1.0;          // outer derivative at the output neuron
    Eigen::VectorXd dg;      // its input gradient, dim n
};

// Backward second-order recursion shared by qpd() and xf_second_order().
// The seed carries the derivative of the outer function at output neuron j
// together with its input gradient; the plain QPD uses g = sigma'(z_p),
// dg = sigma''(z_p) * dA^f(p-1) W_j.
Eigen::MatrixXd qpd_from_seed(const FeedforwardNet& net, const LayerActivations& acts,
                              const LayerJacobians& jac, int j, const QpdSeed& seed) {
    const auto& arch = net.architecture();
    const int p = arch.depth();
    const long n = arch.input_dim();

    // dA^f(k-1) with dA^f(0) = Id.
    const auto dAf = [&](int k) -> Eigen::MatrixXd {
        if (k == 0) return Eigen::MatrixXd::Identity(n, n);
        return jac.dA_f[static_cast<std::size_t>(k - 1)];
    };
    // Weights into layer k+1, restricted to output neuron j at the top.
    const auto W_up = [&](int k) -> Eigen::MatrixXd {
        if (k + 1 == p) return net.weights()[static_cast<std::size_t>(p - 1)].col(j);
        return net.weights()[static_cast<std::size_t>(k)];
    };

    // Backward first-order chain with the seeded outer derivative:
    // db[p] = g, db[k] = s_k .* (W^(k+1) db[k+1]).
    std::vector<Eigen::VectorXd> db(static_cast<std::size_t>(p) + 1);
    db[static_cast<std::size_t>(p)] = Eigen::VectorXd::Constant(1, seed.g);
    for (int k = p - 1; k >= 1; --k) {
        const Eigen::ArrayXd s = act_d1(acts.A[static_cast<std::size_t>(k)], Activation::Sigmoid);
        db[static_cast<std::size_t>(k)] =
            (s * (W_up(k) * db[static_cast<std::size_t>(k + 1)]).array()).matrix();
    }

    // ddA[k]: input gradient of db[k], an (n, n_k) matrix; ddA[p] is (n, 1).
    Eigen::MatrixXd dd = seed.dg;  // n x 1
    for (int k = p - 1; k >= 1; --k) {
        const Eigen::VectorXd& a = acts.A[static_cast<std::size_t>(k)];
        const Eigen::ArrayXd s = act_d1(a, Activation::Sigmoid);
        const Eigen::ArrayXd u = act_d2(a, Activation::Sigmoid);
        const Eigen::MatrixXd V = W_up(k);  // (n_k, n_{k+1})

        // Product-rule split of db[k] = s_k .* (V db[k+1]):
        // term1 propagates ddA[k+1], term2 differentiates the s_k factor.
        Eigen::MatrixXd term1 = dd * V.transpose();  // (n, n_k) after scaling below
        term1 = term1 * s.matrix().asDiagonal();
        const Eigen::VectorXd v = (u * (V * db[static_cast<std::size_t>(k + 1)]).array()).matrix();
        Eigen::MatrixXd term2 =
            dAf(k - 1) * net.weights()[static_cast<std::size_t>(k - 1)] * v.asDiagonal();
        dd = term1 + term2;  // (n, n_k)
    }

    // Input layer: no activation, ddA[0] = W^(1) ddA[1]' (p = 1 collapses the
    // loop and uses the j-th column directly).
    const Eigen::MatrixXd W1 = (p == 1) ? Eigen::MatrixXd(net.weights()[0].col(j))
                                        : net.weights()[0];
    Eigen::MatrixXd Q = W1 * dd.transpose();  // (n, n)

    const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    if (asym > 1e-8 * scale)
        throw NumericError("recursion inconsistency: QPD asymmetry " + std::to_string(asym));
    return 0.5 * (Q + Q.transpose());
}

QpdSeed plain_seed(const FeedforwardNet& net, const LayerActivations& acts,
                   const LayerJacobians& jac, int j) {
    const auto& arch = net.architecture();
    const int p = arch.depth();
    const long n = arch.input_dim();
    QpdSeed seed;
    if (arch.output_activation == Activation::Identity) {
        seed.g = 1.0;
        seed.dg = Eigen::VectorXd::Zero(n);
        return seed;
    }
    const double a = acts.A[static_cast<std::size_t>(p)][j];
    seed.g = a * (1.0 - a);
    const double u = seed.g * (1.0 - 2.0 * a);
    const Eigen::MatrixXd dAf_prev =
        (p == 1) ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n))
                 : jac.dA_f[static_cast<std::size_t>(p - 2)];
    seed.dg = u * (dAf_prev * net.weights()[static_cast<std::size_t>(p - 1)].col(j));
    return seed;
}

}  // namespace

XFunction xf_identity() {
    XFunction xf;
    xf.value = [](const Eigen::VectorXd& o) { return o[0]; };
    xf.gradient = [](const Eigen::VectorXd& o) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(o.size());
        g[0] = 1.0;
        return g;
    };
    xf.hessian = [](const Eigen::VectorXd& o) {
        return Eigen::MatrixXd::Zero(o.size(), o.size()).eval();
    };
    return xf;
}

XFunction xf_squared_output() {
    XFunction xf;
    xf.value = [](const Eigen::VectorXd& o) { return o[0] * o[0]; };
    xf.gradient = [](const Eigen::VectorXd& o) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(o.size());
        g[0] = 2.0 * o[0];
        return g;
    };
    xf.hessian = [](const Eigen::VectorXd& o) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(o.size(), o.size());
        h(0, 0) = 2.0;
        return h;
    };
    return xf;
}

XFunction xf_window_sharpe(double risk_free) {
    XFunction xf;
    const auto stats = [](const Eigen::VectorXd& o) {
        const double m = o.mean();
        const double var = (o.array() - m).square().sum() / static_cast<double>(o.size());
        return std::make_pair(m, std::sqrt(var));
    };
    xf.value = [stats, risk_free](const Eigen::VectorXd& o) {
        auto [m, s] = stats(o);
        return (m - risk_free) / s;
    };
    xf.gradient = [stats, risk_free](const Eigen::VectorXd& o) {
        const auto [m, s] = stats(o);
        const double w = static_cast<double>(o.size());
        // d sharpe / d o_i = 1/(w s) - (m - rf)(o_i - m)/(w s^3)
        Eigen::VectorXd g =
            (Eigen::ArrayXd::Constant(o.size(), 1.0 / (w * s)) -
             (m - risk_free) * (o.array() - m) / (w * s * s * s))
                .matrix();
        return g;
    };
    // Hessian left unset: the windowed Sharpe is used through the first-order
    // extension (and discrete_proxy), matching the single-neuron scope of the
    // second-order recursion.
    return xf;
}

std::pair<Eigen::MatrixXd, LayerJacobians> lpd_forward(const FeedforwardNet& net,
                                                       const Eigen::VectorXd& x) {
    const auto& arch = net.architecture();
    const LayerActivations acts = forward(net, x);
    LayerJacobians jac;
    jac.dA_f.reserve(static_cast<std::size_t>(arch.depth()));
    // dA^f(k) = dA^f(k-1) W^k diag(s_k), dA^f(0) = Id.
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(arch.input_dim(), arch.input_dim());
    for (int k = 1; k <= arch.depth(); ++k) {
        const Eigen::ArrayXd s = act_d1(acts.A[static_cast<std::size_t>(k)], arch.activation_at(k));
        d = d * net.weights()[static_cast<std::size_t>(k - 1)] * s.matrix().asDiagonal();
        jac.dA_f.push_back(d);
    }
    return {jac.dA_f.back(), std::move(jac)};
}

Eigen::MatrixXd lpd_backward(const FeedforwardNet& net, const Eigen::VectorXd& x) {
    const auto& arch = net.architecture();
    const LayerActivations acts = forward(net, x);
    const int p = arch.depth();
    // dA^b(p) = diag(s_p); dA^b(k) = diag(s_k) W^(k+1) dA^b(k+1); dA^b(0) = W^(1) dA^b(1).
    Eigen::MatrixXd d =
        Eigen::MatrixXd(act_d1(acts.A[static_cast<std::size_t>(p)], arch.activation_at(p))
                            .matrix()
                            .asDiagonal());
    for (int k = p - 1; k >= 1; --k) {
        const Eigen::ArrayXd s = act_d1(acts.A[static_cast<std::size_t>(k)], Activation::Sigmoid);
        d = s.matrix().asDiagonal() * net.weights()[static_cast<std::size_t>(k)] * d;
    }
    return net.weights()[0] * d;
}

double synthetic_intercept(double o_jt, const Eigen::VectorXd& lpd_row,
                           const Eigen::VectorXd& x) {
    if (lpd_row.size() != x.size()) throw UsageError("synthetic_intercept: length mismatch");
    return o_jt - lpd_row.dot(x);
}

LpdSeries lpd_series(const FeedforwardNet& net, const Eigen::MatrixXd& X,
                     std::vector<Date> timestamps) {
    const auto& arch = net.architecture();
    if (X.cols() != arch.input_dim())
        throw UsageError("lpd_series: design matrix column count mismatch");
    const long T = X.rows();
    const int np = arch.output_dim();
    LpdSeries out;
    out.timestamps = std::move(timestamps);
    out.per_output.assign(static_cast<std::size_t>(np),
                          Eigen::MatrixXd(T, X.cols() + 1));
    for (long t = 0; t < T; ++t) {
        const Eigen::VectorXd x = X.row(t).transpose();
        const LayerActivations acts = forward(net, x);
        const Eigen::MatrixXd jac = lpd_backward(net, x);  // n x n_p
        for (int j = 0; j < np; ++j) {
            out.per_output[static_cast<std::size_t>(j)](t, 0) =
                synthetic_intercept(acts.output()[j], jac.col(j), x);
            out.per_output[static_cast<std::size_t>(j)].row(t).tail(X.cols()) =
                jac.col(j).transpose();
        }
    }
    return out;
}

Eigen::VectorXd xf_first_order(const FeedforwardNet& net, const Eigen::VectorXd& x,
                               const XFunction& xf) {
    if (!xf.gradient) throw UsageError("xf_first_order: X-function gradient missing");
    auto [jac, layers] = lpd_forward(net, x);
    const Eigen::VectorXd o = forward(net, x).output();
    return jac * xf.gradient(o);
}

Eigen::MatrixXd qpd(const FeedforwardNet& net, const Eigen::VectorXd& x, int j) {
    const auto& arch = net.architecture();
    if (j < 0 || j >= arch.output_dim()) throw UsageError("qpd: output index out of range");
    const LayerActivations acts = forward(net, x);
    auto [jac_out, jac] = lpd_forward(net, x);
    return qpd_from_seed(net, acts, jac, j, plain_seed(net, acts, jac, j));
}

Eigen::VectorXd intercept_gradient(const Eigen::MatrixXd& qpd_jt, const Eigen::VectorXd& x) {
    if (qpd_jt.cols() != x.size()) throw UsageError("intercept_gradient: shape mismatch");
    return -(qpd_jt * x);
}

Eigen::MatrixXd xf_second_order(const FeedforwardNet& net, const Eigen::VectorXd& x,
                                int j, const XFunction& xf) {
    if (!xf.hessian) throw UsageError("xf_second_order: X-function hessian missing");
    const auto& arch = net.architecture();
    if (j < 0 || j >= arch.output_dim()) throw UsageError("xf_second_order: output index out of range");
    const LayerActivations acts = forward(net, x);
    auto [jac_out, jac] = lpd_forward(net, x);
    const Eigen::VectorXd o = acts.output();
    const double g1 = xf.gradient(o)[j];
    const double g2 = xf.hessian(o)(j, j);

    // Composite seed: outer derivative xf'(o_j) sigma'(z_p) and its input
    // gradient xf'(o_j) dd^(p) + xf''(o_j) sigma'(z_p) * do_j/dx.
    const QpdSeed base = plain_seed(net, acts, jac, j);
    QpdSeed seed;
    seed.g = g1 * base.g;
    seed.dg = g1 * base.dg + g2 * base.g * jac_out.col(j);
    return qpd_from_seed(net, acts, jac, j, seed);
}

QpdSeries qpd_series(const FeedforwardNet& net, const Eigen::MatrixXd& X,
                     bool keep_full, int j, std::vector<Date> timestamps) {
    const long T = X.rows();
    QpdSeries out;
    out.timestamps = std::move(timestamps);
    out.diagonal.resize(T, X.cols());
    if (keep_full) out.full.reserve(static_cast<std::size_t>(T));
    for (long t = 0; t < T; ++t) {
        Eigen::MatrixXd Q = qpd(net, X.row(t).transpose(), j);
        out.diagonal.row(t) = Q.diagonal().transpose();
        if (keep_full) out.full.push_back(std::move(Q));
    }
    return out;
}

IpdSeries ipd_series(const FeedforwardNet& net, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y, std::vector<Date> timestamps) {
    if (X.rows() != y.size()) throw UsageError("ipd_series: X/y length mismatch");
    const long T = X.rows();
    IpdSeries out;
    out.timestamps = std::move(timestamps);
    out.dmse.resize(T, X.cols());
    for (long t = 0; t < T; ++t) {
        const Eigen::VectorXd x = X.row(t).transpose();
        const double o = forward(net, x).output()[0];
        const Eigen::VectorXd grad = lpd_backward(net, x).col(0);
        out.dmse.row(t) = (2.0 / static_cast<double>(T)) * (o - y[t]) * grad.transpose();
    }
    return out;
}

double discrete_proxy(const std::function<double(const Eigen::VectorXd&)>& evaluator,
                      const Eigen::MatrixXd& X, int i, int t, double delta) {
    if (delta <= 0.0) throw UsageError("discrete_proxy: delta must be positive");
    if (t < 0 || t >= X.rows() || i < 0 || i >= X.cols())
        throw UsageError("discrete_proxy: index out of range");
    Eigen::VectorXd x = X.row(t).transpose();
    const double base = evaluator(x);
    x[i] += delta;
    return (evaluator(x) - base) / delta;
}

Eigen::MatrixXd layer_intercept(const FeedforwardNet& net, const Eigen::VectorXd& x, int k) {
    const int p = net.architecture().depth();
    if (k < 1 || k > p) throw UsageError("layer_intercept: layer index out of range");
    auto [jac_out, jac] = lpd_forward(net, x);
    return jac.dA_f[static_cast<std::size_t>(k - 1)];
}

}  // namespace xts

#include "xts/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xts/common.hpp"

namespace xts {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size() || a.size() < 2) throw UsageError("pearson: length mismatch");
    const Eigen::ArrayXd da = a.array() - a.mean();
    const Eigen::ArrayXd db = b.array() - b.mean();
    const double denom = std::sqrt(da.square().sum() * db.square().sum());
    if (denom == 0.0) return kNaN;
    return (da * db).sum() / denom;
}

EnsembleLpdStats ensemble_lpd_stats(const std::vector<LpdSeries>& lpds, int j) {
    if (lpds.size() < 2) throw UsageError("ensemble_lpd_stats: need at least 2 members");
    const Eigen::MatrixXd& first = lpds[0].matrix(j);
    const long T = first.rows();
    const long C = first.cols();
    for (const auto& l : lpds)
        if (l.matrix(j).rows() != T || l.matrix(j).cols() != C)
            throw UsageError("ensemble_lpd_stats: member shape mismatch");

    const double M = static_cast<double>(lpds.size());
    EnsembleLpdStats s;
    s.timestamps = lpds[0].timestamps;
    s.mean = Eigen::MatrixXd::Zero(T, C);
    for (const auto& l : lpds) s.mean += l.matrix(j);
    s.mean /= M;

    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(T, C);
    for (const auto& l : lpds) var += (l.matrix(j) - s.mean).cwiseAbs2();
    s.sigma = (var / M).cwiseSqrt();

    s.tstat.resize(T, C);
    s.tstat_defined.resize(T, C);
    for (long t = 0; t < T; ++t)
        for (long c = 0; c < C; ++c) {
            const bool ok = s.sigma(t, c) > 0.0;
            s.tstat_defined(t, c) = ok;
            s.tstat(t, c) = ok ? s.mean(t, c) / s.sigma(t, c) : kNaN;
        }
    return s;
}

Eigen::MatrixXd lpd_cross_correlations(const std::vector<LpdSeries>& lpds, int reference,
                                       int j) {
    const EnsembleLpdStats stats = ensemble_lpd_stats(lpds, j);
    const long T = stats.mean.rows();
    const long C = stats.mean.cols();
    if (T < 3) throw UsageError("lpd_cross_correlations: need at least 3 time points");
    if (reference < 0 || reference >= C)
        throw UsageError("lpd_cross_correlations: reference column out of range");

    Eigen::MatrixXd out(2, C);
    for (long c = 0; c < C; ++c) {
        out(0, c) = pearson(stats.mean.col(reference), stats.mean.col(c));
        double acc = 0.0;
        for (const auto& l : lpds) acc += pearson(l.matrix(j).col(c), stats.mean.col(c));
        out(1, c) = acc / static_cast<double>(lpds.size());
    }
    return out;
}

MaskedSeries rolling_quantile(const Eigen::VectorXd& series, int window, double q) {
    if (!(q > 0.0 && q < 1.0)) throw UsageError("quantile probability must be in (0,1)");
    if (window < 2) throw UsageError("rolling window must be >= 2");
    const long T = series.size();
    if (window >= T) throw UsageError("rolling window must be shorter than the series");

    // Lower order statistic at rank ceil(q*W), from the W points strictly
    // before t.
    const long rank = static_cast<long>(std::ceil(q * window));
    const long k = std::clamp(rank, 1L, static_cast<long>(window)) - 1;

    MaskedSeries out;
    out.values = Eigen::VectorXd::Constant(T, kNaN);
    out.defined.assign(static_cast<std::size_t>(T), false);
    std::vector<double> buf(static_cast<std::size_t>(window));
    for (long t = window; t < T; ++t) {
        for (long i = 0; i < window; ++i)
            buf[static_cast<std::size_t>(i)] = series[t - window + i];
        std::nth_element(buf.begin(), buf.begin() + k, buf.end());
        out.values[t] = buf[static_cast<std::size_t>(k)];
        out.defined[static_cast<std::size_t>(t)] = true;
    }
    return out;
}

SignalSeries exit_signals(const Eigen::VectorXd& series, int window, double q, ExitSide side,
                          bool use_absolute, std::vector<Date> timestamps) {
    const Eigen::VectorXd base = use_absolute ? series.cwiseAbs().eval() : series;
    const long T = series.size();

    SignalSeries out;
    out.timestamps = std::move(timestamps);
    out.exposure = Eigen::VectorXd::Ones(T);  // warm-up stays fully invested
    out.defined.assign(static_cast<std::size_t>(T), false);
    out.trigger_kind = side == ExitSide::Below    ? TriggerKind::Lower
                       : side == ExitSide::Above  ? TriggerKind::Upper
                                                  : TriggerKind::TwoSided;

    MaskedSeries lower, upper;
    if (side != ExitSide::Above) lower = rolling_quantile(base, window, q);
    if (side != ExitSide::Below) upper = rolling_quantile(base, window, 1.0 - q);

    for (long t = 0; t < T; ++t) {
        const bool defined = side == ExitSide::Below   ? lower.defined[static_cast<std::size_t>(t)]
                             : side == ExitSide::Above ? upper.defined[static_cast<std::size_t>(t)]
                                                       : lower.defined[static_cast<std::size_t>(t)];
        if (!defined) continue;
        out.defined[static_cast<std::size_t>(t)] = true;
        bool triggered = false;
        if (side != ExitSide::Above && base[t] < lower.values[t]) triggered = true;
        if (side != ExitSide::Below && base[t] > upper.values[t]) triggered = true;
        out.exposure[t] = triggered ? 0.0 : 1.0;
    }
    return out;
}

SignalSeries aggregate_exposure(const std::vector<Eigen::VectorXd>& columns, int window,
                                double q, std::vector<Date> timestamps) {
    if (columns.empty()) throw UsageError("aggregate_exposure: no columns");
    const long T = columns[0].size();
    for (const auto& c : columns)
        if (c.size() != T) throw UsageError("aggregate_exposure: column length mismatch");

    SignalSeries out;
    out.timestamps = std::move(timestamps);
    out.exposure = Eigen::VectorXd::Ones(T);
    out.defined.assign(static_cast<std::size_t>(T), false);
    out.trigger_kind = TriggerKind::Aggregate;

    std::vector<MaskedSeries> quantiles;
    quantiles.reserve(columns.size());
    for (const auto& c : columns) quantiles.push_back(rolling_quantile(c, window, q));

    const double m = static_cast<double>(columns.size());
    for (long t = 0; t < T; ++t) {
        if (!quantiles[0].defined[static_cast<std::size_t>(t)]) continue;
        out.defined[static_cast<std::size_t>(t)] = true;
        double above = 0.0;
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i][t] > quantiles[i].values[t]) above += 1.0;
        out.exposure[t] = above / m;
    }
    return out;
}

std::vector<Regime> classify_regimes(const Eigen::VectorXd& series, int window,
                                     double q_lower, double q_upper, bool use_absolute) {
    if (!(q_lower < q_upper)) throw UsageError("classify_regimes: lower bound must be below upper");
    const Eigen::VectorXd base = use_absolute ? series.cwiseAbs().eval() : series;
    const MaskedSeries lo = rolling_quantile(base, window, q_lower);
    const MaskedSeries hi = rolling_quantile(base, window, q_upper);

    std::vector<Regime> out(static_cast<std::size_t>(series.size()), Regime::Undefined);
    for (long t = 0; t < series.size(); ++t) {
        if (!lo.defined[static_cast<std::size_t>(t)]) continue;
        if (base[t] < lo.values[t])
            out[static_cast<std::size_t>(t)] = Regime::Critical;
        else if (base[t] > hi.values[t])
            out[static_cast<std::size_t>(t)] = Regime::Auspicious;
        else
            out[static_cast<std::size_t>(t)] = Regime::Neutral;
    }
    return out;
}

DriftReport drift_analysis(const std::vector<Regime>& regimes,
                           const Eigen::VectorXd& next_day_returns) {
    if (static_cast<long>(regimes.size()) != next_day_returns.size())
        throw UsageError("drift_analysis: length mismatch");

    const auto fill = [&](Regime which) {
        DriftRow row;
        long positive = 0;
        double sum = 0.0;
        for (std::size_t t = 0; t < regimes.size(); ++t) {
            if (regimes[t] == Regime::Undefined) continue;
            if (which != Regime::Undefined && regimes[t] != which) continue;
            ++row.count;
            const double r = next_day_returns[static_cast<long>(t)];
            if (r > 0.0) ++positive;
            sum += r;
        }
        if (row.count > 0) {
            row.defined = true;
            row.proportion_positive = 100.0 * static_cast<double>(positive) /
                                      static_cast<double>(row.count);
            row.average_return = 100.0 * sum / static_cast<double>(row.count);
        }
        return row;
    };

    DriftReport rep;
    rep.critical = fill(Regime::Critical);
    rep.neutral = fill(Regime::Neutral);
    rep.auspicious = fill(Regime::Auspicious);
    rep.all = fill(Regime::Undefined);  // sentinel: every defined point
    return rep;
}

std::pair<double, Eigen::VectorXd> heuristic_summary(const EnsembleLpdStats& stats) {
    if (stats.mean.rows() == 0) throw UsageError("heuristic_summary: empty stats");
    const Eigen::VectorXd col_means = stats.mean.colwise().mean();
    return {col_means[0], col_means.tail(col_means.size() - 1)};
}

}  // namespace xts

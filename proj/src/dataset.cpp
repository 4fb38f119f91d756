#include "xts/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "xts/common.hpp"

namespace xts {

std::pair<Eigen::VectorXd, ScalingParams> scale_unit(const Eigen::VectorXd& v) {
    if (v.size() < 2) throw DataError("scale_unit needs at least two values");
    const double lo = v.minCoeff();
    const double hi = v.maxCoeff();
    if (!(hi > lo)) throw DataError("degenerate range: constant vector");
    ScalingParams p{lo, hi};
    Eigen::VectorXd scaled = (v.array() - lo) / (hi - lo);
    return {std::move(scaled), p};
}

Eigen::MatrixXd LaggedDataset::X_unscaled() const {
    return (X.array() * scaling_x.range() + scaling_x.min).matrix();
}

Eigen::VectorXd LaggedDataset::y_unscaled() const {
    return (y.array() * scaling_y.range() + scaling_y.min).matrix();
}

LaggedDataset build_lagged(const TimeSeries& s, int n) {
    const long len = static_cast<long>(s.size());
    if (n <= 0) throw DataError("lag count must be positive");
    if (n >= len) throw DataError("lag count must be smaller than the series length");

    const long T = len - n;
    Eigen::MatrixXd X(T, n);
    Eigen::VectorXd y(T);
    std::vector<Date> ts(T);
    const auto& v = s.values();
    for (long t = 0; t < T; ++t) {
        y[t] = v[t + n];
        ts[static_cast<std::size_t>(t)] = s.timestamps()[static_cast<std::size_t>(t + n)];
        for (int i = 0; i < n; ++i) X(t, i) = v[t + n - 1 - i];  // column i = lag i+1
    }

    LaggedDataset d;
    d.n = n;
    d.timestamps = std::move(ts);
    auto [ys, py] = scale_unit(y);
    Eigen::Map<Eigen::VectorXd> flat(X.data(), X.size());
    auto [xs, px] = scale_unit(flat);
    Eigen::MatrixXd Xs = Eigen::Map<Eigen::MatrixXd>(xs.data(), T, n);
    d.X = std::move(Xs);
    d.y = std::move(ys);
    d.scaling_x = px;
    d.scaling_y = py;
    return d;
}

std::pair<LaggedDataset, LaggedDataset> split(const LaggedDataset& d, Date boundary) {
    if (d.timestamps.empty()) throw DataError("split: dataset has no timestamps");
    if (!(boundary > d.timestamps.front() && boundary <= d.timestamps.back()))
        throw DataError("split boundary " + format_date(boundary) +
                        " outside the timestamp range");

    long cut = 0;  // first out-of-sample row
    while (cut < d.rows() && d.timestamps[static_cast<std::size_t>(cut)] < boundary) ++cut;
    if (cut == 0 || cut == d.rows())
        throw DataError("split boundary leaves an empty partition");

    // Work on original units, then re-estimate scaling on the in-sample span
    // only and reuse it out-of-sample. Out-of-sample entries may leave [0,1].
    const Eigen::MatrixXd Xo = d.X_unscaled();
    const Eigen::VectorXd yo = d.y_unscaled();

    LaggedDataset in, out;
    in.n = out.n = d.n;
    in.timestamps.assign(d.timestamps.begin(), d.timestamps.begin() + cut);
    out.timestamps.assign(d.timestamps.begin() + cut, d.timestamps.end());

    Eigen::MatrixXd Xin = Xo.topRows(cut);
    Eigen::VectorXd yin = yo.head(cut);
    Eigen::Map<Eigen::VectorXd> flat(Xin.data(), Xin.size());
    auto [xs, px] = scale_unit(flat);
    auto [ys, py] = scale_unit(yin);
    in.X = Eigen::Map<Eigen::MatrixXd>(xs.data(), cut, d.n);
    in.y = std::move(ys);
    in.scaling_x = px;
    in.scaling_y = py;

    out.X = ((Xo.bottomRows(d.rows() - cut).array() - px.min) / px.range()).matrix();
    out.y = ((yo.tail(d.rows() - cut).array() - py.min) / py.range()).matrix();
    out.scaling_x = px;
    out.scaling_y = py;
    return {std::move(in), std::move(out)};
}

void write_dataset_csv(const LaggedDataset& d, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write file: " + path);
    f << "date,y";
    for (int i = 1; i <= d.n; ++i) f << ",lag_" << i;
    f << ",x_min,x_max,y_min,y_max\n";
    for (long t = 0; t < d.rows(); ++t) {
        f << format_date(d.timestamps[static_cast<std::size_t>(t)]) << ','
          << format_double(d.y[t]);
        for (int i = 0; i < d.n; ++i) f << ',' << format_double(d.X(t, i));
        if (t == 0)
            f << ',' << format_double(d.scaling_x.min) << ',' << format_double(d.scaling_x.max)
              << ',' << format_double(d.scaling_y.min) << ',' << format_double(d.scaling_y.max);
        else
            f << ",,,,";
        f << '\n';
    }
}

LaggedDataset read_dataset_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open file: " + path);
    std::string line;
    if (!std::getline(f, line)) throw DataError("empty dataset file: " + path);

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string fld;
        while (std::getline(ss, fld, ',')) header.push_back(fld);
    }
    int n = 0;
    while (std::find(header.begin(), header.end(), "lag_" + std::to_string(n + 1)) != header.end())
        ++n;
    if (n == 0) throw DataError(path + ": no lag columns found");

    std::vector<Date> ts;
    std::vector<double> yv;
    std::vector<double> xv;
    ScalingParams px, py;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<std::string> fields;
        std::string fld;
        while (std::getline(ss, fld, ',')) fields.push_back(fld);
        fields.resize(header.size());
        ts.push_back(parse_date(fields[0]));
        yv.push_back(std::strtod(fields[1].c_str(), nullptr));
        for (int i = 0; i < n; ++i) xv.push_back(std::strtod(fields[2 + i].c_str(), nullptr));
        if (lineno == 2) {
            px.min = std::strtod(fields[2 + n].c_str(), nullptr);
            px.max = std::strtod(fields[3 + n].c_str(), nullptr);
            py.min = std::strtod(fields[4 + n].c_str(), nullptr);
            py.max = std::strtod(fields[5 + n].c_str(), nullptr);
        }
    }
    const long T = static_cast<long>(yv.size());
    LaggedDataset d;
    d.n = n;
    d.timestamps = std::move(ts);
    d.y = Eigen::Map<Eigen::VectorXd>(yv.data(), T);
    d.X.resize(T, n);
    for (long t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i) d.X(t, i) = xv[static_cast<std::size_t>(t) * n + i];
    d.scaling_x = px;
    d.scaling_y = py;
    return d;
}

}  // namespace xts

#include "xts/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xts/common.hpp"

namespace fs = std::filesystem;

namespace xts {

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

double parse_quantile(const std::string& s) {
    // Accept plain decimals and simple fractions like "1/7".
    const auto slash = s.find('/');
    if (slash != std::string::npos)
        return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    return std::stod(s);
}

std::string hex64(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open artifact for hashing: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return hex64(fnv1a(ss.str()));
}

void ensure_dir(const fs::path& p) { fs::create_directories(p); }

std::string member_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "member_%03d", i);
    return buf;
}

// date + named numeric columns, masked rows written empty.
void write_matrix_csv(const std::string& path, const std::vector<Date>& timestamps,
                      const Eigen::MatrixXd& m, const std::vector<std::string>& columns) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write file: " + path);
    f << "date";
    for (const auto& c : columns) f << ',' << c;
    f << '\n';
    for (long t = 0; t < m.rows(); ++t) {
        f << (timestamps.empty() ? std::to_string(t)
                                 : format_date(timestamps[static_cast<std::size_t>(t)]));
        for (long c = 0; c < m.cols(); ++c) {
            f << ',';
            if (std::isfinite(m(t, c))) f << format_double(m(t, c));
        }
        f << '\n';
    }
}

std::vector<std::string> lpd_columns(int n) {
    std::vector<std::string> cols{"intercept"};
    for (int i = 1; i <= n; ++i) cols.push_back("lag_" + std::to_string(i));
    return cols;
}

std::vector<std::string> lag_columns(int n) {
    std::vector<std::string> cols;
    for (int i = 1; i <= n; ++i) cols.push_back("lag_" + std::to_string(i));
    return cols;
}

LaggedDataset load_out_sample(const PipelineConfig& cfg) {
    return read_dataset_csv((fs::path(cfg.out_dir) / "dataset_out.csv").string());
}

LaggedDataset load_in_sample(const PipelineConfig& cfg) {
    return read_dataset_csv((fs::path(cfg.out_dir) / "dataset_in.csv").string());
}

Ensemble load_ensemble(const PipelineConfig& cfg) {
    const fs::path dir = fs::path(cfg.out_dir) / "ensemble";
    const fs::path manifest_path = dir / "manifest.json";
    std::ifstream mf(manifest_path);
    if (!mf) throw DataError("missing ensemble artifact: " + manifest_path.string() +
                             " (run `train` first)");
    nlohmann::json manifest = nlohmann::json::parse(mf);
    Ensemble e;
    for (const auto& name : manifest.at("members")) {
        std::ifstream nf(dir / (name.get<std::string>() + ".json"));
        std::stringstream ss;
        ss << nf.rdbuf();
        auto [net, meta] = net_from_json(ss.str());
        e.nets.push_back(std::move(net));
        e.seeds.push_back(meta.seed);
        e.reports.push_back({});
    }
    return e;
}

// Per-member LPD matrices for the out-of-sample span.
std::vector<LpdSeries> member_lpds(const Ensemble& e, const LaggedDataset& d) {
    std::vector<LpdSeries> lpds;
    lpds.reserve(e.size());
    for (const auto& net : e.nets) lpds.push_back(lpd_series(net, d.X, d.timestamps));
    return lpds;
}

struct MemberStats {
    Eigen::MatrixXd mean, sigma, tstat;
};

MemberStats member_stats(const std::vector<Eigen::MatrixXd>& members) {
    MemberStats s;
    const double M = static_cast<double>(members.size());
    s.mean = Eigen::MatrixXd::Zero(members[0].rows(), members[0].cols());
    for (const auto& m : members) s.mean += m;
    s.mean /= M;
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(s.mean.rows(), s.mean.cols());
    for (const auto& m : members) var += (m - s.mean).cwiseAbs2();
    s.sigma = (var / M).cwiseSqrt();
    s.tstat = s.mean.cwiseQuotient(s.sigma);  // NaN where sigma == 0, masked on write
    return s;
}

int resolve_signal_column(const PipelineConfig& cfg, int n) {
    if (cfg.signal_column == "intercept") return 0;
    if (cfg.signal_column == "lag_n") return n;
    if (cfg.signal_column.rfind("lag_", 0) == 0)
        return std::stoi(cfg.signal_column.substr(4));
    throw UsageError("unknown signal column: " + cfg.signal_column);
}

Eigen::MatrixXd read_matrix_csv(const std::string& path, std::vector<Date>* timestamps) {
    std::ifstream f(path);
    if (!f) throw DataError("missing artifact: " + path);
    std::string line;
    std::getline(f, line);
    std::vector<std::vector<double>> rows;
    std::vector<Date> ts;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string fld;
        std::getline(ss, fld, ',');
        ts.push_back(parse_date(fld));
        std::vector<double> row;
        while (std::getline(ss, fld, ','))
            row.push_back(fld.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : std::strtod(fld.c_str(), nullptr));
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(static_cast<long>(rows.size()),
                      rows.empty() ? 0 : static_cast<long>(rows[0].size()));
    for (long t = 0; t < m.rows(); ++t)
        for (long c = 0; c < m.cols(); ++c) m(t, c) = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)];
    if (timestamps) *timestamps = std::move(ts);
    return m;
}

ExitSide parse_side(const std::string& s) {
    if (s == "below") return ExitSide::Below;
    if (s == "above") return ExitSide::Above;
    if (s == "two_sided") return ExitSide::TwoSided;
    throw UsageError("unknown side: " + s);
}

}  // namespace

std::string PipelineConfig::canonical() const {
    std::ostringstream o;
    o << "data=" << data_path << "\ncolumn=" << value_column << "\ninput=" << input_kind
      << "\nlags=" << lags << "\nsplit=" << split_date << "\narch=" << join_ints(arch)
      << "\noutput_activation=" << output_activation
      << "\nlearning_rate=" << format_double(learning_rate) << "\nepochs=" << epochs
      << "\ntolerance=" << format_double(tolerance) << "\nseed=" << seed
      << "\nmembers=" << members << "\npreset=" << preset
      << "\nquantile=" << format_double(quantile) << "\nwindow=" << window
      << "\nside=" << side << "\nabsolute=" << (absolute ? "true" : "false")
      << "\nsignal_column=" << signal_column << "\nkind=" << kind << "\nlayer=" << layer
      << "\nxf=" << xf << "\nstrategy=" << strategy
      << "\nannualization=" << format_double(periods_per_year) << "\n";
    return o.str();
}

void apply_override(PipelineConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string value = unquote(trim(raw));
    if (key == "data") cfg.data_path = value;
    else if (key == "column") cfg.value_column = value;
    else if (key == "input") cfg.input_kind = value;
    else if (key == "lags") cfg.lags = std::stoi(value);
    else if (key == "split") cfg.split_date = value;
    else if (key == "arch") cfg.arch = parse_int_list(value);
    else if (key == "output_activation") cfg.output_activation = value;
    else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
    else if (key == "epochs") cfg.epochs = std::stoi(value);
    else if (key == "tolerance") cfg.tolerance = std::stod(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "members") cfg.members = std::stoi(value);
    else if (key == "jobs") cfg.jobs = std::stoi(value);
    else if (key == "preset") cfg.preset = value;
    else if (key == "quantile") cfg.quantile = parse_quantile(value);
    else if (key == "window") cfg.window = std::stoi(value);
    else if (key == "side") cfg.side = value;
    else if (key == "absolute") cfg.absolute = (value == "true" || value == "1");
    else if (key == "signal_column") cfg.signal_column = value;
    else if (key == "kind") cfg.kind = value;
    else if (key == "layer") cfg.layer = std::stoi(value);
    else if (key == "xf") cfg.xf = value;
    else if (key == "strategy") cfg.strategy = value;
    else if (key == "annualization") cfg.periods_per_year = std::stod(value);
    else if (key == "out_dir") cfg.out_dir = value;
    else throw UsageError("unknown config key: " + key);
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_override(cfg, trim(stripped.substr(0, eq)), stripped.substr(eq + 1));
    }
    return cfg;
}

std::vector<std::string> cmd_ingest(const PipelineConfig& cfg) {
    if (cfg.data_path.empty()) throw UsageError("config key 'data' is required");
    if (cfg.split_date.empty()) throw UsageError("config key 'split' is required");
    ensure_dir(cfg.out_dir);

    TimeSeries series = load_csv(cfg.data_path, cfg.value_column);
    if (cfg.input_kind == "prices") series = log_returns(series);
    else if (cfg.input_kind != "returns")
        throw UsageError("config key 'input' must be 'prices' or 'returns'");

    const LaggedDataset full = build_lagged(series, cfg.lags);
    auto [in_sample, out_sample] = split(full, parse_date(cfg.split_date));

    const std::string in_path = (fs::path(cfg.out_dir) / "dataset_in.csv").string();
    const std::string out_path = (fs::path(cfg.out_dir) / "dataset_out.csv").string();
    write_dataset_csv(in_sample, in_path);
    write_dataset_csv(out_sample, out_path);
    return {in_path, out_path};
}

std::vector<std::string> cmd_train(const PipelineConfig& cfg) {
    const LaggedDataset in_sample = load_in_sample(cfg);
    NetArchitecture arch;
    arch.layer_dims.push_back(cfg.lags);
    for (int h : cfg.arch) arch.layer_dims.push_back(h);
    arch.layer_dims.push_back(1);
    arch.output_activation =
        cfg.output_activation == "identity" ? Activation::Identity : Activation::Sigmoid;

    TrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.max_epochs = cfg.epochs;
    tc.tolerance = cfg.tolerance;
    tc.seed = cfg.seed;
    const Ensemble e = train_ensemble(arch, in_sample, tc, cfg.members, cfg.jobs);

    const fs::path dir = fs::path(cfg.out_dir) / "ensemble";
    ensure_dir(dir);
    std::vector<std::string> written;
    nlohmann::json manifest;
    manifest["members"] = nlohmann::json::array();
    manifest["seeds"] = nlohmann::json::array();
    manifest["config_hash"] = hex64(fnv1a(cfg.canonical()));
    manifest["data_fingerprint"] =
        hash_file((fs::path(cfg.out_dir) / "dataset_in.csv").string());
    nlohmann::json mse = nlohmann::json::array();
    for (std::size_t i = 0; i < e.size(); ++i) {
        NetJsonMeta meta;
        meta.seed = e.seeds[i];
        meta.scaling_x = in_sample.scaling_x;
        meta.scaling_y = in_sample.scaling_y;
        const std::string name = member_name(static_cast<int>(i));
        const std::string path = (dir / (name + ".json")).string();
        std::ofstream f(path);
        f << net_to_json(e.nets[i], meta);
        written.push_back(path);
        manifest["members"].push_back(name);
        manifest["seeds"].push_back(e.seeds[i]);
        mse.push_back({{"scaled", e.reports[i].final_mse_scaled},
                       {"original", e.reports[i].final_mse_original},
                       {"epochs", e.reports[i].epochs_run}});
    }
    manifest["mse"] = std::move(mse);
    const std::string mpath = (dir / "manifest.json").string();
    std::ofstream mf(mpath);
    mf << manifest.dump(2) << '\n';
    written.push_back(mpath);
    return written;
}

std::vector<std::string> cmd_explain(const PipelineConfig& cfg) {
    const LaggedDataset out_sample = load_out_sample(cfg);
    const Ensemble e = load_ensemble(cfg);
    const fs::path dir = fs::path(cfg.out_dir) / "explain";
    ensure_dir(dir);

    std::vector<Eigen::MatrixXd> members;
    std::vector<std::string> columns;
    const int n = out_sample.n;

    if (cfg.kind == "lpd") {
        for (const auto& net : e.nets)
            members.push_back(lpd_series(net, out_sample.X).matrix(0));
        columns = lpd_columns(n);
    } else if (cfg.kind == "qpd") {
        for (const auto& net : e.nets)
            members.push_back(qpd_series(net, out_sample.X).diagonal);
        columns = lag_columns(n);
    } else if (cfg.kind == "ipd") {
        for (const auto& net : e.nets)
            members.push_back(ipd_series(net, out_sample.X, out_sample.y).dmse);
        columns = lag_columns(n);
    } else if (cfg.kind == "layer") {
        for (const auto& net : e.nets) {
            const long T = out_sample.rows();
            const int nk = net.architecture().layer_dims.at(static_cast<std::size_t>(cfg.layer));
            Eigen::MatrixXd m(T, static_cast<long>(n) * nk);
            for (long t = 0; t < T; ++t) {
                const Eigen::MatrixXd d =
                    layer_intercept(net, out_sample.X.row(t).transpose(), cfg.layer);
                m.row(t) = Eigen::Map<const Eigen::RowVectorXd>(d.data(), d.size());
            }
            members.push_back(std::move(m));
        }
        const int nk = static_cast<int>(members[0].cols()) / n;
        for (int u = 1; u <= nk; ++u)
            for (int i = 1; i <= n; ++i)
                columns.push_back("neuron_" + std::to_string(u) + "_lag_" + std::to_string(i));
    } else if (cfg.kind == "xf") {
        XFunction xf;
        if (cfg.xf == "identity") xf = xf_identity();
        else if (cfg.xf == "squared") xf = xf_squared_output();
        else if (cfg.xf == "sharpe") xf = xf_window_sharpe();
        else throw UsageError("unknown X-function: " + cfg.xf);
        for (const auto& net : e.nets) {
            const long T = out_sample.rows();
            Eigen::MatrixXd m(T, n);
            for (long t = 0; t < T; ++t)
                m.row(t) = xf_first_order(net, out_sample.X.row(t).transpose(), xf).transpose();
            members.push_back(std::move(m));
        }
        columns = lag_columns(n);
    } else {
        throw UsageError("unknown explain kind: " + cfg.kind);
    }

    std::vector<std::string> written;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const std::string path =
            (dir / (cfg.kind + "_" + member_name(static_cast<int>(i)) + ".csv")).string();
        write_matrix_csv(path, out_sample.timestamps, members[i], columns);
        written.push_back(path);
    }
    if (members.size() >= 2) {
        const MemberStats s = member_stats(members);
        for (const auto& [tag, m] : {std::pair<std::string, const Eigen::MatrixXd*>{"mean", &s.mean},
                                     {"sigma", &s.sigma},
                                     {"tstat", &s.tstat}}) {
            const std::string path = (dir / (cfg.kind + "_" + tag + ".csv")).string();
            write_matrix_csv(path, out_sample.timestamps, *m, columns);
            written.push_back(path);
        }
    }
    return written;
}

std::vector<std::string> cmd_signals(const PipelineConfig& in_cfg) {
    PipelineConfig cfg = in_cfg;
    if (cfg.preset == "btc-rm") {
        cfg.quantile = 1.0 / 7.0; cfg.window = 100; cfg.side = "below";
        cfg.absolute = true; cfg.signal_column = "lag_n";
    } else if (cfg.preset == "fraud") {
        cfg.quantile = 1.0 / 20.0; cfg.window = 250; cfg.side = "two_sided";
        cfg.absolute = true; cfg.signal_column = "lag_n";
    } else if (cfg.preset == "sp-crisis") {
        cfg.quantile = 0.05; cfg.window = 200; cfg.side = "below";
        cfg.absolute = false; cfg.signal_column = "aggregate";
    } else if (cfg.preset != "custom") {
        throw UsageError("unknown preset: " + cfg.preset);
    }

    const fs::path mean_path = fs::path(cfg.out_dir) / "explain" / "lpd_mean.csv";
    const fs::path fallback = fs::path(cfg.out_dir) / "explain" / "lpd_member_000.csv";
    std::vector<Date> timestamps;
    Eigen::MatrixXd lpd;
    if (fs::exists(mean_path)) lpd = read_matrix_csv(mean_path.string(), &timestamps);
    else lpd = read_matrix_csv(fallback.string(), &timestamps);
    const int n = static_cast<int>(lpd.cols()) - 1;
    if (cfg.window >= lpd.rows())
        throw UsageError("rolling window " + std::to_string(cfg.window) +
                         " must be shorter than the series (" + std::to_string(lpd.rows()) + ")");

    SignalSeries signals;
    if (cfg.signal_column == "aggregate") {
        std::vector<Eigen::VectorXd> columns;
        for (long c = 0; c < lpd.cols(); ++c) columns.push_back(lpd.col(c));
        signals = aggregate_exposure(columns, cfg.window, cfg.quantile, timestamps);
    } else {
        const int col = resolve_signal_column(cfg, n);
        signals = exit_signals(lpd.col(col), cfg.window, cfg.quantile, parse_side(cfg.side),
                               cfg.absolute, timestamps);
    }

    const std::string sig_path = (fs::path(cfg.out_dir) / "signals.csv").string();
    {
        std::ofstream f(sig_path);
        f << "date,exposure,defined\n";
        for (long t = 0; t < signals.exposure.size(); ++t)
            f << format_date(signals.timestamps[static_cast<std::size_t>(t)]) << ','
              << format_double(signals.exposure[t]) << ','
              << (signals.defined[static_cast<std::size_t>(t)] ? 1 : 0) << '\n';
    }

    // Drift of next-day returns per |LPD| regime.
    const LaggedDataset out_sample = load_out_sample(cfg);
    const int col = cfg.signal_column == "aggregate" ? n : resolve_signal_column(cfg, n);
    std::vector<Regime> regimes = classify_regimes(lpd.col(col), cfg.window, cfg.quantile,
                                                   1.0 - cfg.quantile, cfg.absolute);
    const Eigen::VectorXd y = out_sample.y_unscaled();
    Eigen::VectorXd next_day = Eigen::VectorXd::Zero(y.size());
    for (long t = 0; t + 1 < y.size(); ++t) next_day[t] = y[t + 1];
    if (!regimes.empty()) regimes.back() = Regime::Undefined;  // no next-day return

    const DriftReport drift = drift_analysis(regimes, next_day);
    const auto row_json = [](const DriftRow& r) {
        nlohmann::json j;
        j["count"] = r.count;
        j["defined"] = r.defined;
        if (r.defined) {
            j["proportion_positive_pct"] = r.proportion_positive;
            j["average_next_day_return_pct"] = r.average_return;
        }
        return j;
    };
    nlohmann::json dj;
    dj["critical"] = row_json(drift.critical);
    dj["neutral"] = row_json(drift.neutral);
    dj["auspicious"] = row_json(drift.auspicious);
    dj["all"] = row_json(drift.all);
    dj["preset"] = cfg.preset;
    dj["quantile"] = cfg.quantile;
    dj["window"] = cfg.window;
    dj["side"] = cfg.side;
    dj["absolute"] = cfg.absolute;
    dj["signal_column"] = cfg.signal_column;
    const std::string drift_path = (fs::path(cfg.out_dir) / "drift.json").string();
    std::ofstream df(drift_path);
    df << dj.dump(2) << '\n';
    return {sig_path, drift_path};
}

std::vector<std::string> cmd_backtest(const PipelineConfig& cfg) {
    const LaggedDataset out_sample = load_out_sample(cfg);
    const Eigen::VectorXd returns = out_sample.y_unscaled();
    const fs::path dir = fs::path(cfg.out_dir) / "backtest";
    ensure_dir(dir);

    const auto write_result = [&](const std::string& name, const BacktestResult& r) {
        const std::string path = (dir / (name + ".csv")).string();
        std::ofstream f(path);
        f << "date,position,period_return,cumulative\n";
        for (long t = 0; t < r.cumulative.size(); ++t)
            f << format_date(out_sample.timestamps[static_cast<std::size_t>(t)]) << ','
              << format_double(r.positions[t]) << ',' << format_double(r.period_returns[t])
              << ',' << format_double(r.cumulative[t]) << '\n';
        return path;
    };

    std::vector<std::string> written;
    nlohmann::json mj;
    const BacktestResult bench = buy_and_hold(returns);
    written.push_back(write_result("benchmark", bench));

    BacktestResult headline;
    if (cfg.strategy == "sign_rule") {
        const Ensemble e = load_ensemble(cfg);
        const double range = out_sample.scaling_y.range();
        const double offset = out_sample.scaling_y.min;
        // forecast_t = prediction of return_{t+1}, shifted so positions lag
        // returns by one step.
        const auto shifted_forecasts = [&](const FeedforwardNet& net) {
            const Eigen::VectorXd o = predict_series(net, out_sample.X).col(0);
            Eigen::VectorXd f = Eigen::VectorXd::Zero(o.size());
            for (long t = 0; t + 1 < o.size(); ++t) f[t] = o[t + 1] * range + offset;
            return f;
        };
        Eigen::VectorXd mean_forecast = Eigen::VectorXd::Zero(out_sample.rows());
        for (std::size_t i = 0; i < e.size(); ++i) {
            const Eigen::VectorXd f = shifted_forecasts(e.nets[i]);
            mean_forecast += f;
            written.push_back(
                write_result(member_name(static_cast<int>(i)), sign_rule(f, returns)));
        }
        mean_forecast /= static_cast<double>(e.size());
        headline = sign_rule(mean_forecast, returns);
        written.push_back(write_result("mean", headline));
    } else if (cfg.strategy == "exposure" || cfg.strategy == "long_short") {
        const std::string sig_path = (fs::path(cfg.out_dir) / "signals.csv").string();
        std::ifstream sf(sig_path);
        if (!sf) throw DataError("missing signals artifact: " + sig_path +
                                 " (run `signals` first)");
        SignalSeries signals;
        std::string line;
        std::getline(sf, line);
        std::vector<double> exp;
        std::vector<bool> def;
        while (std::getline(sf, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string fld;
            std::getline(ss, fld, ',');
            signals.timestamps.push_back(parse_date(fld));
            std::getline(ss, fld, ',');
            exp.push_back(std::strtod(fld.c_str(), nullptr));
            std::getline(ss, fld, ',');
            def.push_back(fld == "1");
        }
        signals.exposure = Eigen::Map<Eigen::VectorXd>(exp.data(), static_cast<long>(exp.size()));
        signals.defined = std::move(def);
        if (signals.exposure.size() != returns.size())
            throw DataError("signals/returns length mismatch");
        headline = cfg.strategy == "exposure" ? exposure_strategy(signals, returns)
                                              : long_short_strategy(signals, returns);
        written.push_back(write_result("mean", headline));
    } else {
        throw UsageError("unknown strategy: " + cfg.strategy);
    }

    const Metrics m = metrics(headline, 0.0, cfg.periods_per_year);
    mj["strategy"] = cfg.strategy;
    mj["sharpe"] = m.sharpe_defined ? nlohmann::json(m.sharpe) : nlohmann::json();
    mj["max_drawdown"] = m.max_drawdown;
    // Forecast MSE of the ensemble mean on the out-of-sample span.
    if (cfg.strategy == "sign_rule") {
        const Ensemble e = load_ensemble(cfg);
        Eigen::VectorXd mean_o = Eigen::VectorXd::Zero(out_sample.rows());
        for (const auto& net : e.nets) mean_o += predict_series(net, out_sample.X).col(0);
        mean_o /= static_cast<double>(e.size());
        const double r = out_sample.scaling_y.range();
        mj["mse"] = (mean_o - out_sample.y).squaredNorm() /
                    static_cast<double>(out_sample.rows()) * r * r;
    } else {
        mj["mse"] = nlohmann::json();
    }
    const Metrics bm = metrics(bench, 0.0, cfg.periods_per_year);
    mj["benchmark_sharpe"] = bm.sharpe_defined ? nlohmann::json(bm.sharpe) : nlohmann::json();
    mj["benchmark_max_drawdown"] = bm.max_drawdown;
    const std::string mpath = (dir / "metrics.json").string();
    std::ofstream mf(mpath);
    mf << mj.dump(2) << '\n';
    written.push_back(mpath);
    return written;
}

std::vector<std::string> cmd_report(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["config_hash"] = hex64(fnv1a(cfg.canonical()));
    j["tool_version"] = kToolVersion;
    nlohmann::json artifacts = nlohmann::json::array();
    std::vector<std::string> paths;
    for (auto it = fs::recursive_directory_iterator(cfg.out_dir);
         it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        const std::string p = it->path().lexically_relative(cfg.out_dir).generic_string();
        if (p == "manifest.json") continue;
        paths.push_back(p);
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths)
        artifacts.push_back({{"path", p},
                             {"hash", hash_file((fs::path(cfg.out_dir) / p).string())}});
    j["artifacts"] = std::move(artifacts);
    const std::string mpath = (fs::path(cfg.out_dir) / "manifest.json").string();
    std::ofstream f(mpath);
    f << j.dump(2) << '\n';
    return {mpath};
}

}  // namespace xts

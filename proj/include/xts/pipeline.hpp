#pragma once

#include <map>
#include <string>
#include <vector>

#include "xts/analytics.hpp"
#include "xts/backtest.hpp"
#include "xts/train.hpp"

namespace xts {

// Declarative run configuration: a flat key = value document; CLI flags
// override file keys.
struct PipelineConfig {
    std::string data_path;
    std::string value_column = "value";
    std::string input_kind = "prices";  // "prices" (log-returns taken) or "returns"
    int lags = 6;
    std::string split_date;             // ISO-8601, first out-of-sample target
    std::vector<int> arch;              // hidden layer dims; input/output added
    std::string output_activation = "sigmoid";
    double learning_rate = 0.5;
    int epochs = 5000;
    double tolerance = 1e-8;
    std::uint64_t seed = 1;
    int members = 1;
    int jobs = 1;

    // signals
    std::string preset = "btc-rm";      // btc-rm | fraud | sp-crisis | custom
    double quantile = 1.0 / 7.0;
    int window = 100;
    std::string side = "below";         // below | above | two_sided
    bool absolute = true;
    std::string signal_column = "lag_n";  // "intercept", "lag_<i>", "lag_n", "aggregate"

    // explain
    std::string kind = "lpd";           // lpd | qpd | ipd | layer | xf
    int layer = 1;
    std::string xf = "identity";        // identity | squared | sharpe

    // backtest
    std::string strategy = "sign_rule"; // sign_rule | exposure | long_short
    double periods_per_year = 365.0;

    std::string out_dir = "out";

    // Canonical key=value rendering; hashed into the run manifest.
    std::string canonical() const;
};

PipelineConfig load_config(const std::string& path);
void apply_override(PipelineConfig& cfg, const std::string& key, const std::string& value);

struct RunManifest {
    std::string config_hash;
    std::vector<std::pair<std::string, std::string>> artifacts;  // path, content hash
    std::string tool_version;
    double wall_clock_seconds = 0.0;
};

// Subcommands. Each writes deterministic file artifacts under cfg.out_dir
// and returns the list of files written.
std::vector<std::string> cmd_ingest(const PipelineConfig& cfg);
std::vector<std::string> cmd_train(const PipelineConfig& cfg);
std::vector<std::string> cmd_explain(const PipelineConfig& cfg);
std::vector<std::string> cmd_signals(const PipelineConfig& cfg);
std::vector<std::string> cmd_backtest(const PipelineConfig& cfg);
std::vector<std::string> cmd_report(const PipelineConfig& cfg);

}  // namespace xts

// Command-line front end: ingest -> train -> explain -> signals -> backtest
// -> report, driven by a flat key = value config with flag overrides.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "xts/common.hpp"
#include "xts/pipeline.hpp"

namespace {

// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
int run(const std::string& command, xts::PipelineConfig cfg) {
    std::vector<std::string> written;
    if (command == "ingest") written = xts::cmd_ingest(cfg);
    else if (command == "train") written = xts::cmd_train(cfg);
    else if (command == "explain") written = xts::cmd_explain(cfg);
    else if (command == "signals") written = xts::cmd_signals(cfg);
    else if (command == "backtest") written = xts::cmd_backtest(cfg);
    else if (command == "report") written = xts::cmd_report(cfg);
    else throw xts::UsageError("unknown subcommand: " + command);
    for (const auto& p : written) std::cout << "wrote " << p << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-series explainability for feedforward nets: per-time-point "
                 "input sensitivities (LPD/QPD/IPD), random-net ensembles, quantile "
                 "exit signals and backtests"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "flat key = value config file");
    app.add_option("-s,--set", overrides, "override a config key (key=value), repeatable");

    for (const char* name :
         {"ingest", "train", "explain", "signals", "backtest", "report"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);

    try {
        xts::PipelineConfig cfg;
        if (!config_path.empty()) cfg = xts::load_config(config_path);
        if (const char* env = std::getenv("XTS_OUT_DIR")) cfg.out_dir = env;
        for (const auto& ov : overrides) {
            const auto eq = ov.find('=');
            if (eq == std::string::npos)
                throw xts::UsageError("--set expects key=value, got '" + ov + "'");
            xts::apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
        }
        return run(app.get_subcommands().front()->get_name(), std::move(cfg));
    } catch (const xts::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const xts::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const xts::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

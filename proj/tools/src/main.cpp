#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "simcov/cli/commands.hpp"
#include "simcov/error.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string input;
    bool raw = false;
    bool spearman = false;
    bool prices = false;
    bool forward_fill = false;
    bool emit_panel = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "flat YAML config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_flag("--raw", f.raw, "write full per-repetition / per-constellation JSON");
    cmd->add_flag("--spearman", f.spearman, "Spearman probes instead of Pearson");
    cmd->add_flag("--prices", f.prices, "input cells are prices, not returns");
    cmd->add_flag("--forward-fill", f.forward_fill, "fill empty price cells with the previous price");
    cmd->add_flag("--emit-panel", f.emit_panel, "also write the return panel used");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simcov: similarity-weighted correlation and covariance estimation"};
    app.require_subcommand(1);
    Flags f;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of the three estimators");
    auto* backtest = app.add_subcommand("backtest", "mean-variance backtest on a return panel");
    auto* similarity = app.add_subcommand("similarity", "similarity grid and mean correlation series");
    for (auto* cmd : {simulate, backtest, similarity}) add_common(cmd, f);
    for (auto* cmd : {backtest, similarity}) {
        cmd->add_option("--input", f.input, "returns (or prices) CSV; synthetic panel when omitted")
            ->check(CLI::ExistingFile);
    }
    CLI11_PARSE(app, argc, argv);

    simcov::cli::RunConfig config;
    if (simulate->parsed()) config.command = simcov::cli::Command::simulate;
    if (backtest->parsed()) config.command = simcov::cli::Command::backtest;
    if (similarity->parsed()) config.command = simcov::cli::Command::similarity;

    try {
        if (!f.config.empty()) simcov::cli::apply_config_file(config, f.config);
        if (f.seed) config.seed = *f.seed;
        if (!f.out.empty()) config.out = f.out;
        if (!f.input.empty()) config.input = f.input;
        config.raw = config.raw || f.raw;
        config.emit_panel = config.emit_panel || f.emit_panel;
        config.ingest.prices = config.ingest.prices || f.prices;
        config.ingest.forward_fill = config.ingest.forward_fill || f.forward_fill;
        if (f.spearman) config.set_spearman(true);
        simcov::cli::finalize(config);
    } catch (const simcov::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return simcov::cli::run_command(config, std::cerr);
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simcov/backtest.hpp"
#include "simcov/cli/io.hpp"
#include "simcov/simulation.hpp"

namespace simcov::cli {

enum class Command { simulate, backtest, similarity };
std::string_view to_string(Command c) noexcept;

enum class TableFormat { csv, tsv };

struct RunConfig {
    Command command = Command::simulate;
    std::uint64_t seed = 42;
    std::filesystem::path out = "simcov-out";
    std::optional<std::filesystem::path> input;
    IngestOptions ingest;
    bool raw = false;
    bool emit_panel = false;
    TableFormat format = TableFormat::csv;

    ScenarioSpec scenario = ScenarioSpec::preset(1);
    int scenario_number = 1;
    std::optional<std::size_t> days;  // synthetic panel length
    std::vector<std::size_t> eval_days{1000, 2500, 5000};
    std::size_t repetitions = 100;
    StudyConfig study;

    BacktestConfig backtest;
    std::size_t market_assets = 100;
    std::size_t market_regime_length = 150;

    std::optional<std::size_t> grid_first;
    std::optional<std::size_t> grid_last;

    char delimiter() const noexcept { return format == TableFormat::csv ? ',' : '\t'; }
    bool spearman() const noexcept { return study.flavor == CorrelationFlavor::spearman; }
    void set_spearman(bool on);
};

/// Applies a flat YAML mapping on top of `config`. Unknown keys and
/// mistyped values are parse errors naming the key.
void apply_config_text(RunConfig& config, const std::string& text);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Resolves defaults that depend on the command and checks paths and
/// parameter ranges.
void finalize(RunConfig& config);

}  // namespace simcov::cli

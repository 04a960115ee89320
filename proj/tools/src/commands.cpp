#include "simcov/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "simcov/error.hpp"
#include "simcov/random.hpp"
#include "simcov/similarity.hpp"

namespace simcov::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Output {
public:
    explicit Output(const fs::path& dir) : dir_(dir) { fs::create_directories(dir_); }

    void write(const fs::path& name, const std::string& text) {
        const fs::path path = dir_ / name;
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorCode::invalid_input, "cannot write " + path.string());
        out << text;
        files_.push_back(name.generic_string());
    }

    void write_json(const fs::path& name, const ordered_json& j) { write(name, j.dump(2) + "\n"); }

    const std::vector<std::string>& files() const noexcept { return files_; }
    const fs::path& dir() const noexcept { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

std::string full(double v) { return fmt::format("{:.17g}", v); }

ordered_json manifest(const RunConfig& c, std::size_t diagnostics) {
    ordered_json j;
    j["command"] = std::string(to_string(c.command));
    j["seed"] = c.seed;
    j["input"] = c.input ? ordered_json(c.input->generic_string()) : ordered_json(nullptr);
    j["prices"] = c.ingest.prices;
    j["forward_fill"] = c.ingest.forward_fill;
    j["flavor"] = c.spearman() ? "spearman" : "pearson";
    j["diagnostics"] = diagnostics;
    return j;
}

void finish(Output& out, ordered_json j, std::ostream& log, std::size_t diagnostics) {
    j["files"] = out.files();
    out.write_json("run.json", j);
    log << fmt::format("seed {}; wrote {} files to {}\n", j["seed"].get<std::uint64_t>(), out.files().size(),
                       out.dir().generic_string());
    if (diagnostics > 0) log << fmt::format("{} diagnostics recorded\n", diagnostics);
}

struct LoadedPanel {
    ReturnPanel panel;
    std::size_t filled = 0;
};

LoadedPanel load_input(const RunConfig& c, std::ostream& log) {
    auto result = read_panel(*c.input, c.ingest);
    if (c.ingest.forward_fill) log << fmt::format("forward-filled {} price cells\n", result.filled_cells);
    return {std::move(result.panel), result.filled_cells};
}

}  // namespace

int run_simulation_command(const RunConfig& c, std::ostream& log) {
    Output out(c.out);
    const auto report = run_study(c.scenario, c.eval_days, c.repetitions, c.study, c.seed);
    const char d = c.delimiter();

    std::string table = fmt::format("day{0}group{0}true_rho{0}estimator{0}mean{0}std\n", d);
    for (const auto& row : report.rows) {
        table += fmt::format("{1}{0}{2}{0}{3:.4f}{0}{4}{0}{5:.4f}{0}{6:.4f}\n", d, row.eval_day, row.group,
                             row.true_value, to_string(row.estimator), row.mean, row.stddev);
    }
    out.write(c.format == TableFormat::csv ? "simulation.csv" : "simulation.tsv", table);
    log << table;

    if (c.raw) {
        ordered_json j;
        j["seed"] = c.seed;
        j["scenario"] = c.scenario_number;
        j["repetitions"] = report.repetitions;
        j["completed"] = report.completed;
        j["eval_days"] = report.eval_days;
        auto& rows = j["summary"] = ordered_json::array();
        for (const auto& r : report.rows) {
            rows.push_back({{"day", r.eval_day},
                            {"group", r.group},
                            {"true_rho", r.true_value},
                            {"estimator", to_string(r.estimator)},
                            {"mean", r.mean},
                            {"std", r.stddev},
                            {"samples", r.samples}});
        }
        auto& raw = j["repetitions_data"] = ordered_json::array();
        for (const auto& r : report.raw) {
            raw.push_back({{"repetition", r.repetition},
                           {"seed", r.seed},
                           {"day", r.eval_day},
                           {"group", r.group},
                           {"estimator", to_string(r.estimator)},
                           {"mean", r.mean}});
        }
        j["diagnostics"] = report.diagnostics;
        out.write_json("simulation_raw.json", j);
    }
    if (c.emit_panel) {
        ScenarioSpec spec = c.scenario;
        spec.horizon = *std::max_element(c.eval_days.begin(), c.eval_days.end());
        std::ostringstream panel_text;
        write_panel(panel_text, simulate_returns(spec, derive_seed(c.seed, 0)));
        out.write("returns.csv", panel_text.str());
    }

    std::string diag;
    for (const auto& m : report.diagnostics) diag += m + "\n";
    out.write("diagnostics.txt", diag);
    for (const auto& m : report.diagnostics) log << "diagnostic: " << m << "\n";

    auto j = manifest(c, report.diagnostics.size());
    j["scenario"] = c.scenario_number;
    j["repetitions"] = c.repetitions;
    j["completed"] = report.completed;
    finish(out, j, log, report.diagnostics.size());
    return report.diagnostics.empty() ? 0 : 1;
}

int run_backtest_command(const RunConfig& c, std::ostream& log) {
    LoadedPanel loaded;
    if (c.input) {
        loaded = load_input(c, log);
    } else {
        const auto spec = regime_market_spec(c.market_assets, c.days.value_or(1000), c.market_regime_length, c.seed);
        loaded.panel = simulate_returns(spec, derive_seed(c.seed, 1));
    }
    const ReturnPanel& panel = loaded.panel;
    Output out(c.out);
    const auto report = run_backtest(panel, c.backtest, c.seed);
    const char d = c.delimiter();

    std::string summary = fmt::format("horizon{0}strategy{0}estimator{0}realized_volatility{0}realized_return{0}dates\n", d);
    std::string human = fmt::format("{:>7}  {:<8} {:<11} {:>10} {:>10} {:>6}\n", "horizon", "strategy", "estimator",
                                    "risk", "return", "dates");
    for (const auto& s : report.summary) {
        summary += fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}\n", d, s.horizon, to_string(s.strategy),
                               to_string(s.estimator), full(s.realized_volatility), full(s.realized_return), s.dates);
        human += fmt::format("{:>7}  {:<8} {:<11} {:>10.5f} {:>10.5f} {:>6}\n", s.horizon, to_string(s.strategy),
                             to_string(s.estimator), s.realized_volatility, s.realized_return, s.dates);
    }
    out.write(c.format == TableFormat::csv ? "summary.csv" : "summary.tsv", summary);
    out.write("summary.txt", human);
    log << human;

    // One series file per (horizon, strategy, estimator); entries are grouped in that order.
    std::map<std::string, std::string> series;
    std::vector<std::string> order;
    std::map<std::string, double> growth;
    for (const auto& e : report.entries) {
        const auto name = fmt::format("series/h{}_{}_{}.csv", e.horizon, to_string(e.strategy), to_string(e.estimator));
        if (!series.contains(name)) {
            series[name] = "date,cumulative_return,realized_volatility\n";
            growth[name] = 1.0;
            order.push_back(name);
        }
        growth[name] *= 1.0 + e.realized_return;
        series[name] += fmt::format("{},{},{}\n", format_date(e.time), full(growth[name] - 1.0),
                                    full(e.realized_volatility));
    }
    for (const auto& name : order) out.write(name, series[name]);

    std::string diag = "date,row,constellation,strategy,estimator,message\n";
    for (const auto& x : report.diagnostics) {
        std::string message = x.message;
        std::replace(message.begin(), message.end(), ',', ';');
        diag += fmt::format("{},{},{},{},{},{}\n", format_date(x.time), x.row,
                            x.constellation ? std::to_string(*x.constellation) : "",
                            x.strategy ? std::string(to_string(*x.strategy)) : "", to_string(x.estimator), message);
        log << "diagnostic: " << format_date(x.time) << " " << x.message << "\n";
    }
    out.write("diagnostics.csv", diag);

    if (c.raw) {
        ordered_json j;
        j["seed"] = report.seed;
        j["assets"] = report.assets;
        j["constellations"] = report.constellations;
        auto& entries = j["entries"] = ordered_json::array();
        for (const auto& e : report.entries) {
            ordered_json entry{{"date", format_date(e.time)},
                               {"row", e.row},
                               {"horizon", e.horizon},
                               {"strategy", to_string(e.strategy)},
                               {"estimator", to_string(e.estimator)},
                               {"realized_volatility", e.realized_volatility},
                               {"realized_return", e.realized_return}};
            auto& outcomes = entry["outcomes"] = ordered_json::array();
            for (const auto& o : e.outcomes) {
                outcomes.push_back({{"constellation", o.constellation},
                                    {"realized_volatility", o.realized_volatility},
                                    {"realized_return", o.realized_return},
                                    {"ridge_applied", o.ridge_applied},
                                    {"weights", std::vector<double>(o.weights.begin(), o.weights.end())}});
            }
            entries.push_back(std::move(entry));
        }
        j["ridge_retries"] = report.ridge_retries;
        out.write_json("backtest_raw.json", j);
    }
    if (c.emit_panel) {
        std::ostringstream panel_text;
        write_panel(panel_text, panel);
        out.write("returns.csv", panel_text.str());
    }

    auto j = manifest(c, report.diagnostics.size());
    j["assets"] = panel.cols();
    j["rows"] = panel.rows();
    j["filled_cells"] = loaded.filled;
    j["ridge_retries"] = report.ridge_retries;
    finish(out, j, log, report.diagnostics.size());
    return report.diagnostics.empty() ? 0 : 1;
}

int run_similarity_command(const RunConfig& c, std::ostream& log) {
    LoadedPanel loaded;
    if (c.input) {
        loaded = load_input(c, log);
    } else {
        loaded.panel = simulate_returns(c.scenario, c.seed);
    }
    const ReturnPanel& panel = loaded.panel;
    const std::size_t L = c.study.probe_window;
    if (L < 2 || L >= panel.rows()) {
        throw Error(ErrorCode::invalid_window, fmt::format("probe window {} needs 2 <= L < {}", L, panel.rows()));
    }
    Output out(c.out);
    const auto probes = ProbeSeries::build(panel, L, c.study.flavor, false);
    const std::size_t first = std::max(c.grid_first.value_or(probes.first_time()), probes.first_time());
    const std::size_t last = std::min(c.grid_last.value_or(probes.last_time()), probes.last_time());
    if (first > last) throw Error(ErrorCode::invalid_window, "empty similarity grid range");
    const std::size_t n = last - first + 1;

    Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double z = similarity(probes.correlation(first + i), probes.correlation(first + j));
            grid(Eigen::Index(i), Eigen::Index(j)) = z;
            grid(Eigen::Index(j), Eigen::Index(i)) = z;
        }
    }

    std::string text = "date";
    for (std::size_t j = 0; j < n; ++j) text += "," + format_date(panel.times()[first + j]);
    text += '\n';
    for (std::size_t i = 0; i < n; ++i) {
        text += format_date(panel.times()[first + i]);
        for (std::size_t j = 0; j < n; ++j) {
            text += ',';
            text += full(grid(Eigen::Index(i), Eigen::Index(j)));
        }
        text += '\n';
    }
    out.write("similarity_grid.csv", text);

    const auto mean = mean_pairwise_correlation(panel, L);
    std::string series = "date,mean_correlation\n";
    for (std::size_t k = 0; k < mean.size(); ++k) {
        series += fmt::format("{},{}\n", format_date(panel.times()[L - 1 + k]), full(mean[k]));
    }
    out.write("mean_correlation.csv", series);
    if (c.emit_panel) {
        std::ostringstream panel_text;
        write_panel(panel_text, panel);
        out.write("returns.csv", panel_text.str());
    }

    auto j = manifest(c, 0);
    j["probe_window"] = L;
    j["grid_first"] = format_date(panel.times()[first]);
    j["grid_last"] = format_date(panel.times()[last]);
    j["filled_cells"] = loaded.filled;
    finish(out, j, log, 0);
    return 0;
}

int run_command(const RunConfig& config, std::ostream& log) {
    try {
        switch (config.command) {
            case Command::simulate: return run_simulation_command(config, log);
            case Command::backtest: return run_backtest_command(config, log);
            case Command::similarity: return run_similarity_command(config, log);
        }
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
    } catch (const fs::filesystem_error& e) {
        log << "error: " << e.what() << "\n";
    }
    return 1;
}

}  // namespace simcov::cli

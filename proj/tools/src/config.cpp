#include "simcov/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "simcov/error.hpp"

namespace simcov::cli {

std::string_view to_string(Command c) noexcept {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::backtest: return "backtest";
        case Command::similarity: return "similarity";
    }
    return "unknown";
}

void RunConfig::set_spearman(bool on) {
    study.flavor = on ? CorrelationFlavor::spearman : CorrelationFlavor::pearson;
    backtest.flavor = study.flavor;
}

namespace {

template <typename T>
T as(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw Error(ErrorCode::parse_error, fmt::format("config key '{}' has the wrong type", key));
    }
}

std::size_t as_count(const YAML::Node& node, const std::string& key) {
    const auto v = as<long long>(node, key);
    if (v < 0) throw Error(ErrorCode::parse_error, fmt::format("config key '{}' must be nonnegative", key));
    return std::size_t(v);
}

std::vector<std::size_t> as_counts(const YAML::Node& node, const std::string& key) {
    if (!node.IsSequence()) throw Error(ErrorCode::parse_error, fmt::format("config key '{}' must be a list", key));
    std::vector<std::size_t> out;
    for (const auto& item : node) out.push_back(as_count(item, key));
    return out;
}

template <typename Enum, typename Parse>
std::vector<Enum> as_names(const YAML::Node& node, const std::string& key, Parse parse) {
    if (!node.IsSequence()) throw Error(ErrorCode::parse_error, fmt::format("config key '{}' must be a list", key));
    std::vector<Enum> out;
    for (const auto& item : node) {
        const auto name = as<std::string>(item, key);
        auto v = parse(name);
        if (!v) throw Error(ErrorCode::parse_error, fmt::format("config key '{}': unknown value '{}'", key, name));
        out.push_back(*v);
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const YAML::Node&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"seed", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.seed = as<std::uint64_t>(n, k); }},
        {"out", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.out = as<std::string>(n, k); }},
        {"input", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.input = as<std::string>(n, k); }},
        {"prices", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.ingest.prices = as<bool>(n, k); }},
        {"forward_fill",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.ingest.forward_fill = as<bool>(n, k); }},
        {"raw", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.raw = as<bool>(n, k); }},
        {"emit_panel", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.emit_panel = as<bool>(n, k); }},
        {"spearman", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.set_spearman(as<bool>(n, k)); }},
        {"format",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) {
             const auto v = as<std::string>(n, k);
             if (v == "csv") c.format = TableFormat::csv;
             else if (v == "tsv") c.format = TableFormat::tsv;
             else throw Error(ErrorCode::parse_error, "config key 'format' must be csv or tsv");
         }},
        // scenario is applied first, see apply_config_text
        {"scenario", [](RunConfig&, const YAML::Node&, const std::string&) {}},
        {"n_assets", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.scenario.n_assets = as_count(n, k); }},
        {"days", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.days = as_count(n, k); }},
        {"rho", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.scenario.rho = as<double>(n, k); }},
        {"regimes",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) {
             if (!n.IsSequence()) throw Error(ErrorCode::parse_error, "config key 'regimes' must be a list of pairs");
             c.scenario.regimes.clear();
             for (const auto& pair : n) {
                 if (!pair.IsSequence() || pair.size() != 2) {
                     throw Error(ErrorCode::parse_error, "config key 'regimes' must be a list of pairs");
                 }
                 c.scenario.regimes.emplace_back(as<double>(pair[0], k), as<double>(pair[1], k));
             }
         }},
        {"regime_length",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.scenario.regime_length = as_count(n, k); }},
        {"cross_rho", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.scenario.cross_rho = as<double>(n, k); }},
        {"offset", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.scenario.offset = as<double>(n, k); }},
        {"amplitude", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.scenario.amplitude = as<double>(n, k); }},
        {"period", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.scenario.period = as<double>(n, k); }},
        {"phase_shift",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.scenario.phase_shift = as<double>(n, k); }},
        {"volatilities",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) {
             c.scenario.volatilities = as<std::vector<double>>(n, k);
         }},
        {"eval_days", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.eval_days = as_counts(n, k); }},
        {"repetitions", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.repetitions = as_count(n, k); }},

        {"probe_window",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) {
             c.study.probe_window = c.backtest.probe_window = as_count(n, k);
         }},
        {"top_s",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.study.top_s = c.backtest.top_s = as_count(n, k); }},
        {"history",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.study.history = c.backtest.history = as_count(n, k); }},
        {"unweighted_window",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) {
             c.study.unweighted_window = c.backtest.unweighted_window = as_count(n, k);
         }},
        {"lambda",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.study.lambda = c.backtest.lambda = as<double>(n, k); }},
        {"exponential_window",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) {
             c.study.exponential_window = c.backtest.exponential_window = as_count(n, k);
         }},

        {"strategies",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) {
             c.backtest.strategies = as_names<Strategy>(n, k, parse_strategy);
         }},
        {"estimators",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) {
             c.backtest.estimators = as_names<EstimatorKind>(n, k, parse_estimator);
         }},
        {"mu_window", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.backtest.mu_window = as_count(n, k); }},
        {"target_margin",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.backtest.target_margin = as<double>(n, k); }},
        {"horizons", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.backtest.horizons = as_counts(n, k); }},
        {"constellations",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.backtest.constellations = as_count(n, k); }},
        {"constellation_size",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.backtest.constellation_size = as_count(n, k); }},
        {"first_rebalance",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.backtest.first_rebalance = as_count(n, k); }},
        {"last_rebalance",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.backtest.last_rebalance = as_count(n, k); }},
        {"rebalance_step",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.backtest.rebalance_step = as_count(n, k); }},
        {"mode",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) {
             const auto v = as<std::string>(n, k);
             auto m = parse_mode(v);
             if (!m) throw Error(ErrorCode::parse_error, "config key 'mode' must be rolling or disjoint");
             c.backtest.mode = *m;
         }},
        {"market_assets", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.market_assets = as_count(n, k); }},
        {"market_regime_length",
         [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.market_regime_length = as_count(n, k); }},
        {"grid_first", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.grid_first = as_count(n, k); }},
        {"grid_last", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.grid_last = as_count(n, k); }},
    };
    return table;
}

}  // namespace

void apply_config_text(RunConfig& config, const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::parse_error, fmt::format("config: {}", e.what()));
    }
    if (root.IsNull()) return;
    if (!root.IsMap()) throw Error(ErrorCode::parse_error, "config must be a key-value mapping");

    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!setters().contains(key)) throw Error(ErrorCode::parse_error, fmt::format("unknown config key '{}'", key));
    }
    if (root["scenario"]) {
        const int number = as<int>(root["scenario"], "scenario");
        config.scenario = ScenarioSpec::preset(number);
        config.scenario_number = number;
    }
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        setters().at(key)(config, kv.second, key);
    }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::invalid_input, "cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(config, buf.str());
}

void finalize(RunConfig& config) {
    if (config.input && !std::filesystem::is_regular_file(*config.input)) {
        throw Error(ErrorCode::invalid_input, "input file not found: " + config.input->string());
    }
    if (config.ingest.forward_fill && !config.ingest.prices) {
        throw Error(ErrorCode::invalid_parameter, "--forward-fill requires --prices");
    }
    if (config.input && config.command == Command::simulate) {
        throw Error(ErrorCode::invalid_parameter, "simulate generates its own panels and takes no input");
    }
    switch (config.command) {
        case Command::simulate: {
            if (config.eval_days.empty()) throw Error(ErrorCode::invalid_parameter, "no eval_days configured");
            const auto last = *std::max_element(config.eval_days.begin(), config.eval_days.end());
            config.scenario.horizon = config.days.value_or(std::max<std::size_t>(last, 1));
            break;
        }
        case Command::similarity: config.scenario.horizon = config.days.value_or(600); break;
        case Command::backtest: config.backtest.validate(); break;
    }
    if (!config.input && config.command != Command::backtest) config.scenario.validate();
}

}  // namespace simcov::cli

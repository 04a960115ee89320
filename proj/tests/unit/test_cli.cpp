#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "simcov/cli/commands.hpp"
#include "simcov/cli/config.hpp"
#include "simcov/cli/io.hpp"
#include "simcov/error.hpp"
#include "support.hpp"

using namespace simcov;
using namespace simcov::cli;
namespace fs = std::filesystem;

namespace {

std::string message_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    ADD_FAILURE() << "no error thrown";
    return {};
}

IngestResult parse(const std::string& text, IngestOptions o = {}) {
    std::istringstream in(text);
    return read_panel(in, o);
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("simcov-test-" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> cells(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream s(line);
    for (std::string c; std::getline(s, c, ',');) out.push_back(c);
    return out;
}

RunConfig config_for(Command c, const std::string& yaml, const fs::path& out) {
    RunConfig cfg;
    cfg.command = c;
    apply_config_text(cfg, yaml);
    cfg.out = out;
    finalize(cfg);
    return cfg;
}

}  // namespace

TEST(Dates, RoundTripAndStrictness) {
    EXPECT_EQ(parse_date("1970-01-01"), 0);
    EXPECT_EQ(parse_date("2020-02-29"), 18321);
    EXPECT_EQ(format_date(18321), "2020-02-29");
    for (std::int64_t d : {-1000, 0, 12345, 40000}) EXPECT_EQ(parse_date(format_date(d)), d);
    for (const char* bad : {"2021-02-29", "2020-2-01", "2020/02/01", "20200201", "2020-13-01", " 2020-01-01"}) {
        EXPECT_THROW(parse_date(bad), Error) << bad;
    }
}

TEST(Ingest, WellFormedFile) {
    const auto r = parse(
        "date,A,B,C\n2020-01-01,0.01,0.02,-0.01\n2020-01-02,0,1e-3,0.5\n2020-01-03,1,2,3\n"
        "2020-01-06,-0.25,0.125,7\n2020-01-07,0.1,0.2,0.3\n");
    EXPECT_EQ(r.panel.rows(), 5u);
    EXPECT_EQ(r.panel.cols(), 3u);
    EXPECT_EQ(r.panel.assets()[2], "C");
    EXPECT_EQ(r.panel.times()[3], parse_date("2020-01-06"));
    EXPECT_EQ(r.panel.values()(1, 1), 1e-3);
}

TEST(Ingest, StrictErrorsNameLineAndColumn) {
    auto msg = message_of([] { parse("date,A,B\n2020-01-01,0.1,0.2\n2020-01-02,0.1,\n"); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 3 (B)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("missing"), std::string::npos) << msg;

    msg = message_of([] { parse("date,A\n2020-01-01,abc\n"); });
    EXPECT_NE(msg.find("non-numeric"), std::string::npos);
    msg = message_of([] { parse("date,A\n2020-01-02,1\n2020-01-02,1\n"); });
    EXPECT_NE(msg.find("duplicate"), std::string::npos);
    msg = message_of([] { parse("date,A\n2020-01-02,1\n2020-01-01,1\n"); });
    EXPECT_NE(msg.find("unsorted"), std::string::npos);
    msg = message_of([] { parse("date,A,B\n2020-01-01,1\n"); });
    EXPECT_NE(msg.find("expected 3 cells"), std::string::npos);
    EXPECT_THROW(parse("time,A\n2020-01-01,1\n"), Error);
    EXPECT_THROW(parse("date,A\n"), Error);
    EXPECT_THROW(parse("date,A\n2020-01-01,inf\n"), Error);
    EXPECT_THROW(parse("date,A\n2020-01-01, 1\n"), Error);
}

TEST(Ingest, PricesBecomeSimpleReturns) {
    const auto r = parse("date,A,B\n2020-01-01,100,50\n2020-01-02,110,49\n2020-01-03,99,49\n", {.prices = true});
    ASSERT_EQ(r.panel.rows(), 2u);
    EXPECT_EQ(r.panel.times().front(), parse_date("2020-01-02"));
    EXPECT_NEAR(r.panel.values()(0, 0), 0.1, 1e-15);
    EXPECT_NEAR(r.panel.values()(0, 1), -0.02, 1e-15);
    EXPECT_NEAR(r.panel.values()(1, 0), -0.1, 1e-15);
    EXPECT_EQ(r.panel.values()(1, 1), 0.0);
}

TEST(Ingest, ForwardFillOnlyForPrices) {
    const std::string text = "date,A,B\n2020-01-01,100,50\n2020-01-02,,51\n2020-01-03,110,\n";
    EXPECT_THROW(parse(text, {.prices = true}), Error);
    EXPECT_THROW(parse(text, {.prices = false, .forward_fill = true}), Error);
    const auto r = parse(text, {.prices = true, .forward_fill = true});
    EXPECT_EQ(r.filled_cells, 2u);
    EXPECT_EQ(r.panel.values()(0, 0), 0.0);
    EXPECT_NEAR(r.panel.values()(1, 0), 0.1, 1e-15);
    EXPECT_EQ(r.panel.values()(1, 1), 0.0);
    // nothing to carry forward on the first row
    EXPECT_THROW(parse("date,A\n2020-01-01,\n2020-01-02,1\n", {.prices = true, .forward_fill = true}), Error);
}

TEST(Ingest, WrittenPanelsRoundTripExactly) {
    std::mt19937_64 rng(3);
    const auto p = support::random_panel(50, 4, rng, 0.037);
    std::ostringstream out;
    write_panel(out, p);
    EXPECT_EQ(parse(out.str()).panel, p);
}

TEST(Config, StrictKeysAndTypes) {
    RunConfig c;
    EXPECT_NE(message_of([&] { apply_config_text(c, "nope: 1\n"); }).find("nope"), std::string::npos);
    EXPECT_NE(message_of([&] { apply_config_text(c, "top_s: many\n"); }).find("top_s"), std::string::npos);
    EXPECT_THROW(apply_config_text(c, "horizons: 14\n"), Error);
    EXPECT_THROW(apply_config_text(c, "mode: sometimes\n"), Error);
    EXPECT_THROW(apply_config_text(c, "- 1\n- 2\n"), Error);

    RunConfig d;
    apply_config_text(d, "rho: 0.5\nscenario: 2\nspearman: true\nprobe_window: 30\nstrategies: [mvp]\n");
    EXPECT_EQ(d.scenario.kind, ScenarioKind::regime_switching);
    EXPECT_EQ(d.scenario.rho, 0.5);  // applied after the scenario preset
    EXPECT_EQ(d.study.flavor, CorrelationFlavor::spearman);
    EXPECT_EQ(d.backtest.flavor, CorrelationFlavor::spearman);
    EXPECT_EQ(d.backtest.probe_window, 30u);
    EXPECT_EQ(d.backtest.strategies, std::vector<Strategy>{Strategy::mvp});
}

TEST(Config, FinalizeChecksPaths) {
    RunConfig c;
    c.command = Command::backtest;
    c.input = "/nonexistent/returns.csv";
    EXPECT_THROW(finalize(c), Error);
    RunConfig f;
    f.ingest.forward_fill = true;
    EXPECT_THROW(finalize(f), Error);
}

TEST(SimulateCommand, ScenarioTableShapesAndDeterminism) {
    std::ostringstream log;
    const auto one = config_for(Command::simulate, "scenario: 1\nrepetitions: 2\nseed: 42\n", scratch("sim1"));
    ASSERT_EQ(run_command(one, log), 0) << log.str();
    EXPECT_EQ(lines(one.out / "simulation.csv").size(), 1u + 9u);

    const auto two = config_for(Command::simulate, "scenario: 2\nrepetitions: 2\nseed: 42\nraw: true\n", scratch("sim2"));
    ASSERT_EQ(run_command(two, log), 0) << log.str();
    const auto rows = lines(two.out / "simulation.csv");
    EXPECT_EQ(rows.size(), 1u + 27u);
    EXPECT_EQ(rows.front(), "day,group,true_rho,estimator,mean,std");
    EXPECT_EQ(cells(rows[1]).size(), 6u);
    EXPECT_TRUE(fs::exists(two.out / "simulation_raw.json"));

    auto again = two;
    again.out = scratch("sim2b");
    ASSERT_EQ(run_command(again, log), 0);
    for (const char* f : {"simulation.csv", "simulation_raw.json", "run.json", "diagnostics.txt"}) {
        EXPECT_EQ(slurp(two.out / f), slurp(again.out / f)) << f;
    }
    EXPECT_NE(slurp(two.out / "run.json").find("\"seed\": 42"), std::string::npos);
}

TEST(BacktestCommand, SeriesAlignAndNaiveMatches) {
    std::ostringstream log;
    const auto cfg = config_for(Command::backtest,
                                "market_assets: 20\ndays: 420\nconstellation_size: 10\nconstellations: 2\n"
                                "rebalance_step: 25\nhorizons: [14, 28]\nseed: 3\nestimators: [unweighted, similarity, exponential]\n",
                                scratch("bt"));
    ASSERT_EQ(run_command(cfg, log), 0) << log.str();
    const auto summary = lines(cfg.out / "summary.csv");
    ASSERT_EQ(summary.size(), 1u + 2u * 3u * 3u);

    std::map<std::string, std::string> naive;
    for (std::size_t k = 1; k < summary.size(); ++k) {
        const auto c = cells(summary[k]);
        if (c[1] == "naive") naive[c[0] + c[2]] = c[3] + c[4] + c[5];
    }
    EXPECT_EQ(naive["14unweighted"], naive["14similarity"]);
    EXPECT_EQ(naive["28similarity"], naive["28exponential"]);

    for (std::size_t k = 1; k < summary.size(); ++k) {
        const auto c = cells(summary[k]);
        const auto series = lines(cfg.out / "series" / ("h" + c[0] + "_" + c[1] + "_" + c[2] + ".csv"));
        EXPECT_EQ(series.size() - 1, std::stoul(c[5]));
        EXPECT_EQ(series.front(), "date,cumulative_return,realized_volatility");
    }
    EXPECT_EQ(lines(cfg.out / "diagnostics.csv").size(), 1u);

    auto again = cfg;
    again.out = scratch("bt2");
    ASSERT_EQ(run_command(again, log), 0);
    EXPECT_EQ(slurp(cfg.out / "summary.csv"), slurp(again.out / "summary.csv"));
}

TEST(BacktestCommand, DiagnosticsGiveNonzeroExit) {
    std::mt19937_64 rng(4);
    Eigen::MatrixXd v = support::gaussian(200, 5, rng) * 0.01;
    v.setZero();  // a flat market: the covariance stays singular even with the ridge
    const auto dir = scratch("btbad");
    fs::create_directories(dir);
    write_panel(dir / "in.csv", support::panel_from(v));
    std::ostringstream log;
    auto cfg = config_for(Command::backtest,
                          "estimators: [exponential]\nexponential_window: 50\nconstellation_size: 5\n"
                          "constellations: 1\nhorizons: [14]\nrebalance_step: 20\ninput: " +
                              (dir / "in.csv").string() + "\n",
                          dir / "out");
    EXPECT_EQ(run_command(cfg, log), 1);
    EXPECT_GT(lines(cfg.out / "diagnostics.csv").size(), 1u);
}

TEST(SimilarityCommand, GridIsSymmetricWithZeroDiagonalAndShowsRegimes) {
    std::ostringstream log;
    const auto cfg = config_for(Command::similarity, "scenario: 2\ndays: 450\nseed: 8\nemit_panel: true\n", scratch("simgrid"));
    ASSERT_EQ(run_command(cfg, log), 0) << log.str();
    const auto rows = lines(cfg.out / "similarity_grid.csv");
    const std::size_t n = rows.size() - 1;
    ASSERT_EQ(n, 450u - 49u);
    std::vector<std::vector<double>> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = cells(rows[i + 1]);
        ASSERT_EQ(c.size(), n + 1);
        for (std::size_t j = 0; j < n; ++j) g[i].push_back(std::stod(c[j + 1]));
    }
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_EQ(g[i][i], 0.0);
        for (std::size_t j = 0; j < n; ++j) ASSERT_EQ(g[i][j], g[j][i]);
    }
    // probes fully inside one regime: row r covers days r-49..r; regime k spans [100k, 100k+99]
    auto mean_block = [&](std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
        double s = 0;
        std::size_t count = 0;
        for (std::size_t a = a0; a <= a1; ++a) {
            for (std::size_t b = b0; b <= b1; ++b) {
                if (a != b) s += g[a - 49][b - 49], ++count;
            }
        }
        return s / double(count);
    };
    const double within = mean_block(49, 99, 349, 399);  // days 0-99 and 300-399 share a regime
    const double cross = mean_block(49, 99, 249, 299);   // days 200-299 are in the opposite regime
    EXPECT_LT(within, cross);

    const auto mean = lines(cfg.out / "mean_correlation.csv");
    EXPECT_EQ(mean.size(), 1u + n);
    EXPECT_EQ(mean.front(), "date,mean_correlation");

    // emitted panel round-trips and reproduces the grid
    EXPECT_EQ(read_panel(cfg.out / "returns.csv").panel, simulate_returns(cfg.scenario, cfg.seed));
}

#include "simcov/cli/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <vector>

#include <fmt/format.h>
#include <iterator>

#include "simcov/error.hpp"

namespace simcov::cli {

namespace {

[[noreturn]] void fail_at(std::size_t line, const std::string& msg) {
    throw Error(ErrorCode::parse_error, fmt::format("line {}: {}", line, msg));
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

bool parse_unsigned(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

std::int64_t parse_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_unsigned(text.substr(0, 4), y) ||
        !parse_unsigned(text.substr(5, 2), m) || !parse_unsigned(text.substr(8, 2), d)) {
        throw Error(ErrorCode::parse_error, fmt::format("'{}' is not a YYYY-MM-DD date", text));
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) throw Error(ErrorCode::parse_error, fmt::format("'{}' is not a calendar date", text));
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

std::string format_date(std::int64_t days) {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
    return fmt::format("{:04d}-{:02d}-{:02d}", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()));
}

IngestResult read_panel(std::istream& in, const IngestOptions& options) {
    if (options.forward_fill && !options.prices) {
        throw Error(ErrorCode::invalid_parameter, "forward fill applies to price input only");
    }
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line()) throw Error(ErrorCode::parse_error, "empty input");
    const auto header = split(line);
    if (header.front() != "date") fail_at(1, "first header cell must be 'date'");
    if (header.size() < 2) fail_at(1, "no asset columns");
    std::vector<std::string> assets;
    for (std::size_t j = 1; j < header.size(); ++j) {
        if (header[j].empty()) fail_at(1, fmt::format("column {}: empty asset identifier", j + 1));
        assets.emplace_back(header[j]);
    }
    const std::size_t n = assets.size();

    std::vector<std::int64_t> times;
    std::vector<double> cells;
    std::vector<double> last(n, 0.0);
    std::vector<bool> seen(n, false);
    std::size_t filled = 0;
    bool blank_seen = false;
    while (next_line()) {
        if (line.empty()) {
            blank_seen = true;
            continue;
        }
        if (blank_seen) fail_at(lineno, "data after a blank line");
        const auto row = split(line);
        if (row.size() != n + 1) {
            fail_at(lineno, fmt::format("expected {} cells, found {}", n + 1, row.size()));
        }
        std::int64_t t = 0;
        try {
            t = parse_date(row[0]);
        } catch (const Error& e) {
            fail_at(lineno, fmt::format("column 1: {}", e.what()));
        }
        if (!times.empty() && t == times.back()) fail_at(lineno, "duplicate date " + std::string(row[0]));
        if (!times.empty() && t < times.back()) fail_at(lineno, "unsorted date " + std::string(row[0]));
        times.push_back(t);
        for (std::size_t j = 0; j < n; ++j) {
            const auto cell = row[j + 1];
            auto v = parse_number(cell);
            if (!v && cell.empty() && options.forward_fill && seen[j]) {
                v = last[j];
                ++filled;
            }
            if (!v) {
                fail_at(lineno, fmt::format("column {} ({}): {} cell '{}'", j + 2, assets[j],
                                            cell.empty() ? "missing" : "non-numeric", cell));
            }
            if (options.prices && !(*v > 0.0)) {
                fail_at(lineno, fmt::format("column {} ({}): price must be positive", j + 2, assets[j]));
            }
            last[j] = *v;
            seen[j] = true;
            cells.push_back(*v);
        }
    }
    if (times.empty()) throw Error(ErrorCode::parse_error, "no data rows");

    const std::size_t rows = times.size();
    Eigen::MatrixXd values{Eigen::Index(rows), Eigen::Index(n)};
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < n; ++j) values(Eigen::Index(i), Eigen::Index(j)) = cells[i * n + j];
    }
    if (!options.prices) return {ReturnPanel(std::move(times), std::move(assets), std::move(values)), 0};

    if (rows < 2) throw Error(ErrorCode::parse_error, "price input needs at least two rows");
    Eigen::MatrixXd returns = values.bottomRows(Eigen::Index(rows - 1)).cwiseQuotient(values.topRows(Eigen::Index(rows - 1)));
    returns.array() -= 1.0;
    times.erase(times.begin());
    return {ReturnPanel(std::move(times), std::move(assets), std::move(returns)), filled};
}

IngestResult read_panel(const std::filesystem::path& path, const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::invalid_input, "cannot open " + path.string());
    return read_panel(in, options);
}

void write_panel(std::ostream& out, const ReturnPanel& panel) {
    std::string buf = "date";
    for (const auto& a : panel.assets()) buf += "," + a;
    buf += '\n';
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        buf += format_date(panel.times()[i]);
        for (std::size_t j = 0; j < panel.cols(); ++j) {
            fmt::format_to(std::back_inserter(buf), ",{:.17g}", panel.values()(Eigen::Index(i), Eigen::Index(j)));
        }
        buf += '\n';
    }
    out << buf;
}

void write_panel(const std::filesystem::path& path, const ReturnPanel& panel) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::invalid_input, "cannot write " + path.string());
    write_panel(out, panel);
}

}  // namespace simcov::cli

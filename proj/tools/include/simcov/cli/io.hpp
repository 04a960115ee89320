#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "simcov/panel.hpp"

namespace simcov::cli {

/// Days since 1970-01-01 for a strict YYYY-MM-DD string. Throws parse_error.
std::int64_t parse_date(std::string_view text);
std::string format_date(std::int64_t days);

struct IngestOptions {
    bool prices = false;        // cells are prices, converted to simple returns
    bool forward_fill = false;  // empty price cells repeat the previous price
};

struct IngestResult {
    ReturnPanel panel;
    std::size_t filled_cells = 0;
};

IngestResult read_panel(std::istream& in, const IngestOptions& options = {});
IngestResult read_panel(const std::filesystem::path& path, const IngestOptions& options = {});

/// Writes the panel in the ingest grammar with 17 significant digits, so
/// reading it back reproduces the panel exactly.
void write_panel(std::ostream& out, const ReturnPanel& panel);
void write_panel(const std::filesystem::path& path, const ReturnPanel& panel);

}  // namespace simcov::cli

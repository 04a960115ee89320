#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace simcov {

/// Inclusive range of panel rows [first, last].
struct RowRange {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t size() const noexcept { return last >= first ? last - first + 1 : 0; }

    /// The `length` rows ending at `last` (inclusive).
    static RowRange ending_at(std::size_t last, std::size_t length);
};

/// T x N panel of simple returns. Times are integer day numbers
/// (days since 1970-01-01 for ingested data), strictly increasing.
class ReturnPanel {
public:
    ReturnPanel() = default;
    ReturnPanel(std::vector<std::int64_t> times, std::vector<std::string> assets, Eigen::MatrixXd values);

    std::size_t rows() const noexcept { return times_.size(); }
    std::size_t cols() const noexcept { return assets_.size(); }

    const std::vector<std::int64_t>& times() const noexcept { return times_; }
    const std::vector<std::string>& assets() const noexcept { return assets_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

    /// Rows of `range` as a block view; throws invalid-window when out of bounds.
    Eigen::Block<const Eigen::MatrixXd> window(RowRange range) const;

    ReturnPanel select_columns(std::span<const std::size_t> columns) const;

    friend bool operator==(const ReturnPanel& a, const ReturnPanel& b) {
        return a.times_ == b.times_ && a.assets_ == b.assets_ && a.values_ == b.values_;
    }

private:
    std::vector<std::int64_t> times_;
    std::vector<std::string> assets_;
    Eigen::MatrixXd values_;
};

}  // namespace simcov

#include "simcov/panel.hpp"

#include <set>

#include "simcov/error.hpp"

namespace simcov {

RowRange RowRange::ending_at(std::size_t last, std::size_t length) {
    if (length == 0 || length > last + 1) {
        throw Error(ErrorCode::invalid_window, "cannot take " + std::to_string(length) + " rows ending at row " +
                                                   std::to_string(last));
    }
    return RowRange{last + 1 - length, last};
}

ReturnPanel::ReturnPanel(std::vector<std::int64_t> times, std::vector<std::string> assets, Eigen::MatrixXd values)
    : times_(std::move(times)), assets_(std::move(assets)), values_(std::move(values)) {
    if (values_.rows() != Eigen::Index(times_.size()) || values_.cols() != Eigen::Index(assets_.size())) {
        throw Error(ErrorCode::invalid_input, "panel values are " + std::to_string(values_.rows()) + "x" +
                                                  std::to_string(values_.cols()) + ", expected " +
                                                  std::to_string(times_.size()) + "x" +
                                                  std::to_string(assets_.size()));
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (times_[i] <= times_[i - 1]) {
            throw Error(ErrorCode::invalid_input, "panel times not strictly increasing at row " + std::to_string(i));
        }
    }
    std::set<std::string> seen;
    for (const auto& a : assets_) {
        if (!seen.insert(a).second) {
            throw Error(ErrorCode::invalid_input, "duplicate asset identifier '" + a + "'");
        }
    }
    if (!values_.allFinite()) {
        throw Error(ErrorCode::invalid_input, "panel contains non-finite values");
    }
}

Eigen::Block<const Eigen::MatrixXd> ReturnPanel::window(RowRange range) const {
    if (range.last < range.first || range.last >= rows()) {
        throw Error(ErrorCode::invalid_window, "rows [" + std::to_string(range.first) + ", " +
                                                   std::to_string(range.last) + "] outside panel of " +
                                                   std::to_string(rows()) + " rows");
    }
    return values_.middleRows(Eigen::Index(range.first), Eigen::Index(range.size()));
}

ReturnPanel ReturnPanel::select_columns(std::span<const std::size_t> columns) const {
    std::vector<std::string> names;
    Eigen::MatrixXd vals(values_.rows(), Eigen::Index(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k] >= cols()) {
            throw Error(ErrorCode::invalid_input, "column " + std::to_string(columns[k]) + " out of range");
        }
        names.push_back(assets_[columns[k]]);
        vals.col(Eigen::Index(k)) = values_.col(Eigen::Index(columns[k]));
    }
    return ReturnPanel(times_, std::move(names), std::move(vals));
}

}  // namespace simcov

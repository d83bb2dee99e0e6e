#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "elicit/error.hpp"
#include "elicit/stats.hpp"

namespace elicit::stats {

namespace detail {

void require_numeric(const Dataset& dataset, std::size_t column_index) {
    if (column_index >= dataset.column_count()) {
        throw Error(ErrorCode::OutOfBounds, "column index " + std::to_string(column_index));
    }
    if (dataset.column(column_index).inferred_type != ColumnType::numeric) {
        throw Error(ErrorCode::NonNumericColumn, dataset.column(column_index).name);
    }
}

std::vector<double> bin_edges(double lo, double hi, std::size_t bins) {
    std::vector<double> edges(bins + 1);
    if (lo == hi) {
        edges = {lo - 0.5, hi + 0.5};
        return edges;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < bins; ++i) edges[i] = lo + width * static_cast<double>(i);
    edges[bins] = hi;
    return edges;
}

std::size_t bin_of(double value, const std::vector<double>& edges) noexcept {
    const std::size_t bins = edges.size() - 1;
    const double width = (edges.back() - edges.front()) / static_cast<double>(bins);
    auto idx = static_cast<std::size_t>(std::clamp(std::floor((value - edges.front()) / width), 0.0,
                                                   static_cast<double>(bins - 1)));
    // Settle rounding at the edges so the bin interval really contains value.
    while (idx > 0 && value < edges[idx]) --idx;
    while (idx + 1 < bins && value >= edges[idx + 1]) ++idx;
    return idx;
}

} // namespace detail

std::size_t default_bin_count(const Dataset& dataset, std::size_t column_index) {
    detail::require_numeric(dataset, column_index);
    std::set<double> distinct;
    for (std::size_t r = 0; r < dataset.row_count(); ++r) {
        const auto& cell = dataset.cell(r, column_index);
        if (!cell.is_null) distinct.insert(*cell.parsed);
        if (distinct.size() >= kDefaultBinCount) break;
    }
    return std::clamp<std::size_t>(distinct.size(), 1, kDefaultBinCount);
}

namespace serial {

HistogramSpec histogram(const Dataset& dataset, std::size_t column_index, std::optional<std::size_t> bin_count) {
    detail::require_numeric(dataset, column_index);
    std::size_t bins = bin_count ? *bin_count : default_bin_count(dataset, column_index);
    if (bins == 0) throw Error(ErrorCode::InvalidArgument, "bin_count must be at least 1");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t present = 0;
    for (std::size_t r = 0; r < dataset.row_count(); ++r) {
        const auto& cell = dataset.cell(r, column_index);
        if (cell.is_null) continue;
        lo = std::min(lo, *cell.parsed);
        hi = std::max(hi, *cell.parsed);
        ++present;
    }
    if (present == 0) throw Error(ErrorCode::EmptyColumn, dataset.column(column_index).name);
    if (lo == hi) bins = 1;

    HistogramSpec spec;
    spec.column_index = column_index;
    spec.bin_count = bins;
    spec.bin_edges = detail::bin_edges(lo, hi, bins);
    spec.counts.assign(bins, 0);
    spec.matching_row_ids.assign(bins, {});
    for (std::size_t r = 0; r < dataset.row_count(); ++r) {
        const auto& cell = dataset.cell(r, column_index);
        if (cell.is_null) continue;
        const auto b = detail::bin_of(*cell.parsed, spec.bin_edges);
        ++spec.counts[b];
        spec.matching_row_ids[b].push_back(r);
    }
    return spec;
}

std::vector<ScatterPoint> scatter_points(const Dataset& dataset, std::size_t col_x, std::size_t col_y) {
    detail::require_numeric(dataset, col_x);
    detail::require_numeric(dataset, col_y);
    std::vector<ScatterPoint> points;
    for (std::size_t r = 0; r < dataset.row_count(); ++r) {
        const auto& x = dataset.cell(r, col_x);
        const auto& y = dataset.cell(r, col_y);
        if (x.is_null || y.is_null) continue;
        points.push_back({r, *x.parsed, *y.parsed});
    }
    return points;
}

std::vector<std::size_t> rows_in_range(const Dataset& dataset, std::size_t column_index, double low, double high) {
    detail::require_numeric(dataset, column_index);
    if (!(low <= high)) throw Error(ErrorCode::InvalidArgument, "low must not exceed high");
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < dataset.row_count(); ++r) {
        const auto& cell = dataset.cell(r, column_index);
        if (!cell.is_null && low <= *cell.parsed && *cell.parsed <= high) rows.push_back(r);
    }
    return rows;
}

} // namespace serial

} // namespace elicit::stats

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include "elicit/error.hpp"
#include "elicit/stats.hpp"

namespace elicit::stats {

namespace {

constexpr std::int32_t kSkip = -1;

// Compacts the rows flagged in `keep` into ascending order.
std::vector<std::size_t> compact(const std::vector<std::uint8_t>& keep) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < keep.size(); ++r) {
        if (keep[r]) rows.push_back(r);
    }
    return rows;
}

} // namespace

HistogramSpec histogram(const Dataset& dataset, std::size_t column_index, std::optional<std::size_t> bin_count) {
    detail::require_numeric(dataset, column_index);
    std::size_t bins = bin_count ? *bin_count : default_bin_count(dataset, column_index);
    if (bins == 0) throw Error(ErrorCode::InvalidArgument, "bin_count must be at least 1");

    const auto n = static_cast<std::int64_t>(dataset.row_count());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::int64_t present = 0;

#pragma omp parallel for reduction(min : lo) reduction(max : hi) reduction(+ : present) schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
        const auto& cell = dataset.cell(static_cast<std::size_t>(r), column_index);
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

    std::vector<std::int32_t> bin_of_row(static_cast<std::size_t>(n), kSkip);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
        const auto& cell = dataset.cell(static_cast<std::size_t>(r), column_index);
        if (!cell.is_null) {
            bin_of_row[static_cast<std::size_t>(r)] = static_cast<std::int32_t>(detail::bin_of(*cell.parsed, spec.bin_edges));
        }
    }

    // Gather stays serial so row ids come out in ascending order per bin.
    spec.counts.assign(bins, 0);
    spec.matching_row_ids.assign(bins, {});
    for (std::size_t r = 0; r < bin_of_row.size(); ++r) {
        if (bin_of_row[r] == kSkip) continue;
        const auto b = static_cast<std::size_t>(bin_of_row[r]);
        ++spec.counts[b];
        spec.matching_row_ids[b].push_back(r);
    }
    return spec;
}

std::vector<ScatterPoint> scatter_points(const Dataset& dataset, std::size_t col_x, std::size_t col_y) {
    detail::require_numeric(dataset, col_x);
    detail::require_numeric(dataset, col_y);
    const auto n = static_cast<std::int64_t>(dataset.row_count());
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
        const auto row = static_cast<std::size_t>(r);
        keep[row] = !dataset.cell(row, col_x).is_null && !dataset.cell(row, col_y).is_null;
    }
    std::vector<ScatterPoint> points;
    for (auto r : compact(keep)) points.push_back({r, *dataset.cell(r, col_x).parsed, *dataset.cell(r, col_y).parsed});
    return points;
}

std::vector<std::size_t> rows_in_range(const Dataset& dataset, std::size_t column_index, double low, double high) {
    detail::require_numeric(dataset, column_index);
    if (!(low <= high)) throw Error(ErrorCode::InvalidArgument, "low must not exceed high");
    const auto n = static_cast<std::int64_t>(dataset.row_count());
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
        const auto& cell = dataset.cell(static_cast<std::size_t>(r), column_index);
        keep[static_cast<std::size_t>(r)] = !cell.is_null && low <= *cell.parsed && *cell.parsed <= high;
    }
    return compact(keep);
}

} // namespace elicit::stats

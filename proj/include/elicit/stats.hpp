#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "elicit/domain.hpp"

namespace elicit::stats {

// Equal-width bins over [min, max] of the non-null values. Bins are half-open
// [e_i, e_{i+1}) except the last, which is closed on the right. A column whose
// values are all equal gets one bin [v - 0.5, v + 0.5].
struct HistogramSpec {
    std::size_t column_index = 0;
    std::size_t bin_count = 0;
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::vector<std::vector<std::size_t>> matching_row_ids;

    friend bool operator==(const HistogramSpec&, const HistogramSpec&) = default;
};

struct ScatterPoint {
    std::size_t row_id = 0;
    double x = 0;
    double y = 0;

    friend bool operator==(const ScatterPoint&, const ScatterPoint&) = default;
};

inline constexpr std::size_t kDefaultBinCount = 20;

// 20, clamped to the number of distinct non-null values (at least 1).
std::size_t default_bin_count(const Dataset& dataset, std::size_t column_index);

// OpenMP kernels. Results are identical to the serial reference below,
// including ordering of row ids.
HistogramSpec histogram(const Dataset& dataset, std::size_t column_index,
                        std::optional<std::size_t> bin_count = std::nullopt);
std::vector<ScatterPoint> scatter_points(const Dataset& dataset, std::size_t col_x, std::size_t col_y);
// Ascending row ids whose value v satisfies low <= v <= high.
std::vector<std::size_t> rows_in_range(const Dataset& dataset, std::size_t column_index, double low, double high);

// Single-threaded reference implementations, kept for tests and benchmarks.
namespace serial {
HistogramSpec histogram(const Dataset& dataset, std::size_t column_index,
                        std::optional<std::size_t> bin_count = std::nullopt);
std::vector<ScatterPoint> scatter_points(const Dataset& dataset, std::size_t col_x, std::size_t col_y);
std::vector<std::size_t> rows_in_range(const Dataset& dataset, std::size_t column_index, double low, double high);
} // namespace serial

namespace detail {
// Shared argument checks; throw Error on violation.
void require_numeric(const Dataset& dataset, std::size_t column_index);
std::vector<double> bin_edges(double lo, double hi, std::size_t bins);
std::size_t bin_of(double value, const std::vector<double>& edges) noexcept;
} // namespace detail

} // namespace elicit::stats

#include <doctest.h>

#include <random>

#include "elicit/error.hpp"
#include "elicit/ingest.hpp"
#include "elicit/stats.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace elicit;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::ProviderError;
}

} // namespace

TEST_CASE("histogram matches the oracle on random tables") {
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 100; ++round) {
        const std::size_t rows = 1 + rng() % 200;
        const std::size_t cols = 1 + rng() % 10;
        const auto ds = ingest::parse_tabular(testing::random_numeric_csv(rng, rows, cols));
        for (std::size_t c = 0; c < cols; ++c) {
            if (ds.column(c).inferred_type != ColumnType::numeric) continue;
            if (ds.column(c).null_count == rows) continue;
            const std::optional<std::size_t> bins =
                rng() % 2 ? std::optional<std::size_t>{} : std::optional<std::size_t>{1 + rng() % 30};
            const auto spec = stats::histogram(ds, c, bins);
            CHECK(oracle::histogram_mismatch(ds, c, spec) == "");
            CHECK(spec == stats::serial::histogram(ds, c, bins));
        }
    }
}

TEST_CASE("default bin count") {
    const auto few = ingest::parse_tabular("v\n1\n2\n2\n3\nNA\n");
    CHECK(stats::default_bin_count(few, 0) == 3);
    std::string many = "v\n";
    for (int i = 0; i < 100; ++i) many += std::to_string(i) + "\n";
    CHECK(stats::default_bin_count(ingest::parse_tabular(many), 0) == stats::kDefaultBinCount);
    CHECK(stats::histogram(ingest::parse_tabular(many), 0).bin_count == 20);
}

TEST_CASE("constant column gets one unit-wide bin") {
    const auto ds = ingest::parse_tabular("v\n4\n4\nNA\n4\n");
    const auto spec = stats::histogram(ds, 0, 7);
    CHECK(spec.bin_count == 1);
    CHECK(spec.bin_edges == std::vector<double>{3.5, 4.5});
    CHECK(spec.counts == std::vector<std::size_t>{3});
    CHECK(spec.matching_row_ids[0] == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("maximum lands in the last bin") {
    const auto ds = ingest::parse_tabular("v\n0\n5\n10\n");
    const auto spec = stats::histogram(ds, 0, 2);
    CHECK(spec.bin_edges == std::vector<double>{0, 5, 10});
    CHECK(spec.matching_row_ids[0] == std::vector<std::size_t>{0});
    CHECK(spec.matching_row_ids[1] == std::vector<std::size_t>{1, 2});
}

TEST_CASE("rows_in_range matches a linear scan") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> bound(-60, 60);
    for (int round = 0; round < 100; ++round) {
        const std::size_t rows = 1 + rng() % 200;
        const auto ds = ingest::parse_tabular(testing::random_numeric_csv(rng, rows, 2));
        if (ds.column(0).inferred_type != ColumnType::numeric) continue;
        double a = bound(rng), b = bound(rng);
        if (a > b) std::swap(a, b);
        if (round % 5 == 0) a = b;
        CHECK(stats::rows_in_range(ds, 0, a, b) == oracle::linear_range(ds, 0, a, b));
        CHECK(stats::serial::rows_in_range(ds, 0, a, b) == oracle::linear_range(ds, 0, a, b));
    }
}

TEST_CASE("bin ranges recover the bin rows") {
    std::mt19937_64 rng(5);
    const auto ds = ingest::parse_tabular(testing::random_numeric_csv(rng, 150, 1));
    const auto spec = stats::histogram(ds, 0, 8);
    for (std::size_t i = 0; i < spec.bin_count; ++i) {
        auto rows = stats::rows_in_range(ds, 0, spec.bin_edges[i], spec.bin_edges[i + 1]);
        if (i + 1 < spec.bin_count) {
            // The range is closed, so drop rows sitting on the next edge.
            std::erase_if(rows, [&](std::size_t r) { return *ds.cell(r, 0).parsed == spec.bin_edges[i + 1]; });
        }
        CHECK(rows == spec.matching_row_ids[i]);
    }
}

TEST_CASE("scatter pairs skip nulls and keep row order") {
    std::mt19937_64 rng(17);
    const auto ds = ingest::parse_tabular(testing::random_numeric_csv(rng, 120, 3));
    const auto points = stats::scatter_points(ds, 0, 2);
    std::vector<stats::ScatterPoint> expected;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (ds.cell(r, 0).is_null || ds.cell(r, 2).is_null) continue;
        expected.push_back({r, *ds.cell(r, 0).parsed, *ds.cell(r, 2).parsed});
    }
    CHECK(points == expected);
    CHECK(points == stats::serial::scatter_points(ds, 0, 2));
}

TEST_CASE("argument errors") {
    const auto ds = ingest::parse_tabular(testing::sample_csv());
    CHECK(code_of([&] { stats::histogram(ds, 0); }) == ErrorCode::NonNumericColumn);
    CHECK(code_of([&] { stats::histogram(ds, 2); }) == ErrorCode::NonNumericColumn);
    CHECK(code_of([&] { stats::histogram(ds, 9); }) == ErrorCode::OutOfBounds);
    CHECK(code_of([&] { stats::histogram(ds, 1, 0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { stats::rows_in_range(ds, 1, 5, 1); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { stats::scatter_points(ds, 1, 3); }) == ErrorCode::NonNumericColumn);

    // Parsing never yields an all-null numeric column; build one by hand.
    const Dataset empty("d", "d", {{"v", ColumnType::numeric, 2}}, {{"NA", std::nullopt, true}, {"", std::nullopt, true}});
    CHECK(code_of([&] { stats::histogram(empty, 0); }) == ErrorCode::EmptyColumn);
    CHECK(stats::rows_in_range(empty, 0, 0, 1).empty());
}

// Column kernels at the ingestion limit: OpenMP versions against the serial
// reference. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <sstream>

#include "elicit/ingest.hpp"
#include "elicit/stats.hpp"

namespace {

const elicit::Dataset& table(std::size_t rows) {
    static std::map<std::size_t, elicit::Dataset> cache;
    auto it = cache.find(rows);
    if (it != cache.end()) return it->second;
    std::mt19937_64 rng(rows);
    std::normal_distribution<double> value(20.0, 8.0);
    std::ostringstream csv;
    csv << "a,b,c\n";
    for (std::size_t r = 0; r < rows; ++r) {
        if (r % 17 == 0) {
            csv << "NA";
        } else {
            csv << value(rng);
        }
        csv << "," << value(rng) << "," << value(rng) << "\n";
    }
    return cache.emplace(rows, elicit::ingest::parse_tabular(csv.str())).first->second;
}

void BM_histogram_omp(benchmark::State& state) {
    const auto& ds = table(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(elicit::stats::histogram(ds, 0, 20));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_histogram_serial(benchmark::State& state) {
    const auto& ds = table(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(elicit::stats::serial::histogram(ds, 0, 20));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_scatter_omp(benchmark::State& state) {
    const auto& ds = table(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(elicit::stats::scatter_points(ds, 0, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_scatter_serial(benchmark::State& state) {
    const auto& ds = table(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(elicit::stats::serial::scatter_points(ds, 0, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_rows_in_range_omp(benchmark::State& state) {
    const auto& ds = table(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(elicit::stats::rows_in_range(ds, 2, 15.0, 25.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_rows_in_range_serial(benchmark::State& state) {
    const auto& ds = table(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(elicit::stats::serial::rows_in_range(ds, 2, 15.0, 25.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_histogram_omp)->Arg(1000)->Arg(10000);
BENCHMARK(BM_histogram_serial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_scatter_omp)->Arg(1000)->Arg(10000);
BENCHMARK(BM_scatter_serial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_rows_in_range_omp)->Arg(1000)->Arg(10000);
BENCHMARK(BM_rows_in_range_serial)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();

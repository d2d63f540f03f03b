// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "phaseret/certify.hpp"
#include "phaseret/frames.hpp"

using namespace phaseret;

namespace {

void BM_cp_serial(benchmark::State& st) {
  const Frame f = gen_random_frame(6, static_cast<Index>(st.range(0)), Field::Real, 1);
  for (auto _ : st) benchmark::DoNotOptimize(reference::complement_property(f, {}));
}

void BM_cp_parallel(benchmark::State& st) {
  const Frame f = gen_random_frame(6, static_cast<Index>(st.range(0)), Field::Real, 1);
  for (auto _ : st) benchmark::DoNotOptimize(complement_property(f, {}));
  st.counters["threads"] = omp_get_max_threads();
}

void BM_spark_serial(benchmark::State& st) {
  const Frame f = gen_full_spark(4, static_cast<Index>(st.range(0)), Field::Complex);
  for (auto _ : st) benchmark::DoNotOptimize(reference::full_spark(f, {}));
}

void BM_spark_parallel(benchmark::State& st) {
  const Frame f = gen_full_spark(4, static_cast<Index>(st.range(0)), Field::Complex);
  for (auto _ : st) benchmark::DoNotOptimize(full_spark(f, {}));
  st.counters["threads"] = omp_get_max_threads();
}

// A real frame with the complement property: every restart runs to budget.
void BM_restarts(benchmark::State& st) {
  const auto p = ProjectionFamily::rank_one(gen_full_spark(3, 6, Field::Real));
  SearchConfig cfg;
  cfg.restarts = 32;
  cfg.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(pr_falsifier(p, cfg));
}

}  // namespace

BENCHMARK(BM_cp_serial)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cp_parallel)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spark_serial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spark_parallel)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_restarts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

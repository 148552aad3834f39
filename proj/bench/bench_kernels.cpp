// Serial reference against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include "byzg/exploration.hpp"
#include "byzg/harness.hpp"

using namespace byzg;

namespace {

const std::vector<PortGraph>& graphs4() {
  static const auto g = all_graphs_up_to(4);
  return g;
}

void BM_VerifyUxsSerial(benchmark::State& st) {
  const auto& u = uxs_for(4);
  for (auto _ : st) benchmark::DoNotOptimize(verify_uxs(u, graphs4()));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(graphs4().size()));
}

void BM_VerifyUxsParallel(benchmark::State& st) {
  const auto& u = uxs_for(4);
  for (auto _ : st) benchmark::DoNotOptimize(verify_uxs_parallel(u, graphs4()));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(graphs4().size()));
}

const Expansion& known_corpus() {
  static const auto e = expand(load_corpus(BYZG_SOURCE_DIR "/corpus/known.json"));
  return e;
}

void run_known(benchmark::State& st, bool parallel) {
  BatchOptions o;
  o.parallel = parallel;
  for (auto _ : st) benchmark::DoNotOptimize(run_batch(known_corpus().entries, o));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(known_corpus().entries.size()));
}

void BM_KnownBatchSerial(benchmark::State& st) { run_known(st, false); }
void BM_KnownBatchParallel(benchmark::State& st) { run_known(st, true); }

}  // namespace

BENCHMARK(BM_VerifyUxsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyUxsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnownBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnownBatchParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

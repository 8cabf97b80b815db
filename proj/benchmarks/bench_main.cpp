#include <benchmark/benchmark.h>

#include "divgrad/disorder.hpp"
#include "divgrad/dynamics.hpp"
#include "divgrad/operator.hpp"
#include "divgrad/prufer.hpp"
#include "divgrad/spectral.hpp"
#include "divgrad/transfer.hpp"

using namespace divgrad;

namespace {

const CoefficientDistribution kDist = CoefficientDistribution::uniform(1.0, 2.0);

void BM_TransferProduct(benchmark::State& st) {
  const auto n = st.range(0);
  const auto r = sample_sequence(kDist, 1, {0, n + 1});
  for (auto _ : st) benchmark::DoNotOptimize(transfer_product(r, n, cplx(0.01, 1e-3)).log_norm());
  st.SetItemsProcessed(st.iterations() * n);
}
BENCHMARK(BM_TransferProduct)->Arg(1 << 12)->Arg(1 << 16);

void BM_PruferEvolver(benchmark::State& st) {
  const auto n = st.range(0);
  const auto r = sample_sequence(kDist, 2, {0, n});
  const auto f = frame(0.01, kappa(kDist));
  for (auto _ : st) {
    PruferEvolver ev(f);
    for (std::int64_t i = 0; i < n; ++i) ev.step(r.at(i));
    benchmark::DoNotOptimize(ev.log_rho_ratio());
  }
  st.SetItemsProcessed(st.iterations() * n);
}
BENCHMARK(BM_PruferEvolver)->Arg(1 << 16);

void BM_SturmCount(benchmark::State& st) {
  const auto N = st.range(0);
  const auto op = assemble(sample_sequence(kDist, 3, {0, N}), N);
  for (auto _ : st) benchmark::DoNotOptimize(count_eigenvalues_below(op, 0.05));
  st.SetItemsProcessed(st.iterations() * N);
}
BENCHMARK(BM_SturmCount)->Arg(3000)->Arg(100000);

void BM_GreenColumn(benchmark::State& st) {
  const auto N = st.range(0);
  const auto op = centered_window(centered_realization(kDist, 4, N), N);
  for (auto _ : st) benchmark::DoNotOptimize(green_column(op, cplx(0.01, 1e-3), 0).values.data());
  st.SetItemsProcessed(st.iterations() * N);
}
BENCHMARK(BM_GreenColumn)->Arg(512)->Arg(1 << 15);

}  // namespace
BENCHMARK_MAIN();

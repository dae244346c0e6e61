#include <benchmark/benchmark.h>

#include "tlink/rng.hpp"
#include "tlink/tensor.hpp"

using namespace tlink;

namespace {

DenseTensor random_tensor(RngStream& rng, std::vector<Index> dims) {
  DenseTensor t(std::move(dims));
  for (cxd& v : t.data()) v = rng.cgaussian();
  return t;
}

void BM_GeneralizedUnfold(benchmark::State& state) {
  const Index n = state.range(0);
  RngStream rng = make_stream(1, "bench");
  const DenseTensor t = random_tensor(rng, {n, n, 4, 4});
  const ModeSpec spec({1, 3}, {2, 4});
  for (auto _ : state) {
    Mat u = generalized_unfold(t, spec);
    benchmark::DoNotOptimize(u.data());
  }
  state.SetItemsProcessed(state.iterations() * t.size());
}
BENCHMARK(BM_GeneralizedUnfold)->Arg(16)->Arg(64)->Arg(128);

void BM_Contract2(benchmark::State& state) {
  const Index n = state.range(0);
  RngStream rng = make_stream(2, "bench");
  const DenseTensor h = random_tensor(rng, {n, n, 2, 2});
  const DenseTensor x = random_tensor(rng, {n, 2, 8});
  for (auto _ : state) {
    DenseTensor y = contract2(h, {2, 4}, x, {1, 2});
    benchmark::DoNotOptimize(y.data().data());
  }
}
BENCHMARK(BM_Contract2)->Arg(16)->Arg(64)->Arg(128);

void BM_KhatriRao(benchmark::State& state) {
  const Index n = state.range(0);
  RngStream rng = make_stream(3, "bench");
  Mat a(2, 2 * n), b(n, 2 * n);
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) a(i, j) = rng.cgaussian();
    for (Index i = 0; i < b.rows(); ++i) b(i, j) = rng.cgaussian();
  }
  for (auto _ : state) {
    Mat kr = khatri_rao(a, b);
    benchmark::DoNotOptimize(kr.data());
  }
}
BENCHMARK(BM_KhatriRao)->Arg(32)->Arg(128);

void BM_SlicewiseMultiply(benchmark::State& state) {
  RngStream rng = make_stream(4, "bench");
  const DenseTensor a = random_tensor(rng, {8, 8, state.range(0)});
  const DenseTensor b = random_tensor(rng, {8, 8, state.range(0)});
  for (auto _ : state) {
    DenseTensor t = slicewise_multiply(a, b);
    benchmark::DoNotOptimize(t.data().data());
  }
}
BENCHMARK(BM_SlicewiseMultiply)->Arg(16)->Arg(128);

}  // namespace

#include <benchmark/benchmark.h>

#include "tlink/coding.hpp"
#include "tlink/linalg.hpp"
#include "tlink/receivers.hpp"
#include "tlink/rng.hpp"

using namespace tlink;

namespace {

struct Setup {
  FrameGrid grid;
  FreqChannelViews views;
  Constellation c{ConstellationKind::Qam, 4};
  DenseTensor y_uncoded;
  DenseTensor y_rc;
  Mat c_bar;
};

Setup make_setup(Index n) {
  Setup s;
  RngStream ch_rng = make_stream(10, "bench-ch");
  RngStream grid_rng = make_stream(10, "bench-grid");
  RngStream code_rng = make_stream(10, "bench-code");
  RngStream noise_rng = make_stream(10, "bench-noise");
  const ChannelRealization ch =
      draw_channel(ch_rng, PowerDelayProfile::pedestrian_a(), 2, 2, n);
  s.views = freq_channel_views(ch);
  s.grid = build_grid(grid_rng, n, 2, 5, {5, 5}, s.c);
  s.y_uncoded = contract2(s.views.tensor, {2, 4}, signal_tensor(s.grid), {1, 2});
  CodedSignal cs = rc_encode(code_rng, s.grid, 2, s.c);
  s.c_bar = cs.c_bar;
  s.y_rc = contract2(s.views.tensor, {2, 4}, cs.x, {1, 2});
  for (cxd& v : s.y_uncoded.data()) v += 0.05 * noise_rng.cgaussian();
  for (cxd& v : s.y_rc.data()) v += 0.05 * noise_rng.cgaussian();
  return s;
}

void BM_ZfReceiver(benchmark::State& state) {
  const Setup s = make_setup(state.range(0));
  for (auto _ : state) {
    ReceiverOutput out = zf_receiver(s.y_uncoded, s.views);
    benchmark::DoNotOptimize(out.s_hat.data());
  }
}
BENCHMARK(BM_ZfReceiver)->Arg(32)->Arg(128);

void BM_Ilsp(benchmark::State& state) {
  const Setup s = make_setup(state.range(0));
  const StopRule stop;
  for (auto _ : state) {
    ReceiverOutput out = ilsp(s.y_uncoded, s.views, stop, s.c, s.grid);
    benchmark::DoNotOptimize(out.s_hat.data());
  }
}
BENCHMARK(BM_Ilsp)->Arg(32)->Arg(128);

void BM_RcKrAls(benchmark::State& state) {
  const Setup s = make_setup(state.range(0));
  const StopRule stop;
  for (auto _ : state) {
    ReceiverOutput out = rc_kr_als_receiver(s.y_rc, s.views, stop, s.c, s.grid);
    benchmark::DoNotOptimize(out.s_hat.data());
  }
}
BENCHMARK(BM_RcKrAls)->Arg(32)->Arg(128);

void BM_Lskrf(benchmark::State& state) {
  RngStream rng = make_stream(11, "bench");
  const Index r = state.range(0);
  Mat y(5 * 4, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < y.rows(); ++i) y(i, j) = rng.cgaussian();
  for (auto _ : state) {
    KrfResult f = lskrf(y, 5, 4);
    benchmark::DoNotOptimize(f.left.data());
  }
}
BENCHMARK(BM_Lskrf)->Arg(64)->Arg(256);

}  // namespace

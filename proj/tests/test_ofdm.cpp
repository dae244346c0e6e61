#include <doctest.h>

#include "oracles.hpp"
#include "tlink/coding.hpp"
#include "tlink/ofdm.hpp"

using namespace tlink;
using namespace tlink::testing;

namespace {

RngStream rng = make_stream(1006, "test_ofdm");

DenseTensor through_chain(const DenseTensor& x, const ChannelRealization& ch,
                          Index cp) {
  return ofdm_receive(apply_channel(ofdm_transmit(x, cp), ch, cp), cp,
                      x.extent(1));
}

}  // namespace

TEST_CASE("flat channel passes symbols through") {
  PowerDelayProfile flat;
  flat.delays = {0};
  flat.powers = {1.0};
  RngStream local = make_stream(1, "flat");
  ChannelRealization ch = draw_channel(local, flat, 1, 1, 8);
  const cxd g = ch.gain(0, 0, 0);
  const DenseTensor x = random_tensor(rng, {8, 1, 3});
  const DenseTensor y = through_chain(x, ch, 2);
  double err = 0.0;
  for (Index sc = 0; sc < 8; ++sc)
    for (Index f = 0; f < 3; ++f)
      err += std::abs(y(sc, Index{0}, f) - g * x(sc, Index{0}, f));
  CHECK(err < 1e-12);
}

TEST_CASE("time-domain chain equals the double contraction") {
  const PowerDelayProfile pdp = PowerDelayProfile::pedestrian_a();
  SUBCASE("three-way signal tensor") {
    const ChannelRealization ch = draw_channel(rng, pdp, 3, 2, 16);
    const FreqChannelViews v = freq_channel_views(ch);
    const DenseTensor x = random_tensor(rng, {16, 2, 4});
    const DenseTensor y = through_chain(x, ch, 6);
    const DenseTensor model = contract2(v.tensor, {2, 4}, x, {1, 2});
    CHECK(rel_diff(y, model) < 1e-10);
  }
  SUBCASE("four-way spread signal tensor") {
    const ChannelRealization ch = draw_channel(rng, pdp, 2, 2, 16);
    const FreqChannelViews v = freq_channel_views(ch);
    const DenseTensor x = random_tensor(rng, {16, 2, 3, 2});
    const DenseTensor y = through_chain(x, ch, 8);
    const DenseTensor model = contract2(v.tensor, {2, 4}, x, {1, 2});
    CHECK(rel_diff(y, model) < 1e-10);
  }
}

TEST_CASE("received tensor factor structure") {
  const PowerDelayProfile pdp = PowerDelayProfile::pedestrian_a();
  const Constellation qam4(ConstellationKind::Qam, 4);
  const Index n = 8, m_t = 2, m_r = 3, k = 4, cp = 6;
  RngStream grid_rng = make_stream(2, "grid");
  const FrameGrid grid = build_grid(grid_rng, n, m_t, k, {4, k}, qam4);
  const ChannelRealization ch = draw_channel(rng, pdp, m_r, m_t, n);
  const FreqChannelViews v = freq_channel_views(ch);
  const Mat sel = kronecker(Mat::Ones(1, m_t), Mat::Identity(n, n));

  SUBCASE("uncoded: three-factor reconstruction") {
    const DenseTensor y = through_chain(signal_tensor(grid), ch, cp);
    DenseTensor rec = DenseTensor::identity(3, n * m_t);
    rec = n_mode_product(rec, sel, 1);
    rec = n_mode_product(rec, v.h_tilde, 2);
    rec = n_mode_product(rec, grid.symbols, 3);
    CHECK(rel_diff(y, rec) < 1e-10);
  }
  SUBCASE("spread: four-factor reconstruction") {
    const CodedSignal cs = kr_encode(grid, m_t);
    const DenseTensor y = through_chain(cs.x, ch, cp);
    const Mat sel_bar = kronecker(Mat::Identity(n, n), Mat::Ones(1, m_t));
    DenseTensor rec = DenseTensor::identity(4, n * m_t);
    rec = n_mode_product(rec, sel_bar, 1);
    rec = n_mode_product(rec, v.h_bar, 2);
    rec = n_mode_product(rec, cs.s_bar, 3);
    rec = n_mode_product(rec, cs.c_bar, 4);
    CHECK(rel_diff(y, rec) < 1e-10);
  }
}

TEST_CASE("noise behaviour") {
  SUBCASE("zero variance is the identity") {
    const DenseTensor x = random_tensor(rng, {4, 2, 2});
    RngStream noise = make_stream(3, "noise");
    const DenseTensor y = add_awgn(noise, x, 0.0);
    CHECK((y - x).norm() == 0.0);
  }
  SUBCASE("variance calibration within two percent") {
    DenseTensor zero({1000, 1000});
    RngStream noise = make_stream(4, "noise");
    const double sigma2 = 2.5;
    const DenseTensor y = add_awgn(noise, zero, sigma2);
    double power = 0.0;
    for (const cxd& v : y.data()) power += std::norm(v);
    power /= static_cast<double>(y.size());
    CHECK(power == doctest::Approx(sigma2).epsilon(0.02));
  }
}

TEST_CASE("prefix shorter than the delay spread is rejected") {
  const PowerDelayProfile pdp = PowerDelayProfile::pedestrian_a();  // span 5
  const ChannelRealization ch = draw_channel(rng, pdp, 1, 1, 8);
  const DenseTensor x = random_tensor(rng, {8, 1, 2});
  CHECK_THROWS_AS(apply_channel(ofdm_transmit(x, 3), ch, 3),
                  std::invalid_argument);
  CHECK_NOTHROW(apply_channel(ofdm_transmit(x, 4), ch, 4));
}

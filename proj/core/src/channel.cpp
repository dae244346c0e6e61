#include "tlink/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tlink/linalg.hpp"

namespace tlink {

void PowerDelayProfile::validate() const {
  if (delays.empty() || delays.size() != powers.size())
    throw std::invalid_argument("profile needs matching delay/power lists");
  double total = 0.0;
  for (size_t i = 0; i < delays.size(); ++i) {
    if (delays[i] < 0) throw std::invalid_argument("negative tap delay");
    if (i > 0 && delays[i] <= delays[i - 1])
      throw std::invalid_argument("tap delays must be strictly increasing");
    if (powers[i] <= 0.0) throw std::invalid_argument("tap powers must be positive");
    total += powers[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("tap powers must sum to one");
}

PowerDelayProfile PowerDelayProfile::from_ns_db(
    const std::vector<double>& delays_ns, const std::vector<double>& powers_db,
    double sample_rate_hz) {
  if (delays_ns.size() != powers_db.size() || delays_ns.empty())
    throw std::invalid_argument("profile needs matching delay/power lists");
  if (sample_rate_hz <= 0.0) throw std::invalid_argument("bad sample rate");
  PowerDelayProfile pdp;
  double total = 0.0;
  for (size_t i = 0; i < delays_ns.size(); ++i) {
    const Index d = static_cast<Index>(
        std::llround(delays_ns[i] * 1e-9 * sample_rate_hz));
    const double p = std::pow(10.0, powers_db[i] / 10.0);
    if (!pdp.delays.empty() && d == pdp.delays.back()) {
      // two listed paths landing on the same sample merge
      pdp.powers.back() += p;
    } else {
      pdp.delays.push_back(d);
      pdp.powers.push_back(p);
    }
    total += p;
  }
  for (double& p : pdp.powers) p /= total;
  pdp.validate();
  return pdp;
}

PowerDelayProfile PowerDelayProfile::pedestrian_a(double sample_rate_hz) {
  return from_ns_db({0.0, 110.0, 190.0, 410.0}, {0.0, -9.7, -19.2, -22.8},
                    sample_rate_hz);
}

Mat dft_columns(Index n, Index cols) {
  Mat f(n, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < n; ++r) {
      const double t = -2.0 * std::numbers::pi * static_cast<double>(r) *
                       static_cast<double>(c) / static_cast<double>(n);
      f(r, c) = cxd(std::cos(t), std::sin(t));
    }
  return f;
}

Mat unitary_dft(Index n) {
  return dft_columns(n, n) / std::sqrt(static_cast<double>(n));
}

ChannelRealization draw_channel(RngStream& rng, const PowerDelayProfile& pdp,
                                Index m_r, Index m_t, Index n) {
  pdp.validate();
  if (m_r < 1 || m_t < 1 || n < 1) throw std::invalid_argument("bad dimensions");
  ChannelRealization ch;
  ch.n = n;
  ch.m_r = m_r;
  ch.m_t = m_t;
  const Index span = pdp.tap_span();
  ch.taps = Mat::Zero(span, m_r * m_t);
  for (Index link = 0; link < m_r * m_t; ++link)
    for (size_t tap = 0; tap < pdp.delays.size(); ++tap)
      ch.taps(pdp.delays[tap], link) = std::sqrt(pdp.powers[tap]) * rng.cgaussian();
  ch.freq = dft_columns(n, span) * ch.taps;
  return ch;
}

FreqChannelViews views_from_h_tilde(const Mat& h_tilde, Index n, Index m_t) {
  const Index m_r = h_tilde.rows();
  if (h_tilde.cols() != n * m_t)
    throw std::invalid_argument("h_tilde has wrong column count");
  FreqChannelViews v;
  v.n = n;
  v.m_r = m_r;
  v.m_t = m_t;
  v.h_tilde = h_tilde;
  v.h_bar = reorder_to_bar(h_tilde, n, m_t);
  v.tensor = DenseTensor({n, n, m_r, m_t});
  for (Index tx = 0; tx < m_t; ++tx)
    for (Index rx = 0; rx < m_r; ++rx)
      for (Index sc = 0; sc < n; ++sc)
        v.tensor(sc, sc, rx, tx) = h_tilde(rx, sc + n * tx);
  return v;
}

FreqChannelViews views_from_h_bar(const Mat& h_bar, Index n, Index m_t) {
  return views_from_h_tilde(reorder_to_tilde(h_bar, n, m_t), n, m_t);
}

FreqChannelViews freq_channel_views(const ChannelRealization& ch) {
  Mat h_tilde(ch.m_r, ch.n * ch.m_t);
  for (Index tx = 0; tx < ch.m_t; ++tx)
    for (Index rx = 0; rx < ch.m_r; ++rx)
      for (Index sc = 0; sc < ch.n; ++sc)
        h_tilde(rx, sc + ch.n * tx) = ch.freq(sc, rx + ch.m_r * tx);
  return views_from_h_tilde(h_tilde, ch.n, ch.m_t);
}

Eigen::MatrixXd antenna_permutation(Index n, Index m_t) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n * m_t, m_t * n);
  for (Index sc = 0; sc < n; ++sc)
    for (Index tx = 0; tx < m_t; ++tx)
      p(sc + n * tx, tx + m_t * sc) = 1.0;
  return p;
}

Mat reorder_to_bar(const Mat& tilde_cols, Index n, Index m_t) {
  if (tilde_cols.cols() != n * m_t)
    throw std::invalid_argument("column count mismatch");
  Mat out(tilde_cols.rows(), tilde_cols.cols());
  for (Index sc = 0; sc < n; ++sc)
    for (Index tx = 0; tx < m_t; ++tx)
      out.col(tx + m_t * sc) = tilde_cols.col(sc + n * tx);
  return out;
}

Mat reorder_to_tilde(const Mat& bar_cols, Index n, Index m_t) {
  if (bar_cols.cols() != n * m_t)
    throw std::invalid_argument("column count mismatch");
  Mat out(bar_cols.rows(), bar_cols.cols());
  for (Index sc = 0; sc < n; ++sc)
    for (Index tx = 0; tx < m_t; ++tx)
      out.col(sc + n * tx) = bar_cols.col(tx + m_t * sc);
  return out;
}

FreqChannelViews pilot_channel_estimate(const DenseTensor& y,
                                        const FrameGrid& grid, Index num_taps) {
  if (y.order() != 3) throw std::invalid_argument("expected an (N, M_R, K) tensor");
  const Index n = y.extent(1), m_r = y.extent(2), k = y.extent(3);
  if (n != grid.n || k != grid.k)
    throw std::invalid_argument("observation does not match the grid");
  const Mat f = dft_columns(n, num_taps);
  const auto frames = grid.pilot_frames();
  Mat h_tilde(m_r, n * grid.m_t);

  for (Index tx = 0; tx < grid.m_t; ++tx) {
    const auto subs = grid.pilot_subcarriers(tx);
    if (static_cast<Index>(subs.size()) < num_taps)
      throw std::invalid_argument(
          "fewer pilot subcarriers than channel taps; estimate is rank deficient");
    const Index rows = static_cast<Index>(subs.size() * frames.size());
    Mat a(rows, num_taps);
    Mat b(rows, m_r);
    Index r = 0;
    for (Index kp : frames)
      for (Index sc : subs) {
        const cxd pilot = grid.symbols(kp, grid.col(sc, tx));
        a.row(r) = pilot * f.row(sc);
        for (Index rx = 0; rx < m_r; ++rx) b(r, rx) = y(sc, rx, kp);
        ++r;
      }
    const Mat taps = pinv(a) * b;          // num_taps x m_r
    const Mat link_freq = f * taps;        // n x m_r
    for (Index rx = 0; rx < m_r; ++rx)
      h_tilde.block(rx, n * tx, 1, n) = link_freq.col(rx).transpose();
  }
  return views_from_h_tilde(h_tilde, n, grid.m_t);
}

}  // namespace tlink

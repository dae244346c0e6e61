#include "tlink/ofdm.hpp"

#include <stdexcept>

namespace tlink {

namespace {

Index batch_size(const DenseTensor& t, int from_mode) {
  Index b = 1;
  for (int m = from_mode; m <= t.order(); ++m) b *= t.extent(m);
  return b;
}

}  // namespace

DenseTensor ofdm_transmit(const DenseTensor& x_freq, Index cp_len) {
  if (x_freq.order() < 2) throw std::invalid_argument("need at least two modes");
  const Index n = x_freq.extent(1);
  if (cp_len < 0 || cp_len > n) throw std::invalid_argument("bad cyclic prefix length");
  const Index batch = batch_size(x_freq, 2);
  const Mat ifft = unitary_dft(n).adjoint();

  std::vector<Index> out_dims = x_freq.dims();
  out_dims[0] = n + cp_len;
  DenseTensor out(out_dims);

  Eigen::Map<const Mat> in(x_freq.data().data(), n, batch);
  const Mat time = ifft * in;
  Eigen::Map<Mat> o(out.data().data(), n + cp_len, batch);
  o.topRows(cp_len) = time.bottomRows(cp_len);
  o.bottomRows(n) = time;
  return out;
}

DenseTensor apply_channel(const DenseTensor& tx_time,
                          const ChannelRealization& ch, Index cp_len) {
  if (tx_time.order() < 2) throw std::invalid_argument("need at least two modes");
  if (tx_time.extent(2) != ch.m_t)
    throw std::invalid_argument("mode 2 must match the transmit antenna count");
  const Index span = ch.tap_span();
  if (cp_len < span - 1)
    throw std::invalid_argument(
        "cyclic prefix shorter than the channel delay spread");
  const Index len = tx_time.extent(1);
  const Index batch = batch_size(tx_time, 3);

  std::vector<Index> out_dims = tx_time.dims();
  out_dims[1] = ch.m_r;
  DenseTensor out(out_dims);

  const cxd* in = tx_time.data().data();
  cxd* o = out.data().data();
  // Blocks are processed independently: with cp_len >= span-1 the tail of a
  // block only reaches the next block's discarded prefix.
  for (Index b = 0; b < batch; ++b)
    for (Index rx = 0; rx < ch.m_r; ++rx) {
      cxd* dst = o + (b * ch.m_r + rx) * len;
      for (Index tx = 0; tx < ch.m_t; ++tx) {
        const cxd* src = in + (b * ch.m_t + tx) * len;
        const auto h = ch.taps.col(rx + ch.m_r * tx);
        for (Index tap = 0; tap < span; ++tap) {
          const cxd w = h(tap);
          if (w == cxd(0.0, 0.0)) continue;
          for (Index t = tap; t < len; ++t) dst[t] += w * src[t - tap];
        }
      }
    }
  return out;
}

DenseTensor add_awgn(RngStream& rng, const DenseTensor& signal, double sigma2) {
  if (sigma2 < 0.0) throw std::invalid_argument("negative noise variance");
  if (sigma2 == 0.0) return signal;
  DenseTensor out = signal;
  const double sigma = std::sqrt(sigma2);
  for (cxd& v : out.data()) v += sigma * rng.cgaussian();
  return out;
}

DenseTensor ofdm_receive(const DenseTensor& rx_time, Index cp_len, Index n) {
  if (rx_time.order() < 2) throw std::invalid_argument("need at least two modes");
  if (rx_time.extent(1) != n + cp_len)
    throw std::invalid_argument("block length must be N plus the prefix length");
  const Index batch = batch_size(rx_time, 2);
  const Mat fft = unitary_dft(n);

  std::vector<Index> out_dims = rx_time.dims();
  out_dims[0] = n;
  DenseTensor out(out_dims);
  Eigen::Map<const Mat> in(rx_time.data().data(), n + cp_len, batch);
  Eigen::Map<Mat> o(out.data().data(), n, batch);
  o = fft * in.bottomRows(n);
  return out;
}

}  // namespace tlink

#pragma once

#include <vector>

#include "tlink/frame.hpp"
#include "tlink/rng.hpp"
#include "tlink/tensor.hpp"

namespace tlink {

/// Sample-spaced tapped delay line profile. Powers are linear and sum to one.
struct PowerDelayProfile {
  std::vector<Index> delays;   // strictly increasing, >= 0, in samples
  std::vector<double> powers;  // linear, sum 1

  /// Delay span in samples; taps live at indices [0, tap_span).
  Index tap_span() const { return delays.empty() ? 0 : delays.back() + 1; }

  void validate() const;

  /// Rounds nanosecond delays to the sample grid and normalizes dB powers.
  static PowerDelayProfile from_ns_db(const std::vector<double>& delays_ns,
                                      const std::vector<double>& powers_db,
                                      double sample_rate_hz);

  /// ITU-R Pedestrian A ({0,110,190,410} ns, {0,-9.7,-19.2,-22.8} dB) at the
  /// given sampling rate (default 10 MHz -> sample delays {0,1,2,4}).
  static PowerDelayProfile pedestrian_a(double sample_rate_hz = 1e7);
};

/// One frequency-selective MIMO channel draw: time-domain taps per
/// receive/transmit antenna pair plus the per-link frequency response over
/// the N subcarriers.
struct ChannelRealization {
  Index n = 0, m_r = 0, m_t = 0;
  /// tap_span x (m_r * m_t), column (m_r + M_R*m_t); includes zero rows at
  /// off-profile delays.
  Mat taps;
  /// n x (m_r * m_t): per-link response, the first tap_span plain DFT
  /// columns applied to the taps.
  Mat freq;

  Index tap_span() const { return taps.rows(); }
  /// Frequency response of link (rx, tx) on subcarrier sc.
  cxd gain(Index sc, Index rx, Index tx) const {
    return freq(sc, rx + m_r * tx);
  }
};

/// The three frequency-domain channel arrangements used by the receivers:
/// the 4-way tensor with diagonal subcarrier slices, the subcarrier-fastest
/// matrix (columns sc + N*tx) and the antenna-fastest matrix (columns
/// tx + M_T*sc).
struct FreqChannelViews {
  Index n = 0, m_r = 0, m_t = 0;
  DenseTensor tensor;  // N x N x M_R x M_T
  Mat h_tilde;         // M_R x (N*M_T)
  Mat h_bar;           // M_R x (M_T*N)

  /// M_R x M_T channel matrix of one subcarrier.
  Mat subcarrier(Index sc) const { return h_bar.middleCols(sc * m_t, m_t); }
};

/// First `cols` columns of the (unnormalized) N-point DFT matrix.
Mat dft_columns(Index n, Index cols);
/// Unitary N-point DFT matrix.
Mat unitary_dft(Index n);

/// i.i.d. circularly-symmetric Gaussian taps with per-tap variance equal to
/// the profile power; expected total power one per link.
ChannelRealization draw_channel(RngStream& rng, const PowerDelayProfile& pdp,
                                Index m_r, Index m_t, Index n);

FreqChannelViews freq_channel_views(const ChannelRealization& ch);
FreqChannelViews views_from_h_tilde(const Mat& h_tilde, Index n, Index m_t);
FreqChannelViews views_from_h_bar(const Mat& h_bar, Index n, Index m_t);

/// Permutation P (N*M_T by M_T*N) that reorders block-of-N columns into
/// block-of-M_T columns: X*P swaps the roles of the fast index, and
/// kron(ones(1,M_T), I_N) * P == kron(I_N, ones(1,M_T)).
Eigen::MatrixXd antenna_permutation(Index n, Index m_t);

/// Column reorder equivalent to right-multiplying by antenna_permutation.
Mat reorder_to_bar(const Mat& tilde_cols, Index n, Index m_t);
/// Inverse reorder (right-multiply by the permutation transpose).
Mat reorder_to_tilde(const Mat& bar_cols, Index n, Index m_t);

/// Least-squares time-domain channel estimation from comb pilots, then DFT
/// interpolation to all N subcarriers. y is the (N, M_R, K) frequency-domain
/// observation with the grid's pilots in it; num_taps is the assumed channel
/// length. Throws if a link has fewer pilot subcarriers than num_taps.
FreqChannelViews pilot_channel_estimate(const DenseTensor& y,
                                        const FrameGrid& grid, Index num_taps);

}  // namespace tlink

#pragma once

#include "tlink/channel.hpp"
#include "tlink/rng.hpp"
#include "tlink/tensor.hpp"

namespace tlink {

/// Unitary IFFT over mode 1 plus cyclic prefix: (N, ...) -> (N+cp, ...).
/// Every trailing-mode combination is one OFDM block.
DenseTensor ofdm_transmit(const DenseTensor& x_freq, Index cp_len);

/// Linear convolution of each block with the channel taps, summed over
/// transmit antennas (mode 2). Requires cp_len >= maximum channel delay so
/// the discarded prefix absorbs all inter-block interference.
DenseTensor apply_channel(const DenseTensor& tx_time,
                          const ChannelRealization& ch, Index cp_len);

/// Adds circularly-symmetric white Gaussian noise of per-entry variance
/// sigma2; sigma2 == 0 returns the input unchanged without consuming draws.
DenseTensor add_awgn(RngStream& rng, const DenseTensor& signal, double sigma2);

/// Cyclic prefix removal plus unitary FFT over mode 1: (N+cp, ...) -> (N, ...).
DenseTensor ofdm_receive(const DenseTensor& rx_time, Index cp_len, Index n);

}  // namespace tlink

#pragma once

#include "tlink/constellation.hpp"
#include "tlink/frame.hpp"
#include "tlink/rng.hpp"
#include "tlink/tensor.hpp"

namespace tlink {

/// Unit-modulus DFT (Vandermonde) code, entry (q,m) = exp(-2*pi*i*q*m / Q),
/// satisfying C^H C = Q I exactly. Requires a spreading factor equal to the
/// transmit antenna count.
Mat vandermonde_code(Index q, Index m_t);

/// Spread transmit signal. The tensor x (N x M_T x K x Q) folds the
/// Khatri-Rao structure [x]_([2,1],[4,3]) = (s_bar kr c_bar)^T, where s_bar
/// is the antenna-fastest symbol matrix (K x M_T*N) and c_bar stacks one
/// Q x M_T code block per subcarrier.
struct CodedSignal {
  DenseTensor x;
  Mat s_bar;  // K x (M_T*N)
  Mat c_bar;  // Q x (M_T*N)
};

/// Khatri-Rao coding with the same Vandermonde block on every subcarrier.
CodedSignal kr_encode(const FrameGrid& grid, Index q);

/// Random coding: row one of every code block is all ones (the scale
/// anchor), rows 2..Q carry i.i.d. data symbols.
CodedSignal rc_encode(RngStream& rng, const FrameGrid& grid, Index q,
                      const Constellation& c);

/// Uncoded transmit tensor S (N x M_T x K) from the grid.
DenseTensor signal_tensor(const FrameGrid& grid);

}  // namespace tlink

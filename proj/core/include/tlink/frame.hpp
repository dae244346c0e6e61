#pragma once

#include <cstdint>
#include <vector>

#include "tlink/constellation.hpp"
#include "tlink/rng.hpp"
#include "tlink/tensor.hpp"

namespace tlink {

enum class CellKind : std::uint8_t { Data, Pilot, Null };

/// Comb-type pilot arrangement: antenna a transmits pilots on subcarriers
/// a + i*delta_f (i < floor(N/delta_f)) of every delta_k-th frame, and those
/// positions are nulled on all other antennas.
struct PilotPattern {
  Index delta_f = 1;
  Index delta_k = 1;
};

/// Transmit content of one realization: data plus pilot symbols over
/// (subcarrier, antenna, frame). Column c = subcarrier + N*antenna.
struct FrameGrid {
  Index n = 0, m_t = 0, k = 0;
  PilotPattern pilots;
  Mat symbols;  // k x (n*m_t)
  Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> kinds;  // same shape

  Index col(Index subcarrier, Index antenna) const {
    return subcarrier + n * antenna;
  }
  CellKind kind(Index frame, Index column) const {
    return static_cast<CellKind>(kinds(frame, column));
  }

  std::vector<Index> pilot_frames() const;
  /// Pilot subcarriers of one antenna, floor(N/delta_f) of them.
  std::vector<Index> pilot_subcarriers(Index antenna) const;

  Index count(CellKind kind) const;
};

/// Draws pilot symbols, then data symbols, i.i.d. uniform over the alphabet.
/// Requires delta_f >= m_t so the per-antenna offsets fit one comb period.
FrameGrid build_grid(RngStream& rng, Index n, Index m_t, Index k,
                     PilotPattern pilots, const Constellation& c);

}  // namespace tlink

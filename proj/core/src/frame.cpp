#include "tlink/frame.hpp"

#include <stdexcept>

namespace tlink {

std::vector<Index> FrameGrid::pilot_frames() const {
  std::vector<Index> out;
  for (Index f = 0; f < k; f += pilots.delta_k) out.push_back(f);
  return out;
}

std::vector<Index> FrameGrid::pilot_subcarriers(Index antenna) const {
  std::vector<Index> out;
  const Index count = n / pilots.delta_f;
  for (Index i = 0; i < count; ++i) out.push_back(antenna + i * pilots.delta_f);
  return out;
}

Index FrameGrid::count(CellKind kind) const {
  Index c = 0;
  for (Index col = 0; col < kinds.cols(); ++col)
    for (Index row = 0; row < kinds.rows(); ++row)
      if (kinds(row, col) == static_cast<std::uint8_t>(kind)) ++c;
  return c;
}

FrameGrid build_grid(RngStream& rng, Index n, Index m_t, Index k,
                     PilotPattern pilots, const Constellation& c) {
  if (n < 1 || m_t < 1 || k < 1) throw std::invalid_argument("bad grid shape");
  if (pilots.delta_f < m_t)
    throw std::invalid_argument("pilot spacing must be at least the antenna count");
  if (pilots.delta_k < 1 || pilots.delta_k > k)
    throw std::invalid_argument("pilot frame spacing out of range");

  FrameGrid g;
  g.n = n;
  g.m_t = m_t;
  g.k = k;
  g.pilots = pilots;
  g.symbols = Mat::Zero(k, n * m_t);
  g.kinds.setConstant(k, n * m_t, static_cast<std::uint8_t>(CellKind::Data));

  for (Index frame : g.pilot_frames())
    for (Index tx = 0; tx < m_t; ++tx)
      for (Index sc : g.pilot_subcarriers(tx))
        for (Index other = 0; other < m_t; ++other)
          g.kinds(frame, g.col(sc, other)) = static_cast<std::uint8_t>(
              other == tx ? CellKind::Pilot : CellKind::Null);

  // pilots first, then data, in a fixed scan order for seed determinism
  for (Index col = 0; col < n * m_t; ++col)
    for (Index frame = 0; frame < k; ++frame)
      if (g.kind(frame, col) == CellKind::Pilot)
        g.symbols(frame, col) =
            c.point(static_cast<int>(rng.uniform_pow2(c.order())));
  for (Index col = 0; col < n * m_t; ++col)
    for (Index frame = 0; frame < k; ++frame)
      if (g.kind(frame, col) == CellKind::Data)
        g.symbols(frame, col) =
            c.point(static_cast<int>(rng.uniform_pow2(c.order())));
  return g;
}

}  // namespace tlink

#include "tlink/coding.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tlink/channel.hpp"

namespace tlink {

Mat vandermonde_code(Index q, Index m_t) {
  if (q != m_t)
    throw std::invalid_argument("Khatri-Rao coding needs a spreading factor equal "
                                "to the transmit antenna count");
  Mat c(q, m_t);
  for (Index col = 0; col < m_t; ++col)
    for (Index row = 0; row < q; ++row) {
      const Index r = (row * col) % q;
      if ((4 * r) % q == 0) {
        // exact quarter-turn units keep C^H C = Q I free of rounding
        switch ((4 * r) / q) {
          case 0: c(row, col) = cxd(1.0, 0.0); break;
          case 1: c(row, col) = cxd(0.0, -1.0); break;
          case 2: c(row, col) = cxd(-1.0, 0.0); break;
          default: c(row, col) = cxd(0.0, 1.0); break;
        }
      } else {
        const double t =
            -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(q);
        c(row, col) = cxd(std::cos(t), std::sin(t));
      }
    }
  return c;
}

namespace {

DenseTensor fold_coded(const Mat& s_bar, const Mat& c_bar, Index n, Index m_t,
                       Index k, Index q) {
  const Mat x_unf = khatri_rao(s_bar, c_bar).transpose();  // (M_T*N) x (K*Q)
  return generalized_fold(x_unf, ModeSpec({2, 1}, {4, 3}), {n, m_t, k, q});
}

}  // namespace

CodedSignal kr_encode(const FrameGrid& grid, Index q) {
  CodedSignal out;
  out.s_bar = reorder_to_bar(grid.symbols, grid.n, grid.m_t);
  const Mat code = vandermonde_code(q, grid.m_t);
  out.c_bar = Mat(q, grid.m_t * grid.n);
  for (Index sc = 0; sc < grid.n; ++sc)
    out.c_bar.middleCols(sc * grid.m_t, grid.m_t) = code;
  out.x = fold_coded(out.s_bar, out.c_bar, grid.n, grid.m_t, grid.k, q);
  return out;
}

CodedSignal rc_encode(RngStream& rng, const FrameGrid& grid, Index q,
                      const Constellation& c) {
  if (q < 2)
    throw std::invalid_argument("random coding needs at least one data row (Q >= 2)");
  CodedSignal out;
  out.s_bar = reorder_to_bar(grid.symbols, grid.n, grid.m_t);
  out.c_bar = Mat(q, grid.m_t * grid.n);
  out.c_bar.row(0).setOnes();
  for (Index col = 0; col < out.c_bar.cols(); ++col)
    for (Index row = 1; row < q; ++row)
      out.c_bar(row, col) = c.point(static_cast<int>(rng.uniform_pow2(c.order())));
  out.x = fold_coded(out.s_bar, out.c_bar, grid.n, grid.m_t, grid.k, q);
  return out;
}

DenseTensor signal_tensor(const FrameGrid& grid) {
  DenseTensor s({grid.n, grid.m_t, grid.k});
  for (Index frame = 0; frame < grid.k; ++frame)
    for (Index tx = 0; tx < grid.m_t; ++tx)
      for (Index sc = 0; sc < grid.n; ++sc)
        s(sc, tx, frame) = grid.symbols(frame, grid.col(sc, tx));
  return s;
}

}  // namespace tlink

#include "tlink/receivers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tlink/linalg.hpp"

namespace tlink {

namespace {

// Received slice of one subcarrier, (M_R x K).
Mat slice_rx3(const DenseTensor& y, Index sc) {
  const Index n = y.extent(1), m_r = y.extent(2), k = y.extent(3);
  Mat out(m_r, k);
  const cxd* d = y.data().data();
  for (Index f = 0; f < k; ++f)
    for (Index rx = 0; rx < m_r; ++rx) out(rx, f) = d[sc + n * (rx + m_r * f)];
  return out;
}

// Gathers of a 4-way (N, M_R, K, Q) observation at one subcarrier. Row and
// column orderings follow the generalized unfoldings they stand in for.
struct Gather4 {
  Index n, m_r, k, q;
  const cxd* d;
  explicit Gather4(const DenseTensor& y)
      : n(y.extent(1)), m_r(y.extent(2)), k(y.extent(3)), q(y.extent(4)),
        d(y.data().data()) {}
  cxd at(Index sc, Index rx, Index f, Index b) const {
    return d[sc + n * (rx + m_r * (f + k * b))];
  }
  // ([3,4],[1,2]) block: (K*Q) x M_R, row f + K*b
  Mat kq_by_mr(Index sc) const {
    Mat out(k * q, m_r);
    for (Index rx = 0; rx < m_r; ++rx)
      for (Index b = 0; b < q; ++b)
        for (Index f = 0; f < k; ++f) out(f + k * b, rx) = at(sc, rx, f, b);
    return out;
  }
  // ([2],[1,3,4]) block: M_R x (K*Q), column f + K*b
  Mat mr_by_kq(Index sc) const {
    Mat out(m_r, k * q);
    for (Index b = 0; b < q; ++b)
      for (Index f = 0; f < k; ++f)
        for (Index rx = 0; rx < m_r; ++rx) out(rx, f + k * b) = at(sc, rx, f, b);
    return out;
  }
  // ([4],[1,2,3]) block: Q x (M_R*K), column rx + M_R*f
  Mat q_by_mrk(Index sc) const {
    Mat out(q, m_r * k);
    for (Index f = 0; f < k; ++f)
      for (Index rx = 0; rx < m_r; ++rx)
        for (Index b = 0; b < q; ++b) out(b, rx + m_r * f) = at(sc, rx, f, b);
    return out;
  }
  // ([3],[1,2,4]) block: K x (M_R*Q), column rx + M_R*b
  Mat k_by_mrq(Index sc) const {
    Mat out(k, m_r * q);
    for (Index b = 0; b < q; ++b)
      for (Index rx = 0; rx < m_r; ++rx)
        for (Index f = 0; f < k; ++f) out(f, rx + m_r * b) = at(sc, rx, f, b);
    return out;
  }
  // ([1,4],[3,2]) block: Q x (K*M_R), column f + K*rx
  Mat q_by_kmr(Index sc) const {
    Mat out(q, k * m_r);
    for (Index rx = 0; rx < m_r; ++rx)
      for (Index f = 0; f < k; ++f)
        for (Index b = 0; b < q; ++b) out(b, f + k * rx) = at(sc, rx, f, b);
    return out;
  }
};

// Mean column ratio diag(mean_m num(m,:)./den(m,:)). Divisor entries below
// 1e-12 of the divisor's largest magnitude are left out of the average; a
// column with no usable divisor keeps scale one.
Vec scale_ratio_mean(const Mat& num, const Mat& den) {
  const double floor = 1e-12 * den.cwiseAbs().maxCoeff();
  Vec lambda(den.cols());
  for (Index j = 0; j < den.cols(); ++j) {
    cxd acc = 0.0;
    Index used = 0;
    for (Index i = 0; i < den.rows(); ++i)
      if (std::abs(den(i, j)) >= floor && den(i, j) != cxd(0.0, 0.0)) {
        acc += num(i, j) / den(i, j);
        ++used;
      }
    lambda(j) = used > 0 ? acc / static_cast<double>(used) : cxd(1.0, 0.0);
  }
  return lambda;
}

Mat scale_cols(const Mat& m, const Vec& lambda) {
  return m * lambda.asDiagonal();
}

Mat scale_cols_inv(const Mat& m, const Vec& lambda) {
  const double floor = 1e-12 * lambda.cwiseAbs().maxCoeff();
  Mat out = m;
  for (Index j = 0; j < m.cols(); ++j)
    if (std::abs(lambda(j)) >= floor) out.col(j) /= lambda(j);
  return out;
}

// Projection of one subcarrier's M_T x K symbol block. Data cells snap to the
// alphabet; pilot and null cells are known at the receiver and are held at
// their known values.
Mat project_block(const Mat& s, const FrameGrid& grid, const Constellation& c,
                  Index sc) {
  Mat out(s.rows(), s.cols());
  for (Index f = 0; f < s.cols(); ++f)
    for (Index tx = 0; tx < s.rows(); ++tx) {
      const Index col = grid.col(sc, tx);
      switch (grid.kind(f, col)) {
        case CellKind::Data:
          out(tx, f) = c.point(c.nearest(s(tx, f)));
          break;
        case CellKind::Pilot:
          out(tx, f) = grid.symbols(f, col);
          break;
        case CellKind::Null:
          out(tx, f) = 0.0;
          break;
      }
    }
  return out;
}

// Same projection over a full antenna-fastest symbol matrix (K x M_T*N).
Mat project_bar(const Mat& s_bar, const FrameGrid& grid, const Constellation& c) {
  Mat out(s_bar.rows(), s_bar.cols());
  for (Index sc = 0; sc < grid.n; ++sc)
    for (Index tx = 0; tx < grid.m_t; ++tx) {
      const Index bar_col = tx + grid.m_t * sc;
      const Index grid_col = grid.col(sc, tx);
      for (Index f = 0; f < s_bar.rows(); ++f) {
        switch (grid.kind(f, grid_col)) {
          case CellKind::Data:
            out(f, bar_col) = c.point(c.nearest(s_bar(f, bar_col)));
            break;
          case CellKind::Pilot:
            out(f, bar_col) = grid.symbols(f, grid_col);
            break;
          case CellKind::Null:
            out(f, bar_col) = 0.0;
            break;
        }
      }
    }
  return out;
}

Mat grid_from_blocks(const std::vector<Mat>& blocks, Index n, Index m_t,
                     Index k) {
  Mat s_hat(k, n * m_t);
  for (Index sc = 0; sc < n; ++sc)
    for (Index tx = 0; tx < m_t; ++tx)
      s_hat.col(sc + n * tx) = blocks[sc].row(tx).transpose();
  return s_hat;
}

void require_uncoded(const DenseTensor& y, const FreqChannelViews& h_p) {
  if (y.order() != 3) throw std::invalid_argument("expected an (N, M_R, K) tensor");
  if (y.extent(1) != h_p.n || y.extent(2) != h_p.m_r)
    throw std::invalid_argument("observation does not match the channel views");
}

void require_coded(const DenseTensor& y, const FreqChannelViews& h_p) {
  if (y.order() != 4)
    throw std::invalid_argument("expected an (N, M_R, K, Q) tensor");
  if (y.extent(1) != h_p.n || y.extent(2) != h_p.m_r)
    throw std::invalid_argument("observation does not match the channel views");
}

}  // namespace

ReceiverOutput zf_receiver(const DenseTensor& y, const FreqChannelViews& h_p) {
  require_uncoded(y, h_p);
  const Index n = h_p.n, m_t = h_p.m_t, k = y.extent(3);
  std::vector<Mat> blocks(n);
  for (Index sc = 0; sc < n; ++sc)
    blocks[sc] = pinv(h_p.subcarrier(sc)) * slice_rx3(y, sc);
  ReceiverOutput out;
  out.s_hat = grid_from_blocks(blocks, n, m_t, k);
  out.iterations_used = 1;
  return out;
}

ReceiverOutput ilsp(const DenseTensor& y, const FreqChannelViews& h_p,
                    const StopRule& stop, const Constellation& c,
                    const FrameGrid& grid) {
  require_uncoded(y, h_p);
  const Index n = h_p.n, m_t = h_p.m_t, k = y.extent(3);
  if (y.extent(3) != grid.k || h_p.m_r < m_t)
    throw std::invalid_argument("ilsp needs M_R >= M_T and a matching grid");

  std::vector<Mat> blocks(n);
  Mat h_tilde_hat(h_p.m_r, n * m_t);
  int worst_iters = 0;
  bool all_converged = true;

  for (Index sc = 0; sc < n; ++sc) {
    Mat ch = h_p.subcarrier(sc);
    const Mat rx = slice_rx3(y, sc);
    Mat s_proj = Mat::Zero(m_t, k);
    int it = 0;
    double err = std::numeric_limits<double>::infinity();
    while (it < stop.max_iterations && err >= stop.min_err) {
      s_proj = project_block(pinv(ch) * rx, grid, c, sc);
      Mat ch_next = ch;
      if (numerical_rank(s_proj) == m_t) ch_next = rx * pinv(s_proj);
      ++it;
      err = (ch - ch_next).squaredNorm();
      ch = ch_next;
    }
    blocks[sc] = s_proj;
    for (Index tx = 0; tx < m_t; ++tx)
      h_tilde_hat.col(sc + n * tx) = ch.col(tx);
    worst_iters = std::max(worst_iters, it);
    all_converged = all_converged && err < stop.min_err;
  }

  ReceiverOutput out;
  out.s_hat = grid_from_blocks(blocks, n, m_t, k);
  out.h_hat = views_from_h_tilde(h_tilde_hat, n, m_t);
  out.iterations_used = worst_iters;
  out.converged = all_converged;
  return out;
}

ReceiverOutput rlsp(const DenseTensor& y, const FreqChannelViews& h_p,
                    double alpha, const Constellation& c,
                    const FrameGrid& grid) {
  require_uncoded(y, h_p);
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("forgetting factor must be in (0, 1]");
  const Index n = h_p.n, m_t = h_p.m_t, k = y.extent(3);
  if (h_p.m_r < m_t) throw std::invalid_argument("rlsp needs M_R >= M_T");

  std::vector<Mat> blocks(n);
  Mat h_tilde_hat(h_p.m_r, n * m_t);

  for (Index sc = 0; sc < n; ++sc) {
    const Mat rx = slice_rx3(y, sc);
    Mat ch = h_p.subcarrier(sc);
    const Mat s = project_block(pinv(ch) * rx, grid, c, sc);
    Mat p = Mat::Identity(m_t, m_t);
    for (Index f = 0; f < k; ++f) {
      const Vec sf = s.col(f);
      const Eigen::RowVectorXcd gain = sf.adjoint() * p;  // s^H P
      const cxd denom = alpha + (gain * sf)(0, 0);
      ch += ((rx.col(f) - ch * sf) / denom) * gain;
      p = (p - (p * sf) * gain / denom) / alpha;
    }
    blocks[sc] = project_block(pinv(ch) * rx, grid, c, sc);
    for (Index tx = 0; tx < m_t; ++tx)
      h_tilde_hat.col(sc + n * tx) = ch.col(tx);
  }

  ReceiverOutput out;
  out.s_hat = grid_from_blocks(blocks, n, m_t, k);
  out.h_hat = views_from_h_tilde(h_tilde_hat, n, m_t);
  out.iterations_used = static_cast<int>(k);
  return out;
}

namespace {

struct KrFactors {
  Mat s_raw, h_raw;  // unresolved LSKRF factors
  Mat s_bar, h_bar;  // scale resolved against the pilot channel
};

// Despread with the known code and factor the per-column Khatri-Rao
// structure; the code is orthogonal per subcarrier so despreading is a
// scaled adjoint product.
KrFactors kr_core(const DenseTensor& y, const FreqChannelViews& h_p,
                  const Mat& c_bar) {
  const Gather4 g(y);
  const Index n = h_p.n, m_t = h_p.m_t;
  if (c_bar.rows() != g.q || c_bar.cols() != m_t * n)
    throw std::invalid_argument("code matrix has the wrong shape");
  Mat ybar_t(g.k * g.m_r, m_t * n);
  for (Index sc = 0; sc < n; ++sc) {
    const Mat code = c_bar.middleCols(sc * m_t, m_t);
    const Mat despread =
        (code.adjoint() * g.q_by_kmr(sc)) / static_cast<double>(m_t);
    for (Index tx = 0; tx < m_t; ++tx)
      ybar_t.col(tx + m_t * sc) = despread.row(tx).transpose();
  }
  const KrfResult f = lskrf(ybar_t, g.m_r, g.k);
  KrFactors out;
  out.s_raw = f.left;
  out.h_raw = f.right;
  const Vec lambda = scale_ratio_mean(out.h_raw, h_p.h_bar);
  out.h_bar = scale_cols_inv(out.h_raw, lambda);
  out.s_bar = scale_cols(out.s_raw, lambda);
  return out;
}

}  // namespace

ReceiverOutput kr_receiver(const DenseTensor& y, const FreqChannelViews& h_p,
                           const Mat& c_bar) {
  require_coded(y, h_p);
  const KrFactors f = kr_core(y, h_p, c_bar);
  ReceiverOutput out;
  out.s_hat = reorder_to_tilde(f.s_bar, h_p.n, h_p.m_t);
  out.h_hat = views_from_h_bar(f.h_bar, h_p.n, h_p.m_t);
  out.iterations_used = 1;
  return out;
}

ReceiverOutput kr_ls_receiver(const DenseTensor& y, const FreqChannelViews& h_p,
                              const Mat& c_bar, const Constellation& c,
                              const FrameGrid& grid) {
  require_coded(y, h_p);
  const Gather4 g(y);
  const Index n = h_p.n, m_t = h_p.m_t;
  const KrFactors f = kr_core(y, h_p, c_bar);

  // Projected symbols give one least-squares channel re-estimate, which
  // decouples per subcarrier since the chain is block diagonal in N.
  const Mat s_proj = project_bar(f.s_bar, grid, c);
  Mat h_ls(g.m_r, m_t * n);
  for (Index sc = 0; sc < n; ++sc) {
    const Mat chain = khatri_rao(c_bar.middleCols(sc * m_t, m_t),
                                 s_proj.middleCols(sc * m_t, m_t));
    h_ls.middleCols(sc * m_t, m_t) = (pinv(chain) * g.kq_by_mr(sc)).transpose();
  }

  const Vec lambda_ls = scale_ratio_mean(f.h_raw, h_ls);
  ReceiverOutput out;
  out.s_hat = reorder_to_tilde(scale_cols(f.s_raw, lambda_ls), n, m_t);
  out.h_hat = views_from_h_bar(h_ls, n, m_t);
  out.iterations_used = 1;
  return out;
}

namespace {

struct RcFactors {
  Mat s_bar;  // K x (M_T*N)
  Mat c_bar;  // Q x (M_T*N), first row pinned to ones by the scale anchor
};

RcFactors rc_core(const DenseTensor& y, const FreqChannelViews& h_p) {
  const Gather4 g(y);
  const Index n = h_p.n, m_t = h_p.m_t;
  Mat ybar(g.k * g.q, m_t * n);
  for (Index sc = 0; sc < n; ++sc)
    ybar.middleCols(sc * m_t, m_t) =
        g.kq_by_mr(sc) * pinv(h_p.subcarrier(sc).transpose());
  const KrfResult f = lskrf(ybar, g.q, g.k);
  // anchor: the true first code row is all ones
  Vec lambda = f.right.row(0).transpose();
  const double floor = 1e-12 * lambda.cwiseAbs().maxCoeff();
  for (Index j = 0; j < lambda.size(); ++j)
    if (std::abs(lambda(j)) < floor) lambda(j) = 1.0;
  RcFactors out;
  out.c_bar = scale_cols_inv(f.right, lambda);
  out.s_bar = scale_cols(f.left, lambda);
  return out;
}

}  // namespace

ReceiverOutput rc_kr_receiver(const DenseTensor& y, const FreqChannelViews& h_p) {
  require_coded(y, h_p);
  if (h_p.m_r < h_p.m_t) throw std::invalid_argument("rc_kr needs M_R >= M_T");
  const RcFactors f = rc_core(y, h_p);
  ReceiverOutput out;
  out.s_hat = reorder_to_tilde(f.s_bar, h_p.n, h_p.m_t);
  out.c_hat = f.c_bar;
  out.iterations_used = 1;
  return out;
}

ReceiverOutput rc_kr_als_receiver(const DenseTensor& y,
                                  const FreqChannelViews& h_p,
                                  const StopRule& stop, const Constellation& c,
                                  const FrameGrid& grid) {
  require_coded(y, h_p);
  if (h_p.m_r < h_p.m_t)
    throw std::invalid_argument("rc_kr_als needs M_R >= M_T");
  const Gather4 g(y);
  const Index n = h_p.n, m_t = h_p.m_t;
  if (g.m_r * g.q < m_t || g.m_r * g.k < m_t)
    throw std::invalid_argument("rc_kr_als needs M_R*Q >= M_T and M_R*K >= M_T");

  RcFactors f = rc_core(y, h_p);
  Mat s_bar = f.s_bar, code = f.c_bar, h_bar = h_p.h_bar;

  const double y_energy = [&] {
    double e = 0.0;
    for (const cxd& v : y.data()) e += std::norm(v);
    return e;
  }();
  auto cost = [&](const Mat& h, const Mat& s, const Mat& cb) {
    double e = 0.0;
    for (Index sc = 0; sc < n; ++sc) {
      const Mat chain = khatri_rao(cb.middleCols(sc * m_t, m_t),
                                   s.middleCols(sc * m_t, m_t));
      e += (g.mr_by_kq(sc) - h.middleCols(sc * m_t, m_t) * chain.transpose())
               .squaredNorm();
    }
    return e / y_energy;
  };

  ReceiverOutput out;
  out.converged = false;
  double cost_prev = cost(h_bar, s_bar, code);

  for (int it = 1; it <= stop.als_max_iterations; ++it) {
    // channel update, gated on the full rank of the code/symbol chain
    std::vector<Mat> chains(n);
    double sv_max = 0.0;
    std::vector<Eigen::VectorXd> svs(n);
    for (Index sc = 0; sc < n; ++sc) {
      chains[sc] = khatri_rao(code.middleCols(sc * m_t, m_t),
                              s_bar.middleCols(sc * m_t, m_t));
      svs[sc] = singular_values(chains[sc]);
      if (svs[sc].size() > 0) sv_max = std::max(sv_max, svs[sc](0));
    }
    Index rank = 0;
    for (const auto& sv : svs)
      for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-8 * sv_max && sv(i) > 0.0) ++rank;

    out.ls_cost_before.push_back(cost_prev);
    if (rank == m_t * n) {
      for (Index sc = 0; sc < n; ++sc)
        h_bar.middleCols(sc * m_t, m_t) =
            g.mr_by_kq(sc) * pinv(chains[sc].transpose());
    }
    double after = cost(h_bar, s_bar, code);
    out.ls_cost_after.push_back(after);

    // code update then projection; the first row stays the scale anchor
    out.ls_cost_before.push_back(after);
    for (Index sc = 0; sc < n; ++sc)
      code.middleCols(sc * m_t, m_t) =
          g.q_by_mrk(sc) * pinv(khatri_rao(s_bar.middleCols(sc * m_t, m_t),
                                           h_bar.middleCols(sc * m_t, m_t))
                                     .transpose());
    after = cost(h_bar, s_bar, code);
    out.ls_cost_after.push_back(after);
    code = project_alphabet(code, c);
    code.row(0).setOnes();

    // symbol update then projection with the known cells held
    out.ls_cost_before.push_back(cost(h_bar, s_bar, code));
    for (Index sc = 0; sc < n; ++sc)
      s_bar.middleCols(sc * m_t, m_t) =
          g.k_by_mrq(sc) * pinv(khatri_rao(code.middleCols(sc * m_t, m_t),
                                           h_bar.middleCols(sc * m_t, m_t))
                                     .transpose());
    out.ls_cost_after.push_back(cost(h_bar, s_bar, code));
    s_bar = project_bar(s_bar, grid, c);

    const double cost_now = cost(h_bar, s_bar, code);
    out.iterations_used = it;
    if (cost_now < stop.min_cost ||
        std::abs(cost_now - cost_prev) < 1e-12) {
      out.converged = true;
      cost_prev = cost_now;
      break;
    }
    cost_prev = cost_now;
  }

  out.s_hat = reorder_to_tilde(s_bar, n, m_t);
  out.c_hat = code;
  out.h_hat = views_from_h_bar(h_bar, n, m_t);
  return out;
}

std::string receiver_name(ReceiverKind r) {
  switch (r) {
    case ReceiverKind::Zf: return "zf";
    case ReceiverKind::Ilsp: return "ilsp";
    case ReceiverKind::Rlsp: return "rlsp";
    case ReceiverKind::Kr: return "kr";
    case ReceiverKind::KrLs: return "kr_ls";
    case ReceiverKind::RcKr: return "rc_kr";
    case ReceiverKind::RcKrAls: return "rc_kr_als";
  }
  throw std::invalid_argument("unknown receiver");
}

ReceiverKind receiver_from_name(const std::string& name) {
  if (name == "zf") return ReceiverKind::Zf;
  if (name == "ilsp") return ReceiverKind::Ilsp;
  if (name == "rlsp") return ReceiverKind::Rlsp;
  if (name == "kr") return ReceiverKind::Kr;
  if (name == "kr_ls") return ReceiverKind::KrLs;
  if (name == "rc_kr") return ReceiverKind::RcKr;
  if (name == "rc_kr_als") return ReceiverKind::RcKrAls;
  throw std::invalid_argument("unknown receiver name: " + name);
}

double flop_estimate(ReceiverKind r, double m_t, double m_r, double k) {
  switch (r) {
    case ReceiverKind::Zf:
      return (2.0 / 3.0) * m_t * m_t * m_t + 4.0 * m_t * m_t * m_r +
             2.0 * m_t * m_r * m_r * k;
    case ReceiverKind::Ilsp:
      return (4.0 / 3.0) * m_t * m_t * m_t + 6.0 * m_t * m_t * m_r +
             2.0 * m_t * m_r * m_r * k + 2.0 * m_t * m_t * k +
             2.0 * m_t * m_r * k;
    case ReceiverKind::Rlsp:
      return (2.0 / 3.0) * m_t * m_t * m_t + 4.0 * m_t * m_t * m_r +
             2.0 * m_t * m_r * m_r * k + 2.0 * m_r * m_t * k +
             2.0 * m_t * m_t * m_r * k + 2.0 * m_t * m_t * k;
    default:
      throw std::invalid_argument("no cost model for this receiver");
  }
}

}  // namespace tlink

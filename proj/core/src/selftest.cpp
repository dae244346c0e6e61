#include <cmath>
#include <sstream>

#include "tlink/coding.hpp"
#include "tlink/linalg.hpp"
#include "tlink/ofdm.hpp"
#include "tlink/receivers.hpp"
#include "tlink/rng.hpp"
#include "tlink/sim.hpp"

namespace tlink {

namespace {

Mat random_matrix(RngStream& rng, Index rows, Index cols) {
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.cgaussian();
  return m;
}

DenseTensor random_tensor(RngStream& rng, std::vector<Index> dims) {
  DenseTensor t(std::move(dims));
  for (cxd& v : t.data()) v = rng.cgaussian();
  return t;
}

double rel_err(double err, double ref) { return err / (ref > 0 ? ref : 1.0); }

struct Battery {
  std::vector<SelfCheck> checks;
  RngStream rng = make_stream(20240517, "selftest");

  void add(const std::string& name, double err, double tol) {
    std::ostringstream detail;
    detail << "err=" << err << " tol=" << tol;
    checks.push_back({name, err <= tol, detail.str()});
  }
  void add_flag(const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({name, pass, detail});
  }
};

void tensor_checks(Battery& b) {
  // fold/unfold round trip
  {
    DenseTensor t = random_tensor(b.rng, {3, 2, 5, 4});
    const ModeSpec spec({3, 1}, {4, 2});
    DenseTensor back = generalized_fold(generalized_unfold(t, spec), spec, t.dims());
    b.add("unfold/fold round trip", (t - back).norm(), 0.0);
  }
  // slice-wise product: direct route against the diagonalized contraction
  {
    DenseTensor a = random_tensor(b.rng, {3, 4, 5});
    DenseTensor c = random_tensor(b.rng, {4, 2, 5});
    DenseTensor direct = slicewise_multiply(a, c);
    DenseTensor via = contract2(a, {2, 3},
                                build_diag_tensor(c, DiagPattern::Ten3Modes34),
                                {1, 4});
    b.add("slice-wise product = double contraction",
          rel_err((direct - via).norm(), direct.norm()), 1e-12);
  }
  // diagonalization table: all six unfolding identities
  {
    const Index m = 4, n = 3, k = 5;
    const Vec a = random_matrix(b.rng, m, 1).col(0);
    const Mat A = random_matrix(b.rng, m, n);
    DenseTensor t3 = random_tensor(b.rng, {m, n, k});
    const Mat im = Mat::Identity(m, m);
    const Mat in = Mat::Identity(n, n);
    const Mat ik = Mat::Identity(k, k);
    const Mat imn = Mat::Identity(m * n, m * n);
    double err = 0.0;
    err += (build_diag_tensor(a, DiagPattern::VecToMat).as_matrix() -
            khatri_rao(im, a.transpose()))
               .norm();
    err += (generalized_unfold(build_diag_tensor(A, DiagPattern::MatModes23),
                               ModeSpec({1, 3}, {2})) -
            khatri_rao(in, A))
               .norm();
    err += (generalized_unfold(build_diag_tensor(A, DiagPattern::MatModes12),
                               ModeSpec({3, 2}, {1})) -
            khatri_rao(im, A.transpose()))
               .norm();
    const Mat vec_a = Eigen::Map<const Mat>(A.data(), m * n, 1);
    err += (generalized_unfold(build_diag_tensor(A, DiagPattern::MatDouble),
                               ModeSpec({1, 3}, {2, 4})) -
            khatri_rao(imn, vec_a.transpose()))
               .norm();
    err += (generalized_unfold(build_diag_tensor(t3, DiagPattern::Ten3Modes34),
                               ModeSpec({1, 2, 4}, {3})) -
            khatri_rao(ik, generalized_unfold(t3, ModeSpec({1, 2}, {3}))))
               .norm();
    err += (generalized_unfold(build_diag_tensor(t3, DiagPattern::Ten3Modes12),
                               ModeSpec({3, 4, 2}, {1})) -
            khatri_rao(im, generalized_unfold(t3, ModeSpec({2, 3}, {1}))))
               .norm();
    b.add("diagonalization table identities", err, 0.0);
  }
}

void channel_checks(Battery& b) {
  const Index n = 8, m_r = 3, m_t = 2;
  const PowerDelayProfile pdp = PowerDelayProfile::pedestrian_a();
  ChannelRealization ch = draw_channel(b.rng, pdp, m_r, m_t, n);
  FreqChannelViews v = freq_channel_views(ch);
  const Mat ones_kron =
      kronecker(Mat::Ones(1, m_t), Mat::Identity(n, n));
  const Mat kron_ones =
      kronecker(Mat::Identity(n, n), Mat::Ones(1, m_t));

  b.add("channel unfolding ([1,3],[2,4])",
        (generalized_unfold(v.tensor, ModeSpec({1, 3}, {2, 4})) -
         khatri_rao(v.h_tilde, ones_kron))
            .norm(),
        1e-10);
  b.add("channel unfolding ([1,3],[4,2])",
        (generalized_unfold(v.tensor, ModeSpec({1, 3}, {4, 2})) -
         khatri_rao(v.h_bar, kron_ones))
            .norm(),
        1e-10);

  const Eigen::MatrixXd p = antenna_permutation(n, m_t);
  b.add("antenna permutation identity",
        (ones_kron.real() * p - kron_ones.real()).norm(), 0.0);

  DenseTensor rebuilt = block_identity_core(n, m_t);
  rebuilt = n_mode_product(rebuilt, ones_kron, 1);
  rebuilt = n_mode_product(rebuilt, ones_kron, 2);
  rebuilt = n_mode_product(rebuilt, v.h_tilde, 3);
  b.add("block-term channel reconstruction",
        rel_err((rebuilt - v.tensor).norm(), v.tensor.norm()), 1e-12);
}

void chain_checks(Battery& b) {
  const Index n = 16, m_t = 2, m_r = 2, k = 4, q = 2, cp = 6;
  const PowerDelayProfile pdp = PowerDelayProfile::pedestrian_a();
  const Constellation c(ConstellationKind::Qam, 4);
  ChannelRealization ch = draw_channel(b.rng, pdp, m_r, m_t, n);
  FreqChannelViews v = freq_channel_views(ch);
  FrameGrid grid = build_grid(b.rng, n, m_t, k, {4, k}, c);

  // uncoded chain against the double contraction
  {
    DenseTensor x = signal_tensor(grid);
    DenseTensor y = ofdm_receive(apply_channel(ofdm_transmit(x, cp), ch, cp), cp, n);
    DenseTensor model = contract2(v.tensor, {2, 4}, x, {1, 2});
    b.add("transmit chain = double contraction (uncoded)",
          rel_err((y - model).norm(), model.norm()), 1e-10);
  }
  // spread chain against the double contraction
  {
    CodedSignal cs = kr_encode(grid, q);
    DenseTensor y =
        ofdm_receive(apply_channel(ofdm_transmit(cs.x, cp), ch, cp), cp, n);
    DenseTensor model = contract2(v.tensor, {2, 4}, cs.x, {1, 2});
    b.add("transmit chain = double contraction (spread)",
          rel_err((y - model).norm(), model.norm()), 1e-10);
    const Mat chain = khatri_rao(cs.c_bar,
                                 kronecker(Mat::Identity(n, n), Mat::Ones(1, m_t)));
    b.add("despreading orthogonality",
          (chain.adjoint() * chain -
           static_cast<double>(m_t) * Mat::Identity(m_t * n, m_t * n))
              .norm(),
          1e-9);
  }
}

void lskrf_check(Battery& b) {
  const Mat s = random_matrix(b.rng, 4, 6);
  const Mat c = random_matrix(b.rng, 3, 6);
  const Mat y = khatri_rao(c, s);
  const KrfResult f = lskrf(y, 3, 4);
  b.add("least-squares Khatri-Rao factorization",
        rel_err((khatri_rao(f.right, f.left) - y).norm(), y.norm()), 1e-12);
}

void noise_check(Battery& b) {
  DenseTensor zero({64, 64});
  const double sigma2 = 0.37;
  RngStream rng = make_stream(7, "selftest-noise");
  DenseTensor noisy = add_awgn(rng, zero, sigma2);
  double power = 0.0;
  for (const cxd& vv : noisy.data()) power += std::norm(vv);
  power /= static_cast<double>(noisy.size());
  b.add_flag("noise variance calibration",
             std::abs(power / sigma2 - 1.0) < 0.05,
             "measured/config = " + std::to_string(power / sigma2));
}

void receiver_checks(Battery& b) {
  SimConfig cfg;
  cfg.n = 8;
  cfg.m_t = 2;
  cfg.m_r = 2;
  cfg.k = 4;
  cfg.cp_len = 6;
  cfg.delta_f = 4;
  cfg.delta_k = 4;
  cfg.trials = 1;
  const Constellation c = cfg.constellation();
  const PowerDelayProfile pdp = cfg.profile();
  const StopRule stop;

  RngStream ch_rng = make_stream(11, "selftest-ch");
  RngStream grid_rng = make_stream(11, "selftest-grid");
  ChannelRealization ch = draw_channel(ch_rng, pdp, cfg.m_r, cfg.m_t, cfg.n);
  FreqChannelViews views = freq_channel_views(ch);
  FrameGrid grid = build_grid(grid_rng, cfg.n, cfg.m_t, cfg.k,
                              {cfg.delta_f, cfg.delta_k}, c);

  auto exact = [&](const Mat& s_hat) {
    for (Index col = 0; col < grid.symbols.cols(); ++col)
      for (Index f = 0; f < grid.k; ++f)
        if (grid.kind(f, col) == CellKind::Data &&
            c.nearest(s_hat(f, col)) != c.nearest(grid.symbols(f, col)))
          return false;
    return true;
  };

  // uncoded receivers
  {
    DenseTensor x = signal_tensor(grid);
    DenseTensor y =
        ofdm_receive(apply_channel(ofdm_transmit(x, cfg.cp_len), ch, cfg.cp_len),
                     cfg.cp_len, cfg.n);
    b.add_flag("noiseless exactness: zf", exact(zf_receiver(y, views).s_hat), "");
    b.add_flag("noiseless exactness: ilsp",
               exact(ilsp(y, views, stop, c, grid).s_hat), "");
    b.add_flag("noiseless exactness: rlsp",
               exact(rlsp(y, views, 1.0, c, grid).s_hat), "");
  }
  // Khatri-Rao coded receivers
  {
    CodedSignal cs = kr_encode(grid, cfg.m_t);
    DenseTensor y = ofdm_receive(
        apply_channel(ofdm_transmit(cs.x, cfg.cp_len), ch, cfg.cp_len),
        cfg.cp_len, cfg.n);
    b.add_flag("noiseless exactness: kr",
               exact(kr_receiver(y, views, cs.c_bar).s_hat), "");
    b.add_flag("noiseless exactness: kr_ls",
               exact(kr_ls_receiver(y, views, cs.c_bar, c, grid).s_hat), "");
  }
  // randomly coded receivers
  {
    RngStream code_rng = make_stream(11, "selftest-code");
    CodedSignal cs = rc_encode(code_rng, grid, 2, c);
    DenseTensor y = ofdm_receive(
        apply_channel(ofdm_transmit(cs.x, cfg.cp_len), ch, cfg.cp_len),
        cfg.cp_len, cfg.n);
    b.add_flag("noiseless exactness: rc_kr",
               exact(rc_kr_receiver(y, views).s_hat), "");
    ReceiverOutput als = rc_kr_als_receiver(y, views, stop, c, grid);
    b.add_flag("noiseless exactness: rc_kr_als", exact(als.s_hat), "");
  }
}

}  // namespace

std::vector<SelfCheck> run_selftest() {
  Battery b;
  tensor_checks(b);
  channel_checks(b);
  chain_checks(b);
  lskrf_check(b);
  noise_check(b);
  receiver_checks(b);
  return b.checks;
}

}  // namespace tlink

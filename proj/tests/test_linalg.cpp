#include <doctest.h>

#include "oracles.hpp"
#include "tlink/linalg.hpp"

using namespace tlink;
using namespace tlink::testing;

namespace {
RngStream rng = make_stream(1002, "test_linalg");
}

TEST_CASE("pinv basics") {
  CHECK((pinv(Mat::Identity(3, 3)) - Mat::Identity(3, 3)).norm() < 1e-14);

  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2.0;
  Mat expected = Mat::Zero(2, 2);
  expected(0, 0) = 0.5;
  CHECK((pinv(d) - expected).norm() < 1e-14);

  const Mat a = random_matrix(rng, 6, 3);
  CHECK((pinv(a) * a - Mat::Identity(3, 3)).norm() < 1e-10);
}

TEST_CASE("pinv satisfies the four Moore-Penrose conditions") {
  for (int trial = 0; trial < 12; ++trial) {
    const Index rows = 1 + static_cast<Index>(rng.next_u64() % 32);
    const Index cols = 1 + static_cast<Index>(rng.next_u64() % 32);
    Mat a = random_matrix(rng, rows, cols);
    if (trial % 3 == 0 && rows > 1 && cols > 1) a.col(cols - 1) = a.col(0);  // rank drop
    const Mat p = pinv(a);
    const double scale = std::max(1.0, a.norm());
    CHECK((a * p * a - a).norm() / scale < 1e-10);
    CHECK((p * a * p - p).norm() / scale < 1e-10);
    CHECK((Mat(a * p) - Mat((a * p).adjoint())).norm() / scale < 1e-10);
    CHECK((Mat(p * a) - Mat((p * a).adjoint())).norm() / scale < 1e-10);
  }
}

TEST_CASE("numerical rank") {
  Mat a = random_matrix(rng, 5, 3);
  a.col(2) = a.col(0) + a.col(1);
  CHECK(numerical_rank(a) == 2);
  CHECK(numerical_rank(Mat::Zero(4, 4)) == 0);
  CHECK(numerical_rank(Mat::Identity(4, 4)) == 4);
}

TEST_CASE("lskrf recovers khatri-rao factors") {
  const Mat s = random_matrix(rng, 4, 6);
  const Mat c = random_matrix(rng, 3, 6);
  const Mat y = khatri_rao(c, s);
  const KrfResult f = lskrf(y, 3, 4);

  CHECK(rel_diff(khatri_rao(f.right, f.left), y) < 1e-12);
  // each recovered column matches the source up to one complex scale
  for (Index col = 0; col < 6; ++col) {
    const cxd alpha =
        (s.col(col).adjoint() * f.left.col(col))(0, 0) / s.col(col).squaredNorm();
    CHECK((f.left.col(col) - alpha * s.col(col)).norm() <
          1e-12 * f.left.col(col).norm());
    CHECK((f.right.col(col) * alpha - c.col(col)).norm() <
          1e-12 * c.col(col).norm());
  }
}

TEST_CASE("lskrf scalar and degenerate cases") {
  Mat y(1, 1);
  y(0, 0) = cxd(2.0, -1.0);
  const KrfResult f = lskrf(y, 1, 1);
  CHECK(std::abs(f.left(0, 0) * f.right(0, 0) - y(0, 0)) < 1e-14);

  Mat with_zero = random_matrix(rng, 6, 2);
  with_zero.col(1).setZero();
  const KrfResult g = lskrf(with_zero, 2, 3);
  CHECK(g.left.col(1).norm() == 0.0);
  CHECK(g.right.col(1).norm() == 0.0);

  CHECK_THROWS_AS(lskrf(random_matrix(rng, 5, 2), 2, 2), std::invalid_argument);
}

TEST_CASE("lskrf under small perturbations") {
  const Mat s = random_matrix(rng, 5, 4);
  const Mat c = random_matrix(rng, 6, 4);
  const Mat clean = khatri_rao(c, s);
  const double noise_level = 1e-3;
  const Mat noisy = clean + noise_level * random_matrix(rng, 30, 4);
  const KrfResult f = lskrf(noisy, 6, 5);
  const double err = (khatri_rao(f.right, f.left) - noisy).norm();
  CHECK(err <= 2.0 * noise_level * std::sqrt(30.0 * 4.0));
}

TEST_CASE("lskrf exactness across small shapes") {
  for (Index q = 1; q <= 8; q += 3)
    for (Index k = 1; k <= 8; k += 3)
      for (Index r = 1; r <= 8; r += 3) {
        const Mat s = random_matrix(rng, k, r);
        const Mat c = random_matrix(rng, q, r);
        const Mat y = khatri_rao(c, s);
        const KrfResult f = lskrf(y, q, k);
        CHECK(rel_diff(khatri_rao(f.right, f.left), y) < 1e-12);
      }
}

// The reshape orientation inside lskrf must agree with khatri_rao's stacking;
// a flip would surface here as a transposed factor.
TEST_CASE("lskrf orientation is consistent with khatri_rao") {
  Mat s(2, 1), c(3, 1);
  s << cxd(1, 0), cxd(0, 2);
  c << cxd(1, 0), cxd(-1, 0), cxd(0, 1);
  const KrfResult f = lskrf(khatri_rao(c, s), 3, 2);
  const cxd alpha = f.left(0, 0) / s(0, 0);
  CHECK((f.left - alpha * s).norm() < 1e-13);
  CHECK((f.right * alpha - c).norm() < 1e-13);
}

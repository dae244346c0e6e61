#include <doctest.h>

#include "oracles.hpp"
#include "tlink/tensor.hpp"

using namespace tlink;
using namespace tlink::testing;

namespace {
RngStream rng = make_stream(1001, "test_tensor");
}

TEST_CASE("dense tensor basics") {
  DenseTensor t({2, 3});
  CHECK(t.size() == 6);
  CHECK(t.extent(1) == 2);
  CHECK(t.extent(2) == 3);
  t(1, 2) = cxd(5.0, 0.0);
  CHECK(t.as_matrix()(1, 2) == cxd(5.0, 0.0));
  CHECK_THROWS_AS(t(2, 0), std::out_of_range);
  CHECK_THROWS_AS(t.extent(3), std::invalid_argument);
  CHECK_THROWS_AS(DenseTensor({2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(DenseTensor({2, 2}, std::vector<cxd>(3)), std::invalid_argument);
}

TEST_CASE("identity tensor unfolding") {
  const DenseTensor id = DenseTensor::identity(3, 2);
  const Mat u = generalized_unfold(id, ModeSpec({1}, {2, 3}));
  Mat expected(2, 4);
  expected << 1, 0, 0, 0, 0, 0, 0, 1;
  CHECK((u - expected).norm() == 0.0);
}

TEST_CASE("unfolding rejects bad specs") {
  const DenseTensor t = random_tensor(rng, {2, 3, 4});
  CHECK_THROWS_AS(generalized_unfold(t, ModeSpec({1, 2, 3}, {})),
                  std::invalid_argument);
  CHECK_THROWS_AS(generalized_unfold(t, ModeSpec({1, 2}, {2, 3})),
                  std::invalid_argument);
  CHECK_THROWS_AS(generalized_unfold(t, ModeSpec({1}, {3})),
                  std::invalid_argument);
  CHECK_THROWS_AS(generalized_unfold(t, ModeSpec({1, 4}, {2, 3})),
                  std::invalid_argument);
}

TEST_CASE("unfolding matches the index-loop definition") {
  const DenseTensor t = random_tensor(rng, {2, 3, 4});
  const ModeSpec spec({2}, {3, 1});
  CHECK((generalized_unfold(t, spec) - ref_unfold(t, spec)).norm() == 0.0);
  // explicit triple loop for the same spec
  Mat manual(3, 4 * 2);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j)
      for (Index k = 0; k < 4; ++k) manual(j, k + 4 * i) = t(i, j, k);
  CHECK((generalized_unfold(t, spec) - manual).norm() == 0.0);
}

TEST_CASE("fold inverts unfold") {
  Mat m(2, 4);
  m << 1, 0, 0, 0, 0, 0, 0, 1;
  const DenseTensor folded = generalized_fold(m, ModeSpec({1}, {2, 3}), {2, 2, 2});
  CHECK((folded - DenseTensor::identity(3, 2)).norm() == 0.0);

  const DenseTensor t = random_tensor(rng, {3, 2, 5});
  const ModeSpec spec({1, 2}, {3});
  CHECK((generalized_fold(generalized_unfold(t, spec), spec, t.dims()) - t).norm() ==
        0.0);

  CHECK_THROWS_AS(generalized_fold(Mat::Zero(1, 4), ModeSpec({1}, {2}), {2, 3}),
                  std::invalid_argument);
}

TEST_CASE("fold-unfold bijectivity over random specs") {
  for (int trial = 0; trial < 40; ++trial) {
    const int order = 2 + static_cast<int>(rng.next_u64() % 4);  // up to 5 modes
    std::vector<Index> dims;
    for (int m = 0; m < order; ++m)
      dims.push_back(1 + static_cast<Index>(rng.next_u64() % 5));
    const DenseTensor t = random_tensor(rng, dims);
    // random partition into non-empty row/col lists
    std::vector<int> modes(order);
    for (int m = 0; m < order; ++m) modes[m] = m + 1;
    for (int m = order - 1; m > 0; --m)
      std::swap(modes[m], modes[rng.next_u64() % (m + 1)]);
    const int cut = 1 + static_cast<int>(rng.next_u64() % (order - 1));
    ModeSpec spec(std::vector<int>(modes.begin(), modes.begin() + cut),
                  std::vector<int>(modes.begin() + cut, modes.end()));
    const Mat u = generalized_unfold(t, spec);
    CHECK((u - ref_unfold(t, spec)).norm() == 0.0);
    CHECK((generalized_fold(u, spec, t.dims()) - t).norm() == 0.0);
  }
}

TEST_CASE("n-mode product") {
  const DenseTensor t = random_tensor(rng, {3, 4, 2});
  for (int mode = 1; mode <= 3; ++mode) {
    const Mat id = Mat::Identity(t.extent(mode), t.extent(mode));
    CHECK(rel_diff(n_mode_product(t, id, mode), t) == 0.0);
  }

  // rank-one reconstruction: outer product of the factors
  const Vec f1 = random_vector(rng, 3), f2 = random_vector(rng, 4),
            f3 = random_vector(rng, 2);
  DenseTensor cp = DenseTensor::identity(3, 1);
  cp = n_mode_product(cp, f1, 1);
  cp = n_mode_product(cp, f2, 2);
  cp = n_mode_product(cp, f3, 3);
  double err = 0.0;
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j)
      for (Index k = 0; k < 2; ++k)
        err += std::abs(cp(i, j, k) - f1(i) * f2(j) * f3(k));
  CHECK(err < 1e-12);

  // against the naive sum
  const Mat m = random_matrix(rng, 5, 4);
  const DenseTensor prod = n_mode_product(t, m, 2);
  double loop_err = 0.0;
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 5; ++j)
      for (Index k = 0; k < 2; ++k) {
        cxd acc = 0.0;
        for (Index l = 0; l < 4; ++l) acc += m(j, l) * t(i, l, k);
        loop_err += std::abs(prod(i, j, k) - acc);
      }
  CHECK(loop_err < 1e-12);

  CHECK_THROWS_AS(n_mode_product(t, Mat::Identity(3, 3), 2), std::invalid_argument);
}

TEST_CASE("double contraction against the loop oracle") {
  const DenseTensor a = random_tensor(rng, {2, 3, 2, 4});
  const DenseTensor c = random_tensor(rng, {2, 4, 3});
  const DenseTensor got = contract2(a, {3, 4}, c, {1, 2});
  CHECK(rel_diff(got, ref_contract2(a, {3, 4}, c, {1, 2})) < 1e-12);

  // unfolding-product identity
  const Mat lhs = generalized_unfold(got, ModeSpec({1, 2}, {3}));
  const Mat rhs = generalized_unfold(a, ModeSpec({1, 2}, {3, 4})) *
                  generalized_unfold(c, ModeSpec({1, 2}, {3}));
  CHECK(rel_diff(lhs, rhs) < 1e-12);

  CHECK_THROWS_AS(contract2(a, {1, 2}, c, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(contract2(a, {3, 3}, c, {1, 2}), std::invalid_argument);
}

TEST_CASE("swapped-pair contraction ordering") {
  const DenseTensor a = random_tensor(rng, {2, 3, 4, 5});
  const DenseTensor c = random_tensor(rng, {4, 5, 3});
  // contract modes (4,3) of a with (2,1) of c == (3,4) with (1,2)
  const DenseTensor v1 = contract2(a, {4, 3}, c, {2, 1});
  const DenseTensor v2 = contract2(a, {3, 4}, c, {1, 2});
  CHECK(rel_diff(v1, v2) < 1e-12);
  CHECK(rel_diff(v1, ref_contract2(a, {4, 3}, c, {2, 1})) < 1e-12);
  // transposing the contracted pair of one operand swaps the other's list
  DenseTensor c_swapped({5, 4, 3});
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 5; ++j)
      for (Index k = 0; k < 3; ++k) c_swapped(j, i, k) = c(i, j, k);
  CHECK(rel_diff(contract2(a, {4, 3}, c_swapped, {1, 2}), v2) < 1e-12);
}

TEST_CASE("kronecker and khatri-rao") {
  Mat expected(2, 4);
  expected << 1, 0, 1, 0, 0, 1, 0, 1;
  CHECK((kronecker(Mat::Ones(1, 2), Mat::Identity(2, 2)) - expected).norm() == 0.0);

  // diag(a) as an identity Khatri-Rao with a row vector
  const Vec a = random_vector(rng, 4);
  const Mat d = khatri_rao(Mat::Identity(4, 4), a.transpose());
  CHECK((d - Mat(a.asDiagonal())).norm() == 0.0);

  const Mat x = random_matrix(rng, 4, 3), y = random_matrix(rng, 4, 3);
  const Mat kr = khatri_rao(x, y);
  const Mat gram = (x.adjoint() * x).cwiseProduct(y.adjoint() * y);
  CHECK(rel_diff(Mat(kr.adjoint() * kr), gram) < 1e-12);

  CHECK_THROWS_AS(khatri_rao(Mat::Ones(2, 2), Mat::Ones(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("diagonalization constructions") {
  const Index m = 4, n = 3, k = 6;
  const Vec a = random_vector(rng, m);
  const Mat A = random_matrix(rng, m, n);
  const DenseTensor t3 = random_tensor(rng, {m, n, k});

  SUBCASE("vector to diagonal matrix") {
    const DenseTensor d = build_diag_tensor(a, DiagPattern::VecToMat);
    CHECK((d.as_matrix() - Mat(a.asDiagonal())).norm() == 0.0);
  }
  SUBCASE("matrix, duplicated trailing mode") {
    const DenseTensor d = build_diag_tensor(A, DiagPattern::MatModes23);
    const Mat u = generalized_unfold(d, ModeSpec({1, 3}, {2}));
    CHECK((u - khatri_rao(Mat::Identity(n, n), A)).norm() == 0.0);
    // off-pattern entries are exact zeros, pattern entries exact copies
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index l = 0; l < n; ++l)
          CHECK(d(i, j, l) == (j == l ? A(i, j) : cxd(0.0, 0.0)));
  }
  SUBCASE("matrix, duplicated leading mode") {
    const DenseTensor d = build_diag_tensor(A, DiagPattern::MatModes12);
    const Mat u = generalized_unfold(d, ModeSpec({3, 2}, {1}));
    CHECK((u - khatri_rao(Mat::Identity(m, m), A.transpose())).norm() == 0.0);
  }
  SUBCASE("matrix, doubly diagonal") {
    const DenseTensor d = build_diag_tensor(A, DiagPattern::MatDouble);
    const Mat u = generalized_unfold(d, ModeSpec({1, 3}, {2, 4}));
    const Mat vec_a = Eigen::Map<const Mat>(A.data(), m * n, 1);
    CHECK((u - khatri_rao(Mat::Identity(m * n, m * n), vec_a.transpose())).norm() ==
          0.0);
  }
  SUBCASE("3-way, duplicated trailing mode") {
    const DenseTensor d = build_diag_tensor(t3, DiagPattern::Ten3Modes34);
    const Mat u = generalized_unfold(d, ModeSpec({1, 2, 4}, {3}));
    const Mat inner = generalized_unfold(t3, ModeSpec({1, 2}, {3}));
    CHECK((u - khatri_rao(Mat::Identity(k, k), inner)).norm() == 0.0);
  }
  SUBCASE("3-way, duplicated leading mode") {
    const DenseTensor d = build_diag_tensor(t3, DiagPattern::Ten3Modes12);
    const Mat u = generalized_unfold(d, ModeSpec({3, 4, 2}, {1}));
    const Mat inner = generalized_unfold(t3, ModeSpec({2, 3}, {1}));
    CHECK((u - khatri_rao(Mat::Identity(m, m), inner)).norm() == 0.0);
  }
  SUBCASE("shape mismatch rejected") {
    CHECK_THROWS_AS(build_diag_tensor(A, DiagPattern::VecToMat),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_diag_tensor(t3, DiagPattern::MatDouble),
                    std::invalid_argument);
  }
}

TEST_CASE("hadamard product via double contraction") {
  const Index m = 5, n = 4;
  const Mat A = random_matrix(rng, m, n), B = random_matrix(rng, m, n);
  const DenseTensor da = build_diag_tensor(A, DiagPattern::MatModes12);
  const DenseTensor db = build_diag_tensor(B, DiagPattern::MatModes23);
  const DenseTensor had = contract2(da, {2, 3}, db, {1, 3});
  CHECK(rel_diff(had.as_matrix(), Mat(A.cwiseProduct(B))) < 1e-13);

  // all-ones diagonalized factor reproduces the other matrix
  const DenseTensor dones =
      build_diag_tensor(Mat::Ones(m, n), DiagPattern::MatModes23);
  CHECK(rel_diff(contract2(da, {2, 3}, dones, {1, 3}).as_matrix(), A) < 1e-13);
}

TEST_CASE("cp reconstruction unfolding") {
  const Index i = 3, j = 4, k = 5, r = 2;
  const Mat f1 = random_matrix(rng, i, r), f2 = random_matrix(rng, j, r),
            f3 = random_matrix(rng, k, r);
  DenseTensor cp = DenseTensor::identity(3, r);
  cp = n_mode_product(cp, f1, 1);
  cp = n_mode_product(cp, f2, 2);
  cp = n_mode_product(cp, f3, 3);
  const Mat u = generalized_unfold(cp, ModeSpec({1, 2}, {3}));
  CHECK(rel_diff(u, Mat(khatri_rao(f2, f1) * f3.transpose())) < 1e-12);
}

TEST_CASE("slice-wise multiplication") {
  const Index m = 2, n = 3, j = 2, k = 4;
  const DenseTensor a = random_tensor(rng, {m, n, k});

  SUBCASE("identity slices pass through") {
    DenseTensor b({n, n, k});
    for (Index s = 0; s < k; ++s)
      for (Index d = 0; d < n; ++d) b(d, d, s) = 1.0;
    DenseTensor out = slicewise_multiply(a, b);
    CHECK(rel_diff(out, a) == 0.0);
  }
  SUBCASE("matches the per-slice loop and the contraction route") {
    const DenseTensor b = random_tensor(rng, {n, j, k});
    const DenseTensor direct = slicewise_multiply(a, b);
    double err = 0.0;
    for (Index s = 0; s < k; ++s)
      for (Index row = 0; row < m; ++row)
        for (Index col = 0; col < j; ++col) {
          cxd acc = 0.0;
          for (Index mid = 0; mid < n; ++mid) acc += a(row, mid, s) * b(mid, col, s);
          err += std::abs(direct(row, col, s) - acc);
        }
    CHECK(err < 1e-12);
    const DenseTensor via = contract2(
        a, {2, 3}, build_diag_tensor(b, DiagPattern::Ten3Modes34), {1, 4});
    CHECK(rel_diff(direct, via) < 1e-12);
  }
  SUBCASE("shape mismatch rejected") {
    CHECK_THROWS_AS(slicewise_multiply(a, random_tensor(rng, {n, j, k + 1})),
                    std::invalid_argument);
  }
}

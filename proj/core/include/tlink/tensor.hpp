#pragma once

#include <Eigen/Dense>
#include <complex>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace tlink {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Dense complex tensor with an explicit extent list. Data is linearized with
/// the FIRST index varying fastest, so a 2-way tensor has exactly the memory
/// layout of a column-major matrix. Mode numbers are 1-based throughout the
/// public API; element indices are 0-based.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<Index> dims);
  DenseTensor(std::vector<Index> dims, std::vector<cxd> data);

  /// Super-diagonal tensor I_{order,extent}: ones where all indices agree.
  static DenseTensor identity(int order, Index extent);
  /// 2-way tensor sharing a column-major matrix's layout.
  static DenseTensor from_matrix(const Mat& m);
  /// 1-way tensor from a vector.
  static DenseTensor from_vector(const Vec& v);

  int order() const { return static_cast<int>(dims_.size()); }
  const std::vector<Index>& dims() const { return dims_; }
  /// Extent of 1-based mode n.
  Index extent(int mode) const;
  Index size() const { return static_cast<Index>(data_.size()); }

  cxd& operator()(std::span<const Index> idx);
  cxd operator()(std::span<const Index> idx) const;
  template <class... Is>
  cxd& operator()(Is... is) {
    std::array<Index, sizeof...(Is)> a{static_cast<Index>(is)...};
    return (*this)(std::span<const Index>(a));
  }
  template <class... Is>
  cxd operator()(Is... is) const {
    std::array<Index, sizeof...(Is)> a{static_cast<Index>(is)...};
    return (*this)(std::span<const Index>(a));
  }

  std::span<cxd> data() { return data_; }
  std::span<const cxd> data() const { return data_; }

  /// As a column-major matrix; only valid for 2-way tensors.
  Mat as_matrix() const;

  double norm() const;  // Frobenius / higher-order norm

  DenseTensor& operator+=(const DenseTensor& other);
  DenseTensor& operator-=(const DenseTensor& other);
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) {
    a -= b;
    return a;
  }
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) {
    a += b;
    return a;
  }

 private:
  std::vector<Index> dims_;
  std::vector<cxd> data_;
  Index flat_index(std::span<const Index> idx) const;
};

/// Row/column mode lists of a generalized unfolding, 1-based. Within rows the
/// first-listed mode varies fastest; likewise for columns.
struct ModeSpec {
  std::vector<int> row_modes;
  std::vector<int> col_modes;
  ModeSpec() = default;
  ModeSpec(std::initializer_list<int> rows, std::initializer_list<int> cols)
      : row_modes(rows), col_modes(cols) {}
  ModeSpec(std::vector<int> rows, std::vector<int> cols)
      : row_modes(std::move(rows)), col_modes(std::move(cols)) {}
};

/// Generalized unfolding [t]_(row_modes, col_modes). The spec must list every
/// mode of t exactly once across the two (non-empty) lists.
Mat generalized_unfold(const DenseTensor& t, const ModeSpec& spec);

/// Inverse of generalized_unfold for the given spec and tensor extents.
DenseTensor generalized_fold(const Mat& m, const ModeSpec& spec,
                             std::vector<Index> dims);

/// t x_n m: contracts mode n of t with the columns of m.
DenseTensor n_mode_product(const DenseTensor& t, const Mat& m, int mode);

/// Contraction of two mode pairs: a_modes.first with b_modes.first and
/// a_modes.second with b_modes.second. Output modes are a's uncontracted
/// modes in their original order followed by b's. Computed as a product of
/// generalized unfoldings:
///   [a . b]_(a_rest, b_rest) = [a]_(a_rest, a_modes) * [b]_(b_modes, b_rest).
DenseTensor contract2(const DenseTensor& a, std::pair<int, int> a_modes,
                      const DenseTensor& b, std::pair<int, int> b_modes);

Mat kronecker(const Mat& a, const Mat& b);
/// Column-wise Kronecker product; requires equal column counts.
Mat khatri_rao(const Mat& a, const Mat& b);

/// The six diagonalization constructions linking a vector/matrix/3-way tensor
/// to a higher-order tensor whose designated generalized unfolding is a
/// Khatri-Rao product with an identity matrix:
///
///   VecToMat      a(m)     -> D(m,m)     = a(m);      D = I_M kr a^T
///   MatModes23    A(m,n)   -> D(m,n,n)   = A(m,n);    [D]_([1,3],[2])   = I_N kr A
///   MatModes12    A(m,n)   -> D(m,m,n)   = A(m,n);    [D]_([3,2],[1])   = I_M kr A^T
///   MatDouble     A(m,n)   -> D(m,m,n,n) = A(m,n);    [D]_([1,3],[2,4]) = I_MN kr vec(A)^T
///   Ten3Modes34   A(m,n,k) -> D(m,n,k,k) = A(m,n,k);  [D]_([1,2,4],[3]) = I_K kr [A]_([1,2],[3])
///   Ten3Modes12   A(m,n,k) -> D(m,m,n,k) = A(m,n,k);  [D]_([3,4,2],[1]) = I_M kr [A]_([2,3],[1])
enum class DiagPattern {
  VecToMat,
  MatModes23,
  MatModes12,
  MatDouble,
  Ten3Modes34,
  Ten3Modes12,
};

DenseTensor build_diag_tensor(const DenseTensor& src, DiagPattern pattern);
DenseTensor build_diag_tensor(const Mat& src, DiagPattern pattern);
DenseTensor build_diag_tensor(const Vec& src, DiagPattern pattern);

/// Slice-wise product of a (M,N,K) and b (N,J,K): slice k of the result is
/// A(:,:,k) * B(:,:,k). Equal to contract2(a, {2,3}, build_diag_tensor(b,
/// Ten3Modes34), {1,4}).
DenseTensor slicewise_multiply(const DenseTensor& a, const DenseTensor& b);

/// 4-way block identity core of extents (n*m, n*m, n*m, m): the Kronecker
/// product of the 4-way identity of extent m with the (singleton-padded)
/// 3-way identity of extent n. Entry (i1,i2,i3,i4) with i_k = a_k*n + b_k is
/// one iff a1=a2=a3=i4 and b1=b2=b3.
DenseTensor block_identity_core(Index n, Index m);

}  // namespace tlink

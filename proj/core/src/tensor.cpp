#include "tlink/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace tlink {

namespace {

Index checked_total(const std::vector<Index>& dims) {
  if (dims.empty()) throw std::invalid_argument("tensor needs at least one mode");
  Index total = 1;
  for (Index d : dims) {
    if (d < 1) throw std::invalid_argument("tensor extents must be >= 1");
    total *= d;
  }
  return total;
}

// Validates that spec partitions {1..order}; returns 0-based mode lists.
std::pair<std::vector<int>, std::vector<int>> checked_partition(
    const ModeSpec& spec, int order) {
  if (spec.row_modes.empty() || spec.col_modes.empty())
    throw std::invalid_argument("unfolding needs non-empty row and column mode lists");
  std::vector<char> seen(order, 0);
  auto check = [&](const std::vector<int>& modes) {
    std::vector<int> out;
    out.reserve(modes.size());
    for (int m : modes) {
      if (m < 1 || m > order) throw std::invalid_argument("mode index out of range");
      if (seen[m - 1]) throw std::invalid_argument("duplicate mode in unfolding spec");
      seen[m - 1] = 1;
      out.push_back(m - 1);
    }
    return out;
  };
  auto rows = check(spec.row_modes);
  auto cols = check(spec.col_modes);
  if (rows.size() + cols.size() != static_cast<size_t>(order))
    throw std::invalid_argument("unfolding spec misses modes of the tensor");
  return {rows, cols};
}

// Per-mode stride within the unfolding row (or column) position, plus a
// row/column selector. Walking the tensor linearly while stepping an odometer
// keeps the remap O(1) per element.
struct UnfoldPlan {
  std::vector<Index> stride;  // contribution of mode m to its side's position
  std::vector<char> in_rows;
  Index rows = 1, cols = 1;
};

UnfoldPlan make_plan(const std::vector<Index>& dims, const ModeSpec& spec) {
  const int order = static_cast<int>(dims.size());
  auto [rows, cols] = checked_partition(spec, order);
  UnfoldPlan plan;
  plan.stride.assign(order, 0);
  plan.in_rows.assign(order, 0);
  Index s = 1;
  for (int m : rows) {
    plan.stride[m] = s;
    plan.in_rows[m] = 1;
    s *= dims[m];
  }
  plan.rows = s;
  s = 1;
  for (int m : cols) {
    plan.stride[m] = s;
    s *= dims[m];
  }
  plan.cols = s;
  return plan;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<Index> dims)
    : dims_(std::move(dims)), data_(checked_total(dims_)) {}

DenseTensor::DenseTensor(std::vector<Index> dims, std::vector<cxd> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (checked_total(dims_) != static_cast<Index>(data_.size()))
    throw std::invalid_argument("data length does not match extents");
}

DenseTensor DenseTensor::identity(int order, Index extent) {
  if (order < 1 || extent < 1) throw std::invalid_argument("bad identity tensor shape");
  DenseTensor t(std::vector<Index>(order, extent));
  Index stride = 0, s = 1;
  for (int m = 0; m < order; ++m) {
    stride += s;
    s *= extent;
  }
  for (Index r = 0; r < extent; ++r) t.data_[r * stride] = 1.0;
  return t;
}

DenseTensor DenseTensor::from_matrix(const Mat& m) {
  DenseTensor t({m.rows(), m.cols()});
  Eigen::Map<Mat>(t.data_.data(), m.rows(), m.cols()) = m;
  return t;
}

DenseTensor DenseTensor::from_vector(const Vec& v) {
  DenseTensor t({v.size()});
  std::copy(v.data(), v.data() + v.size(), t.data_.begin());
  return t;
}

Index DenseTensor::extent(int mode) const {
  if (mode < 1 || mode > order()) throw std::invalid_argument("mode index out of range");
  return dims_[mode - 1];
}

Index DenseTensor::flat_index(std::span<const Index> idx) const {
  if (idx.size() != dims_.size())
    throw std::invalid_argument("wrong number of element indices");
  Index pos = 0, s = 1;
  for (size_t m = 0; m < dims_.size(); ++m) {
    if (idx[m] < 0 || idx[m] >= dims_[m])
      throw std::out_of_range("tensor element index out of bounds");
    pos += idx[m] * s;
    s *= dims_[m];
  }
  return pos;
}

cxd& DenseTensor::operator()(std::span<const Index> idx) {
  return data_[flat_index(idx)];
}

cxd DenseTensor::operator()(std::span<const Index> idx) const {
  return data_[flat_index(idx)];
}

Mat DenseTensor::as_matrix() const {
  if (order() != 2) throw std::invalid_argument("as_matrix needs a 2-way tensor");
  return Eigen::Map<const Mat>(data_.data(), dims_[0], dims_[1]);
}

double DenseTensor::norm() const {
  double s = 0.0;
  for (const cxd& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
  if (dims_ != other.dims_) throw std::invalid_argument("extent mismatch");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
  if (dims_ != other.dims_) throw std::invalid_argument("extent mismatch");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Mat generalized_unfold(const DenseTensor& t, const ModeSpec& spec) {
  const auto& dims = t.dims();
  const UnfoldPlan plan = make_plan(dims, spec);
  Mat out(plan.rows, plan.cols);
  const auto data = t.data();
  std::vector<Index> idx(dims.size(), 0);
  Index rpos = 0, cpos = 0;
  const Index total = t.size();
  for (Index p = 0; p < total; ++p) {
    out(rpos, cpos) = data[p];
    for (size_t m = 0; m < dims.size(); ++m) {
      Index& contrib = plan.in_rows[m] ? rpos : cpos;
      if (++idx[m] < dims[m]) {
        contrib += plan.stride[m];
        break;
      }
      contrib -= plan.stride[m] * (dims[m] - 1);
      idx[m] = 0;
    }
  }
  return out;
}

DenseTensor generalized_fold(const Mat& m, const ModeSpec& spec,
                             std::vector<Index> dims) {
  const UnfoldPlan plan = make_plan(dims, spec);
  if (m.rows() != plan.rows || m.cols() != plan.cols)
    throw std::invalid_argument("matrix shape inconsistent with extents under spec");
  DenseTensor t(std::move(dims));
  auto data = t.data();
  const auto& d = t.dims();
  std::vector<Index> idx(d.size(), 0);
  Index rpos = 0, cpos = 0;
  const Index total = t.size();
  for (Index p = 0; p < total; ++p) {
    data[p] = m(rpos, cpos);
    for (size_t k = 0; k < d.size(); ++k) {
      Index& contrib = plan.in_rows[k] ? rpos : cpos;
      if (++idx[k] < d[k]) {
        contrib += plan.stride[k];
        break;
      }
      contrib -= plan.stride[k] * (d[k] - 1);
      idx[k] = 0;
    }
  }
  return t;
}

DenseTensor n_mode_product(const DenseTensor& t, const Mat& m, int mode) {
  if (mode < 1 || mode > t.order())
    throw std::invalid_argument("mode index out of range");
  if (m.cols() != t.extent(mode))
    throw std::invalid_argument("matrix columns must match the mode extent");
  ModeSpec spec;
  spec.row_modes = {mode};
  for (int k = 1; k <= t.order(); ++k)
    if (k != mode) spec.col_modes.push_back(k);
  Mat unfolded = generalized_unfold(t, spec);
  std::vector<Index> out_dims = t.dims();
  out_dims[mode - 1] = m.rows();
  return generalized_fold(m * unfolded, spec, std::move(out_dims));
}

DenseTensor contract2(const DenseTensor& a, std::pair<int, int> a_modes,
                      const DenseTensor& b, std::pair<int, int> b_modes) {
  auto [an, ak] = a_modes;
  auto [bm, bl] = b_modes;
  if (an == ak || bm == bl)
    throw std::invalid_argument("contraction modes within one tensor must differ");
  if (an < 1 || an > a.order() || ak < 1 || ak > a.order() || bm < 1 ||
      bm > b.order() || bl < 1 || bl > b.order())
    throw std::invalid_argument("contraction mode out of range");
  if (a.extent(an) != b.extent(bm) || a.extent(ak) != b.extent(bl))
    throw std::invalid_argument("contracted extents do not match");

  ModeSpec a_spec, b_spec;
  std::vector<Index> out_dims;
  for (int k = 1; k <= a.order(); ++k)
    if (k != an && k != ak) {
      a_spec.row_modes.push_back(k);
      out_dims.push_back(a.extent(k));
    }
  a_spec.col_modes = {an, ak};
  b_spec.row_modes = {bm, bl};
  for (int k = 1; k <= b.order(); ++k)
    if (k != bm && k != bl) {
      b_spec.col_modes.push_back(k);
      out_dims.push_back(b.extent(k));
    }
  if (a_spec.row_modes.empty() || b_spec.col_modes.empty())
    throw std::invalid_argument("contraction must leave free modes on both operands");

  Mat product = generalized_unfold(a, a_spec) * generalized_unfold(b, b_spec);

  ModeSpec out_spec;
  const int p = static_cast<int>(a_spec.row_modes.size());
  const int q = static_cast<int>(b_spec.col_modes.size());
  for (int k = 1; k <= p; ++k) out_spec.row_modes.push_back(k);
  for (int k = p + 1; k <= p + q; ++k) out_spec.col_modes.push_back(k);
  return generalized_fold(product, out_spec, std::move(out_dims));
}

Mat kronecker(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat khatri_rao(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("khatri_rao needs equal column counts");
  Mat out(a.rows() * b.rows(), a.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.col(j).segment(i * b.rows(), b.rows()) = a(i, j) * b.col(j);
  return out;
}

DenseTensor build_diag_tensor(const DenseTensor& src, DiagPattern pattern) {
  switch (pattern) {
    case DiagPattern::VecToMat: {
      if (src.order() != 1) throw std::invalid_argument("VecToMat needs a vector");
      const Index m = src.extent(1);
      DenseTensor d({m, m});
      for (Index i = 0; i < m; ++i) d(i, i) = src(i);
      return d;
    }
    case DiagPattern::MatModes23: {
      if (src.order() != 2) throw std::invalid_argument("MatModes23 needs a matrix");
      const Index m = src.extent(1), n = src.extent(2);
      DenseTensor d({m, n, n});
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i) d(i, j, j) = src(i, j);
      return d;
    }
    case DiagPattern::MatModes12: {
      if (src.order() != 2) throw std::invalid_argument("MatModes12 needs a matrix");
      const Index m = src.extent(1), n = src.extent(2);
      DenseTensor d({m, m, n});
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i) d(i, i, j) = src(i, j);
      return d;
    }
    case DiagPattern::MatDouble: {
      if (src.order() != 2) throw std::invalid_argument("MatDouble needs a matrix");
      const Index m = src.extent(1), n = src.extent(2);
      DenseTensor d({m, m, n, n});
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i) d(i, i, j, j) = src(i, j);
      return d;
    }
    case DiagPattern::Ten3Modes34: {
      if (src.order() != 3) throw std::invalid_argument("Ten3Modes34 needs a 3-way tensor");
      const Index m = src.extent(1), n = src.extent(2), k = src.extent(3);
      DenseTensor d({m, n, k, k});
      for (Index c = 0; c < k; ++c)
        for (Index j = 0; j < n; ++j)
          for (Index i = 0; i < m; ++i) d(i, j, c, c) = src(i, j, c);
      return d;
    }
    case DiagPattern::Ten3Modes12: {
      if (src.order() != 3) throw std::invalid_argument("Ten3Modes12 needs a 3-way tensor");
      const Index m = src.extent(1), n = src.extent(2), k = src.extent(3);
      DenseTensor d({m, m, n, k});
      for (Index c = 0; c < k; ++c)
        for (Index j = 0; j < n; ++j)
          for (Index i = 0; i < m; ++i) d(i, i, j, c) = src(i, j, c);
      return d;
    }
  }
  throw std::invalid_argument("unknown diagonalization pattern");
}

DenseTensor build_diag_tensor(const Mat& src, DiagPattern pattern) {
  return build_diag_tensor(DenseTensor::from_matrix(src), pattern);
}

DenseTensor build_diag_tensor(const Vec& src, DiagPattern pattern) {
  return build_diag_tensor(DenseTensor::from_vector(src), pattern);
}

DenseTensor slicewise_multiply(const DenseTensor& a, const DenseTensor& b) {
  if (a.order() != 3 || b.order() != 3)
    throw std::invalid_argument("slicewise_multiply needs two 3-way tensors");
  const Index m = a.extent(1), n = a.extent(2), k = a.extent(3);
  const Index j = b.extent(2);
  if (b.extent(1) != n || b.extent(3) != k)
    throw std::invalid_argument("slice shapes do not match");
  DenseTensor out({m, j, k});
  // First-index-fastest layout makes every slice a contiguous column-major
  // matrix, so each slice product is one GEMM.
  for (Index s = 0; s < k; ++s) {
    Eigen::Map<const Mat> as(a.data().data() + s * m * n, m, n);
    Eigen::Map<const Mat> bs(b.data().data() + s * n * j, n, j);
    Eigen::Map<Mat>(out.data().data() + s * m * j, m, j) = as * bs;
  }
  return out;
}

DenseTensor block_identity_core(Index n, Index m) {
  if (n < 1 || m < 1) throw std::invalid_argument("bad core extents");
  const Index e = n * m;
  DenseTensor d({e, e, e, m});
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < n; ++b) {
      const Index i = a * n + b;
      d(i, i, i, a) = 1.0;
    }
  return d;
}

}  // namespace tlink

#include "tlink/linalg.hpp"

#include <Eigen/SVD>
#include <stdexcept>

namespace tlink {

Mat pinv(const Mat& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return Mat::Zero(m.cols(), m.rows());
  if (rel_tol < 0.0)
    rel_tol = 1e-12 * static_cast<double>(std::max(m.rows(), m.cols()));
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = rel_tol * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 0.0) inv_sv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
}

Eigen::VectorXd singular_values(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues();
}

Index numerical_rank(const Mat& m, double rel_tol) {
  const Eigen::VectorXd sv = singular_values(m);
  if (sv.size() == 0) return 0;
  const double cutoff = rel_tol * sv(0);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 0.0) ++r;
  return r;
}

KrfResult lskrf(const Mat& y, Index q, Index k) {
  if (q < 1 || k < 1 || y.rows() != q * k)
    throw std::invalid_argument("lskrf: rows must equal q*k");
  const Index r = y.cols();
  KrfResult out;
  out.left = Mat::Zero(k, r);
  out.right = Mat::Zero(q, r);
  for (Index c = 0; c < r; ++c) {
    // vec^{-1}: kron(right, left) stacks right(0)*left, right(1)*left, ...
    Eigen::Map<const Mat> m(y.col(c).data(), k, q);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma = svd.singularValues()(0);
    if (sigma <= 0.0) continue;  // zero column convention
    const double s = std::sqrt(sigma);
    out.left.col(c) = s * svd.matrixU().col(0);
    out.right.col(c) = s * svd.matrixV().col(0).conjugate();
  }
  return out;
}

}  // namespace tlink

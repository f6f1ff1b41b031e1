#include "slrkit/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace slrkit::linalg {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  const auto uniform = [&engine] {
    // 53 random bits in (0, 1]
    return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
  };
  Eigen::MatrixXd out(rows, cols);
  const Eigen::Index n = rows * cols;
  for (Eigen::Index i = 0; i < n; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    out.data()[i] = r * std::cos(theta);
    if (i + 1 < n) out.data()[i + 1] = r * std::sin(theta);
  }
  return out;
}

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

template <typename Matrix>
Svd randomized_svd_impl(const Matrix& a, const RandomizedSvdOptions& opt) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (opt.rank < 1) throw std::invalid_argument("randomized_svd: rank must be >= 1");
  const Eigen::Index k = std::min<Eigen::Index>({opt.rank, m, n});
  const Eigen::Index l = std::min<Eigen::Index>({k + std::max(0, opt.oversampling), m, n});
  if (k == 0) return {};

  const Eigen::MatrixXd omega = gaussian_matrix(n, l, opt.seed);
  Eigen::MatrixXd q = orthonormal_basis(a * omega);
  for (int it = 0; it < opt.power_iterations; ++it) {
    const Eigen::MatrixXd z = orthonormal_basis(a.transpose() * q);
    q = orthonormal_basis(a * z);
  }
  // B^T = A^T Q  (n x l); SVD(B^T) = V_b S U_b^T, so B = U_b S V_b^T.
  const Eigen::MatrixXd bt = a.transpose() * q;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);

  Svd out;
  out.s = svd.singularValues().head(k);
  out.u = q * svd.matrixV().leftCols(k);
  out.v = svd.matrixU().leftCols(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index idx = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&idx);
    if (out.u(idx, j) < 0) {
      out.u.col(j) *= -1.0;
      out.v.col(j) *= -1.0;
    }
  }
  return out;
}

}  // namespace

Svd randomized_svd(const Eigen::SparseMatrix<double>& a, const RandomizedSvdOptions& options) {
  return randomized_svd_impl(a, options);
}

Svd randomized_svd(const Eigen::MatrixXd& a, const RandomizedSvdOptions& options) {
  return randomized_svd_impl(a, options);
}

double reconstruction_error(const Eigen::MatrixXd& a, const Svd& svd) {
  const Eigen::MatrixXd approx = svd.u * svd.s.asDiagonal() * svd.v.transpose();
  return (a - approx).norm();
}

}  // namespace slrkit::linalg

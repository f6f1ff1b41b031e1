#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>

namespace slrkit::linalg {

struct Svd {
  Eigen::MatrixXd u;  // rows x rank
  Eigen::VectorXd s;  // descending
  Eigen::MatrixXd v;  // cols x rank
};

struct RandomizedSvdOptions {
  int rank = 50;
  int oversampling = 10;
  int power_iterations = 4;
  std::uint64_t seed = 0;
};

/// Standard normal matrix from a seeded mt19937_64 via Box-Muller. Same seed, same bits.
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// Rank-k truncated SVD by randomized subspace iteration (Halko, Martinsson & Tropp):
/// Gaussian sketch of k + oversampling columns, `power_iterations` rounds of
/// re-orthonormalized power iteration, then an exact SVD of the projected matrix.
/// Singular vector signs are fixed so each column of u has a positive largest-magnitude entry.
Svd randomized_svd(const Eigen::SparseMatrix<double>& a, const RandomizedSvdOptions& options);
Svd randomized_svd(const Eigen::MatrixXd& a, const RandomizedSvdOptions& options);

/// Frobenius norm of a - u diag(s) v^T.
double reconstruction_error(const Eigen::MatrixXd& a, const Svd& svd);

}  // namespace slrkit::linalg

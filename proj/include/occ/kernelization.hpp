#pragma once

#include <Eigen/Dense>

namespace occ {

inline constexpr double kNptEigenFloor = 1e-10;

/// exp(-||x_i - y_j||^2 / (2 sigma^2)) for rows of x and y.
Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sigma);

/// Explicit feature map from the centered training kernel.
///
/// With K_c = H K H (H the centering matrix) decomposed as U diag(lambda) U^T,
/// the retained training images are Phi = diag(lambda)^{1/2} U^T, so that
/// Phi^T Phi reproduces K_c. A new point maps to diag(lambda)^{-1/2} U^T k_c,
/// where k_c is its kernel column centered with the *training* statistics.
struct NptState {
  Eigen::MatrixXd train_data;        // N x D, in the space the kernel sees
  double sigma = 1.0;
  Eigen::VectorXd kernel_row_means;  // length N, of the uncentered K
  double kernel_grand_mean = 0.0;
  Eigen::MatrixXd eigvecs;           // N x r
  Eigen::VectorXd eigvals;           // length r, all > floor

  Eigen::Index rank() const { return eigvals.size(); }
  Eigen::Index input_dims() const { return train_data.cols(); }
};

struct NptFit {
  Eigen::MatrixXd phi;  // r x N
  NptState state;
};

/// Throws DataError when no eigenvalue of the centered kernel exceeds `eps`.
NptFit npt_fit(const Eigen::MatrixXd& k, double eps = kNptEigenFloor);

/// Fit from data: builds the RBF kernel, then npt_fit, and records the data.
NptFit npt_fit_rbf(const Eigen::MatrixXd& x, double sigma, double eps = kNptEigenFloor);

/// Map the rows of `x` (M x D) to their r-dimensional images (M x r).
Eigen::MatrixXd npt_map_rows(const Eigen::MatrixXd& x, const NptState& state);
Eigen::VectorXd npt_map(const Eigen::VectorXd& x_star, const NptState& state);

/// Center test kernel columns (N x M, uncentered) against the training statistics.
Eigen::MatrixXd center_test_kernel(const Eigen::MatrixXd& k_test, const NptState& state);

}  // namespace occ

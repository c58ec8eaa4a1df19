#pragma once

#include <Eigen/Dense>

#include "occ/subspace.hpp"
#include "occ/svdd.hpp"

namespace occ {

/// One-class SVM dual: minimize 0.5 a^T K a subject to sum(a) = 1,
/// 0 <= a <= 1/(nu N). rho is averaged over free support vectors (midpoint
/// of the KKT bounds when there are none). `train_repr` is left empty.
OcsvmModel train_ocsvm(const Eigen::MatrixXd& k, double nu, const DualOptions& options = {});

/// f(x) = sum_i alpha_i k(x_i, x) - rho for precomputed kernel columns
/// (N x M); non-negative means normal.
Eigen::VectorXd ocsvm_decision(const OcsvmModel& model, const Eigen::MatrixXd& k_cols);

/// Kernel columns k(x_i, rows_j) for an OCSVM fitted on `model.train_repr`.
Eigen::MatrixXd ocsvm_kernel_columns(const OcsvmModel& model, const Eigen::MatrixXd& rows);

/// Ellipsoidal description: SVDD after whitening the input by the floored
/// inverse square root of the covariance (S_t / N).
struct EsvddModel {
  Eigen::MatrixXd whitener;
  SphereModel sphere;
};
EsvddModel train_esvdd(const Eigen::MatrixXd& x, double c, double eps = kScatterFloor,
                       const DualOptions& options = {});

}  // namespace occ

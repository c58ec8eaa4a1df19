#pragma once

#include <Eigen/Dense>

namespace occ {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Flip v so that its first non-negligible component is positive.
void normalize_sign(Eigen::Ref<VectorXd> v);

/// (A + A^T) / 2
MatrixXd symmetrize(const MatrixXd& a);

/// Largest |A_ij - A_ji|.
double asymmetry(const MatrixXd& a);

/// Eigendecomposition of a symmetric matrix with eigenvalues in descending
/// order (ties keep the solver's ascending index order) and sign-normalized
/// eigenvector columns.
struct SymEigen {
  VectorXd values;
  MatrixXd vectors;
};
SymEigen sym_eigen_descending(const MatrixXd& a);

/// Row-orthonormalize a d x D matrix with a thin QR of its transpose. The
/// triangular factor is forced to a positive diagonal, so an already
/// orthonormal input comes back unchanged.
MatrixXd orthonormalize_rows(const MatrixXd& q);

}  // namespace occ

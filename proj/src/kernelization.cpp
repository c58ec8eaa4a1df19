#include "occ/kernelization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "occ/errors.hpp"
#include "occ/linalg.hpp"

namespace occ {

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sigma) {
  if (!(sigma > 0.0)) throw UsageError("rbf_kernel: sigma must be > 0");
  if (x.cols() != y.cols()) throw DataError("rbf_kernel: dimension mismatch");
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd k(x.rows(), y.rows());
  for (Eigen::Index j = 0; j < y.rows(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      k(i, j) = std::exp(scale * (x.row(i) - y.row(j)).squaredNorm());
    }
  }
  return k;
}

NptFit npt_fit(const Eigen::MatrixXd& k, double eps) {
  const Eigen::Index n = k.rows();
  if (n == 0 || k.cols() != n) throw UsageError("npt_fit: kernel must be square and nonempty");
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if (asymmetry(k) > 1e-9 * scale) throw DataError("npt_fit: kernel is not symmetric");

  NptFit out;
  out.state.kernel_row_means = k.rowwise().mean();
  out.state.kernel_grand_mean = out.state.kernel_row_means.mean();
  Eigen::MatrixXd centered = k;
  centered.colwise() -= out.state.kernel_row_means;
  centered.rowwise() -= out.state.kernel_row_means.transpose();
  centered.array() += out.state.kernel_grand_mean;

  const SymEigen eig = sym_eigen_descending(centered);
  Eigen::Index r = 0;
  while (r < n && eig.values(r) > eps) ++r;
  if (r == 0) {
    std::ostringstream msg;
    msg << "degenerate kernel: no centered eigenvalue above " << eps;
    throw DataError(msg.str());
  }
  out.state.eigvals = eig.values.head(r);
  out.state.eigvecs = eig.vectors.leftCols(r);
  out.phi = out.state.eigvals.cwiseSqrt().asDiagonal() * out.state.eigvecs.transpose();
  return out;
}

NptFit npt_fit_rbf(const Eigen::MatrixXd& x, double sigma, double eps) {
  NptFit out = npt_fit(rbf_kernel(x, x, sigma), eps);
  out.state.train_data = x;
  out.state.sigma = sigma;
  return out;
}

Eigen::MatrixXd center_test_kernel(const Eigen::MatrixXd& k_test, const NptState& state) {
  Eigen::MatrixXd centered = k_test;
  const Eigen::RowVectorXd col_means = k_test.colwise().mean();
  centered.rowwise() -= col_means;
  centered.colwise() -= state.kernel_row_means;
  centered.array() += state.kernel_grand_mean;
  return centered;
}

Eigen::MatrixXd npt_map_rows(const Eigen::MatrixXd& x, const NptState& state) {
  if (x.cols() != state.input_dims()) {
    std::ostringstream msg;
    msg << "npt_map: expected dimension " << state.input_dims() << ", found " << x.cols();
    throw DataError(msg.str());
  }
  const Eigen::MatrixXd k_test = rbf_kernel(state.train_data, x, state.sigma);
  const Eigen::MatrixXd projected = state.eigvecs.transpose() * center_test_kernel(k_test, state);
  return (state.eigvals.cwiseSqrt().cwiseInverse().asDiagonal() * projected).transpose();
}

Eigen::VectorXd npt_map(const Eigen::VectorXd& x_star, const NptState& state) {
  return npt_map_rows(x_star.transpose(), state).row(0).transpose();
}

}  // namespace occ

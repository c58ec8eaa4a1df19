#include "occ/baselines.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "occ/errors.hpp"
#include "occ/graphs.hpp"
#include "occ/kernelization.hpp"

namespace occ {

OcsvmModel train_ocsvm(const Eigen::MatrixXd& k, double nu, const DualOptions& options) {
  const Eigen::Index n = k.rows();
  if (!(nu > 0.0 && nu <= 1.0)) throw UsageError("train_ocsvm: nu must lie in (0, 1]");
  if (n == 0 || k.cols() != n) throw UsageError("train_ocsvm: kernel must be square and nonempty");
  if (nu * static_cast<double>(n) < 1.0 - 1e-12) {
    std::ostringstream msg;
    msg << "infeasible nu: nu*N = " << nu * static_cast<double>(n) << " < 1";
    throw DataError(msg.str());
  }
  const double upper = std::min(1.0, 1.0 / (nu * static_cast<double>(n)));
  SimplexQpResult qp = solve_simplex_qp(k, Eigen::VectorXd::Zero(n), upper, options);

  OcsvmModel model;
  model.nu = nu;
  model.iterations = qp.iterations;
  const double tol = options.partition_tol * upper;
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double lower_bound = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = qp.alpha(i);
    const double g = qp.gradient(i);
    if (a <= tol) {
      upper_bound = std::min(upper_bound, g);
    } else if (a >= upper - tol) {
      lower_bound = std::max(lower_bound, g);
    } else {
      free_sum += g;
      ++free_count;
    }
  }
  if (free_count > 0) {
    model.rho = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(lower_bound) && std::isfinite(upper_bound)) {
    model.rho = 0.5 * (lower_bound + upper_bound);
  } else {
    model.rho = std::isfinite(lower_bound) ? lower_bound : upper_bound;
  }
  model.alpha = std::move(qp.alpha);
  return model;
}

Eigen::VectorXd ocsvm_decision(const OcsvmModel& model, const Eigen::MatrixXd& k_cols) {
  if (k_cols.rows() != model.alpha.size()) throw DataError("ocsvm_decision: kernel size mismatch");
  return (k_cols.transpose() * model.alpha).array() - model.rho;
}

Eigen::MatrixXd ocsvm_kernel_columns(const OcsvmModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.train_repr.cols()) {
    std::ostringstream msg;
    msg << "ocsvm: expected dimension " << model.train_repr.cols() << ", found " << rows.cols();
    throw DataError(msg.str());
  }
  if (model.sigma) return rbf_kernel(model.train_repr, rows, *model.sigma);
  return model.train_repr * rows.transpose();
}

EsvddModel train_esvdd(const Eigen::MatrixXd& x, double c, double eps, const DualOptions& options) {
  if (x.rows() < 2) throw DataError("train_esvdd: need at least 2 points");
  EsvddModel model;
  model.whitener = whitener(scatter_from_graph(x, pca_laplacian(x.rows()).values), eps);
  Eigen::MatrixXd p = x * model.whitener;
  DualSolution dual = solve_dual(linear_gram(p), c, options);
  model.sphere = fit_sphere(std::move(dual), std::move(p));
  return model;
}

}  // namespace occ

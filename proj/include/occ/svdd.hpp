#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace occ {

struct DualOptions {
  /// Stop once the maximal KKT violation (g_j - g_i over a violating pair) is below this.
  double kkt_tol = 1e-6;
  /// Threshold for classifying alphas as inside / support / outside.
  double partition_tol = 1e-6;
  std::size_t max_iterations = 10000;
  /// Keep the objective after every pair update (for monotonicity checks).
  bool record_trace = false;
};

struct AlphaPartition {
  std::vector<std::size_t> inside;
  std::vector<std::size_t> support;
  std::vector<std::size_t> outside;
};

struct DualSolution {
  Eigen::VectorXd alpha;
  double C = 1.0;
  std::vector<std::size_t> inside_idx;
  std::vector<std::size_t> support_idx;
  std::vector<std::size_t> outside_idx;
  /// sum_i alpha_i K_ii - alpha^T K alpha at the returned alpha.
  double objective = 0.0;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;
};

/// Hypersphere fitted in a fixed representation.
struct SphereModel {
  DualSolution dual;
  Eigen::MatrixXd train_repr;  // N x d
  Eigen::VectorXd center;      // u = P^T alpha
  double radius = 0.0;
};

/// K = P P^T for row-sample data P.
Eigen::MatrixXd linear_gram(const Eigen::MatrixXd& p);

/// Result of the generic solver below.
struct SimplexQpResult {
  Eigen::VectorXd alpha;
  Eigen::VectorXd gradient;
  std::size_t iterations = 0;
  double violation = 0.0;
  std::vector<double> trace;
};

/// Minimize 0.5 a^T H a + p^T a subject to sum(a) = 1, 0 <= a <= upper by
/// two-coordinate exchange: each step picks the maximally violating pair
/// (lowest index on ties) and solves the pair subproblem in closed form.
/// Shared by the SVDD and one-class SVM duals.
SimplexQpResult solve_simplex_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& p, double upper,
                                 const DualOptions& options);

/// SVDD dual: maximize sum a_i K_ii - a^T K a, sum a = 1, 0 <= a <= C.
DualSolution solve_dual(const Eigen::MatrixXd& k, double c, const DualOptions& options = {});

/// inside: a <= tol; outside: a >= C - tol; support: everything between.
AlphaPartition partition_alphas(const Eigen::VectorXd& alpha, double c, double tol);

/// Mean distance from the support vectors to the center u = P^T alpha. With no
/// support vectors, the smallest distance among outside points is used.
double radius(const DualSolution& solution, const Eigen::MatrixXd& p);

SphereModel fit_sphere(DualSolution dual, Eigen::MatrixXd p);

/// ||x - u||^2 - R^2; positive means outlier.
double score(const Eigen::VectorXd& x_star, const SphereModel& model);
Eigen::VectorXd score_rows(const Eigen::MatrixXd& rows, const SphereModel& model);

}  // namespace occ

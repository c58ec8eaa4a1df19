#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "occ/dataio.hpp"
#include "occ/graphs.hpp"
#include "occ/kernelization.hpp"
#include "occ/svdd.hpp"

namespace occ {

enum class Family { svdd, esvdd, ocsvm, ssvdd, gessvdd };
enum class Solver { gradient, spectral, spectral_regression };
enum class Direction { min, max };
enum class Psi { psi0, psi1, psi2, psi3 };

/// Eigenvalue floor used whenever S_x or S_Q is inverted.
inline constexpr double kScatterFloor = 1e-6;
inline constexpr double kDefaultRidge = 1e-3;

struct TrainConfig {
  Family family = Family::gessvdd;
  GraphKind graph = GraphKind::knn;
  Solver solver = Solver::gradient;
  Direction direction = Direction::min;
  Psi psi = Psi::psi0;
  /// Trade-off C (for ocsvm: nu).
  double C = 0.1;
  int d = 2;
  double beta = 1.0;
  double eta = 1.0;
  int iterations = 5;
  /// RBF width; when set, data goes through the NPT map first.
  std::optional<double> sigma;
  int knn_k = kDefaultNeighbors;
  double eps = kScatterFloor;
  double ridge = kDefaultRidge;
  DualOptions dual;

  /// Throws UsageError for unsupported or out-of-range combinations.
  void validate() const;
  bool uses_projection() const { return family == Family::ssvdd || family == Family::gessvdd; }
};

struct ProjectionState {
  Eigen::MatrixXd q;         // d x D
  Eigen::MatrixXd s_x;       // D x D
  Eigen::MatrixXd s_q;       // d x d
  Eigen::MatrixXd whitener;  // d x d
};

/// One-class SVM in its nu-parameterization.
struct OcsvmModel {
  Eigen::VectorXd alpha;
  double rho = 0.0;
  double nu = 0.5;
  std::optional<double> sigma;  // RBF width, linear kernel when empty
  Eigen::MatrixXd train_repr;   // N x D
  std::size_t iterations = 0;
};

struct TrainedModel {
  static constexpr int kVersion = 1;

  TrainConfig config;
  NormStats norm;
  std::vector<std::string> columns;
  std::optional<NptState> npt;
  ProjectionState projection;
  SphereModel sphere;                // all families except ocsvm
  std::optional<OcsvmModel> ocsvm;   // ocsvm only
  std::vector<std::string> warnings;

  Eigen::Index input_dims() const { return norm.mean.size(); }
};

// ---- building blocks ------------------------------------------------------

/// Rows are the top-d eigenvectors of the total scatter of `x` (descending
/// eigenvalue, sign-normalized).
Eigen::MatrixXd init_projection(const Eigen::MatrixXd& x, int d);

/// X^T L X (row-sample data), symmetrized.
Eigen::MatrixXd scatter_from_graph(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l);

/// V max(Lambda, eps)^{-1/2} V^T
Eigen::MatrixXd whitener(const Eigen::MatrixXd& s_q, double eps = kScatterFloor);

/// diag(alpha) - alpha alpha^T
Eigen::MatrixXd alpha_laplacian(const Eigen::VectorXd& alpha);

/// M = X^T (diag(alpha) - alpha alpha^T) X without forming the N x N matrix.
Eigen::MatrixXd alpha_scatter(const Eigen::MatrixXd& x, const Eigen::VectorXd& alpha);

/// Graph-embedded criterion J(Q) = tr((Q S_x Q^T)^{-1} Q M Q^T), the inverse
/// taken through the floored whitener.
double gessvdd_criterion(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m,
                         const Eigen::MatrixXd& s_x, double eps = kScatterFloor);
/// dJ/dQ = 2 S_Q^{-1} Q M - 2 S_Q^{-1} Q M Q^T S_Q^{-1} Q S_x
Eigen::MatrixXd gessvdd_gradient(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m,
                                 const Eigen::MatrixXd& s_x, double eps = kScatterFloor);

/// Plain subspace criterion tr(Q M Q^T) + beta tr(Q F Q^T), F the Psi factor.
double ssvdd_criterion(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m,
                       const Eigen::MatrixXd& psi_factor, double beta);
/// 2 Q M + beta * 2 Q F
Eigen::MatrixXd ssvdd_gradient(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m,
                               const Eigen::MatrixXd& psi_factor, double beta);

struct PsiTerm {
  Eigen::VectorXd lambda;  // length N
  Eigen::MatrixXd factor;  // D x D: X^T lambda lambda^T X
};

/// Psi0: none; Psi1: all ones; Psi2: alpha on support vectors only;
/// Psi3: alpha wherever alpha > 0.
PsiTerm psi_regularizer(Psi variant, const Eigen::MatrixXd& x, const Eigen::VectorXd& alpha,
                        double c, double tol = 1e-6);

/// Q -/+ eta * grad (min / max), optionally followed by row re-orthonormalization.
Eigen::MatrixXd gradient_update(const Eigen::MatrixXd& q, const Eigen::MatrixXd& grad, double eta,
                                Direction direction, bool orthonormalize, int iteration = 0);

struct EigenSelection {
  Eigen::MatrixXd vectors;  // columns are the selected eigenvectors
  Eigen::VectorXd values;
  std::size_t padded = 0;   // picks that had to come from non-positive eigenvalues
};

/// Solve A v = lambda (B + eps I) v and keep d eigenpairs: the largest
/// positive (max) or the smallest positive (min). Short positive sets are
/// padded with the remaining eigenvectors of smallest |lambda|.
EigenSelection select_generalized_eigen(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int d,
                                        Direction direction, double eps = kScatterFloor);

/// Rows of the result are the selected generalized eigenvectors of (M, S_x).
EigenSelection spectral_update(const Eigen::MatrixXd& m, const Eigen::MatrixXd& s_x, int d,
                               Direction direction, double eps = kScatterFloor);

/// Sample-space targets from (L_alpha, L_x), then ridge regression of each
/// target onto the data: (X^T X + ridge I) q_k = X^T t_k. Result vectors are
/// the rows of Q (returned as columns of `vectors`).
EigenSelection spectral_regression_update(const Eigen::MatrixXd& l_alpha, const Eigen::MatrixXd& l_x,
                                          const Eigen::MatrixXd& x, int d, Direction direction,
                                          double ridge = kDefaultRidge, double eps = kScatterFloor);

// ---- training -------------------------------------------------------------

/// Fit on target rows only. Without `stats`, normalization statistics are
/// fitted on `targets` itself.
TrainedModel train(const TrainConfig& config, const TransactionTable& targets,
                   const std::optional<NormStats>& stats = std::nullopt);

/// Map raw features through the fitted pipeline (normalize, NPT, Q, whitener).
Eigen::MatrixXd transform(const TrainedModel& model, const Eigen::MatrixXd& features);

struct Prediction {
  Eigen::VectorXd scores;   // > 0 means outlier
  std::vector<int> labels;  // 1 = outlier / fraud
};

Prediction predict(const TrainedModel& model, const Eigen::MatrixXd& features);
Prediction predict(const TrainedModel& model, const TransactionTable& table);

}  // namespace occ

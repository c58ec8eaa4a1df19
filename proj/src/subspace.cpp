#include "occ/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "occ/baselines.hpp"
#include "occ/errors.hpp"
#include "occ/linalg.hpp"

namespace occ {

void TrainConfig::validate() const {
  if (!(C > 0.0)) throw UsageError("C must be > 0");
  if (family == Family::ocsvm && C > 1.0) throw UsageError("nu must lie in (0, 1]");
  if (iterations < 0) throw UsageError("iterations must be >= 0");
  if (sigma && !(*sigma > 0.0)) throw UsageError("sigma must be > 0");
  if (uses_projection() && d < 1) throw UsageError("d must be >= 1");
  if (family == Family::ssvdd && solver != Solver::gradient) {
    throw UsageError("ssvdd supports only the gradient solver");
  }
  if (!(eps > 0.0) || !(ridge >= 0.0)) throw UsageError("eps must be > 0 and ridge >= 0");
}

Eigen::MatrixXd init_projection(const Eigen::MatrixXd& x, int d) {
  const Eigen::Index lim = std::min(x.rows(), x.cols());
  if (d < 1 || d > lim) {
    std::ostringstream msg;
    msg << "init_projection: d=" << d << " exceeds min(N, D)=" << lim;
    throw UsageError(msg.str());
  }
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const SymEigen eig = sym_eigen_descending(centered.transpose() * centered);
  return eig.vectors.leftCols(d).transpose();
}

Eigen::MatrixXd scatter_from_graph(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l) {
  if (l.rows() != x.rows() || l.cols() != x.rows()) {
    std::ostringstream msg;
    msg << "scatter_from_graph: graph is " << l.rows() << "x" << l.cols() << " but data has "
        << x.rows() << " rows";
    throw DataError(msg.str());
  }
  return symmetrize(x.transpose() * l * x);
}

Eigen::MatrixXd whitener(const Eigen::MatrixXd& s_q, double eps) {
  const SymEigen eig = sym_eigen_descending(s_q);
  const Eigen::VectorXd inv_sqrt = eig.values.cwiseMax(eps).cwiseSqrt().cwiseInverse();
  return symmetrize(eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.transpose());
}

Eigen::MatrixXd alpha_laplacian(const Eigen::VectorXd& alpha) {
  Eigen::MatrixXd l = -alpha * alpha.transpose();
  l.diagonal() += alpha;
  return l;
}

Eigen::MatrixXd alpha_scatter(const Eigen::MatrixXd& x, const Eigen::VectorXd& alpha) {
  if (alpha.size() != x.rows()) throw DataError("alpha_scatter: alpha/data size mismatch");
  const Eigen::VectorXd mean = x.transpose() * alpha;
  return symmetrize(x.transpose() * alpha.asDiagonal() * x - mean * mean.transpose());
}

namespace {

void check_projection_shapes(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m,
                             const Eigen::MatrixXd& s) {
  if (m.rows() != q.cols() || m.cols() != q.cols() || s.rows() != q.cols() || s.cols() != q.cols()) {
    throw DataError("projection criterion: Q, M and S_x dimensions disagree");
  }
}

// S_Q^{-1} through the floored whitener, so criterion and gradient agree.
Eigen::MatrixXd floored_inverse(const Eigen::MatrixXd& s_q, double eps) {
  const Eigen::MatrixXd w = whitener(s_q, eps);
  return w * w;
}

}  // namespace

double gessvdd_criterion(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m,
                         const Eigen::MatrixXd& s_x, double eps) {
  check_projection_shapes(q, m, s_x);
  const Eigen::MatrixXd s_q_inv = floored_inverse(q * s_x * q.transpose(), eps);
  return (s_q_inv * q * m * q.transpose()).trace();
}

Eigen::MatrixXd gessvdd_gradient(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m,
                                 const Eigen::MatrixXd& s_x, double eps) {
  check_projection_shapes(q, m, s_x);
  const Eigen::MatrixXd s_q_inv = floored_inverse(q * s_x * q.transpose(), eps);
  const Eigen::MatrixXd sqm = s_q_inv * q * m;
  return 2.0 * sqm - 2.0 * sqm * q.transpose() * s_q_inv * q * s_x;
}

double ssvdd_criterion(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m,
                       const Eigen::MatrixXd& psi_factor, double beta) {
  check_projection_shapes(q, m, psi_factor);
  return (q * m * q.transpose()).trace() + beta * (q * psi_factor * q.transpose()).trace();
}

Eigen::MatrixXd ssvdd_gradient(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m,
                               const Eigen::MatrixXd& psi_factor, double beta) {
  check_projection_shapes(q, m, psi_factor);
  return 2.0 * q * m + beta * (2.0 * q * psi_factor);
}

PsiTerm psi_regularizer(Psi variant, const Eigen::MatrixXd& x, const Eigen::VectorXd& alpha,
                        double c, double tol) {
  const Eigen::Index n = x.rows();
  if (alpha.size() != n) throw DataError("psi_regularizer: alpha/data size mismatch");
  PsiTerm term{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(x.cols(), x.cols())};
  switch (variant) {
    case Psi::psi0:
      return term;
    case Psi::psi1:
      term.lambda.setOnes();
      break;
    case Psi::psi2:
      for (std::size_t s : partition_alphas(alpha, c, tol).support) {
        const auto i = static_cast<Eigen::Index>(s);
        term.lambda(i) = alpha(i);
      }
      break;
    case Psi::psi3:
      term.lambda = (alpha.array() > 0.0).select(alpha, 0.0);
      break;
  }
  const Eigen::VectorXd v = x.transpose() * term.lambda;
  term.factor = v * v.transpose();
  return term;
}

Eigen::MatrixXd gradient_update(const Eigen::MatrixXd& q, const Eigen::MatrixXd& grad, double eta,
                                Direction direction, bool orthonormalize, int iteration) {
  if (q.rows() != grad.rows() || q.cols() != grad.cols()) {
    throw DataError("gradient_update: gradient shape differs from Q");
  }
  if (!grad.allFinite()) {
    throw NumericalError("non-finite gradient at iteration " + std::to_string(iteration));
  }
  const double sign = direction == Direction::min ? -1.0 : 1.0;
  Eigen::MatrixXd next = q + sign * eta * grad;
  if (orthonormalize) next = orthonormalize_rows(next);
  if (!next.allFinite()) {
    throw NumericalError("non-finite projection after update at iteration " + std::to_string(iteration));
  }
  return next;
}

EigenSelection select_generalized_eigen(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int d,
                                        Direction direction, double eps) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n) {
    throw DataError("generalized eigenproblem: dimension mismatch");
  }
  if (d < 1 || d > n) {
    std::ostringstream msg;
    msg << "generalized eigenproblem: cannot select " << d << " of " << n << " eigenvectors";
    throw UsageError(msg.str());
  }
  Eigen::MatrixXd reg = symmetrize(b);
  reg.diagonal().array() += eps;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(symmetrize(a), reg);
  if (ges.info() != Eigen::Success) throw NumericalError("generalized eigensolver failed");
  const Eigen::VectorXd& lambda = ges.eigenvalues();  // ascending

  const double zero_tol = 1e-12 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> positive;
  std::vector<Eigen::Index> rest;
  for (Eigen::Index k = 0; k < n; ++k) {
    (lambda(k) > zero_tol ? positive : rest).push_back(k);
  }
  if (direction == Direction::max) std::reverse(positive.begin(), positive.end());
  std::vector<Eigen::Index> picked(positive.begin(),
                                   positive.begin() + std::min<std::ptrdiff_t>(d, std::ssize(positive)));
  std::size_t padded = 0;
  if (std::ssize(picked) < d) {
    std::stable_sort(rest.begin(), rest.end(), [&](Eigen::Index l, Eigen::Index r) {
      return std::abs(lambda(l)) < std::abs(lambda(r));
    });
    for (Eigen::Index k : rest) {
      if (std::ssize(picked) == d) break;
      picked.push_back(k);
      ++padded;
    }
  }

  EigenSelection out{Eigen::MatrixXd(n, d), Eigen::VectorXd(d), padded};
  for (int c = 0; c < d; ++c) {
    const Eigen::Index k = picked[static_cast<std::size_t>(c)];
    out.vectors.col(c) = ges.eigenvectors().col(k);
    normalize_sign(out.vectors.col(c));
    out.values(c) = lambda(k);
  }
  return out;
}

EigenSelection spectral_update(const Eigen::MatrixXd& m, const Eigen::MatrixXd& s_x, int d,
                               Direction direction, double eps) {
  return select_generalized_eigen(m, s_x, d, direction, eps);
}

EigenSelection spectral_regression_update(const Eigen::MatrixXd& l_alpha, const Eigen::MatrixXd& l_x,
                                          const Eigen::MatrixXd& x, int d, Direction direction,
                                          double ridge, double eps) {
  if (l_alpha.rows() != x.rows() || l_x.rows() != x.rows()) {
    throw DataError("spectral_regression_update: graph size differs from sample count");
  }
  EigenSelection targets = select_generalized_eigen(l_alpha, l_x, d, direction, eps);
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += ridge;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw NumericalError("spectral regression: ridge system failed");
  Eigen::MatrixXd q_t = ldlt.solve(x.transpose() * targets.vectors);  // D x d
  for (Eigen::Index c = 0; c < q_t.cols(); ++c) normalize_sign(q_t.col(c));
  targets.vectors = std::move(q_t);
  return targets;
}

// ---- training -------------------------------------------------------------

namespace {

Eigen::MatrixXd project(const ProjectionState& proj, const Eigen::MatrixXd& z) {
  return z * proj.q.transpose() * proj.whitener.transpose();
}

void refresh_whitener(ProjectionState& proj, bool whiten, double eps) {
  proj.s_q = symmetrize(proj.q * proj.s_x * proj.q.transpose());
  proj.whitener = whiten ? whitener(proj.s_q, eps)
                         : Eigen::MatrixXd::Identity(proj.q.rows(), proj.q.rows());
}

void check_targets_only(const TransactionTable& targets) {
  targets.validate();
  if (targets.count(kOutlier) != 0) {
    throw DataError("train: input must contain target rows only, found " +
                    std::to_string(targets.count(kOutlier)) + " outlier rows");
  }
}

}  // namespace

TrainedModel train(const TrainConfig& config, const TransactionTable& targets,
                   const std::optional<NormStats>& stats) {
  config.validate();
  check_targets_only(targets);

  TrainedModel model;
  model.config = config;
  model.columns = targets.columns;
  model.norm = stats ? *stats : fit_norm_stats(targets);
  const Eigen::MatrixXd x = normalize(targets.features, model.norm);

  if (config.family == Family::ocsvm) {
    OcsvmModel oc;
    const Eigen::MatrixXd k = config.sigma ? rbf_kernel(x, x, *config.sigma) : linear_gram(x);
    oc = train_ocsvm(k, config.C, config.dual);
    oc.sigma = config.sigma;
    oc.train_repr = x;
    model.ocsvm = std::move(oc);
    return model;
  }

  Eigen::MatrixXd z = x;
  if (config.sigma) {
    NptFit fit = npt_fit_rbf(x, *config.sigma);
    z = fit.phi.transpose();
    model.npt = std::move(fit.state);
  }
  const Eigen::Index dims = z.cols();
  ProjectionState& proj = model.projection;

  switch (config.family) {
    case Family::svdd:
      proj.q = Eigen::MatrixXd::Identity(dims, dims);
      proj.s_x = Eigen::MatrixXd::Identity(dims, dims);
      refresh_whitener(proj, false, config.eps);
      break;
    case Family::esvdd:
      proj.q = Eigen::MatrixXd::Identity(dims, dims);
      proj.s_x = scatter_from_graph(z, pca_laplacian(z.rows()).values);
      refresh_whitener(proj, true, config.eps);
      break;
    case Family::ssvdd:
    case Family::gessvdd: {
      const bool graph_embedded = config.family == Family::gessvdd;
      LaplacianMatrix graph;
      if (graph_embedded) {
        graph = build_laplacian(config.graph, z, config.knn_k);
        proj.s_x = scatter_from_graph(z, graph.values);
      } else {
        proj.s_x = Eigen::MatrixXd::Identity(dims, dims);
      }
      proj.q = init_projection(z, config.d);
      refresh_whitener(proj, graph_embedded, config.eps);

      for (int it = 0; it < config.iterations; ++it) {
        const Eigen::MatrixXd p = project(proj, z);
        const DualSolution dual = solve_dual(linear_gram(p), config.C, config.dual);
        const Eigen::MatrixXd m = alpha_scatter(z, dual.alpha);
        std::size_t padded = 0;
        switch (config.solver) {
          case Solver::gradient: {
            Eigen::MatrixXd grad;
            if (graph_embedded) {
              grad = gessvdd_gradient(proj.q, m, proj.s_x, config.eps);
            } else {
              const PsiTerm psi = psi_regularizer(config.psi, z, dual.alpha, config.C,
                                                  config.dual.partition_tol);
              grad = ssvdd_gradient(proj.q, m, psi.factor, config.beta);
            }
            proj.q = gradient_update(proj.q, grad, config.eta, config.direction, !graph_embedded, it);
            break;
          }
          case Solver::spectral: {
            EigenSelection sel = spectral_update(m, proj.s_x, config.d, config.direction, config.eps);
            proj.q = sel.vectors.transpose();
            padded = sel.padded;
            break;
          }
          case Solver::spectral_regression: {
            EigenSelection sel =
                spectral_regression_update(alpha_laplacian(dual.alpha), graph.values, z, config.d,
                                           config.direction, config.ridge, config.eps);
            proj.q = sel.vectors.transpose();
            padded = sel.padded;
            break;
          }
        }
        if (padded > 0) {
          model.warnings.push_back("iteration " + std::to_string(it) + ": only " +
                                   std::to_string(config.d - static_cast<int>(padded)) +
                                   " positive eigenpairs, padded " + std::to_string(padded));
        }
        refresh_whitener(proj, graph_embedded, config.eps);
      }
      break;
    }
    case Family::ocsvm:
      break;
  }

  Eigen::MatrixXd p = project(proj, z);
  DualSolution dual = solve_dual(linear_gram(p), config.C, config.dual);
  model.sphere = fit_sphere(std::move(dual), std::move(p));
  return model;
}

Eigen::MatrixXd transform(const TrainedModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.input_dims()) {
    std::ostringstream msg;
    msg << "schema mismatch: model expects " << model.input_dims() << " features, found "
        << features.cols();
    throw DataError(msg.str());
  }
  const Eigen::MatrixXd x = normalize(features, model.norm);
  if (model.ocsvm) return x;
  const Eigen::MatrixXd z = model.npt ? npt_map_rows(x, *model.npt) : x;
  return project(model.projection, z);
}

Prediction predict(const TrainedModel& model, const Eigen::MatrixXd& features) {
  const Eigen::MatrixXd rep = transform(model, features);
  Prediction out;
  if (model.ocsvm) {
    out.scores = -ocsvm_decision(*model.ocsvm, ocsvm_kernel_columns(*model.ocsvm, rep));
  } else {
    out.scores = score_rows(rep, model.sphere);
  }
  out.labels.reserve(static_cast<std::size_t>(out.scores.size()));
  for (Eigen::Index i = 0; i < out.scores.size(); ++i) {
    out.labels.push_back(out.scores(i) > 0.0 ? kOutlier : kTarget);
  }
  return out;
}

Prediction predict(const TrainedModel& model, const TransactionTable& table) {
  return predict(model, table.features);
}

}  // namespace occ

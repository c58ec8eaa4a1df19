#include "occ/svdd.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "occ/errors.hpp"
#include "occ/linalg.hpp"

namespace occ {

Eigen::MatrixXd linear_gram(const Eigen::MatrixXd& p) { return p * p.transpose(); }

namespace {

// Newton step on the free coordinates once the active set has settled: solve
// H_FF d - mu 1 = -g_F, 1^T d = 0 (minimum-norm d) and keep it if the result
// stays inside the box and does not raise the objective.
void polish(const Eigen::MatrixXd& h, const Eigen::VectorXd& p, double upper, SimplexQpResult& res) {
  constexpr Eigen::Index kMaxFree = 600;
  std::vector<Eigen::Index> free;
  for (Eigen::Index t = 0; t < res.alpha.size(); ++t) {
    if (res.alpha(t) > 0.0 && res.alpha(t) < upper) free.push_back(t);
  }
  const auto f = static_cast<Eigen::Index>(free.size());
  if (f < 2 || f > kMaxFree) return;

  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(f + 1, f + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(f + 1);
  for (Eigen::Index r = 0; r < f; ++r) {
    for (Eigen::Index c = 0; c < f; ++c) sys(r, c) = h(free[r], free[c]);
    sys(r, f) = -1.0;
    sys(f, r) = 1.0;
    rhs(r) = -res.gradient(free[r]);
  }
  const Eigen::VectorXd step = sys.completeOrthogonalDecomposition().solve(rhs);
  if (!step.allFinite()) return;

  Eigen::VectorXd trial = res.alpha;
  for (Eigen::Index r = 0; r < f; ++r) {
    const double v = trial(free[r]) + step(r);
    if (v < 0.0 || v > upper) return;
    trial(free[r]) = v;
  }
  const auto objective = [&](const Eigen::VectorXd& a) { return 0.5 * a.dot(h * a) + p.dot(a); };
  if (objective(trial) > objective(res.alpha)) return;
  res.alpha = trial;
  res.gradient = h * res.alpha + p;
  double g_min = std::numeric_limits<double>::infinity();
  double g_max = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < res.alpha.size(); ++t) {
    if (res.alpha(t) < upper) g_min = std::min(g_min, res.gradient(t));
    if (res.alpha(t) > 0.0) g_max = std::max(g_max, res.gradient(t));
  }
  res.violation = std::max(0.0, g_max - g_min);
}

}  // namespace

SimplexQpResult solve_simplex_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& p, double upper,
                                 const DualOptions& options) {
  const Eigen::Index n = h.rows();
  if (n == 0 || h.cols() != n || p.size() != n) {
    throw UsageError("solve_simplex_qp: dimension mismatch");
  }
  if (!(upper > 0.0) || static_cast<double>(n) * upper < 1.0 - 1e-12) {
    std::ostringstream msg;
    msg << "infeasible dual: N*C = " << static_cast<double>(n) * upper << " < 1";
    throw DataError(msg.str());
  }

  SimplexQpResult res;
  res.alpha = Eigen::VectorXd::Zero(n);
  double remaining = 1.0;
  for (Eigen::Index t = 0; t < n && remaining > 1e-15; ++t) {
    res.alpha(t) = std::min(upper, remaining);
    remaining -= res.alpha(t);
  }
  res.gradient = h * res.alpha + p;
  const auto objective = [&] { return 0.5 * res.alpha.dot(h * res.alpha) + p.dot(res.alpha); };
  if (options.record_trace) res.trace.push_back(objective());

  for (;;) {
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (res.alpha(t) < upper && res.gradient(t) < g_min) {
        g_min = res.gradient(t);
        i = t;
      }
      if (res.alpha(t) > 0.0 && res.gradient(t) > g_max) {
        g_max = res.gradient(t);
        j = t;
      }
    }
    res.violation = (i < 0 || j < 0) ? 0.0 : g_max - g_min;
    if (res.violation <= options.kkt_tol) break;
    if (res.iterations >= options.max_iterations) {
      std::ostringstream msg;
      msg << "dual solver did not converge in " << options.max_iterations
          << " pair updates (KKT residual " << res.violation << ")";
      throw NumericalError(msg.str());
    }

    const double curvature = std::max(h(i, i) + h(j, j) - 2.0 * h(i, j), 1e-12);
    double delta = res.violation / curvature;
    const double room_i = upper - res.alpha(i);
    const double room_j = res.alpha(j);
    if (delta >= room_i || delta >= room_j) {
      if (room_i <= room_j) {
        delta = room_i;
        res.alpha(j) -= delta;
        res.alpha(i) = upper;
      } else {
        delta = room_j;
        res.alpha(i) += delta;
        res.alpha(j) = 0.0;
      }
    } else {
      res.alpha(i) += delta;
      res.alpha(j) -= delta;
    }
    if (!std::isfinite(delta)) throw NumericalError("dual solver produced a non-finite step");
    res.gradient += delta * (h.col(i) - h.col(j));
    ++res.iterations;
    if (options.record_trace) res.trace.push_back(objective());
  }
  polish(h, p, upper, res);
  return res;
}

AlphaPartition partition_alphas(const Eigen::VectorXd& alpha, double c, double tol) {
  AlphaPartition part;
  for (Eigen::Index t = 0; t < alpha.size(); ++t) {
    const auto idx = static_cast<std::size_t>(t);
    if (alpha(t) <= tol) {
      part.inside.push_back(idx);
    } else if (alpha(t) >= c - tol) {
      part.outside.push_back(idx);
    } else {
      part.support.push_back(idx);
    }
  }
  return part;
}

DualSolution solve_dual(const Eigen::MatrixXd& k, double c, const DualOptions& options) {
  if (k.rows() != k.cols()) throw UsageError("solve_dual: kernel matrix must be square");
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if (asymmetry(k) > 1e-9 * scale) throw DataError("solve_dual: kernel matrix is not symmetric");

  const Eigen::MatrixXd h = 2.0 * k;
  const Eigen::VectorXd p = -k.diagonal();
  SimplexQpResult qp = solve_simplex_qp(h, p, c, options);

  DualSolution sol;
  sol.alpha = std::move(qp.alpha);
  sol.C = c;
  sol.objective = sol.alpha.dot(k.diagonal()) - sol.alpha.dot(k * sol.alpha);
  sol.iterations = qp.iterations;
  sol.objective_trace.reserve(qp.trace.size());
  for (double f : qp.trace) sol.objective_trace.push_back(-f);
  auto part = partition_alphas(sol.alpha, c, options.partition_tol);
  sol.inside_idx = std::move(part.inside);
  sol.support_idx = std::move(part.support);
  sol.outside_idx = std::move(part.outside);
  return sol;
}

double radius(const DualSolution& solution, const Eigen::MatrixXd& p) {
  if (p.rows() != solution.alpha.size()) throw UsageError("radius: representation/alpha size mismatch");
  const Eigen::VectorXd u = p.transpose() * solution.alpha;
  const auto dist = [&](std::size_t s) {
    return (p.row(static_cast<Eigen::Index>(s)).transpose() - u).norm();
  };
  if (!solution.support_idx.empty()) {
    double sum = 0.0;
    for (std::size_t s : solution.support_idx) sum += dist(s);
    return sum / static_cast<double>(solution.support_idx.size());
  }
  if (solution.outside_idx.empty()) {
    throw NumericalError("radius: no support and no outside points");
  }
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t s : solution.outside_idx) r = std::min(r, dist(s));
  return r;
}

SphereModel fit_sphere(DualSolution dual, Eigen::MatrixXd p) {
  SphereModel model;
  model.radius = radius(dual, p);
  model.center = p.transpose() * dual.alpha;
  model.dual = std::move(dual);
  model.train_repr = std::move(p);
  return model;
}

double score(const Eigen::VectorXd& x_star, const SphereModel& model) {
  if (x_star.size() != model.center.size()) {
    std::ostringstream msg;
    msg << "score: expected dimension " << model.center.size() << ", found " << x_star.size();
    throw DataError(msg.str());
  }
  return (x_star - model.center).squaredNorm() - model.radius * model.radius;
}

Eigen::VectorXd score_rows(const Eigen::MatrixXd& rows, const SphereModel& model) {
  if (rows.cols() != model.center.size()) {
    std::ostringstream msg;
    msg << "score: expected dimension " << model.center.size() << ", found " << rows.cols();
    throw DataError(msg.str());
  }
  return (rows.rowwise() - model.center.transpose()).rowwise().squaredNorm().array() -
         model.radius * model.radius;
}

}  // namespace occ

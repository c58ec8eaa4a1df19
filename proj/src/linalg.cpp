#include "occ/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "occ/errors.hpp"

namespace occ {

void normalize_sign(Eigen::Ref<VectorXd> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12 * scale) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

double asymmetry(const MatrixXd& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

SymEigen sym_eigen_descending(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(a));
  if (es.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver failed");
  }
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const VectorXd& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return ev(l) > ev(r); });
  SymEigen out{VectorXd(n), MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = ev(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    normalize_sign(out.vectors.col(k));
  }
  return out;
}

MatrixXd orthonormalize_rows(const MatrixXd& q) {
  const Eigen::Index d = q.rows();
  const Eigen::Index dim = q.cols();
  if (d > dim) throw UsageError("cannot orthonormalize more rows than columns");
  Eigen::HouseholderQR<MatrixXd> qr(q.transpose());
  MatrixXd basis = qr.householderQ() * MatrixXd::Identity(dim, d);
  const MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k) {
    if (r(k, k) < 0.0) basis.col(k) = -basis.col(k);
  }
  return basis.transpose();
}

}  // namespace occ

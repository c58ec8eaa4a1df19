#include "occ/graphs.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "occ/errors.hpp"

namespace occ {

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::identity: return "i";
    case GraphKind::pca: return "pca";
    case GraphKind::knn: return "knn";
  }
  return "?";
}

LaplacianMatrix identity_laplacian(Eigen::Index n) {
  if (n < 1) throw UsageError("identity_laplacian: n must be >= 1");
  return {Eigen::MatrixXd::Identity(n, n), GraphKind::identity};
}

LaplacianMatrix pca_laplacian(Eigen::Index n) {
  if (n < 1) throw UsageError("pca_laplacian: n must be >= 1");
  const double inv = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd centering = Eigen::MatrixXd::Identity(n, n);
  centering.array() -= inv;
  return {inv * centering, GraphKind::pca};
}

AdjacencyMatrix knn_adjacency(const Eigen::MatrixXd& x, int k) {
  const Eigen::Index n = x.rows();
  if (k < 1 || k > n - 1) {
    throw UsageError("knn_adjacency: k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(n - 1) + "]");
  }
  // Explicit differences rather than the Gram expansion: exact duplicates must
  // come out at distance 0 for the index tie-break to apply.
  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = (x.row(i) - x.row(j)).squaredNorm();
    }
  }

  AdjacencyMatrix a{Eigen::MatrixXd::Zero(n, n)};
  std::vector<Eigen::Index> order;
  const auto kk = static_cast<std::ptrdiff_t>(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    order.erase(order.begin() + i);
    std::partial_sort(order.begin(), order.begin() + kk, order.end(),
                      [&](Eigen::Index l, Eigen::Index r) {
                        return dist(i, l) < dist(i, r) || (dist(i, l) == dist(i, r) && l < r);
                      });
    for (std::ptrdiff_t m = 0; m < kk; ++m) {
      const Eigen::Index j = order[static_cast<std::size_t>(m)];
      a.values(i, j) = 1.0;
      a.values(j, i) = 1.0;
    }
  }
  return a;
}

LaplacianMatrix knn_laplacian(const AdjacencyMatrix& a) {
  Eigen::MatrixXd l = -a.values;
  l.diagonal() += a.values.rowwise().sum();
  return {std::move(l), GraphKind::knn};
}

LaplacianMatrix build_laplacian(GraphKind kind, const Eigen::MatrixXd& x, int k) {
  switch (kind) {
    case GraphKind::identity: return identity_laplacian(x.rows());
    case GraphKind::pca: return pca_laplacian(x.rows());
    case GraphKind::knn: return knn_laplacian(knn_adjacency(x, k));
  }
  throw UsageError("unknown graph kind");
}

}  // namespace occ

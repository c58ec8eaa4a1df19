#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace occ {

enum class GraphKind { identity, pca, knn };

std::string_view to_string(GraphKind kind);

/// Symmetric N x N graph matrix L_x; S_x = X^T L X for row-sample data X.
struct LaplacianMatrix {
  Eigen::MatrixXd values;
  GraphKind kind = GraphKind::identity;
};

/// Binary symmetric N x N matrix with zero diagonal.
struct AdjacencyMatrix {
  Eigen::MatrixXd values;
};

inline constexpr int kDefaultNeighbors = 5;

LaplacianMatrix identity_laplacian(Eigen::Index n);

/// (1/n)(I - 11^T/n): the centering matrix with the 1/N scatter factor folded in.
LaplacianMatrix pca_laplacian(Eigen::Index n);

/// Symmetrized k-nearest-neighbour graph over the rows of `x` (squared
/// Euclidean distance, self excluded, ties to the lower row index).
AdjacencyMatrix knn_adjacency(const Eigen::MatrixXd& x, int k);

/// diag(row sums of A) - A
LaplacianMatrix knn_laplacian(const AdjacencyMatrix& a);

/// Build the graph of the requested kind for the rows of `x`.
LaplacianMatrix build_laplacian(GraphKind kind, const Eigen::MatrixXd& x, int k = kDefaultNeighbors);

}  // namespace occ

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <filesystem>

namespace imcgrmf {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Binary symmetric nearest-neighbor graph of one view.
/// weights(i, j) = 1 when i is among the `neighbors` nearest samples of j or
/// vice versa; every sample carries a self-loop, so degrees are >= 1.
struct NeighborGraph {
  SparseRowMatrix weights;
  Eigen::VectorXd degrees;
  std::size_t neighbors = 0;

  std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
};

/// Euclidean kNN graph over the rows of `samples`. Distance ties are broken by
/// the lower sample index.
NeighborGraph knn_graph(const Eigen::MatrixXd& samples, std::size_t neighbors);

/// 10 when n / c >= 30, otherwise clamp(n / c - 4, 2, 10) (integer division).
std::size_t default_neighbor_count(std::size_t samples, std::size_t clusters);

// Debug dump: one "i,j" line per undirected edge with i <= j.
void write_edge_list(const NeighborGraph& graph, const std::filesystem::path& path);

}  // namespace imcgrmf

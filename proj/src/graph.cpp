#include "imcgrmf/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace imcgrmf {

NeighborGraph knn_graph(const Eigen::MatrixXd& samples, std::size_t neighbors) {
  const auto n = static_cast<std::size_t>(samples.rows());
  if (n < 2) throw std::invalid_argument("kNN graph needs at least 2 samples");
  if (neighbors < 1 || neighbors >= n) {
    throw std::invalid_argument("neighbor count " + std::to_string(neighbors) + " must lie in [1, " +
                                std::to_string(n - 1) + "]");
  }
  if (!samples.allFinite()) throw std::invalid_argument("kNN graph input has non-finite entries");

  // Row-major copy so each sample is contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x = samples;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(n * (2 * neighbors + 1));
  std::vector<double> dist(n);
  std::vector<std::size_t> candidates(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < n; ++j) dist[j] = (x.row(static_cast<Eigen::Index>(j)) - row).squaredNorm();
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) candidates[c++] = j;
    const auto closer = [&](std::size_t a, std::size_t b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(neighbors),
                      candidates.end(), closer);
    edges.emplace_back(i, i);
    for (std::size_t t = 0; t < neighbors; ++t) {
      edges.emplace_back(i, candidates[t]);
      edges.emplace_back(candidates[t], i);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges.size());
  for (auto [i, j] : edges) triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), 1.0);

  NeighborGraph graph;
  graph.neighbors = neighbors;
  graph.weights.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  graph.weights.setFromTriplets(triplets.begin(), triplets.end());
  graph.weights.makeCompressed();
  graph.degrees = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < graph.weights.outerSize(); ++r)
    for (SparseRowMatrix::InnerIterator it(graph.weights, r); it; ++it) graph.degrees(r) += it.value();
  return graph;
}

std::size_t default_neighbor_count(std::size_t samples, std::size_t clusters) {
  if (clusters == 0) throw std::invalid_argument("cluster count must be positive");
  const std::size_t per_cluster = samples / clusters;
  if (per_cluster >= 30) return 10;
  if (per_cluster <= 6) return 2;
  return std::min<std::size_t>(per_cluster - 4, 10);
}

void write_edge_list(const NeighborGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  for (Eigen::Index r = 0; r < graph.weights.outerSize(); ++r)
    for (SparseRowMatrix::InnerIterator it(graph.weights, r); it; ++it)
      if (it.col() >= r) out << r << ',' << it.col() << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace imcgrmf

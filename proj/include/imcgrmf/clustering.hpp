#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace imcgrmf {

struct KMeansParams {
  std::size_t clusters = 2;
  std::size_t restarts = 20;
  std::size_t max_iter = 300;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<int> labels;        // in [0, clusters)
  Eigen::MatrixXd centroids;      // clusters x dim
  double wcss = 0.0;              // within-cluster sum of squares
  std::size_t iterations = 0;     // Lloyd iterations of the winning restart
  std::vector<double> wcss_history;  // WCSS after each Lloyd iteration of the winning restart
};

/// Lloyd iterations from k-means++ seeding, best of `restarts` runs by WCSS.
/// Restart r uses a seed derived from (seed, r). Empty clusters take the point
/// farthest from its current centroid.
KMeansResult kmeans(const Eigen::MatrixXd& points, const KMeansParams& params);

// WCSS of a labeling around the per-cluster means.
double within_cluster_ss(const Eigen::MatrixXd& points, const std::vector<int>& labels);

}  // namespace imcgrmf

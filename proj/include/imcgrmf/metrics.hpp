#pragma once

#include <Eigen/Dense>

#include <vector>

namespace imcgrmf {

// Counts of (predicted cluster, true class) pairs. Ids are compacted in sorted order.
struct Contingency {
  Eigen::MatrixXd table;  // c_pred x c_true
  std::size_t n = 0;
  std::vector<int> predicted_ids;
  std::vector<int> true_ids;
};

// Throws std::invalid_argument on length mismatch or empty input.
Contingency contingency(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method).
/// Returns column index for each row.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

// Best one-to-one matching of clusters to classes; unequal counts are padded with zero rows/columns.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

// I(pred; truth) / sqrt(H(pred) H(truth)), natural logs. 1 when both entropies are zero, 0 when one is.
double nmi(const std::vector<int>& predicted, const std::vector<int>& truth);

double purity(const std::vector<int>& predicted, const std::vector<int>& truth);

struct ClusteringScores {
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
};

ClusteringScores score(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace imcgrmf

#pragma once

#include "imcgrmf/clustering.hpp"
#include "imcgrmf/dataset.hpp"
#include "imcgrmf/metrics.hpp"

#include <optional>
#include <vector>

namespace imcgrmf {

// Every view has all n rows (assembled order); absent rows are imputed.
struct FilledDataset {
  std::vector<Eigen::MatrixXd> views;
  std::vector<std::vector<bool>> observed;  // observed[k][row]
  std::optional<std::vector<int>> labels;

  // The filled matrices as a complete dataset (all samples paired).
  MultiViewDataset as_complete() const;
};

// Absent rows of view k become the column means of its observed rows.
FilledDataset mean_fill(const MultiViewDataset& dataset);

struct BsvResult {
  std::vector<int> labels;       // labels of the reported view
  std::size_t best_view = 0;
  std::vector<std::vector<int>> view_labels;
  std::vector<ClusteringScores> view_scores;  // empty when the dataset has no labels
  bool labels_missing = false;  // no ground truth: view 1 reported by default
};

/// Best single view: k-means on each mean-filled view; the view with the highest
/// ACC is reported, ties going to the lower view index.
BsvResult bsv_cluster(const MultiViewDataset& dataset, const KMeansParams& kmeans_params);

// k-means on the horizontal concatenation of the mean-filled views.
std::vector<int> concat_cluster(const MultiViewDataset& dataset, const KMeansParams& kmeans_params);

}  // namespace imcgrmf

#include "imcgrmf/baselines.hpp"

#include <stdexcept>
#include <string>

namespace imcgrmf {

MultiViewDataset FilledDataset::as_complete() const {
  if (views.empty()) throw std::invalid_argument("filled dataset has no views");
  return MultiViewDataset(views, static_cast<std::size_t>(views.front().rows()), labels);
}

FilledDataset mean_fill(const MultiViewDataset& dataset) {
  const auto n = static_cast<Eigen::Index>(dataset.sample_count());
  FilledDataset filled;
  filled.labels = dataset.labels();
  for (std::size_t k = 0; k < dataset.view_count(); ++k) {
    const auto& x = dataset.view(k);
    if (x.rows() == 0) throw std::invalid_argument("view " + std::to_string(k + 1) + " has no observed samples");
    const Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd full = mean.replicate(n, 1);
    std::vector<bool> observed(static_cast<std::size_t>(n), false);
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const auto row = dataset.assembled_row(k, static_cast<std::size_t>(j));
      full.row(static_cast<Eigen::Index>(row)) = x.row(j);
      observed[row] = true;
    }
    filled.views.push_back(std::move(full));
    filled.observed.push_back(std::move(observed));
  }
  return filled;
}

BsvResult bsv_cluster(const MultiViewDataset& dataset, const KMeansParams& kmeans_params) {
  const auto filled = mean_fill(dataset);
  BsvResult result;
  result.labels_missing = !dataset.labels().has_value();
  double best_acc = -1.0;
  for (std::size_t k = 0; k < filled.views.size(); ++k) {
    result.view_labels.push_back(kmeans(filled.views[k], kmeans_params).labels);
    if (result.labels_missing) continue;
    const auto scores = score(result.view_labels.back(), *dataset.labels());
    result.view_scores.push_back(scores);
    if (scores.acc > best_acc) {
      best_acc = scores.acc;
      result.best_view = k;
    }
  }
  result.labels = result.view_labels[result.best_view];
  return result;
}

std::vector<int> concat_cluster(const MultiViewDataset& dataset, const KMeansParams& kmeans_params) {
  const auto filled = mean_fill(dataset);
  Eigen::Index width = 0;
  for (const auto& x : filled.views) width += x.cols();
  Eigen::MatrixXd joined(static_cast<Eigen::Index>(dataset.sample_count()), width);
  Eigen::Index offset = 0;
  for (const auto& x : filled.views) {
    joined.middleCols(offset, x.cols()) = x;
    offset += x.cols();
  }
  return kmeans(joined, kmeans_params).labels;
}

}  // namespace imcgrmf

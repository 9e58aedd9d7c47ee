#include "imcgrmf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace imcgrmf {

namespace {

std::vector<int> distinct(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Eigen::Index position(const std::vector<int>& sorted, int id) {
  return static_cast<Eigen::Index>(std::lower_bound(sorted.begin(), sorted.end(), id) - sorted.begin());
}

double entropy(const Eigen::VectorXd& counts, double n) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0.0) {
      const double p = counts(i) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

Contingency contingency(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("label length mismatch: " + std::to_string(predicted.size()) + " vs " +
                                std::to_string(truth.size()));
  }
  if (predicted.empty()) throw std::invalid_argument("empty labelings");
  Contingency c;
  c.n = predicted.size();
  c.predicted_ids = distinct(predicted);
  c.true_ids = distinct(truth);
  c.table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c.predicted_ids.size()),
                                  static_cast<Eigen::Index>(c.true_ids.size()));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    c.table(position(c.predicted_ids, predicted[i]), position(c.true_ids, truth[i])) += 1.0;
  }
  return c;
}

// Shortest augmenting path with row/column potentials, O(n^3).
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw std::invalid_argument("assignment cost matrix must be square");
  const Eigen::Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is a virtual column.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Eigen::Index> match(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Eigen::Index row = 1; row <= n; ++row) {
    match[0] = row;
    Eigen::Index col0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
    do {
      used[static_cast<std::size_t>(col0)] = true;
      const Eigen::Index row0 = match[static_cast<std::size_t>(col0)];
      double delta = inf;
      Eigen::Index col1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) continue;
        const double reduced = cost(row0 - 1, j - 1) - u[static_cast<std::size_t>(row0)] - v[sj];
        if (reduced < minv[sj]) {
          minv[sj] = reduced;
          way[sj] = col0;
        }
        if (minv[sj] < delta) {
          delta = minv[sj];
          col1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) {
          u[static_cast<std::size_t>(match[sj])] += delta;
          v[sj] -= delta;
        } else {
          minv[sj] -= delta;
        }
      }
      col0 = col1;
    } while (match[static_cast<std::size_t>(col0)] != 0);
    do {
      const Eigen::Index col1 = way[static_cast<std::size_t>(col0)];
      match[static_cast<std::size_t>(col0)] = match[static_cast<std::size_t>(col1)];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (Eigen::Index j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = static_cast<int>(j - 1);
  return assignment;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  const auto c = contingency(predicted, truth);
  const Eigen::Index size = std::max(c.table.rows(), c.table.cols());
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(size, size);
  padded.topLeftCorner(c.table.rows(), c.table.cols()) = c.table;
  const auto assignment = min_cost_assignment(-padded);
  double matched = 0.0;
  for (Eigen::Index i = 0; i < size; ++i) matched += padded(i, assignment[static_cast<std::size_t>(i)]);
  return matched / static_cast<double>(c.n);
}

double nmi(const std::vector<int>& predicted, const std::vector<int>& truth) {
  const auto c = contingency(predicted, truth);
  const double n = static_cast<double>(c.n);
  const Eigen::VectorXd rows = c.table.rowwise().sum();
  const Eigen::VectorXd cols = c.table.colwise().sum().transpose();
  const double h_pred = entropy(rows, n);
  const double h_true = entropy(cols, n);
  if (h_pred == 0.0 && h_true == 0.0) return 1.0;
  if (h_pred == 0.0 || h_true == 0.0) return 0.0;
  double mi = 0.0;
  for (Eigen::Index i = 0; i < c.table.rows(); ++i)
    for (Eigen::Index j = 0; j < c.table.cols(); ++j) {
      const double nij = c.table(i, j);
      if (nij > 0.0) mi += nij / n * std::log(n * nij / (rows(i) * cols(j)));
    }
  return std::clamp(mi / std::sqrt(h_pred * h_true), 0.0, 1.0);
}

double purity(const std::vector<int>& predicted, const std::vector<int>& truth) {
  const auto c = contingency(predicted, truth);
  return c.table.rowwise().maxCoeff().sum() / static_cast<double>(c.n);
}

ClusteringScores score(const std::vector<int>& predicted, const std::vector<int>& truth) {
  return {accuracy(predicted, truth), nmi(predicted, truth), purity(predicted, truth)};
}

}  // namespace imcgrmf

#include "imcgrmf/clustering.hpp"

#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace imcgrmf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& x, Eigen::Index c, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(c, x.cols());
  auto first = static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n));
  centers.row(0) = x.row(std::min(first, n - 1));
  Eigen::VectorXd closest = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (Eigen::Index j = 1; j < c; ++j) {
    const double total = closest.sum();
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= closest(i);
        if (target < 0.0 && closest(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::min(static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n)), n - 1);
    }
    centers.row(j) = x.row(pick);
    closest = closest.cwiseMin((x.rowwise() - centers.row(j)).rowwise().squaredNorm());
  }
  return centers;
}

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double wcss = 0.0;
  std::size_t iterations = 0;
  std::vector<double> history;
};

Run lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centers, std::size_t max_iter) {
  const Eigen::Index n = x.rows(), c = centers.rows();
  Run run;
  run.labels.assign(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd dist(n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < c; ++j) {
        const double d = (x.row(i) - centers.row(j)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      dist(i) = best_d;
      if (run.labels[static_cast<std::size_t>(i)] != static_cast<int>(best)) changed = true;
      run.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }

    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(c), 0);
    for (auto l : run.labels) ++sizes[static_cast<std::size_t>(l)];
    for (Eigen::Index j = 0; j < c; ++j) {
      if (sizes[static_cast<std::size_t>(j)] > 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || dist(i) > dist(far)) far = i;
      }
      if (far < 0) throw std::runtime_error("cannot repair empty cluster");
      --sizes[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(far)])];
      run.labels[static_cast<std::size_t>(far)] = static_cast<int>(j);
      sizes[static_cast<std::size_t>(j)] = 1;
      dist(far) = 0.0;
      changed = true;
    }

    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centers.row(run.labels[static_cast<std::size_t>(i)]) += x.row(i);
    for (Eigen::Index j = 0; j < c; ++j) centers.row(j) /= static_cast<double>(sizes[static_cast<std::size_t>(j)]);

    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) wcss += (x.row(i) - centers.row(run.labels[static_cast<std::size_t>(i)])).squaredNorm();
    run.history.push_back(wcss);
    run.wcss = wcss;
    run.iterations = iter + 1;
    if (!changed) break;
  }
  run.centers = std::move(centers);
  return run;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, const KMeansParams& params) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (params.clusters < 1) throw std::invalid_argument("cluster count must be at least 1");
  if (params.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (n < params.clusters) {
    throw std::invalid_argument("k-means needs at least as many points (" + std::to_string(n) +
                                ") as clusters (" + std::to_string(params.clusters) + ")");
  }
  if (!points.allFinite()) throw std::invalid_argument("k-means input has non-finite entries");

  const auto c = static_cast<Eigen::Index>(params.clusters);
  const std::size_t max_iter = std::max<std::size_t>(params.max_iter, 1);
  Run best;
  bool have_best = false;
  for (std::size_t r = 0; r < params.restarts; ++r) {
    std::mt19937_64 rng(splitmix64(params.seed ^ splitmix64(r)));
    auto run = lloyd(points, seed_plus_plus(points, c, rng), max_iter);
    if (!have_best || run.wcss < best.wcss) {
      best = std::move(run);
      have_best = true;
    }
  }
  return KMeansResult{std::move(best.labels), std::move(best.centers), best.wcss, best.iterations,
                      std::move(best.history)};
}

double within_cluster_ss(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(points.rows())) throw std::invalid_argument("label count mismatch");
  std::map<int, std::pair<Eigen::RowVectorXd, double>> sums;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    auto [it, inserted] = sums.try_emplace(labels[static_cast<std::size_t>(i)], Eigen::RowVectorXd::Zero(points.cols()), 0.0);
    it->second.first += points.row(i);
    it->second.second += 1.0;
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto& [sum, count] = sums.at(labels[static_cast<std::size_t>(i)]);
    total += (points.row(i) - sum / count).squaredNorm();
  }
  return total;
}

}  // namespace imcgrmf

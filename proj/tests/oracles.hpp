#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include "imcgrmf/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

namespace imcgrmf::oracle {

// Minimizer of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < iterations && b - a > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

/// Terms of one view's objective that depend on row j of P:
/// sum_i w_ij |x_i - p U|^2 + lambda1 |p - pc|^2 [paired] + lambda2 |p|_1.
inline double row_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, const Eigen::MatrixXd& u,
                            Eigen::Index j, const Eigen::RowVectorXd& p, const Eigen::RowVectorXd* pc,
                            double lambda1, double lambda2) {
  const Eigen::RowVectorXd recon = p * u;
  double value = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (w(i, j) != 0.0) value += w(i, j) * (x.row(i) - recon).squaredNorm();
  }
  if (pc != nullptr) value += lambda1 * (p - *pc).squaredNorm();
  return value + lambda2 * p.cwiseAbs().sum();
}

// Tr(X^T D X) + Tr(P^T D P) - 2 Tr(X^T W P U) with dense products.
inline double trace_form_reconstruction(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                                        const Eigen::MatrixXd& p, const Eigen::MatrixXd& u) {
  const Eigen::MatrixXd d = w.rowwise().sum().asDiagonal();
  return (x.transpose() * d * x).trace() + (p.transpose() * d * p).trace() -
         2.0 * (x.transpose() * w * p * u).trace();
}

// sum_ij w_ij |x_i - p_j U|^2 by explicit double loop.
inline double pairwise_reconstruction(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                                      const Eigen::MatrixXd& p, const Eigen::MatrixXd& u) {
  const Eigen::MatrixXd r = p * u;
  double value = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j)
      if (w(i, j) != 0.0) value += w(i, j) * (x.row(i) - r.row(j)).squaredNorm();
  return value;
}

// Relabels ids to 0..c-1 in order of first appearance.
inline std::vector<int> compact(const std::vector<int>& labels, int& count) {
  std::map<int, int> ids;
  std::vector<int> out;
  for (int l : labels) out.push_back(ids.emplace(l, static_cast<int>(ids.size())).first->second);
  count = static_cast<int>(ids.size());
  return out;
}

// Accuracy by enumerating every injective map from clusters to classes.
inline double brute_force_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  int cp = 0, ct = 0;
  const auto p = compact(predicted, cp);
  const auto t = compact(truth, ct);
  const int size = std::max(cp, ct);
  std::vector<int> perm(static_cast<std::size_t>(size));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hits += perm[static_cast<std::size_t>(p[i])] == t[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(p.size());
}

// NMI from the mutual-information definition over sample pairs of labels.
inline double reference_nmi(const std::vector<int>& predicted, const std::vector<int>& truth) {
  const double n = static_cast<double>(predicted.size());
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    pa[predicted[i]] += 1.0 / n;
    pb[truth[i]] += 1.0 / n;
    pab[{predicted[i], truth[i]}] += 1.0 / n;
  }
  double mi = 0.0, ha = 0.0, hb = 0.0;
  for (const auto& [key, p] : pab) mi += p * std::log(p / (pa[key.first] * pb[key.second]));
  for (const auto& [key, p] : pa) ha -= p * std::log(p);
  for (const auto& [key, p] : pb) hb -= p * std::log(p);
  if (ha < 1e-15 && hb < 1e-15) return 1.0;
  if (ha < 1e-15 || hb < 1e-15) return 0.0;
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

// Fraction of samples in the majority class of their cluster.
inline double reference_purity(const std::vector<int>& predicted, const std::vector<int>& truth) {
  std::map<int, std::map<int, int>> counts;
  for (std::size_t i = 0; i < predicted.size(); ++i) ++counts[predicted[i]][truth[i]];
  int total = 0;
  for (const auto& [cluster, row] : counts) {
    int best = 0;
    for (const auto& [cls, c] : row) best = std::max(best, c);
    total += best;
  }
  return static_cast<double>(total) / static_cast<double>(predicted.size());
}

}  // namespace imcgrmf::oracle

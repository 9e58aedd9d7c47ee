#include "imcgrmf/synthetic.hpp"

#include <limits>
#include <random>
#include <stdexcept>

namespace imcgrmf {

MultiViewDataset make_blobs(const BlobSpec& spec) {
  if (spec.clusters == 0 || spec.samples < spec.clusters) throw std::invalid_argument("need samples >= clusters >= 1");
  if (spec.view_dims.empty()) throw std::invalid_argument("need at least one view");
  if (!(spec.sigma > 0.0) || !(spec.separation >= 0.0)) throw std::invalid_argument("sigma must be positive");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto c = static_cast<Eigen::Index>(spec.clusters);
  const auto n = static_cast<Eigen::Index>(spec.samples);

  std::vector<Eigen::MatrixXd> views;
  for (auto dim : spec.view_dims) {
    if (dim == 0) throw std::invalid_argument("view dimension must be positive");
    const auto m = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd centers(c, m);
    for (Eigen::Index i = 0; i < c; ++i)
      for (Eigen::Index j = 0; j < m; ++j) centers(i, j) = normal(rng);
    double closest = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < c; ++a)
      for (Eigen::Index b = a + 1; b < c; ++b) closest = std::min(closest, (centers.row(a) - centers.row(b)).norm());
    if (c > 1) {
      if (!(closest > 0.0)) throw std::runtime_error("degenerate cluster centers");
      centers *= spec.separation * spec.sigma / closest;
    }
    Eigen::MatrixXd x(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) x(i, j) = centers(i % c, j) + spec.sigma * normal(rng);
    views.push_back(std::move(x));
  }
  std::vector<int> labels(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) labels[i] = static_cast<int>(i % spec.clusters);
  return MultiViewDataset(std::move(views), spec.samples, std::move(labels));
}

}  // namespace imcgrmf

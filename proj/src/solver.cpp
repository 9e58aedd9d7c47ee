#include "imcgrmf/solver.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace imcgrmf {

namespace {

// 53-bit uniform draw on [0,1), independent of the standard library's distributions.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void validate(const ModelParams& params, const MultiViewDataset& dataset) {
  if (params.latent_dim < 1) throw std::invalid_argument("latent dimension must be at least 1");
  for (std::size_t k = 0; k < dataset.view_count(); ++k) {
    if (params.latent_dim > dataset.feature_count(k)) {
      throw std::invalid_argument("latent dimension " + std::to_string(params.latent_dim) + " exceeds the " +
                                  std::to_string(dataset.feature_count(k)) + " features of view " +
                                  std::to_string(k + 1));
    }
  }
  if (!(params.lambda1 >= 0.0) || !std::isfinite(params.lambda1)) throw std::invalid_argument("lambda1 must be finite and >= 0");
  if (!(params.lambda2 >= 0.0) || !std::isfinite(params.lambda2)) throw std::invalid_argument("lambda2 must be finite and >= 0");
  if (!(params.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (params.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (params.neighbors && *params.neighbors < 1) throw std::invalid_argument("neighbor count must be at least 1");
}

double soft_threshold(double x, double threshold) {
  const double magnitude = std::abs(x) - threshold;
  if (magnitude <= 0.0) return 0.0;
  return x < 0.0 ? -magnitude : magnitude;
}

Eigen::MatrixXd orthonormalize_rows(const Eigen::MatrixXd& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  if (rows > cols) throw std::invalid_argument("cannot orthonormalize more rows than columns");
  Eigen::MatrixXd q(rows, cols);
  Eigen::Index next_unit = 0;

  const auto orthogonalize = [&](Eigen::RowVectorXd v, Eigen::Index filled) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index r = 0; r < filled; ++r) v -= v.dot(q.row(r)) * q.row(r);
    return v;
  };

  for (Eigen::Index i = 0; i < rows; ++i) {
    const double scale = std::max(1.0, m.row(i).norm());
    Eigen::RowVectorXd v = orthogonalize(m.row(i), i);
    double norm = v.norm();
    if (!(norm > 1e-10 * scale)) {
      do {
        if (next_unit >= cols) throw std::runtime_error("orthonormal completion exhausted the unit vectors");
        v = orthogonalize(Eigen::RowVectorXd::Unit(cols, next_unit++), i);
        norm = v.norm();
      } while (!(norm > 1e-8));
    }
    q.row(i) = v / norm;
  }
  return q;
}

double orthonormality_error(const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd gram = basis * basis.transpose();
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd procrustes_basis(const Eigen::MatrixXd& s) {
  if (s.cols() > s.rows()) throw std::invalid_argument("Procrustes target needs at least as many rows as columns");
  if (!s.allFinite()) throw std::invalid_argument("non-finite entries in the basis-update target");

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd left = svd.matrixU();  // m x K
  const Eigen::MatrixXd& right = svd.matrixV();  // K x K
  const Eigen::VectorXd& sigma = svd.singularValues();

  const double cutoff = sigma.size() > 0 ? sigma(0) * static_cast<double>(s.rows()) *
                                               std::numeric_limits<double>::epsilon()
                                         : 0.0;
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  if (rank < left.cols()) {
    // Directions with zero singular value do not affect the trace; complete deterministically.
    Eigen::MatrixXd rows = left.transpose();
    rows.bottomRows(rows.rows() - rank).setZero();
    left = orthonormalize_rows(rows).transpose();
  }
  return right * left.transpose();
}

Eigen::MatrixXd update_basis(const Eigen::MatrixXd& features, const SparseRowMatrix& weights,
                             const Eigen::MatrixXd& representation) {
  const Eigen::MatrixXd weighted = weights * representation;
  return procrustes_basis(features.transpose() * weighted);
}

AuxiliaryFactors auxiliary_factors(const Eigen::MatrixXd& features, const NeighborGraph& graph,
                                   const IndexMatrix& index, const Eigen::MatrixXd& consensus,
                                   const Eigen::MatrixXd& basis, double lambda1) {
  const Eigen::MatrixXd projected = features * basis.transpose();
  AuxiliaryFactors aux;
  aux.targets = graph.weights * projected;
  aux.scales = graph.degrees;
  const auto paired = static_cast<Eigen::Index>(index.rows());
  if (paired > 0) {
    aux.targets.topRows(paired) += lambda1 * consensus;
    aux.scales.head(paired).array() += lambda1;
  }
  return aux;
}

Eigen::MatrixXd update_representation(const Eigen::MatrixXd& features, const NeighborGraph& graph,
                                      const IndexMatrix& index, const Eigen::MatrixXd& consensus,
                                      const Eigen::MatrixXd& basis, double lambda1, double lambda2) {
  const auto aux = auxiliary_factors(features, graph, index, consensus, basis, lambda1);
  Eigen::MatrixXd p(aux.targets.rows(), aux.targets.cols());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double scale = aux.scales(i);
    if (!(scale > 0.0)) {
      throw std::runtime_error("zero diagonal in M at row " + std::to_string(i) +
                               " (graph without self-loops and an isolated sample)");
    }
    const double threshold = lambda2 / (2.0 * scale);
    for (Eigen::Index c = 0; c < p.cols(); ++c) p(i, c) = soft_threshold(aux.targets(i, c) / scale, threshold);
  }
  return p;
}

Eigen::MatrixXd update_consensus(const std::vector<Eigen::MatrixXd>& paired_blocks) {
  if (paired_blocks.empty()) throw std::invalid_argument("consensus needs at least one view");
  Eigen::MatrixXd sum = paired_blocks.front();
  for (std::size_t k = 1; k < paired_blocks.size(); ++k) {
    if (paired_blocks[k].rows() != sum.rows() || paired_blocks[k].cols() != sum.cols()) {
      throw std::invalid_argument("paired blocks differ in shape");
    }
    sum += paired_blocks[k];
  }
  return sum / static_cast<double>(paired_blocks.size());
}

ModelState init_state(const MultiViewDataset& dataset, const ModelParams& params) {
  validate(params, dataset);
  const auto latent = static_cast<Eigen::Index>(params.latent_dim);
  std::mt19937_64 rng(params.seed);
  ModelState state;
  std::vector<Eigen::MatrixXd> blocks;
  for (std::size_t k = 0; k < dataset.view_count(); ++k) {
    const auto rows = dataset.view(k).rows();
    const auto cols = dataset.view(k).cols();
    Eigen::MatrixXd p(rows, latent);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index c = 0; c < latent; ++c) p(i, c) = uniform01(rng);
    Eigen::MatrixXd u(latent, cols);
    for (Eigen::Index i = 0; i < latent; ++i)
      for (Eigen::Index c = 0; c < cols; ++c) u(i, c) = 2.0 * uniform01(rng) - 1.0;
    blocks.push_back(index_matrix(dataset, k).select(p));
    state.representations.push_back(std::move(p));
    state.bases.push_back(orthonormalize_rows(u));
  }
  state.consensus = update_consensus(blocks);
  return state;
}

std::size_t resolve_neighbors(const MultiViewDataset& dataset, const ModelParams& params) {
  if (params.neighbors) return *params.neighbors;
  return default_neighbor_count(dataset.sample_count(), std::max<std::size_t>(params.latent_dim, 1));
}

std::vector<NeighborGraph> build_graphs(const MultiViewDataset& dataset, const ModelParams& params) {
  const std::size_t neighbors = resolve_neighbors(dataset, params);
  std::vector<NeighborGraph> graphs;
  for (std::size_t k = 0; k < dataset.view_count(); ++k) {
    const auto rows = static_cast<std::size_t>(dataset.view(k).rows());
    if (rows == 1) {
      NeighborGraph g;
      g.weights.resize(1, 1);
      g.weights.insert(0, 0) = 1.0;
      g.weights.makeCompressed();
      g.degrees = Eigen::VectorXd::Ones(1);
      graphs.push_back(std::move(g));
      continue;
    }
    graphs.push_back(knn_graph(dataset.view(k), std::min(neighbors, rows - 1)));
  }
  return graphs;
}

namespace {

void check_shapes(const MultiViewDataset& dataset, const std::vector<NeighborGraph>& graphs, const ModelState& state) {
  const std::size_t v = dataset.view_count();
  if (graphs.size() != v || state.bases.size() != v || state.representations.size() != v) {
    throw std::invalid_argument("state, graphs and dataset disagree on the number of views");
  }
  for (std::size_t k = 0; k < v; ++k) {
    const auto& x = dataset.view(k);
    if (graphs[k].weights.rows() != x.rows() || state.representations[k].rows() != x.rows() ||
        state.bases[k].cols() != x.cols() || state.bases[k].rows() != state.representations[k].cols()) {
      throw std::invalid_argument("inconsistent shapes in view " + std::to_string(k + 1));
    }
  }
}

double consensus_gap(const MultiViewDataset& dataset, const ModelState& state) {
  double total = 0.0;
  for (std::size_t k = 0; k < dataset.view_count(); ++k) {
    total += (index_matrix(dataset, k).select(state.representations[k]) - state.consensus).squaredNorm();
  }
  return total;
}

double l1_norm(const ModelState& state) {
  double total = 0.0;
  for (const auto& p : state.representations) total += p.cwiseAbs().sum();
  return total;
}

}  // namespace

ObjectiveTerms objective(const MultiViewDataset& dataset, const std::vector<NeighborGraph>& graphs,
                         const ModelState& state, const ModelParams& params) {
  check_shapes(dataset, graphs, state);
  ObjectiveTerms terms;
  for (std::size_t k = 0; k < dataset.view_count(); ++k) {
    const auto& x = dataset.view(k);
    const Eigen::MatrixXd reconstructed = state.representations[k] * state.bases[k];
    const auto& w = graphs[k].weights;
    for (Eigen::Index i = 0; i < w.outerSize(); ++i)
      for (SparseRowMatrix::InnerIterator it(w, i); it; ++it)
        terms.reconstruction += it.value() * (x.row(i) - reconstructed.row(it.col())).squaredNorm();
  }
  terms.consensus = params.lambda1 * consensus_gap(dataset, state);
  terms.sparsity = params.lambda2 * l1_norm(state);
  return terms;
}

double working_objective(const MultiViewDataset& dataset, const std::vector<NeighborGraph>& graphs,
                         const ModelState& state, const ModelParams& params) {
  check_shapes(dataset, graphs, state);
  double value = params.lambda1 * consensus_gap(dataset, state) + params.lambda2 * l1_norm(state);
  for (std::size_t k = 0; k < dataset.view_count(); ++k) {
    const auto& p = state.representations[k];
    const Eigen::MatrixXd weighted = graphs[k].weights * p;
    const Eigen::MatrixXd projected = dataset.view(k) * state.bases[k].transpose();
    const double quadratic = (graphs[k].degrees.array() * p.rowwise().squaredNorm().array()).sum();
    const double cross = weighted.cwiseProduct(projected).sum();
    value += quadratic - 2.0 * cross;
  }
  return value;
}

double data_constant(const MultiViewDataset& dataset, const std::vector<NeighborGraph>& graphs) {
  if (graphs.size() != dataset.view_count()) throw std::invalid_argument("one graph per view required");
  double value = 0.0;
  for (std::size_t k = 0; k < dataset.view_count(); ++k) {
    value += (graphs[k].degrees.array() * dataset.view(k).rowwise().squaredNorm().array()).sum();
  }
  return value;
}

ModelState fit(const MultiViewDataset& dataset, const std::vector<NeighborGraph>& graphs,
               const ModelParams& params, const FitObserver& observer) {
  ModelState state = init_state(dataset, params);
  check_shapes(dataset, graphs, state);
  const std::size_t v = dataset.view_count();
  std::vector<IndexMatrix> selectors;
  for (std::size_t k = 0; k < v; ++k) selectors.push_back(index_matrix(dataset, k));

  state.initial = objective(dataset, graphs, state, params);
  double previous = state.initial.total();
  if (!std::isfinite(previous)) throw std::runtime_error("non-finite objective at initialization");

  std::vector<Eigen::MatrixXd> blocks(v);
  for (std::size_t iter = 1; iter <= params.max_iter; ++iter) {
    for (std::size_t k = 0; k < v; ++k) {
      state.bases[k] = update_basis(dataset.view(k), graphs[k].weights, state.representations[k]);
      if (observer) observer(FitStep::basis, k, state);
      state.representations[k] = update_representation(dataset.view(k), graphs[k], selectors[k], state.consensus,
                                                       state.bases[k], params.lambda1, params.lambda2);
      if (observer) observer(FitStep::representation, k, state);
    }
    for (std::size_t k = 0; k < v; ++k) blocks[k] = selectors[k].select(state.representations[k]);
    state.consensus = update_consensus(blocks);
    if (observer) observer(FitStep::consensus, v, state);

    const auto terms = objective(dataset, graphs, state, params);
    const double current = terms.total();
    if (!std::isfinite(current)) {
      throw std::runtime_error("non-finite objective at iteration " + std::to_string(iter) +
                               " (reconstruction=" + std::to_string(terms.reconstruction) +
                               ", consensus=" + std::to_string(terms.consensus) +
                               ", sparsity=" + std::to_string(terms.sparsity) + ")");
    }
    state.trace.push_back(terms);
    const double change = std::abs(previous - current) / std::max(previous, 1e-12);
    previous = current;
    if (change < params.tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

ModelState fit(const MultiViewDataset& dataset, const ModelParams& params, const FitObserver& observer) {
  validate(params, dataset);
  return fit(dataset, build_graphs(dataset, params), params, observer);
}

Eigen::MatrixXd assemble_representation(const ModelState& state, const MultiViewDataset& dataset) {
  if (state.representations.size() != dataset.view_count()) {
    throw std::invalid_argument("state does not match the dataset's view count");
  }
  const auto latent = state.consensus.cols();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dataset.sample_count()), latent);
  const auto paired = static_cast<Eigen::Index>(dataset.paired_count());
  out.topRows(paired) = state.consensus;
  for (std::size_t k = 0; k < dataset.view_count(); ++k) {
    const auto own = static_cast<Eigen::Index>(dataset.unpaired_count(k));
    out.middleRows(static_cast<Eigen::Index>(dataset.unpaired_offset(k)), own) =
        state.representations[k].bottomRows(own);
  }
  return out;
}

Eigen::VectorXd project_sample(const Eigen::VectorXd& features, const Eigen::MatrixXd& basis) {
  if (features.size() != basis.cols()) {
    throw std::invalid_argument("sample has " + std::to_string(features.size()) + " features, basis expects " +
                                std::to_string(basis.cols()));
  }
  return basis * features;
}

Eigen::VectorXd recover_view(const Eigen::VectorXd& latent, const Eigen::MatrixXd& basis) {
  if (latent.size() != basis.rows()) {
    throw std::invalid_argument("latent row has " + std::to_string(latent.size()) + " entries, basis expects " +
                                std::to_string(basis.rows()));
  }
  return basis.transpose() * latent;
}

}  // namespace imcgrmf

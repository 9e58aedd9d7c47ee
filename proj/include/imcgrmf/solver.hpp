#pragma once

#include "imcgrmf/dataset.hpp"
#include "imcgrmf/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace imcgrmf {

struct ModelParams {
  double lambda1 = 10.0;   // consensus weight
  double lambda2 = 1e-3;   // l1 weight
  std::size_t latent_dim = 0;
  std::optional<std::size_t> neighbors;  // nullopt: default_neighbor_count(n, latent_dim)
  std::size_t max_iter = 200;
  double tol = 1e-6;       // relative objective change; +inf stops after one sweep
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument when `params` cannot be used with `dataset`.
void validate(const ModelParams& params, const MultiViewDataset& dataset);

// The three weighted addends of the objective.
struct ObjectiveTerms {
  double reconstruction = 0.0;
  double consensus = 0.0;
  double sparsity = 0.0;

  double total() const { return reconstruction + consensus + sparsity; }
};

struct ModelState {
  std::vector<Eigen::MatrixXd> bases;            // U^(k), K x m_k, orthonormal rows
  std::vector<Eigen::MatrixXd> representations;  // P^(k), (n_c + n_k) x K
  Eigen::MatrixXd consensus;                     // P^c, n_c x K
  ObjectiveTerms initial;                        // objective before the first sweep
  std::vector<ObjectiveTerms> trace;             // one entry per completed sweep
  bool converged = false;

  std::size_t iterations() const { return trace.size(); }
};

// A^(k) (stored transposed, one row per sample) and the diagonal of M^(k).
struct AuxiliaryFactors {
  Eigen::MatrixXd targets;  // A^(k)T = W X U^T + lambda1 G^T P^c
  Eigen::VectorXd scales;   // M_ii = D_ii + lambda1 [i < n_c]
};

// sign(x) * max(|x| - t, 0)
double soft_threshold(double x, double threshold);

/// Gram-Schmidt on the rows (two passes). Rows that collapse numerically are
/// replaced by the next coordinate unit vector that survives orthogonalization.
Eigen::MatrixXd orthonormalize_rows(const Eigen::MatrixXd& m);

// max_ij |U U^T - I|
double orthonormality_error(const Eigen::MatrixXd& basis);

/// argmax Tr(S U) over K x m matrices with orthonormal rows, for S of size m x K:
/// U = J B^T from the thin SVD S = B Sigma J^T.
Eigen::MatrixXd procrustes_basis(const Eigen::MatrixXd& s);

Eigen::MatrixXd update_basis(const Eigen::MatrixXd& features, const SparseRowMatrix& weights,
                             const Eigen::MatrixXd& representation);

AuxiliaryFactors auxiliary_factors(const Eigen::MatrixXd& features, const NeighborGraph& graph,
                                   const IndexMatrix& index, const Eigen::MatrixXd& consensus,
                                   const Eigen::MatrixXd& basis, double lambda1);

/// Exact minimizer of the representation subproblem for one view: row i is
/// soft_threshold(A^T_i / M_ii, lambda2 / (2 M_ii)).
Eigen::MatrixXd update_representation(const Eigen::MatrixXd& features, const NeighborGraph& graph,
                                      const IndexMatrix& index, const Eigen::MatrixXd& consensus,
                                      const Eigen::MatrixXd& basis, double lambda1, double lambda2);

// Mean of the per-view paired blocks G^(k) P^(k).
Eigen::MatrixXd update_consensus(const std::vector<Eigen::MatrixXd>& paired_blocks);

/// Random P^(k) ~ U[0,1), orthonormalized random U^(k), P^c as the mean of the
/// paired blocks. Deterministic in params.seed.
ModelState init_state(const MultiViewDataset& dataset, const ModelParams& params);

// Neighbor count actually used for `dataset` (auto rule applied, before per-view clamping).
std::size_t resolve_neighbors(const MultiViewDataset& dataset, const ModelParams& params);

// One graph per view; the neighbor count is clamped to the view's row count minus one.
std::vector<NeighborGraph> build_graphs(const MultiViewDataset& dataset, const ModelParams& params);

/// Direct evaluation: sum_k sum_ij w_ij |x_i - p_j U|^2
///   + lambda1 sum_k |G P - P^c|_F^2 + lambda2 sum_k |P|_1.
ObjectiveTerms objective(const MultiViewDataset& dataset, const std::vector<NeighborGraph>& graphs,
                         const ModelState& state, const ModelParams& params);

/// Trace-form objective with the data-only term dropped; valid when every
/// basis has orthonormal rows. Adding data_constant() recovers objective().
double working_objective(const MultiViewDataset& dataset, const std::vector<NeighborGraph>& graphs,
                         const ModelState& state, const ModelParams& params);

// sum_k Tr(X^T D X)
double data_constant(const MultiViewDataset& dataset, const std::vector<NeighborGraph>& graphs);

enum class FitStep { basis, representation, consensus };
// Called after every sub-update; `view` is meaningless for FitStep::consensus.
using FitObserver = std::function<void(FitStep, std::size_t view, const ModelState&)>;

/// Alternating minimization: per sweep, for each view update U then P, then
/// P^c once. Stops when |f_prev - f| / max(f_prev, 1e-12) < tol or after
/// max_iter sweeps. Throws std::runtime_error on a non-finite objective.
ModelState fit(const MultiViewDataset& dataset, const std::vector<NeighborGraph>& graphs,
               const ModelParams& params, const FitObserver& observer = {});
ModelState fit(const MultiViewDataset& dataset, const ModelParams& params, const FitObserver& observer = {});

// [P^c; P-bar^(1); ...; P-bar^(v)], rows in the dataset's assembled order.
Eigen::MatrixXd assemble_representation(const ModelState& state, const MultiViewDataset& dataset);

// Latent row of an unseen sample of one view: y U^T.
Eigen::VectorXd project_sample(const Eigen::VectorXd& features, const Eigen::MatrixXd& basis);
// Feature row of view f reconstructed from a latent row: p U^(f).
Eigen::VectorXd recover_view(const Eigen::VectorXd& latent, const Eigen::MatrixXd& basis);

}  // namespace imcgrmf

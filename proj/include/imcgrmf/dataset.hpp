#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace imcgrmf {

enum class Rounding { nearest, floor, ceil };

struct SplitSpec {
  double paired_ratio = 0.5;
  std::uint64_t seed = 0;
  Rounding rounding = Rounding::nearest;
};

// Provenance of a generated split.
struct SplitMeta {
  double paired_ratio = 1.0;
  std::uint64_t seed = 0;
  // Rounding produced n_c = n although the ratio was below one.
  bool complete_after_rounding = false;
};

/// Multi-view data in "assembled" order: the n_c paired samples first, then the
/// unpaired samples of view 1, view 2, ... . View k holds n_c + n_k rows; its
/// first n_c rows are the paired samples in the same order for every view.
///
/// `sample_ids()[r]` is the original (file) index of assembled row r, and the
/// optional labels are aligned with assembled rows.
class MultiViewDataset {
 public:
  MultiViewDataset() = default;

  /// Validates every invariant and throws std::invalid_argument on violation.
  /// An empty `sample_ids` means the identity permutation.
  MultiViewDataset(std::vector<Eigen::MatrixXd> views, std::size_t paired_count,
                   std::optional<std::vector<int>> labels = std::nullopt,
                   std::vector<std::size_t> sample_ids = {},
                   std::optional<SplitMeta> split = std::nullopt);

  std::size_t view_count() const { return views_.size(); }
  std::size_t paired_count() const { return paired_count_; }
  std::size_t unpaired_count(std::size_t view) const { return unpaired_counts_.at(view); }
  const std::vector<std::size_t>& unpaired_counts() const { return unpaired_counts_; }
  std::size_t sample_count() const { return sample_ids_.size(); }
  std::size_t feature_count(std::size_t view) const { return static_cast<std::size_t>(views_.at(view).cols()); }
  bool is_complete() const { return sample_count() == paired_count_; }

  const Eigen::MatrixXd& view(std::size_t k) const { return views_.at(k); }
  const std::vector<Eigen::MatrixXd>& views() const { return views_; }
  const std::optional<std::vector<int>>& labels() const { return labels_; }
  const std::vector<std::size_t>& sample_ids() const { return sample_ids_; }
  const std::optional<SplitMeta>& split() const { return split_; }

  // Assembled row of the j-th row of view k.
  std::size_t assembled_row(std::size_t view, std::size_t row) const;
  // First assembled row of view k's unpaired block.
  std::size_t unpaired_offset(std::size_t view) const;
  // Presence mask, assembled rows x views.
  std::vector<std::vector<bool>> presence() const;

 private:
  std::vector<Eigen::MatrixXd> views_;
  std::size_t paired_count_ = 0;
  std::vector<std::size_t> unpaired_counts_;
  std::optional<std::vector<int>> labels_;
  std::vector<std::size_t> sample_ids_;
  std::optional<SplitMeta> split_;
};

/// Selector G^(k): n_c x (n_c + n_k) with ones on the leading diagonal.
/// Stored implicitly; `dense()` materializes it.
class IndexMatrix {
 public:
  IndexMatrix(std::size_t paired, std::size_t total);

  std::size_t rows() const { return paired_; }
  std::size_t cols() const { return total_; }
  Eigen::MatrixXd dense() const;
  // G * P: the paired block of a per-view representation.
  Eigen::MatrixXd select(const Eigen::MatrixXd& representation) const;
  // G^T * Q: embeds an n_c-row block into total rows, zero elsewhere.
  Eigen::MatrixXd embed(const Eigen::MatrixXd& paired_block) const;

 private:
  std::size_t paired_;
  std::size_t total_;
};

struct LoadOptions {
  // Per-feature min-max scaling to [0,1] computed over each view's observed rows.
  bool min_max_scale = false;
};

/// Reads view_1.csv ... view_v.csv, mask.csv and optional labels.csv.
/// A view file either lists all n samples (rows of absent samples are ignored
/// and may be blank) or only the present samples in file order.
MultiViewDataset load_views(const std::filesystem::path& dir, const LoadOptions& options = {});

/// Writes the dataset in original sample order. Rows of absent samples are blank.
/// split_meta.json is emitted when the dataset carries split provenance.
void write_views(const MultiViewDataset& dataset, const std::filesystem::path& dir);

MultiViewDataset min_max_scale(const MultiViewDataset& dataset);

/// Keeps round(ratio * n) randomly chosen samples in all views; of the
/// remaining r samples (in shuffled order) the first ceil(r/v)-sized block
/// keeps only view 1, the next only view 2, and so on.
MultiViewDataset make_incomplete_split(const MultiViewDataset& complete, const SplitSpec& spec);

// `view` is zero-based.
IndexMatrix index_matrix(const MultiViewDataset& dataset, std::size_t view);

}  // namespace imcgrmf

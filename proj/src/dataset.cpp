#include "imcgrmf/dataset.hpp"

#include "imcgrmf/csv_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace imcgrmf {

namespace fs = std::filesystem;

MultiViewDataset::MultiViewDataset(std::vector<Eigen::MatrixXd> views, std::size_t paired_count,
                                   std::optional<std::vector<int>> labels,
                                   std::vector<std::size_t> sample_ids,
                                   std::optional<SplitMeta> split)
    : views_(std::move(views)),
      paired_count_(paired_count),
      labels_(std::move(labels)),
      sample_ids_(std::move(sample_ids)),
      split_(split) {
  if (views_.empty()) throw std::invalid_argument("dataset needs at least one view");
  std::size_t n = paired_count_;
  for (std::size_t k = 0; k < views_.size(); ++k) {
    const auto& x = views_[k];
    if (x.rows() == 0 || x.cols() == 0) {
      throw std::invalid_argument("empty view " + std::to_string(k + 1));
    }
    if (static_cast<std::size_t>(x.rows()) < paired_count_) {
      throw std::invalid_argument("view " + std::to_string(k + 1) + " has fewer rows than the paired count");
    }
    if (!x.allFinite()) throw std::invalid_argument("view " + std::to_string(k + 1) + " has non-finite entries");
    unpaired_counts_.push_back(static_cast<std::size_t>(x.rows()) - paired_count_);
    n += unpaired_counts_.back();
  }
  if (sample_ids_.empty()) {
    sample_ids_.resize(n);
    std::iota(sample_ids_.begin(), sample_ids_.end(), std::size_t{0});
  }
  if (sample_ids_.size() != n) throw std::invalid_argument("sample id map does not match sample count");
  std::vector<bool> seen(n, false);
  for (auto id : sample_ids_) {
    if (id >= n || seen[id]) throw std::invalid_argument("sample id map is not a permutation");
    seen[id] = true;
  }
  if (labels_ && labels_->size() != n) {
    throw std::invalid_argument("label count " + std::to_string(labels_->size()) +
                                " does not match sample count " + std::to_string(n));
  }
}

std::size_t MultiViewDataset::unpaired_offset(std::size_t view) const {
  if (view >= views_.size()) throw std::out_of_range("view index out of range");
  std::size_t offset = paired_count_;
  for (std::size_t k = 0; k < view; ++k) offset += unpaired_counts_[k];
  return offset;
}

std::size_t MultiViewDataset::assembled_row(std::size_t view, std::size_t row) const {
  if (row < paired_count_) return row;
  if (row >= paired_count_ + unpaired_count(view)) throw std::out_of_range("row index out of range");
  return unpaired_offset(view) + (row - paired_count_);
}

std::vector<std::vector<bool>> MultiViewDataset::presence() const {
  std::vector<std::vector<bool>> mask(sample_count(), std::vector<bool>(view_count(), false));
  for (std::size_t k = 0; k < view_count(); ++k)
    for (std::size_t j = 0; j < paired_count_ + unpaired_counts_[k]; ++j) mask[assembled_row(k, j)][k] = true;
  return mask;
}

IndexMatrix::IndexMatrix(std::size_t paired, std::size_t total) : paired_(paired), total_(total) {
  if (paired > total) throw std::invalid_argument("index matrix with more rows than columns");
}

Eigen::MatrixXd IndexMatrix::dense() const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(paired_), static_cast<Eigen::Index>(total_));
  for (std::size_t i = 0; i < paired_; ++i) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  return g;
}

Eigen::MatrixXd IndexMatrix::select(const Eigen::MatrixXd& representation) const {
  if (static_cast<std::size_t>(representation.rows()) != total_) {
    throw std::invalid_argument("index matrix applied to a matrix with the wrong row count");
  }
  return representation.topRows(static_cast<Eigen::Index>(paired_));
}

Eigen::MatrixXd IndexMatrix::embed(const Eigen::MatrixXd& paired_block) const {
  if (static_cast<std::size_t>(paired_block.rows()) != paired_) {
    throw std::invalid_argument("paired block has the wrong row count");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total_), paired_block.cols());
  out.topRows(static_cast<Eigen::Index>(paired_)) = paired_block;
  return out;
}

IndexMatrix index_matrix(const MultiViewDataset& dataset, std::size_t view) {
  if (view >= dataset.view_count()) {
    throw std::out_of_range("view index " + std::to_string(view) + " out of range for " +
                            std::to_string(dataset.view_count()) + " views");
  }
  return IndexMatrix(dataset.paired_count(), dataset.paired_count() + dataset.unpaired_count(view));
}

namespace {

std::vector<std::size_t> read_permutation(const fs::path& meta_path, SplitMeta& meta) {
  std::ifstream in(meta_path);
  if (!in) throw std::runtime_error("cannot open '" + meta_path.string() + "'");
  const auto doc = nlohmann::json::parse(in);
  meta.paired_ratio = doc.at("paired_ratio").get<double>();
  meta.seed = doc.at("seed").get<std::uint64_t>();
  meta.complete_after_rounding = doc.value("complete_after_rounding", false);
  return doc.at("permutation").get<std::vector<std::size_t>>();
}

}  // namespace

MultiViewDataset load_views(const fs::path& dir, const LoadOptions& options) {
  std::vector<fs::path> view_paths;
  for (std::size_t k = 1;; ++k) {
    auto p = dir / ("view_" + std::to_string(k) + ".csv");
    if (!fs::exists(p)) break;
    view_paths.push_back(std::move(p));
  }
  if (view_paths.empty()) throw std::invalid_argument("no view_1.csv found in '" + dir.string() + "'");
  const std::size_t v = view_paths.size();

  const auto mask_path = dir / "mask.csv";
  const auto mask_values = csv::read_matrix(mask_path);
  if (static_cast<std::size_t>(mask_values.cols()) != v) {
    throw std::invalid_argument("dimension mismatch: mask.csv has " + std::to_string(mask_values.cols()) +
                                " columns but " + std::to_string(v) + " views were found");
  }
  const std::size_t n = static_cast<std::size_t>(mask_values.rows());
  if (n == 0) throw std::invalid_argument("mask.csv is empty");

  // owner[i] = view index for single-view samples, v for paired samples
  std::vector<std::size_t> owner(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t present = 0, last = 0;
    for (std::size_t k = 0; k < v; ++k) {
      const double m = mask_values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (m != 0.0 && m != 1.0) throw std::invalid_argument("mask.csv:" + std::to_string(i + 1) + ": entries must be 0 or 1");
      if (m == 1.0) {
        ++present;
        last = k;
      }
    }
    if (present == 0) throw std::invalid_argument("sample " + std::to_string(i) + " has no view");
    if (present != 1 && present != v) {
      throw std::invalid_argument("sample " + std::to_string(i) +
                                  " is present in some but not all views (unsupported missing pattern)");
    }
    owner[i] = present == v ? v : last;
  }

  // Per-view feature rows indexed by original sample id.
  std::vector<std::vector<std::vector<double>>> rows(v, std::vector<std::vector<double>>(n));
  std::vector<std::size_t> widths(v, 0);
  for (std::size_t k = 0; k < v; ++k) {
    auto lines = csv::read_lines(view_paths[k]);
    if (lines.size() == n + 1 && lines.back().empty()) lines.pop_back();
    std::vector<std::size_t> present_ids;
    for (std::size_t i = 0; i < n; ++i)
      if (owner[i] == v || owner[i] == k) present_ids.push_back(i);
    if (present_ids.empty()) throw std::invalid_argument("empty view " + std::to_string(k + 1));

    const bool full = lines.size() == n;
    if (!full) {
      if (lines.size() == present_ids.size() + 1 && lines.back().empty()) lines.pop_back();
      if (lines.size() != present_ids.size()) {
        throw std::invalid_argument("dimension mismatch: " + view_paths[k].filename().string() + " has " +
                                    std::to_string(lines.size()) + " rows but mask.csv lists " +
                                    std::to_string(n) + " samples (" + std::to_string(present_ids.size()) +
                                    " present)");
      }
    }
    for (std::size_t r = 0; r < present_ids.size(); ++r) {
      const std::size_t id = present_ids[r];
      const std::size_t line_no = full ? id : r;
      const auto context = view_paths[k].filename().string() + ":" + std::to_string(line_no + 1);
      if (lines[line_no].empty()) throw std::invalid_argument(context + ": missing row for a present sample");
      std::vector<double> values;
      for (auto cell : csv::split_line(lines[line_no])) values.push_back(csv::parse_double(cell, context));
      if (widths[k] == 0) widths[k] = values.size();
      if (values.size() != widths[k]) {
        throw std::invalid_argument(context + ": expected " + std::to_string(widths[k]) + " columns");
      }
      rows[k][id] = std::move(values);
    }
  }

  std::optional<std::vector<int>> file_labels;
  if (fs::exists(dir / "labels.csv")) {
    const auto raw = csv::read_integer_column(dir / "labels.csv");
    if (raw.size() != n) {
      throw std::invalid_argument("dimension mismatch: labels.csv has " + std::to_string(raw.size()) +
                                  " rows, mask.csv has " + std::to_string(n));
    }
    file_labels.emplace(raw.begin(), raw.end());
  }

  // Within each group samples follow file order, or the recorded split order when present.
  std::vector<std::size_t> rank(n);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::optional<SplitMeta> meta;
  if (fs::exists(dir / "split_meta.json")) {
    SplitMeta m;
    const auto perm = read_permutation(dir / "split_meta.json", m);
    if (perm.size() != n) throw std::invalid_argument("split_meta.json permutation has the wrong length");
    std::vector<bool> seen(n, false);
    for (std::size_t r = 0; r < n; ++r) {
      if (perm[r] >= n || seen[perm[r]]) throw std::invalid_argument("split_meta.json permutation is invalid");
      seen[perm[r]] = true;
      rank[perm[r]] = r;
    }
    meta = m;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    // paired (owner == v) first, then view 0, 1, ...
    const std::size_t ga = owner[a] == v ? 0 : owner[a] + 1;
    const std::size_t gb = owner[b] == v ? 0 : owner[b] + 1;
    return ga != gb ? ga < gb : rank[a] < rank[b];
  });

  const auto paired = static_cast<std::size_t>(std::count(owner.begin(), owner.end(), v));
  std::vector<Eigen::MatrixXd> views(v);
  for (std::size_t k = 0; k < v; ++k) {
    std::vector<std::size_t> ids;
    for (auto id : order)
      if (owner[id] == v || owner[id] == k) ids.push_back(id);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(widths[k]));
    for (std::size_t r = 0; r < ids.size(); ++r)
      for (std::size_t c = 0; c < widths[k]; ++c)
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[k][ids[r]][c];
    views[k] = std::move(x);
  }
  std::optional<std::vector<int>> labels;
  if (file_labels) {
    labels.emplace();
    for (auto id : order) labels->push_back((*file_labels)[id]);
  }
  MultiViewDataset dataset(std::move(views), paired, std::move(labels), order, meta);
  return options.min_max_scale ? min_max_scale(dataset) : dataset;
}

void write_views(const MultiViewDataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  const std::size_t n = dataset.sample_count();
  const std::size_t v = dataset.view_count();
  const auto& ids = dataset.sample_ids();

  for (std::size_t k = 0; k < v; ++k) {
    std::vector<std::string> lines(n);
    const auto& x = dataset.view(k);
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      std::string line;
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        if (c) line += ',';
        line += csv::format_double(x(j, c));
      }
      lines[ids[dataset.assembled_row(k, static_cast<std::size_t>(j))]] = std::move(line);
    }
    const auto path = dir / ("view_" + std::to_string(k + 1) + ".csv");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    for (const auto& line : lines) out << line << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  }

  const auto presence = dataset.presence();
  Eigen::MatrixXd mask(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(v));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < v; ++k)
      mask(static_cast<Eigen::Index>(ids[r]), static_cast<Eigen::Index>(k)) = presence[r][k] ? 1.0 : 0.0;
  csv::write_matrix(dir / "mask.csv", mask);

  if (dataset.labels()) {
    std::vector<long long> labels(n);
    for (std::size_t r = 0; r < n; ++r) labels[ids[r]] = (*dataset.labels())[r];
    csv::write_integer_column(dir / "labels.csv", labels);
  }

  if (dataset.split()) {
    const auto& meta = *dataset.split();
    nlohmann::json doc;
    doc["seed"] = meta.seed;
    doc["paired_ratio"] = meta.paired_ratio;
    doc["complete_after_rounding"] = meta.complete_after_rounding;
    doc["paired_count"] = dataset.paired_count();
    doc["unpaired_counts"] = dataset.unpaired_counts();
    doc["permutation"] = ids;
    const auto path = dir / "split_meta.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << doc.dump(2) << '\n';
  }
}

MultiViewDataset min_max_scale(const MultiViewDataset& dataset) {
  std::vector<Eigen::MatrixXd> views = dataset.views();
  for (auto& x : views) {
    const Eigen::RowVectorXd lo = x.colwise().minCoeff();
    const Eigen::RowVectorXd hi = x.colwise().maxCoeff();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double span = hi(c) - lo(c);
      if (span > 0.0) {
        x.col(c) = (x.col(c).array() - lo(c)) / span;
      } else {
        x.col(c).setZero();
      }
    }
  }
  return MultiViewDataset(std::move(views), dataset.paired_count(), dataset.labels(), dataset.sample_ids(),
                          dataset.split());
}

MultiViewDataset make_incomplete_split(const MultiViewDataset& complete, const SplitSpec& spec) {
  if (!(spec.paired_ratio > 0.0 && spec.paired_ratio <= 1.0)) {
    throw std::invalid_argument("paired ratio must lie in (0, 1]");
  }
  if (!complete.is_complete()) throw std::invalid_argument("split source must be a complete dataset");

  const std::size_t n = complete.sample_count();
  const std::size_t v = complete.view_count();
  const double target = spec.paired_ratio * static_cast<double>(n);
  double rounded = 0.0;
  switch (spec.rounding) {
    case Rounding::nearest: rounded = std::round(target); break;
    case Rounding::floor: rounded = std::floor(target); break;
    case Rounding::ceil: rounded = std::ceil(target); break;
  }
  const auto paired = static_cast<std::size_t>(std::clamp(rounded, 0.0, static_cast<double>(n)));
  if (paired < 1) throw std::invalid_argument("paired ratio yields no paired samples");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t remainder = n - paired;
  std::vector<std::size_t> block_start(v + 1, paired);
  for (std::size_t k = 0; k < v; ++k) {
    block_start[k + 1] = block_start[k] + remainder / v + (k < remainder % v ? 1 : 0);
  }

  std::vector<Eigen::MatrixXd> views(v);
  for (std::size_t k = 0; k < v; ++k) {
    const auto& src = complete.view(k);
    const std::size_t own = block_start[k + 1] - block_start[k];
    Eigen::MatrixXd x(static_cast<Eigen::Index>(paired + own), src.cols());
    for (std::size_t r = 0; r < paired; ++r) x.row(static_cast<Eigen::Index>(r)) = src.row(static_cast<Eigen::Index>(order[r]));
    for (std::size_t r = 0; r < own; ++r) {
      x.row(static_cast<Eigen::Index>(paired + r)) = src.row(static_cast<Eigen::Index>(order[block_start[k] + r]));
    }
    views[k] = std::move(x);
  }

  std::vector<std::size_t> ids(n);
  for (std::size_t r = 0; r < n; ++r) ids[r] = complete.sample_ids()[order[r]];
  std::optional<std::vector<int>> labels;
  if (complete.labels()) {
    labels.emplace(n);
    for (std::size_t r = 0; r < n; ++r) (*labels)[r] = (*complete.labels())[order[r]];
  }
  SplitMeta meta{spec.paired_ratio, spec.seed, paired == n && spec.paired_ratio < 1.0};
  return MultiViewDataset(std::move(views), paired, std::move(labels), std::move(ids), meta);
}

}  // namespace imcgrmf

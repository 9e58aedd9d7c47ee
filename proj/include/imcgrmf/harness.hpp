#pragma once

#include "imcgrmf/clustering.hpp"
#include "imcgrmf/dataset.hpp"
#include "imcgrmf/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imcgrmf {

enum class Method { imcgrmf, bsv, concat };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct ExperimentConfig {
  std::filesystem::path dataset_path;
  // Used instead of dataset_path when set.
  std::optional<MultiViewDataset> dataset;
  LoadOptions load;
  Method method = Method::imcgrmf;
  std::vector<double> paired_ratios{0.1, 0.3, 0.5, 0.7, 0.9};
  std::size_t trials = 5;
  // params.seed is the base seed; trial t runs with base + t. latent_dim 0 means "cluster count".
  ModelParams params;
  // clusters 0 means "number of distinct ground-truth labels".
  KMeansParams kmeans{0, 20, 300, 0};
  // Reports are written here when non-empty.
  std::filesystem::path output;
};

struct TrialRecord {
  Method method = Method::imcgrmf;
  double paired_ratio = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string flag;  // non-fatal condition worth reporting
  std::size_t paired_count = 0;
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  std::size_t iterations = 0;
  double final_objective = 0.0;  // NaN for baselines
  double wall_seconds = 0.0;
  std::vector<ObjectiveTerms> trace;
};

// Means over the successful trials of one (method, ratio) cell.
struct CellSummary {
  Method method = Method::imcgrmf;
  double paired_ratio = 0.0;
  std::size_t trials_ok = 0;
  bool valid = false;
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  double iterations = 0.0;
  double final_objective = 0.0;
  double wall_seconds = 0.0;
};

struct ExperimentReport {
  ModelParams params;
  KMeansParams kmeans;
  std::vector<TrialRecord> trials;
  std::vector<CellSummary> cells;
};

/// For each paired ratio and trial: split with seed base + trial, run the method,
/// cluster and score. A failing trial is recorded and the run continues; a cell
/// without any successful trial is marked invalid. An incomplete input dataset is
/// used as given (one cell at its own paired ratio).
ExperimentReport run_experiment(const ExperimentConfig& config);

struct GridCell {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool valid = false;
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
};

struct GridResult {
  double best_lambda1 = 0.0;
  double best_lambda2 = 0.0;
  double best_acc = 0.0;
  std::vector<GridCell> cells;  // lambda1-major, ascending
};

// 10^0, 10^0.5, ..., 10^2
std::vector<double> default_lambda1_grid();
// 10^-5, 10^-4, ..., 10^-1
std::vector<double> default_lambda2_grid();

/// Runs the IMC_GRMF experiment for every (lambda1, lambda2) and keeps the
/// highest mean ACC; ties go to the smaller lambda1, then the smaller lambda2.
/// Writes grid.csv to config.output when set.
GridResult grid_search(const ExperimentConfig& config, std::vector<double> lambda1_grid,
                       std::vector<double> lambda2_grid);

/// results.csv (trial rows, then one "mean" row per cell), results.json and
/// traces/<method>_ratio<r>_trial<t>.csv for every fitted trial.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);
void write_grid(const GridResult& grid, const std::filesystem::path& path);

// One parsed line of results.csv. `trial` is the trial index or "mean".
struct ResultRow {
  std::string method;
  double paired_ratio = 0.0;
  std::string trial;
  std::uint64_t seed = 0;
  std::string status;
  std::size_t paired_count = 0;
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  double iterations = 0.0;
  double final_objective = 0.0;
  double wall_seconds = 0.0;
  std::string note;
};

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

}  // namespace imcgrmf

// Command-line front end: split, fit, cluster, evaluate, experiment, grid, synth.
#include "imcgrmf/baselines.hpp"
#include "imcgrmf/clustering.hpp"
#include "imcgrmf/csv_io.hpp"
#include "imcgrmf/dataset.hpp"
#include "imcgrmf/harness.hpp"
#include "imcgrmf/metrics.hpp"
#include "imcgrmf/model_io.hpp"
#include "imcgrmf/solver.hpp"
#include "imcgrmf/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace imcgrmf;

namespace {

struct ModelFlags {
  double lambda1 = 10.0;
  double lambda2 = 1e-3;
  std::size_t latent_dim = 0;
  std::string neighbors = "auto";
  std::size_t max_iter = 200;
  double tol = 1e-6;
  std::uint64_t seed = 0;

  void attach(CLI::App& app) {
    app.add_option("--lambda1", lambda1, "Consensus weight")->capture_default_str();
    app.add_option("--lambda2", lambda2, "L1 weight")->capture_default_str();
    app.add_option("--latent-dim", latent_dim, "Latent dimension K (0: cluster count)")->capture_default_str();
    app.add_option("--neighbors", neighbors, "Neighbor count or 'auto'")->capture_default_str();
    app.add_option("--max-iter", max_iter, "Maximum sweeps")->capture_default_str();
    app.add_option("--tol", tol, "Relative objective change for convergence")->capture_default_str();
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  ModelParams params() const {
    ModelParams p;
    p.lambda1 = lambda1;
    p.lambda2 = lambda2;
    p.latent_dim = latent_dim;
    if (neighbors != "auto") {
      const auto value = csv::parse_integer(neighbors, "--neighbors");
      if (value < 1) throw std::invalid_argument("--neighbors must be positive or 'auto'");
      p.neighbors = static_cast<std::size_t>(value);
    }
    p.max_iter = max_iter;
    p.tol = tol;
    p.seed = seed;
    return p;
  }
};

std::size_t label_classes(const MultiViewDataset& data) {
  if (!data.labels()) return 0;
  std::vector<int> ids = *data.labels();
  std::sort(ids.begin(), ids.end());
  return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

// Rows of an assembled-order matrix rearranged to original sample order.
Eigen::MatrixXd to_original_order(const Eigen::MatrixXd& assembled, const MultiViewDataset& data) {
  Eigen::MatrixXd out(assembled.rows(), assembled.cols());
  for (std::size_t r = 0; r < data.sample_count(); ++r)
    out.row(static_cast<Eigen::Index>(data.sample_ids()[r])) = assembled.row(static_cast<Eigen::Index>(r));
  return out;
}

std::vector<int> read_labels(const fs::path& path) {
  const auto raw = csv::read_integer_column(path);
  return {raw.begin(), raw.end()};
}

void print_json(const nlohmann::json& doc) { std::cout << doc.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incomplete multi-view clustering via graph regularized matrix factorization"};
  app.set_config("--config", "", "TOML/INI file; every flag may be set there (per-subcommand sections)");
  app.require_subcommand(1);
  app.fallthrough();

  // split
  auto* split_cmd = app.add_subcommand("split", "Generate an incomplete split of a complete dataset");
  fs::path split_input, split_output;
  double split_ratio = 0.5;
  std::uint64_t split_seed = 0;
  split_cmd->add_option("--input", split_input, "Dataset directory")->required();
  split_cmd->add_option("--paired-ratio", split_ratio, "Fraction of samples kept in all views")->capture_default_str();
  split_cmd->add_option("--seed", split_seed, "Split seed")->capture_default_str();
  split_cmd->add_option("--output", split_output, "Output directory")->required();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model and write the learned representation");
  fs::path fit_input, fit_output;
  bool fit_scale = false;
  ModelFlags fit_flags;
  fit_cmd->add_option("--input", fit_input, "Dataset directory")->required();
  fit_cmd->add_option("--output", fit_output, "Model output directory")->required();
  fit_cmd->add_flag("--min-max-scale", fit_scale, "Scale each feature to [0,1]");
  fit_flags.attach(*fit_cmd);

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means on a representation (embedding.csv or a fit directory)");
  fs::path cluster_input, cluster_output;
  KMeansParams cluster_params{0, 20, 300, 0};
  cluster_cmd->add_option("--input", cluster_input, "embedding CSV or fit output directory")->required();
  cluster_cmd->add_option("--clusters", cluster_params.clusters, "Number of clusters")->required();
  cluster_cmd->add_option("--restarts", cluster_params.restarts, "k-means++ restarts")->capture_default_str();
  cluster_cmd->add_option("--seed", cluster_params.seed, "Random seed")->capture_default_str();
  cluster_cmd->add_option("--output", cluster_output, "Labels CSV (one id per sample)")->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predicted labels against ground truth");
  fs::path eval_pred, eval_truth, eval_output;
  eval_cmd->add_option("--pred", eval_pred, "Predicted labels CSV")->required();
  eval_cmd->add_option("--truth", eval_truth, "Ground-truth labels CSV or dataset directory")->required();
  eval_cmd->add_option("--output", eval_output, "Write the scores JSON here as well");

  // experiment and grid share their flags
  fs::path exp_input, exp_output;
  std::string exp_method = "imcgrmf";
  std::vector<double> exp_ratios{0.1, 0.3, 0.5, 0.7, 0.9};
  std::size_t exp_trials = 5, exp_clusters = 0, exp_restarts = 20;
  bool exp_scale = false;
  ModelFlags exp_flags;
  std::vector<double> grid_l1 = default_lambda1_grid(), grid_l2 = default_lambda2_grid();
  const auto attach_experiment = [&](CLI::App& cmd) {
    cmd.add_option("--input", exp_input, "Dataset directory")->required();
    cmd.add_option("--output", exp_output, "Report directory");
    cmd.add_option("--paired-ratio", exp_ratios, "Paired ratios")->capture_default_str();
    cmd.add_option("--trials", exp_trials, "Trials per ratio")->capture_default_str();
    cmd.add_option("--clusters", exp_clusters, "Cluster count (0: number of label classes)")->capture_default_str();
    cmd.add_option("--restarts", exp_restarts, "k-means++ restarts")->capture_default_str();
    cmd.add_flag("--min-max-scale", exp_scale, "Scale each feature to [0,1]");
    exp_flags.attach(cmd);
  };
  auto* exp_cmd = app.add_subcommand("experiment", "Repeated split/fit/cluster/score trials");
  attach_experiment(*exp_cmd);
  exp_cmd->add_option("--method", exp_method, "imcgrmf, bsv or concat")->capture_default_str();
  auto* grid_cmd = app.add_subcommand("grid", "Grid search over (lambda1, lambda2)");
  attach_experiment(*grid_cmd);
  grid_cmd->add_option("--lambda1-grid", grid_l1, "lambda1 candidates")->capture_default_str();
  grid_cmd->add_option("--lambda2-grid", grid_l2, "lambda2 candidates")->capture_default_str();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic Gaussian-blob multi-view dataset");
  BlobSpec blob;
  fs::path synth_output;
  synth_cmd->add_option("--clusters", blob.clusters)->capture_default_str();
  synth_cmd->add_option("--samples", blob.samples)->capture_default_str();
  synth_cmd->add_option("--dims", blob.view_dims, "Feature count per view")->capture_default_str();
  synth_cmd->add_option("--separation", blob.separation, "Closest center distance in sigmas")->capture_default_str();
  synth_cmd->add_option("--sigma", blob.sigma)->capture_default_str();
  synth_cmd->add_option("--seed", blob.seed)->capture_default_str();
  synth_cmd->add_option("--output", synth_output, "Dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump() << '\n';
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  try {
    if (split_cmd->parsed()) {
      const auto data = load_views(split_input);
      const auto out = make_incomplete_split(data, SplitSpec{split_ratio, split_seed, Rounding::nearest});
      write_views(out, split_output);
      print_json({{"paired_count", out.paired_count()},
                  {"unpaired_counts", out.unpaired_counts()},
                  {"complete_after_rounding", out.split()->complete_after_rounding}});
    } else if (fit_cmd->parsed()) {
      const auto data = load_views(fit_input, LoadOptions{fit_scale});
      auto params = fit_flags.params();
      if (params.latent_dim == 0) params.latent_dim = label_classes(data);
      if (params.latent_dim == 0) throw std::invalid_argument("--latent-dim is required when the dataset has no labels");
      const auto state = fit(data, params);
      save_model(state, params, fit_output);
      csv::write_matrix(fit_output / "embedding.csv", to_original_order(assemble_representation(state, data), data));
      print_json({{"iterations", state.iterations()},
                  {"converged", state.converged},
                  {"objective", state.trace.empty() ? state.initial.total() : state.trace.back().total()},
                  {"neighbors", resolve_neighbors(data, params)}});
    } else if (cluster_cmd->parsed()) {
      const auto path = fs::is_directory(cluster_input) ? cluster_input / "embedding.csv" : cluster_input;
      const auto result = kmeans(csv::read_matrix(path), cluster_params);
      csv::write_integer_column(cluster_output, {result.labels.begin(), result.labels.end()});
      print_json({{"wcss", result.wcss}, {"iterations", result.iterations}});
    } else if (eval_cmd->parsed()) {
      const auto truth_path = fs::is_directory(eval_truth) ? eval_truth / "labels.csv" : eval_truth;
      const auto s = score(read_labels(eval_pred), read_labels(truth_path));
      const nlohmann::json doc{{"acc", s.acc}, {"nmi", s.nmi}, {"purity", s.purity}};
      print_json(doc);
      if (!eval_output.empty()) {
        std::ofstream out(eval_output);
        if (!out) throw std::runtime_error("cannot open '" + eval_output.string() + "' for writing");
        out << doc.dump(2) << '\n';
      }
    } else if (exp_cmd->parsed() || grid_cmd->parsed()) {
      ExperimentConfig config;
      config.dataset_path = exp_input;
      config.load.min_max_scale = exp_scale;
      config.method = parse_method(exp_method);
      config.paired_ratios = exp_ratios;
      config.trials = exp_trials;
      config.params = exp_flags.params();
      config.kmeans = KMeansParams{exp_clusters, exp_restarts, 300, 0};
      config.output = exp_output;
      if (exp_cmd->parsed()) {
        const auto report = run_experiment(config);
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : report.cells) {
          cells.push_back({{"method", to_string(c.method)},
                           {"paired_ratio", c.paired_ratio},
                           {"valid", c.valid},
                           {"acc", c.acc},
                           {"nmi", c.nmi},
                           {"purity", c.purity}});
        }
        print_json({{"cells", cells}});
      } else {
        const auto grid = grid_search(config, grid_l1, grid_l2);
        print_json({{"best_lambda1", grid.best_lambda1},
                    {"best_lambda2", grid.best_lambda2},
                    {"best_acc", grid.best_acc},
                    {"cells", grid.cells.size()}});
      }
    } else if (synth_cmd->parsed()) {
      write_views(make_blobs(blob), synth_output);
      print_json({{"samples", blob.samples}, {"views", blob.view_dims.size()}});
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", {{"type", "runtime"}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  }
  return 0;
}

#include "imcgrmf/harness.hpp"

#include "imcgrmf/baselines.hpp"
#include "imcgrmf/csv_io.hpp"
#include "imcgrmf/metrics.hpp"
#include "imcgrmf/model_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace imcgrmf {

namespace fs = std::filesystem;

std::string_view to_string(Method method) {
  switch (method) {
    case Method::imcgrmf: return "imcgrmf";
    case Method::bsv: return "bsv";
    case Method::concat: return "concat";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "imcgrmf") return Method::imcgrmf;
  if (text == "bsv") return Method::bsv;
  if (text == "concat") return Method::concat;
  throw std::invalid_argument("unknown method '" + std::string(text) + "' (expected imcgrmf, bsv or concat)");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t distinct_count(const std::vector<int>& labels) {
  return std::set<int>(labels.begin(), labels.end()).size();
}

TrialRecord run_trial(const MultiViewDataset& source, const ExperimentConfig& config, double ratio,
                      std::size_t trial, std::size_t clusters) {
  TrialRecord rec;
  rec.method = config.method;
  rec.paired_ratio = ratio;
  rec.trial = trial;
  rec.seed = config.params.seed + trial;
  const auto start = std::chrono::steady_clock::now();
  try {
    const MultiViewDataset data =
        source.is_complete() ? make_incomplete_split(source, SplitSpec{ratio, rec.seed, Rounding::nearest}) : source;
    if (data.split() && data.split()->complete_after_rounding) rec.flag = "complete after rounding";
    rec.paired_count = data.paired_count();
    if (!data.labels()) throw std::invalid_argument("experiments need ground-truth labels");

    KMeansParams km = config.kmeans;
    km.clusters = clusters;
    km.seed = rec.seed;
    std::vector<int> predicted;
    rec.final_objective = kNaN;
    switch (config.method) {
      case Method::imcgrmf: {
        ModelParams params = config.params;
        params.seed = rec.seed;
        if (params.latent_dim == 0) params.latent_dim = clusters;
        const auto state = fit(data, params);
        rec.iterations = state.iterations();
        rec.final_objective = state.trace.empty() ? state.initial.total() : state.trace.back().total();
        rec.trace = state.trace;
        predicted = kmeans(assemble_representation(state, data), km).labels;
        break;
      }
      case Method::bsv: {
        auto bsv = bsv_cluster(data, km);
        predicted = std::move(bsv.labels);
        break;
      }
      case Method::concat:
        predicted = concat_cluster(data, km);
        break;
    }
    const auto scores = score(predicted, *data.labels());
    rec.acc = scores.acc;
    rec.nmi = scores.nmi;
    rec.purity = scores.purity;
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

CellSummary summarize(const std::vector<TrialRecord>& trials, Method method, double ratio) {
  CellSummary cell;
  cell.method = method;
  cell.paired_ratio = ratio;
  for (const auto& t : trials) {
    if (!t.ok) continue;
    ++cell.trials_ok;
    cell.acc += t.acc;
    cell.nmi += t.nmi;
    cell.purity += t.purity;
    cell.iterations += static_cast<double>(t.iterations);
    cell.final_objective += t.final_objective;
    cell.wall_seconds += t.wall_seconds;
  }
  cell.valid = cell.trials_ok > 0;
  if (cell.valid) {
    const double k = static_cast<double>(cell.trials_ok);
    cell.acc /= k;
    cell.nmi /= k;
    cell.purity /= k;
    cell.iterations /= k;
    cell.final_objective /= k;
    cell.wall_seconds /= k;
  } else {
    cell.acc = cell.nmi = cell.purity = cell.iterations = cell.final_objective = cell.wall_seconds = kNaN;
  }
  return cell;
}

std::string sanitize(std::string text) {
  for (auto& ch : text)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return text;
}

std::string trace_name(const TrialRecord& t) {
  return std::string(to_string(t.method)) + "_ratio" + csv::format_double(t.paired_ratio) + "_trial" +
         std::to_string(t.trial) + ".csv";
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
  const MultiViewDataset source = config.dataset ? *config.dataset : load_views(config.dataset_path, config.load);
  if (!source.labels()) throw std::invalid_argument("experiments need labels.csv");

  std::vector<double> ratios = config.paired_ratios;
  if (!source.is_complete()) {
    ratios = {static_cast<double>(source.paired_count()) / static_cast<double>(source.sample_count())};
  }
  if (ratios.empty()) throw std::invalid_argument("at least one paired ratio is required");
  for (double r : ratios)
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("paired ratios must lie in (0, 1]");

  const std::size_t clusters = config.kmeans.clusters > 0 ? config.kmeans.clusters : distinct_count(*source.labels());

  ExperimentReport report;
  report.params = config.params;
  report.kmeans = config.kmeans;
  report.kmeans.clusters = clusters;
  for (double ratio : ratios) {
    std::vector<TrialRecord> cell_trials;
    for (std::size_t t = 0; t < config.trials; ++t) cell_trials.push_back(run_trial(source, config, ratio, t, clusters));
    report.cells.push_back(summarize(cell_trials, config.method, ratio));
    report.trials.insert(report.trials.end(), cell_trials.begin(), cell_trials.end());
  }
  if (!config.output.empty()) write_report(report, config.output);
  return report;
}

std::vector<double> default_lambda1_grid() {
  std::vector<double> grid;
  for (int e = 0; e <= 4; ++e) grid.push_back(std::pow(10.0, 0.5 * e));
  return grid;
}

std::vector<double> default_lambda2_grid() {
  std::vector<double> grid;
  for (int e = -5; e <= -1; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

GridResult grid_search(const ExperimentConfig& config, std::vector<double> lambda1_grid,
                       std::vector<double> lambda2_grid) {
  if (lambda1_grid.empty() || lambda2_grid.empty()) throw std::invalid_argument("grids must be nonempty");
  std::sort(lambda1_grid.begin(), lambda1_grid.end());
  std::sort(lambda2_grid.begin(), lambda2_grid.end());

  ExperimentConfig cell_config = config;
  cell_config.method = Method::imcgrmf;
  cell_config.output.clear();
  if (!cell_config.dataset) cell_config.dataset = load_views(config.dataset_path, config.load);

  GridResult result;
  bool have_best = false;
  for (double l1 : lambda1_grid) {
    for (double l2 : lambda2_grid) {
      cell_config.params.lambda1 = l1;
      cell_config.params.lambda2 = l2;
      const auto report = run_experiment(cell_config);
      GridCell cell{l1, l2, false, 0.0, 0.0, 0.0};
      std::size_t valid = 0;
      for (const auto& c : report.cells) {
        if (!c.valid) continue;
        ++valid;
        cell.acc += c.acc;
        cell.nmi += c.nmi;
        cell.purity += c.purity;
      }
      cell.valid = valid > 0;
      if (cell.valid) {
        cell.acc /= static_cast<double>(valid);
        cell.nmi /= static_cast<double>(valid);
        cell.purity /= static_cast<double>(valid);
        if (!have_best || cell.acc > result.best_acc) {
          result.best_lambda1 = l1;
          result.best_lambda2 = l2;
          result.best_acc = cell.acc;
          have_best = true;
        }
      }
      result.cells.push_back(cell);
    }
  }
  if (!have_best) throw std::runtime_error("every grid cell failed");
  if (!config.output.empty()) {
    fs::create_directories(config.output);
    write_grid(result, config.output / "grid.csv");
  }
  return result;
}

void write_grid(const GridResult& grid, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << "lambda1,lambda2,status,acc,nmi,purity\n";
  for (const auto& c : grid.cells) {
    out << csv::format_double(c.lambda1) << ',' << csv::format_double(c.lambda2) << ','
        << (c.valid ? "ok" : "invalid") << ',' << csv::format_double(c.acc) << ',' << csv::format_double(c.nmi)
        << ',' << csv::format_double(c.purity) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_report(const ExperimentReport& report, const fs::path& dir) {
  fs::create_directories(dir / "traces");
  const auto f = [](double x) { return csv::format_double(x); };

  {
    const auto path = dir / "results.csv";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << "method,paired_ratio,trial,seed,status,paired_count,acc,nmi,purity,iterations,final_objective,"
           "wall_seconds,note\n";
    for (const auto& t : report.trials) {
      out << to_string(t.method) << ',' << f(t.paired_ratio) << ',' << t.trial << ',' << t.seed << ','
          << (t.ok ? "ok" : "failed") << ',' << t.paired_count << ',' << f(t.acc) << ',' << f(t.nmi) << ','
          << f(t.purity) << ',' << t.iterations << ',' << f(t.final_objective) << ',' << f(t.wall_seconds) << ','
          << sanitize(t.ok ? t.flag : t.error) << '\n';
    }
    for (const auto& c : report.cells) {
      std::size_t paired = 0;
      for (const auto& t : report.trials)
        if (t.paired_ratio == c.paired_ratio && t.method == c.method) paired = t.paired_count;
      out << to_string(c.method) << ',' << f(c.paired_ratio) << ",mean,0," << (c.valid ? "ok" : "invalid") << ','
          << paired << ',' << f(c.acc) << ',' << f(c.nmi) << ',' << f(c.purity) << ',' << f(c.iterations) << ','
          << f(c.final_objective) << ',' << f(c.wall_seconds) << ',' << c.trials_ok << " trials\n";
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  }

  nlohmann::json doc;
  const auto& p = report.params;
  doc["params"] = {{"lambda1", p.lambda1},
                   {"lambda2", p.lambda2},
                   {"latent_dim", p.latent_dim},
                   {"neighbors", p.neighbors ? nlohmann::json(*p.neighbors) : nlohmann::json("auto")},
                   {"max_iter", p.max_iter},
                   {"tol", std::isfinite(p.tol) ? nlohmann::json(p.tol) : nlohmann::json(f(p.tol))},
                   {"seed", p.seed}};
  doc["kmeans"] = {{"clusters", report.kmeans.clusters},
                   {"restarts", report.kmeans.restarts},
                   {"max_iter", report.kmeans.max_iter}};
  doc["trials"] = nlohmann::json::array();
  for (const auto& t : report.trials) {
    nlohmann::json trace = nlohmann::json::array();
    for (std::size_t i = 0; i < t.trace.size(); ++i) {
      trace.push_back({{"iteration", i + 1},
                       {"total", t.trace[i].total()},
                       {"reconstruction", t.trace[i].reconstruction},
                       {"consensus", t.trace[i].consensus},
                       {"sparsity", t.trace[i].sparsity}});
    }
    nlohmann::json row = {{"method", to_string(t.method)},
                          {"paired_ratio", t.paired_ratio},
                          {"trial", t.trial},
                          {"seed", t.seed},
                          {"ok", t.ok},
                          {"paired_count", t.paired_count},
                          {"acc", t.acc},
                          {"nmi", t.nmi},
                          {"purity", t.purity},
                          {"iterations", t.iterations},
                          {"final_objective", std::isfinite(t.final_objective) ? nlohmann::json(t.final_objective)
                                                                                : nlohmann::json(nullptr)},
                          {"wall_seconds", t.wall_seconds},
                          {"trace", std::move(trace)}};
    if (!t.ok) row["error"] = t.error;
    if (!t.flag.empty()) row["flag"] = t.flag;
    doc["trials"].push_back(std::move(row));

    if (t.ok && !t.trace.empty()) write_trace_csv(t.trace, dir / "traces" / trace_name(t));
  }
  doc["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) {
    const auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    doc["cells"].push_back({{"method", to_string(c.method)},
                            {"paired_ratio", c.paired_ratio},
                            {"trials_ok", c.trials_ok},
                            {"valid", c.valid},
                            {"acc", num(c.acc)},
                            {"nmi", num(c.nmi)},
                            {"purity", num(c.purity)},
                            {"iterations", num(c.iterations)},
                            {"final_objective", num(c.final_objective)},
                            {"wall_seconds", num(c.wall_seconds)}});
  }
  const auto path = dir / "results.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<ResultRow> read_results_csv(const fs::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw std::invalid_argument(path.string() + ": empty results file");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto ctx = path.string() + ":" + std::to_string(i + 1);
    const auto cells = csv::split_line(lines[i]);
    if (cells.size() != 13) throw std::invalid_argument(ctx + ": expected 13 columns");
    ResultRow r;
    r.method = std::string(cells[0]);
    r.paired_ratio = csv::parse_double(cells[1], ctx);
    r.trial = std::string(cells[2]);
    r.seed = static_cast<std::uint64_t>(csv::parse_integer(cells[3], ctx));
    r.status = std::string(cells[4]);
    r.paired_count = static_cast<std::size_t>(csv::parse_integer(cells[5], ctx));
    r.acc = csv::parse_double(cells[6], ctx);
    r.nmi = csv::parse_double(cells[7], ctx);
    r.purity = csv::parse_double(cells[8], ctx);
    r.iterations = csv::parse_double(cells[9], ctx);
    r.final_objective = csv::parse_double(cells[10], ctx);
    r.wall_seconds = csv::parse_double(cells[11], ctx);
    r.note = std::string(cells[12]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace imcgrmf

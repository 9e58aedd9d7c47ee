#include "imcgrmf/model_io.hpp"

#include "imcgrmf/csv_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace imcgrmf {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTraceHeader = "iteration,total,reconstruction,consensus,sparsity";

nlohmann::json number_or_text(double value) {
  if (std::isfinite(value)) return value;
  return csv::format_double(value);
}

double read_number(const nlohmann::json& j) {
  if (j.is_string()) return csv::parse_double(j.get<std::string>(), "manifest.json");
  return j.get<double>();
}

}  // namespace

void write_trace_csv(const std::vector<ObjectiveTerms>& trace, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << kTraceHeader << '\n';
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const auto& e = trace[t];
    out << t + 1 << ',' << csv::format_double(e.total()) << ',' << csv::format_double(e.reconstruction) << ','
        << csv::format_double(e.consensus) << ',' << csv::format_double(e.sparsity) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<ObjectiveTerms> read_trace_csv(const fs::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty() || lines.front() != kTraceHeader) {
    throw std::invalid_argument(path.string() + ": missing trace header");
  }
  std::vector<ObjectiveTerms> trace;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto context = path.string() + ":" + std::to_string(i + 1);
    const auto cells = csv::split_line(lines[i]);
    if (cells.size() != 5) throw std::invalid_argument(context + ": expected 5 columns");
    ObjectiveTerms e;
    e.reconstruction = csv::parse_double(cells[2], context);
    e.consensus = csv::parse_double(cells[3], context);
    e.sparsity = csv::parse_double(cells[4], context);
    trace.push_back(e);
  }
  return trace;
}

void save_model(const ModelState& state, const ModelParams& params, const fs::path& dir) {
  fs::create_directories(dir);
  const std::size_t v = state.bases.size();
  for (std::size_t k = 0; k < v; ++k) {
    csv::write_matrix(dir / ("basis_" + std::to_string(k + 1) + ".csv"), state.bases[k]);
    csv::write_matrix(dir / ("representation_" + std::to_string(k + 1) + ".csv"), state.representations[k]);
  }
  csv::write_matrix(dir / "consensus.csv", state.consensus);
  write_trace_csv(state.trace, dir / "trace.csv");

  nlohmann::json manifest;
  manifest["views"] = v;
  manifest["latent_dim"] = params.latent_dim;
  manifest["paired_count"] = state.consensus.rows();
  manifest["iterations"] = state.iterations();
  manifest["converged"] = state.converged;
  manifest["initial_objective"] = {{"reconstruction", state.initial.reconstruction},
                                   {"consensus", state.initial.consensus},
                                   {"sparsity", state.initial.sparsity}};
  auto& p = manifest["params"];
  p["lambda1"] = params.lambda1;
  p["lambda2"] = params.lambda2;
  p["latent_dim"] = params.latent_dim;
  p["neighbors"] = params.neighbors ? nlohmann::json(*params.neighbors) : nlohmann::json("auto");
  p["max_iter"] = params.max_iter;
  p["tol"] = number_or_text(params.tol);
  p["seed"] = params.seed;

  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << manifest.dump(2) << '\n';
}

SavedModel load_model(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }

  SavedModel model;
  const auto& p = manifest.at("params");
  model.params.lambda1 = read_number(p.at("lambda1"));
  model.params.lambda2 = read_number(p.at("lambda2"));
  model.params.latent_dim = p.at("latent_dim").get<std::size_t>();
  if (p.at("neighbors").is_number()) model.params.neighbors = p.at("neighbors").get<std::size_t>();
  model.params.max_iter = p.at("max_iter").get<std::size_t>();
  model.params.tol = read_number(p.at("tol"));
  model.params.seed = p.at("seed").get<std::uint64_t>();

  const auto v = manifest.at("views").get<std::size_t>();
  for (std::size_t k = 0; k < v; ++k) {
    model.state.bases.push_back(csv::read_matrix(dir / ("basis_" + std::to_string(k + 1) + ".csv")));
    model.state.representations.push_back(
        csv::read_matrix(dir / ("representation_" + std::to_string(k + 1) + ".csv")));
    if (static_cast<std::size_t>(model.state.bases.back().rows()) != model.params.latent_dim) {
      throw std::invalid_argument("basis_" + std::to_string(k + 1) + ".csv does not have latent_dim rows");
    }
  }
  model.state.consensus = csv::read_matrix(dir / "consensus.csv");
  if (model.state.consensus.rows() == 0) {
    model.state.consensus.resize(0, static_cast<Eigen::Index>(model.params.latent_dim));
  }
  model.state.trace = read_trace_csv(dir / "trace.csv");
  model.state.converged = manifest.value("converged", false);
  if (manifest.contains("initial_objective")) {
    const auto& init = manifest["initial_objective"];
    model.state.initial = {init.at("reconstruction").get<double>(), init.at("consensus").get<double>(),
                           init.at("sparsity").get<double>()};
  }
  return model;
}

}  // namespace imcgrmf

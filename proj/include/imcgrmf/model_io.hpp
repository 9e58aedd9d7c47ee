#pragma once

#include "imcgrmf/solver.hpp"

#include <filesystem>
#include <vector>

namespace imcgrmf {

// Header "iteration,total,reconstruction,consensus,sparsity", then one row per sweep.
void write_trace_csv(const std::vector<ObjectiveTerms>& trace, const std::filesystem::path& path);
std::vector<ObjectiveTerms> read_trace_csv(const std::filesystem::path& path);

struct SavedModel {
  ModelState state;
  ModelParams params;
};

/// Directory layout: basis_k.csv, representation_k.csv (k = 1..v), consensus.csv,
/// trace.csv and manifest.json holding params, seed and shapes.
void save_model(const ModelState& state, const ModelParams& params, const std::filesystem::path& dir);
SavedModel load_model(const std::filesystem::path& dir);

}  // namespace imcgrmf

#ifndef ACCRETA_CONFIG_HPP
#define ACCRETA_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "accreta/coupling.hpp"
#include "accreta/io.hpp"

namespace accreta {

/**
 * Parsed run configuration. `source` keeps the JSON as given so that a
 * manifest can embed it and later runs can start from the manifest.
 */
struct RunConfig {
  json source;
  /// Directory against which relative mask-file paths resolve.
  fs::path base_dir;
  Grid grid;
  DomainSpec domain;
  HamiltonianModel model;
  int direction_samples = 0;
  /// Activation values probed when checking the declared sigma bounds.
  std::vector<double> probe_u;
  KernelPair kernels;
  CouplingConfig coupling;
  BoundCheckOptions diagnostics;
  /// Declares that omega is entirely represented on the grid, so the frame cannot truncate growth.
  bool omega_inside_window = false;
  std::string output = "run";
  long long seed = 0;

  SupportEvaluator support() const { return SupportEvaluator(model, grid.dim(), direction_samples); }
  CouplingProblem problem() const { return CouplingProblem{domain, support(), kernels, coupling}; }
};

/// Builds a mask from a shape expression (box, ball, halfspace, union, intersection, difference, all, mask_file).
Mask shape_mask(const Grid& grid, const json& shape, const fs::path& base_dir);

/// Parses a config; a manifest is accepted too and its embedded config is used.
RunConfig parse_config(const json& j, const fs::path& base_dir);
RunConfig load_config(const fs::path& file);

/// Every violated assumption; empty when the run may start.
std::vector<Issue> validate(const RunConfig& c);
/// Conditions worth reporting that do not block a run.
std::vector<Issue> warnings(const RunConfig& c);

/// Worker count: ACCRETA_THREADS when set, otherwise the configured value.
int effective_threads(int configured);

/// FNV-1a 64-bit hash of the compact JSON dump, as 16 hex digits.
std::string config_hash(const json& config);

json manifest(const RunConfig& c, const std::string& command, const json& timings, const json& extra = json::object());

}  // namespace accreta

#endif  // ACCRETA_CONFIG_HPP

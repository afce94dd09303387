#pragma once

#include "cltlab/json_io.hpp"
#include "cltlab/model.hpp"
#include "cltlab/rng.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cltlab {

enum class ExperimentKind {
  thin_shell,
  clt_marginal,
  unconditional_diag,
  multidim_marginal,
  diaconis_freedman,
  jl_check,
  mf_concentration,
};

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);
const std::vector<ExperimentKind>& all_experiments();

/// Everything an experiment run depends on. Sweeps are lists; scalar inputs
/// in the JSON become one-element lists.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::thin_shell;
  /// Raw "body_or_density" description; the dimension is bound per n.
  Json body_or_density;
  std::vector<Index> n_values;
  std::vector<Index> k_values;
  Index m = 100000;
  int direction_count = 200;
  std::vector<double> epsilon_grid;
  RandomSeed seed{};
  int workers = 1;
  std::filesystem::path out_dir = "out";

  /// Experiment-specific knobs (see docs/formats.md for which apply where).
  std::vector<std::pair<Index, Index>> pairs;
  int subspace_count = 100;
  std::vector<double> t_grid;
  double threshold = 0.0;
  double pass_fraction = 0.95;
  int global_direction_count = 1000;
  int directions_per_subspace = 50;
  std::optional<std::pair<Index, Index>> hit_and_run_check;
  std::optional<Vector> jl_point;

  DensitySpec density(Index n) const;

  /// Canonical form with every default filled in.
  Json to_json() const;
  /// 128-bit hex digest (truncated SHA-256) of the canonical form without
  /// out_dir and workers, which do not affect results.
  std::string hash() const;
};

/// Validates and fills defaults. Throws std::invalid_argument with a
/// field-specific message on any problem.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace cltlab

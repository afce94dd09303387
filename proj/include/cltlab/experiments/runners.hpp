#pragma once

#include "cltlab/experiments/config.hpp"
#include "cltlab/experiments/report.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace cltlab {

/// Raised when a sample fails the isotropy precondition of an experiment.
class GateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentReport run_thin_shell(const ExperimentConfig& cfg);
ExperimentReport run_clt_marginal(const ExperimentConfig& cfg);
ExperimentReport run_unconditional_diag(const ExperimentConfig& cfg);
ExperimentReport run_multidim_marginal(const ExperimentConfig& cfg);
ExperimentReport run_diaconis_freedman(const ExperimentConfig& cfg);
ExperimentReport run_jl_check(const ExperimentConfig& cfg);
ExperimentReport run_mf_concentration(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment and records the wall-clock time.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Seed streams shared by the runners. Direction or subspace j of the sweep
/// point n comes from direction_seed(cfg, n).child(j) in every experiment,
/// which is what makes clt_marginal and multidim_marginal with k = 1 see the
/// same directions.
RandomSeed sample_seed(const ExperimentConfig& cfg, Index n);
RandomSeed direction_seed(const ExperimentConfig& cfg, Index n);

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> values, double q);
/// Bootstrap standard error of the median (200 resamples).
double bootstrap_median_se(std::span<const double> values, RandomSeed seed);

/// 2 (k + 3) / (n - k - 3).
double diaconis_freedman_bound(Index n, Index k);
/// Berry-Esseen constant used for the reference ceiling.
inline constexpr double kBerryEsseen = 0.4748;

}  // namespace cltlab

#pragma once

#include "cltlab/model.hpp"
#include "cltlab/samplers.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace cltlab {

/// Rows of `batch` mapped to their coordinates in E (an m x k batch).
SampleBatch project_batch(const SampleBatch& batch, const Subspace& sub);

/// <x_i, theta> for every row.
Vector project_rows(const RowMatrix& data, const Vector& theta);

/// Fraction of rows with <x, theta> <= t.
double empirical_Mf(const SampleBatch& batch, const Direction& theta, double t);

/// Estimates of M_f(theta, t) on a sorted grid of t values.
struct MarginalCurve {
  Direction direction;
  std::vector<double> grid;
  std::vector<double> values;
  Index sample_count = 0;
};

/// One pass over the batch; throws std::invalid_argument on an unsorted grid.
MarginalCurve empirical_Mf_curve(const SampleBatch& batch, const Direction& theta, std::span<const double> grid);
/// Same, from precomputed projections.
MarginalCurve empirical_Mf_curve(const Vector& projections, const Direction& theta, std::span<const double> grid);

/// Largest |M(theta1, t) - M(theta2, t)| / |theta1 - theta2| over `pair_count`
/// random direction pairs. Pairs closer than 0.1 are skipped, since there the
/// estimator's noise dominates the quotient. Returns 0 when no pair survives.
double mf_direction_lipschitz(const SampleBatch& batch, double t, int pair_count, RandomSeed seed);

/// Minimum separation of direction pairs entering mf_direction_lipschitz.
inline constexpr double kMinPairSeparation = 0.1;

struct Histogram1D {
  double lo = -6.0;
  double hi = 6.0;
  double bin_width = 0.05;
  std::vector<long long> counts;
  /// Number of values histogrammed, including those outside [lo, hi].
  Index total = 0;
  Index out_of_range = 0;

  std::size_t bins() const { return counts.size(); }
  double bin_lo(std::size_t i) const { return lo + static_cast<double>(i) * bin_width; }
  double bin_center(std::size_t i) const { return bin_lo(i) + 0.5 * bin_width; }
  /// count / (total * width).
  double density(std::size_t i) const;
};

/// Bins [lo + i w, lo + (i + 1) w); the last bin also takes x == hi. When
/// (hi - lo) / w is not an integer, hi is raised to the next bin edge.
Histogram1D histogram_1d(std::span<const double> values, double lo = -6.0, double hi = 6.0,
                         double bin_width = 0.05);

/// Product binning on the cube [lo, hi]^k (k small).
struct HistogramND {
  Index k = 0;
  double lo = -6.0;
  double hi = 6.0;
  double bin_width = 0.2;
  Index bins_per_axis = 0;
  /// Row-major over the k axis indices.
  std::vector<long long> counts;
  Index total = 0;
  Index out_of_range = 0;
};

HistogramND histogram_nd(const RowMatrix& data, double lo = -6.0, double hi = 6.0, double bin_width = 0.2);

/// Sorted copy of a one-dimensional sample.
class EmpiricalCDF {
 public:
  explicit EmpiricalCDF(std::vector<double> values);

  /// (#values <= t) / m.
  double operator()(double t) const;
  const std::vector<double>& sorted_values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

/// Throws std::invalid_argument on an empty sample.
EmpiricalCDF ecdf(std::span<const double> values);
/// From a one-column batch.
EmpiricalCDF ecdf(const SampleBatch& batch1d);

/// Columns t,value.
void write_curve_csv(const MarginalCurve& curve, const std::filesystem::path& path);
/// Columns bin_center,count.
void write_histogram_csv(const Histogram1D& hist, const std::filesystem::path& path);

}  // namespace cltlab

#pragma once

#include "cltlab/model.hpp"
#include "cltlab/samplers.hpp"

#include <string>

namespace cltlab {

struct MomentEstimate {
  Vector mean;
  /// Population (1/m) normalized central second moments.
  Matrix covariance;
  Index sample_count = 0;
};

/// Streaming mean/covariance with pairwise (Chan et al.) merging, so partial
/// results over row blocks combine exactly when merged in a fixed order.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(Index n);

  void add(const Eigen::Ref<const RowMatrix>& rows);
  void merge(const MomentAccumulator& other);
  Index count() const { return count_; }
  MomentEstimate estimate() const;

 private:
  Index count_ = 0;
  Vector mean_;
  Matrix scatter_;
};

/// Throws std::invalid_argument when m < n + 1.
MomentEstimate empirical_moments(const SampleBatch& batch, int workers = 1);

/// x -> linear * x + shift.
class AffineMap {
 public:
  AffineMap(Matrix linear, Vector shift);
  static AffineMap identity(Index n);

  const Matrix& linear() const { return linear_; }
  const Vector& shift() const { return shift_; }
  Index dim() const { return shift_.size(); }

  Point operator()(const Point& x) const { return linear_ * x + shift_; }
  /// Applies the map to every row in place.
  void apply_rows(Eigen::Ref<RowMatrix> rows) const;
  AffineMap inverse() const;
  /// (*this) o inner.
  AffineMap compose(const AffineMap& inner) const;
  /// 2-norm condition number of the linear part.
  double condition_number() const;
  /// Hex digest of the map's bytes, recorded in batch provenance.
  std::string fingerprint() const;

 private:
  Matrix linear_;
  Vector shift_;
};

/// x -> Sigma^{-1/2} (x - mu) with the symmetric inverse square root. Throws
/// std::domain_error when the smallest covariance eigenvalue is below
/// eig_floor (degenerate support).
AffineMap whitening_map(const MomentEstimate& moments, double eig_floor = 1e-10);

/// Row-wise application; appends the map fingerprint to sampler_id.
SampleBatch apply_affine(const SampleBatch& batch, const AffineMap& map);

struct IsotropyDiagnostics {
  double max_abs_mean = 0.0;
  double max_abs_cov_deviation = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double tolerance = 0.0;
  bool passes = false;
};

/// Gate tolerance 5 sqrt(n / m).
double default_isotropy_tolerance(Index n, Index m);

IsotropyDiagnostics isotropy_report(const MomentEstimate& moments, double tolerance);
/// Uses default_isotropy_tolerance when tolerance <= 0.
IsotropyDiagnostics isotropy_report(const SampleBatch& batch, double tolerance = 0.0,
                                    int workers = 1);

}  // namespace cltlab

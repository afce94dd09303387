#include "cltlab/isotropy.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace cltlab {

MomentAccumulator::MomentAccumulator(Index n) : mean_(Vector::Zero(n)), scatter_(Matrix::Zero(n, n)) {}

void MomentAccumulator::add(const Eigen::Ref<const RowMatrix>& rows) {
  if (rows.rows() == 0) return;
  if (rows.cols() != mean_.size()) throw std::invalid_argument("MomentAccumulator: dimension mismatch");
  MomentAccumulator block(mean_.size());
  block.count_ = rows.rows();
  block.mean_ = rows.colwise().mean().transpose();
  const RowMatrix centered = rows.rowwise() - block.mean_.transpose();
  block.scatter_.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  block.scatter_ = block.scatter_.selfadjointView<Eigen::Lower>();
  merge(block);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double total = na + nb;
  const Vector delta = other.mean_ - mean_;
  mean_ += delta * (nb / total);
  scatter_ += other.scatter_ + (delta * delta.transpose()) * (na * nb / total);
  count_ += other.count_;
}

MomentEstimate MomentAccumulator::estimate() const {
  if (count_ == 0) throw std::logic_error("MomentAccumulator: no samples");
  Matrix cov = scatter_ / static_cast<double>(count_);
  cov = 0.5 * (cov + cov.transpose());
  return MomentEstimate{mean_, std::move(cov), count_};
}

MomentEstimate empirical_moments(const SampleBatch& batch, int workers) {
  const Index n = batch.dim();
  const Index m = batch.size();
  if (m < n + 1) {
    throw std::invalid_argument("empirical_moments: need m >= n + 1 samples (m = " + std::to_string(m) +
                                ", n = " + std::to_string(n) + ")");
  }
  const auto chunks = static_cast<std::size_t>((m + kChunkRows - 1) / kChunkRows);
  std::vector<MomentAccumulator> partial(chunks, MomentAccumulator(n));
  parallel_for(chunks, workers, [&](std::size_t c) {
    const Index first = static_cast<Index>(c) * kChunkRows;
    partial[c].add(batch.data.middleRows(first, std::min(kChunkRows, m - first)));
  });
  MomentAccumulator total(n);
  for (const auto& p : partial) total.merge(p);
  return total.estimate();
}

// ---------------------------------------------------------------------------

AffineMap::AffineMap(Matrix linear, Vector shift) : linear_(std::move(linear)), shift_(std::move(shift)) {
  if (linear_.rows() != linear_.cols() || linear_.rows() != shift_.size()) {
    throw std::invalid_argument("AffineMap: linear part must be n x n with an n-vector shift");
  }
}

AffineMap AffineMap::identity(Index n) { return AffineMap(Matrix::Identity(n, n), Vector::Zero(n)); }

void AffineMap::apply_rows(Eigen::Ref<RowMatrix> rows) const {
  if (rows.cols() != dim()) throw std::invalid_argument("AffineMap: dimension mismatch");
  RowMatrix mapped = rows * linear_.transpose();
  mapped.rowwise() += shift_.transpose();
  rows = mapped;
}

AffineMap AffineMap::inverse() const {
  Eigen::FullPivLU<Matrix> lu(linear_);
  if (!lu.isInvertible()) throw std::domain_error("AffineMap: linear part is singular");
  Matrix inv = lu.inverse();
  Vector shift = -inv * shift_;
  return AffineMap(std::move(inv), std::move(shift));
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
  if (inner.dim() != dim()) throw std::invalid_argument("AffineMap::compose: dimension mismatch");
  return AffineMap(linear_ * inner.linear_, linear_ * inner.shift_ + shift_);
}

double AffineMap::condition_number() const {
  Eigen::JacobiSVD<Matrix> svd(linear_);
  const Vector& s = svd.singularValues();
  return s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : kInf;
}

std::string AffineMap::fingerprint() const {
  // FNV-1a over the raw bytes of the linear part followed by the shift.
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&](const double* p, Index count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count) * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ull;
    }
  };
  feed(linear_.data(), linear_.size());
  feed(shift_.data(), shift_.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AffineMap whitening_map(const MomentEstimate& moments, double eig_floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(moments.covariance);
  const Vector& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() >= eig_floor)) {
    throw std::domain_error("whitening_map: degenerate support (smallest covariance eigenvalue " +
                            std::to_string(lambda.minCoeff()) + " below floor)");
  }
  const Matrix& v = eig.eigenvectors();
  Matrix root_inv = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  root_inv = 0.5 * (root_inv + root_inv.transpose());
  Vector shift = -root_inv * moments.mean;
  return AffineMap(std::move(root_inv), std::move(shift));
}

SampleBatch apply_affine(const SampleBatch& batch, const AffineMap& map) {
  if (batch.dim() != map.dim()) throw std::invalid_argument("apply_affine: dimension mismatch");
  SampleBatch out = batch;
  map.apply_rows(out.data);
  out.sampler_id += "+affine:" + map.fingerprint();
  return out;
}

double default_isotropy_tolerance(Index n, Index m) {
  return 5.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(m));
}

IsotropyDiagnostics isotropy_report(const MomentEstimate& moments, double tolerance) {
  const Index n = moments.mean.size();
  IsotropyDiagnostics d;
  d.max_abs_mean = moments.mean.cwiseAbs().maxCoeff();
  d.max_abs_cov_deviation = (moments.covariance - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(moments.covariance, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = eig.eigenvalues().minCoeff();
  d.max_eigenvalue = eig.eigenvalues().maxCoeff();
  d.tolerance = tolerance;
  d.passes = d.max_abs_mean <= tolerance && d.max_abs_cov_deviation <= tolerance;
  return d;
}

IsotropyDiagnostics isotropy_report(const SampleBatch& batch, double tolerance, int workers) {
  if (tolerance <= 0.0) tolerance = default_isotropy_tolerance(batch.dim(), batch.size());
  return isotropy_report(empirical_moments(batch, workers), tolerance);
}

}  // namespace cltlab

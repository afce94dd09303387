#include "cltlab/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace cltlab {

namespace {

void require_sorted(std::span<const double> grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("M_f curve: grid must be sorted");
}

Index bin_count(double lo, double hi, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("histogram: bin width must be positive");
  if (!(lo < hi)) throw std::invalid_argument("histogram: need lo < hi");
  return static_cast<Index>(std::ceil((hi - lo) / width - 1e-9));
}

/// Bin of x in [lo, lo + bins * width], or -1 outside.
Index locate(double x, double lo, double width, Index bins) {
  const double u = (x - lo) / width;
  if (!(u >= 0.0)) return -1;
  Index i = static_cast<Index>(u);
  // Agree with the edges lo + i w when the division rounds across one.
  if (i < bins && x >= lo + static_cast<double>(i + 1) * width) ++i;
  if (i > 0 && x < lo + static_cast<double>(i) * width) --i;
  if (i == bins && x <= lo + static_cast<double>(bins) * width) i = bins - 1;
  return i < bins ? i : -1;
}

}  // namespace

SampleBatch project_batch(const SampleBatch& batch, const Subspace& sub) {
  if (batch.dim() != sub.ambient_dim()) throw std::invalid_argument("project_batch: dimension mismatch");
  SampleBatch out;
  out.data = batch.data * sub.basis().transpose();
  out.seed = batch.seed;
  out.sampler_id = batch.sampler_id + "+proj" + std::to_string(sub.dim());
  out.burn_in = batch.burn_in;
  out.thinning = batch.thinning;
  return out;
}

Vector project_rows(const RowMatrix& data, const Vector& theta) {
  if (data.cols() != theta.size()) throw std::invalid_argument("project_rows: dimension mismatch");
  return data * theta;
}

double empirical_Mf(const SampleBatch& batch, const Direction& theta, double t) {
  if (batch.size() == 0) throw std::invalid_argument("empirical_Mf: empty batch");
  const Vector p = project_rows(batch.data, theta.coords());
  const auto below = std::count_if(p.begin(), p.end(), [t](double v) { return v <= t; });
  return static_cast<double>(below) / static_cast<double>(p.size());
}

MarginalCurve empirical_Mf_curve(const Vector& projections, const Direction& theta, std::span<const double> grid) {
  require_sorted(grid);
  if (projections.size() == 0) throw std::invalid_argument("empirical_Mf_curve: empty batch");
  // Bucket each value at the first grid point >= it, then accumulate.
  std::vector<long long> bucket(grid.size() + 1, 0);
  for (double v : projections) {
    const auto pos = std::lower_bound(grid.begin(), grid.end(), v) - grid.begin();
    ++bucket[static_cast<std::size_t>(pos)];
  }
  MarginalCurve c{theta, std::vector<double>(grid.begin(), grid.end()), {}, projections.size()};
  c.values.resize(grid.size());
  long long running = 0;
  const double m = static_cast<double>(projections.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    running += bucket[j];
    c.values[j] = static_cast<double>(running) / m;
  }
  return c;
}

MarginalCurve empirical_Mf_curve(const SampleBatch& batch, const Direction& theta, std::span<const double> grid) {
  require_sorted(grid);
  return empirical_Mf_curve(project_rows(batch.data, theta.coords()), theta, grid);
}

double mf_direction_lipschitz(const SampleBatch& batch, double t, int pair_count, RandomSeed seed) {
  const Index n = batch.dim();
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < pair_count; ++i) {
    const Direction a = sample_direction(n, rng);
    const Direction b = sample_direction(n, rng);
    const double gap = (a.coords() - b.coords()).norm();
    if (gap < kMinPairSeparation) continue;
    const double diff = std::abs(empirical_Mf(batch, a, t) - empirical_Mf(batch, b, t));
    worst = std::max(worst, diff / gap);
  }
  return worst;
}

double Histogram1D::density(std::size_t i) const {
  return total == 0 ? 0.0 : static_cast<double>(counts[i]) / (static_cast<double>(total) * bin_width);
}

Histogram1D histogram_1d(std::span<const double> values, double lo, double hi, double bin_width) {
  const Index bins = bin_count(lo, hi, bin_width);
  Histogram1D h;
  h.lo = lo;
  h.hi = lo + static_cast<double>(bins) * bin_width;
  h.bin_width = bin_width;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  h.total = static_cast<Index>(values.size());
  for (double v : values) {
    const Index i = locate(v, lo, bin_width, bins);
    if (i < 0) {
      ++h.out_of_range;
    } else {
      ++h.counts[static_cast<std::size_t>(i)];
    }
  }
  return h;
}

HistogramND histogram_nd(const RowMatrix& data, double lo, double hi, double bin_width) {
  const Index bins = bin_count(lo, hi, bin_width);
  HistogramND h;
  h.k = data.cols();
  h.lo = lo;
  h.hi = lo + static_cast<double>(bins) * bin_width;
  h.bin_width = bin_width;
  h.bins_per_axis = bins;
  double cells = 1.0;
  for (Index a = 0; a < h.k; ++a) cells *= static_cast<double>(bins);
  if (cells > 1e8) throw std::invalid_argument("histogram_nd: too many cells");
  h.counts.assign(static_cast<std::size_t>(cells), 0);
  h.total = data.rows();
  for (Index r = 0; r < data.rows(); ++r) {
    std::size_t flat = 0;
    bool inside = true;
    for (Index a = 0; a < h.k && inside; ++a) {
      const Index i = locate(data(r, a), lo, bin_width, bins);
      if (i < 0) inside = false;
      flat = flat * static_cast<std::size_t>(bins) + static_cast<std::size_t>(i);
    }
    if (inside) {
      ++h.counts[flat];
    } else {
      ++h.out_of_range;
    }
  }
  return h;
}

EmpiricalCDF::EmpiricalCDF(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw std::invalid_argument("ecdf: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCDF::operator()(double t) const {
  const auto pos = std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
  return static_cast<double>(pos) / static_cast<double>(sorted_.size());
}

EmpiricalCDF ecdf(std::span<const double> values) {
  return EmpiricalCDF(std::vector<double>(values.begin(), values.end()));
}

EmpiricalCDF ecdf(const SampleBatch& batch1d) {
  if (batch1d.dim() != 1) throw std::invalid_argument("ecdf: batch must be one-dimensional");
  return ecdf(std::span<const double>(batch1d.data.data(), static_cast<std::size_t>(batch1d.size())));
}

void write_curve_csv(const MarginalCurve& curve, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  os << "t,value\n";
  os.precision(17);
  for (std::size_t j = 0; j < curve.grid.size(); ++j) os << curve.grid[j] << ',' << curve.values[j] << '\n';
}

void write_histogram_csv(const Histogram1D& hist, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  os << "bin_center,count\n";
  os.precision(17);
  for (std::size_t i = 0; i < hist.bins(); ++i) os << hist.bin_center(i) << ',' << hist.counts[i] << '\n';
}

}  // namespace cltlab

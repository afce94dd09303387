#include "cltlab/metrics.hpp"

#include "cltlab/parallel.hpp"
#include "cltlab/quadrature.hpp"
#include "cltlab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace cltlab {

double kolmogorov_distance(const EmpiricalCDF& ecdf, const std::function<double(double)>& cdf) {
  const auto& v = ecdf.sorted_values();
  const double m = static_cast<double>(v.size());
  double worst = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double f = cdf(v[i]);
    worst = std::max({worst, std::abs(static_cast<double>(i) / m - f), std::abs(static_cast<double>(j) / m - f)});
    i = j;
  }
  return worst;
}

double kolmogorov_distance(const EmpiricalCDF& ecdf) { return kolmogorov_distance(ecdf, std_normal_cdf); }

double binned_tv(const Histogram1D& hist, const std::function<double(double)>& ref_cdf) {
  if (hist.total == 0) return 0.0;
  const double m = static_cast<double>(hist.total);
  double tv = 0.0;
  double prev = ref_cdf(hist.lo);
  const double below = prev;
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double next = ref_cdf(hist.bin_lo(i + 1));
    tv += std::abs(static_cast<double>(hist.counts[i]) / m - (next - prev));
    prev = next;
  }
  const double above = 1.0 - prev;
  return tv + static_cast<double>(hist.out_of_range) / m + below + above;
}

double binned_tv(const Histogram1D& hist, const Density1D& ref) {
  if (hist.total == 0) return 0.0;
  const double m = static_cast<double>(hist.total);
  auto mass = [&](double a, double b) {
    a = std::max(a, ref.lo);
    b = std::min(b, ref.hi);
    if (!(a < b)) return 0.0;
    return integrate(ref.pdf, a, b, 1e-12).value;
  };
  double tv = 0.0;
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    tv += std::abs(static_cast<double>(hist.counts[i]) / m - mass(hist.bin_lo(i), hist.bin_lo(i + 1)));
  }
  const double outside = mass(-kInf, hist.lo) + mass(hist.bin_lo(hist.bins()), kInf);
  return tv + static_cast<double>(hist.out_of_range) / m + outside;
}

double binned_tv_gaussian(const HistogramND& hist) {
  if (hist.total == 0) return 0.0;
  const double m = static_cast<double>(hist.total);
  const auto bins = static_cast<std::size_t>(hist.bins_per_axis);
  std::vector<double> axis(bins);
  double axis_total = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    const double a = hist.lo + static_cast<double>(i) * hist.bin_width;
    axis[i] = std_normal_cdf(a + hist.bin_width) - std_normal_cdf(a);
    axis_total += axis[i];
  }
  double tv = 0.0;
  for (std::size_t flat = 0; flat < hist.counts.size(); ++flat) {
    double p = 1.0;
    std::size_t rest = flat;
    for (Index a = 0; a < hist.k; ++a) {
      p *= axis[rest % bins];
      rest /= bins;
    }
    tv += std::abs(static_cast<double>(hist.counts[flat]) / m - p);
  }
  const double outside = 1.0 - std::pow(axis_total, static_cast<double>(hist.k));
  return tv + static_cast<double>(hist.out_of_range) / m + std::max(0.0, outside);
}

Density1D std_normal_density() { return Density1D{std_normal_pdf, -kInf, kInf, "gaussian"}; }

Density1D ball_marginal_density(Index n) {
  if (n < 1) throw std::invalid_argument("ball_marginal_density: n must be >= 1");
  const double nd = static_cast<double>(n);
  const double r = std::sqrt(nd + 2.0);
  const double log_c =
      std::lgamma(nd / 2.0 + 1.0) - std::lgamma((nd + 1.0) / 2.0) - 0.5 * std::log(M_PI) - std::log(r);
  auto pdf = [=](double t) {
    const double u = 1.0 - t * t / (r * r);
    if (!(u > 0.0)) return 0.0;
    return std::exp(log_c + 0.5 * (nd - 1.0) * std::log(u));
  };
  return Density1D{pdf, -r, r, "ball_marginal(" + std::to_string(n) + ")"};
}

namespace {

void check_normalized(const Density1D& f, double tol) {
  const QuadratureResult r = integrate(f.pdf, f.lo, f.hi, tol * 0.1, 0.0, 20000);
  if (std::abs(r.value - 1.0) > 100.0 * tol) {
    throw std::invalid_argument("tv_1d_quadrature: density '" + f.label + "' has mass " + std::to_string(r.value));
  }
}

}  // namespace

double tv_1d_quadrature(const Density1D& f, const Density1D& g, double tol) {
  check_normalized(f, tol);
  check_normalized(g, tol);
  const double lo = std::min(f.lo, g.lo);
  const double hi = std::max(f.hi, g.hi);
  auto pdf_in = [](const Density1D& d, double x) { return (x < d.lo || x > d.hi) ? 0.0 : d.pdf(x); };
  auto diff = [&](double x) { return pdf_in(f, x) - pdf_in(g, x); };

  std::vector<double> cuts{lo, hi, f.lo, f.hi, g.lo, g.hi};
  // Sign changes of f - g on a finite scan window, refined by bisection.
  const double a = std::max(lo, -40.0);
  const double b = std::min(hi, 40.0);
  constexpr int kScan = 4000;
  double xa = a;
  double da = diff(xa);
  for (int i = 1; i <= kScan; ++i) {
    const double xb = a + (b - a) * static_cast<double>(i) / kScan;
    const double db = diff(xb);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      double l = xa, r = xb, dl = da;
      for (int it = 0; it < 100 && r - l > 1e-15 * std::max(1.0, std::abs(l)); ++it) {
        const double mid = 0.5 * (l + r);
        const double dm = diff(mid);
        if ((dm < 0.0) == (dl < 0.0)) {
          l = mid;
          dl = dm;
        } else {
          r = mid;
        }
      }
      cuts.push_back(0.5 * (l + r));
    }
    xa = xb;
    da = db;
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c < lo || c > hi; }), cuts.end());
  const QuadratureResult r =
      integrate_pieces([&](double x) { return std::abs(diff(x)); }, cuts, tol, 0.0, 20000);
  return std::clamp(r.value, 0.0, 2.0);
}

double gaussian_tv(Index n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("gaussian_tv: n must be >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("gaussian_tv: variances must be positive");
  if (alpha == beta) return 0.0;
  if (alpha > beta) std::swap(alpha, beta);
  const double nd = static_cast<double>(n);
  // The smaller-variance density dominates inside the crossing sphere.
  const double r2 = nd * std::log(beta / alpha) * alpha * beta / (beta - alpha);
  const double s = nd / 2.0;
  const double xa = r2 / (2.0 * alpha);
  const double xb = r2 / (2.0 * beta);
  const double inner = gamma_p(s, xa) - gamma_p(s, xb);
  const double outer = gamma_q(s, xb) - gamma_q(s, xa);
  // Both forms are exact; take the one with less cancellation.
  const double d = (gamma_p(s, xa) < 0.5) ? inner : outer;
  return std::clamp(2.0 * d, 0.0, 2.0);
}

std::vector<double> TGrid::points() const {
  if (!(step > 0.0) || !(lo <= hi)) throw std::invalid_argument("TGrid: need step > 0 and lo <= hi");
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> t(count);
  for (std::size_t j = 0; j < count; ++j) t[j] = lo + static_cast<double>(j) * step;
  return t;
}

double t_distance_direction(const Vector& projections, const TGrid& grid) {
  const std::vector<double> t = grid.points();
  const auto g = static_cast<std::ptrdiff_t>(t.size());
  // bucket[j] counts values whose first grid point t_j >= v is j (g: none).
  std::vector<long long> bucket(t.size() + 1, 0);
  for (double v : projections) {
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(std::ceil((v - grid.lo) / grid.step));
    j = std::clamp<std::ptrdiff_t>(j, 0, g);
    while (j > 0 && t[static_cast<std::size_t>(j - 1)] >= v) --j;
    while (j < g && t[static_cast<std::size_t>(j)] < v) ++j;
    ++bucket[static_cast<std::size_t>(j)];
  }
  const double m = static_cast<double>(projections.size());
  long long running = 0;
  double worst = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    running += bucket[j];
    worst = std::max(worst, std::abs(static_cast<double>(running) / m - std_normal_cdf(t[j])));
  }
  return worst;
}

double t_distance(const RowMatrix& data, int direction_count, const TGrid& grid, RandomSeed seed, int workers) {
  if (direction_count < 1) throw std::invalid_argument("t_distance: need at least one direction");
  std::vector<double> per(static_cast<std::size_t>(direction_count));
  parallel_for(per.size(), workers, [&](std::size_t j) {
    const Direction theta = sample_direction(data.cols(), seed.child(j));
    per[j] = t_distance_direction(data * theta.coords(), grid);
  });
  return *std::max_element(per.begin(), per.end());
}

Json DistanceReport::to_json() const {
  Json j;
  j["kolmogorov"] = kolmogorov;
  j["binned_tv"] = binned_tv;
  j["t_distance"] = t_distance ? Json(*t_distance) : Json(nullptr);
  j["estimator"] = {{"sample_count", meta.sample_count},
                    {"bin_width", meta.bin_width},
                    {"direction_count", meta.direction_count},
                    {"grid", meta.grid},
                    {"tv_convention", "L1 (factor 2)"}};
  return j;
}

std::string DistanceReport::csv_header() {
  return "kolmogorov,binned_tv,t_distance,sample_count,bin_width,direction_count,grid";
}

std::string DistanceReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << kolmogorov << ',' << binned_tv << ',';
  if (t_distance) os << *t_distance;
  os << ',' << meta.sample_count << ',' << meta.bin_width << ',' << meta.direction_count << ',' << meta.grid;
  return os.str();
}

}  // namespace cltlab

#include "cltlab/logconcave1d.hpp"

#include "cltlab/marginals.hpp"
#include "cltlab/quadrature.hpp"
#include "cltlab/rng.hpp"
#include "cltlab/special.hpp"

// This Boost release calls isnan unqualified; <math.h> puts it in scope.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cltlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSpotCheckSeed = 0x6c6f67636f6e63ull;

/// Finite window used wherever the support is unbounded.
void window(double lo, double hi, double scale, double& a, double& b) {
  a = std::isfinite(lo) ? lo : -50.0 * scale;
  b = std::isfinite(hi) ? hi : 50.0 * scale;
  if (std::isfinite(lo) && !std::isfinite(hi)) b = lo + 100.0 * scale;
  if (!std::isfinite(lo) && std::isfinite(hi)) a = hi - 100.0 * scale;
}

double sample_mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size());
}

/// log of t^{n-1} f(t), the shell-mass integrand.
double shell_log(const LogConcave1D& f, int n, double t) {
  if (!(t > 0.0)) return kNegInf;
  const double lf = f.log_f(t);
  if (lf == kNegInf) return kNegInf;
  return static_cast<double>(n - 1) * std::log(t) + lf;
}

/// [lower, upper] carrying all but e^{-80} of the peak of t^{n-1} f(t).
void shell_range(const LogConcave1D& f, int n, double t_n, double& lower, double& upper) {
  lower = std::max(f.lo(), 0.0);
  if (std::isfinite(f.hi())) {
    upper = f.hi();
    return;
  }
  const double peak = shell_log(f, n, t_n);
  upper = 2.0 * t_n;
  for (int i = 0; i < 200 && shell_log(f, n, upper) > peak - 80.0; ++i) upper *= 2.0;
}

double mass(const LogConcave1D& f, int n, double a, double b, double t_n, double tol) {
  if (!(a < b)) return kNegInf;
  const double cuts[] = {t_n};
  const LogQuadratureResult r =
      log_integrate([&](double t) { return shell_log(f, n, t); }, a, b, tol, cuts, 20000);
  if (!r.converged) throw std::runtime_error("shell_mass_ratio: quadrature did not converge");
  return r.log_value;
}

}  // namespace

LogConcave1D::LogConcave1D(Fn log_f, double lo, double hi, std::string label, Fn dlog_f, double scale)
    : log_f_(std::move(log_f)),
      dlog_f_(std::move(dlog_f)),
      lo_(lo),
      hi_(hi),
      label_(std::move(label)),
      scale_(scale) {
  if (!log_f_) throw std::invalid_argument("LogConcave1D: log_f is required");
  if (!(lo_ < hi_)) throw std::invalid_argument("LogConcave1D: empty support");
  if (!(scale_ > 0.0)) throw std::invalid_argument("LogConcave1D: scale must be positive");
  double a, b;
  window(lo_, hi_, scale_, a, b);
  Rng rng(RandomSeed{kSpotCheckSeed, 0});
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(a, b);
    const double y = rng.uniform(a, b);
    const double lam = rng.uniform_open();
    const double fx = log_f_(x);
    const double fy = log_f_(y);
    if (fx == kNegInf || fy == kNegInf) continue;
    const double rhs = lam * fx + (1.0 - lam) * fy;
    const double lhs = log_f_(lam * x + (1.0 - lam) * y);
    if (lhs < rhs - 1e-9 * std::max(1.0, std::abs(rhs))) {
      throw std::invalid_argument("LogConcave1D '" + label_ + "': log-concavity violated at x = " +
                                  std::to_string(x) + ", y = " + std::to_string(y));
    }
  }
  const QuadratureResult r = integrate([this](double t) { return std::exp(this->log_f(t)); }, lo_, hi_, 1e-12, 1e-8);
  if (!std::isfinite(r.value) || !(r.value > 0.0)) {
    throw std::invalid_argument("LogConcave1D '" + label_ + "': integral is not finite and positive");
  }
}

LogConcave1D LogConcave1D::named(const std::string& label) {
  const double log_sqrt_2pi = 0.5 * std::log(2.0 * M_PI);
  const double sqrt2 = std::sqrt(2.0);
  if (label == "exp") {
    return LogConcave1D([](double t) { return -t; }, 0.0, kInf, label, [](double) { return -1.0; });
  }
  if (label == "half_gaussian") {
    const double c = std::log(2.0) - log_sqrt_2pi;
    return LogConcave1D([c](double t) { return c - 0.5 * t * t; }, 0.0, kInf, label, [](double t) { return -t; });
  }
  if (label == "gaussian") {
    return LogConcave1D([=](double t) { return -log_sqrt_2pi - 0.5 * t * t; }, -kInf, kInf, label,
                        [](double t) { return -t; });
  }
  if (label == "two_sided_exp") {
    return LogConcave1D([=](double t) { return -0.5 * std::log(2.0) - sqrt2 * std::abs(t); }, -kInf, kInf, label,
                        [=](double t) { return t > 0.0 ? -sqrt2 : (t < 0.0 ? sqrt2 : 0.0); });
  }
  if (label == "uniform") {
    const double s3 = std::sqrt(3.0);
    const double c = -std::log(2.0 * s3);
    return LogConcave1D([c](double) { return c; }, -s3, s3, label, [](double) { return 0.0; });
  }
  throw std::invalid_argument("unknown named law '" + label + "'");
}

double LogConcave1D::log_f(double t) const {
  if (t < lo_ || t > hi_ || std::isnan(t)) return kNegInf;
  return log_f_(t);
}

double LogConcave1D::dlog_f(double t) const {
  if (dlog_f_) return dlog_f_(t);
  const double h = 1e-6 * std::max(std::abs(t), scale_);
  if (t - h < lo_) return (log_f(t + h) - log_f(t)) / h;
  if (t + h > hi_) return (log_f(t) - log_f(t - h)) / h;
  return (log_f(t + h) - log_f(t - h)) / (2.0 * h);
}

double LogConcave1D::operator()(double t) const { return std::exp(log_f(t)); }

LogConcave1D LogConcave1D::scaled(double delta) const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("LogConcave1D::scaled: delta must be positive");
  Fn lf = [g = log_f_, delta](double t) { return g(delta * t); };
  Fn dlf;
  if (dlog_f_) dlf = [g = dlog_f_, delta](double t) { return delta * g(delta * t); };
  return LogConcave1D(std::move(lf), lo_ / delta, hi_ / delta, label_ + "*" + std::to_string(delta), std::move(dlf),
                      scale_ / delta);
}

// ---------------------------------------------------------------------------

double t_p_solve(const LogConcave1D& f, double p, double tol) {
  if (!(p > 1.0)) throw std::invalid_argument("t_p_solve: p must exceed 1");
  if (!(f.hi() > 0.0)) throw std::domain_error("t_p_solve: support has no positive part");
  const double base = std::max(f.lo(), 0.0);
  auto h = [&](double t) {
    if (f.log_f(t) == kNegInf) throw std::domain_error("t_p_solve: f vanishes inside the bracket");
    return t * f.dlog_f(t) + (p - 1.0);
  };
  auto inside = [&](double t) { return t < f.hi(); };

  double b = base + f.scale();
  if (!inside(b)) b = base + 0.5 * (f.hi() - base);
  double hb = h(b);
  if (hb == 0.0) return b;
  double a = base;
  double ha = 0.0;
  if (hb > 0.0) {
    // Expand outward until h turns negative.
    a = b;
    ha = hb;
    for (int i = 0;; ++i) {
      double next = base + 2.0 * (b - base);
      if (!inside(next)) {
        next = 0.5 * (b + f.hi());
        if (!(next > b) || f.hi() - b <= 1e-12 * std::max(1.0, f.hi())) {
          throw std::domain_error("t_p_solve: no sign change of t (log f)'(t) + p - 1 within the support");
        }
      }
      const double hn = h(next);
      if (!(hn < hb)) throw std::domain_error("t_p_solve: h(t) is not strictly decreasing");
      a = b;
      ha = hb;
      b = next;
      hb = hn;
      if (hb == 0.0) return b;
      if (hb < 0.0) break;
      if (i > 2000) throw std::domain_error("t_p_solve: no sign change found");
    }
  } else {
    // Contract toward the left end until h turns positive.
    for (int i = 0;; ++i) {
      const double next = base + 0.5 * (b - base);
      if (!(next > base)) throw std::domain_error("t_p_solve: no sign change found near the support's left end");
      const double hn = h(next);
      if (!(hn > hb)) throw std::domain_error("t_p_solve: h(t) is not strictly decreasing");
      a = next;
      ha = hn;
      if (ha == 0.0) return a;
      if (ha > 0.0) break;
      b = next;
      hb = hn;
      if (i > 2000) throw std::domain_error("t_p_solve: no sign change found");
    }
  }

  // Illinois false position with a bisection fallback, on [a, b], ha > 0 > hb.
  int side = 0;
  double x = 0.5 * (a + b);
  for (int it = 0; it < 500; ++it) {
    x = (a * hb - b * ha) / (hb - ha);
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    const double hx = h(x);
    if (hx == 0.0) return x;
    if (hx > 0.0) {
      a = x;
      ha = hx;
      if (side == 1) hb *= 0.5;
      side = 1;
    } else {
      b = x;
      hb = hx;
      if (side == -1) ha *= 0.5;
      side = -1;
    }
    if (b - a <= tol * std::abs(x) * 0.5) break;
  }
  return 0.5 * (a + b);
}

ShellMassResult shell_mass_ratio(const LogConcave1D& f, int n, double epsilon, double tol) {
  if (n < 2) throw std::invalid_argument("shell_mass_ratio: n must be >= 2");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("shell_mass_ratio: epsilon must lie in [0, 1]");
  ShellMassResult out;
  out.n = n;
  out.epsilon = epsilon;
  out.t_n = t_p_solve(f, static_cast<double>(n));
  if (epsilon == 0.0) return out;
  double lower, upper;
  shell_range(f, n, out.t_n, lower, upper);
  const double a = std::max(lower, out.t_n * (1.0 - epsilon));
  const double b = std::min(upper, out.t_n * (1.0 + epsilon));
  const double shell = mass(f, n, a, b, out.t_n, tol);
  if (shell == kNegInf) return out;
  const double left = mass(f, n, lower, a, out.t_n, tol);
  const double right = mass(f, n, b, upper, out.t_n, tol);
  // 1 / (1 + tails / shell): accurate to tol relative to the tail mass.
  out.ratio = 1.0 / (1.0 + std::exp(left - shell) + std::exp(right - shell));
  out.ratio = std::clamp(out.ratio, 0.0, 1.0);
  return out;
}

double concavity_defect(std::span<const double> values) {
  const auto n = values.size();
  if (n < 3) return 0.0;
  double worst = kNegInf;
  for (std::size_t stride : {std::size_t{1}, std::size_t{10}, std::size_t{100}}) {
    for (std::size_t i = stride; i + stride < n; ++i) {
      worst = std::max(worst, 0.5 * (values[i - stride] + values[i + stride]) - values[i]);
    }
  }
  return worst == kNegInf ? 0.0 : worst;
}

ConcavityCheck bobkov_concavity_check(const LogConcave1D& f, int n, int grid_size) {
  if (n < 1) throw std::invalid_argument("bobkov_concavity_check: n must be >= 1");
  if (grid_size < 10) throw std::invalid_argument("bobkov_concavity_check: grid too small");
  double lower, upper;
  double peak_at;
  if (n >= 2) {
    peak_at = t_p_solve(f, static_cast<double>(n));
    shell_range(f, n, peak_at, lower, upper);
  } else {
    lower = std::max(f.lo(), 0.0);
    upper = std::isfinite(f.hi()) ? f.hi() : lower + 100.0 * f.scale();
    peak_at = lower;
  }
  const double log_peak = shell_log(f, std::max(n, 1), peak_at);
  auto phi = [&](double t) {
    const double g = n >= 2 ? shell_log(f, n, t) : f.log_f(t);
    return g == kNegInf ? 0.0 : std::exp(g - log_peak);
  };

  const auto count = static_cast<std::size_t>(grid_size);
  std::vector<double> t(count), cum(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    t[i] = lower + (upper - lower) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  for (std::size_t i = 1; i < count; ++i) cum[i] = cum[i - 1] + integrate(phi, t[i - 1], t[i], 1e-15, 1e-12).value;
  const double total = cum.back();
  if (!(total > 0.0)) throw std::domain_error("bobkov_concavity_check: zero mass");

  // Inverse distribution function through PCHIP on strictly increasing knots.
  std::vector<double> s_knots, t_knots;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = cum[i] / total;
    if (s_knots.empty() || s > s_knots.back()) {
      s_knots.push_back(s);
      t_knots.push_back(t[i]);
    }
  }
  const double s_lo = s_knots.front();
  const double s_hi = s_knots.back();
  boost::math::interpolators::pchip<std::vector<double>> inverse(std::move(s_knots), std::move(t_knots));

  std::vector<double> psi(count - 2);
  for (std::size_t j = 1; j + 1 < count; ++j) {
    const double s = std::clamp(static_cast<double>(j) / static_cast<double>(count - 1), s_lo, s_hi);
    psi[j - 1] = phi(inverse(s)) / total;
  }
  ConcavityCheck out;
  out.worst_defect = concavity_defect(psi);
  out.slack = 1e-6 * *std::max_element(psi.begin(), psi.end());
  out.passes = out.worst_defect <= out.slack;
  return out;
}

namespace {

HensleyDiagnostics density_estimates(std::span<const double> samples) {
  constexpr double w = 0.05;
  const double m = static_cast<double>(samples.size());
  const Histogram1D h = histogram_1d(samples, -6.0, 6.0, w);
  HensleyDiagnostics d;
  const auto near_zero =
      std::count_if(samples.begin(), samples.end(), [](double x) { return x >= -0.5 * w && x < 0.5 * w; });
  d.g0 = static_cast<double>(near_zero) / (m * w);
  d.sup_g = d.g0;
  for (std::size_t i = 0; i < h.bins(); ++i) d.sup_g = std::max(d.sup_g, h.density(i));
  d.slack = 3.0 * std::sqrt(d.sup_g / (m * w));
  return d;
}

void mean_gate(std::span<const double> samples, double mean, double sd, const char* who) {
  const double m = static_cast<double>(samples.size());
  if (std::abs(mean) > 5.0 * sd / std::sqrt(m)) {
    throw std::domain_error(std::string(who) + ": sample is not centered (mean " + std::to_string(mean) + ")");
  }
}

}  // namespace

HensleyDiagnostics hensley_check(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("hensley_check: need at least two samples");
  const double mean = sample_mean(samples);
  const double var = sample_variance(samples, mean);
  const double tol = 5.0 / std::sqrt(static_cast<double>(samples.size()));
  if (std::abs(mean) > tol || std::abs(var - 1.0) > tol) {
    throw std::domain_error("hensley_check: sample fails the isotropy gate (mean " + std::to_string(mean) +
                            ", variance " + std::to_string(var) + ")");
  }
  HensleyDiagnostics d = density_estimates(samples);
  d.passes = d.g0 >= 0.1 - d.slack && d.sup_g <= 1.0 + d.slack;
  return d;
}

HensleyDiagnostics center_density_check(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("center_density_check: need at least two samples");
  const double mean = sample_mean(samples);
  mean_gate(samples, mean, std::sqrt(sample_variance(samples, mean)), "center_density_check");
  HensleyDiagnostics d = density_estimates(samples);
  d.passes = d.g0 >= std::exp(-1.0) * d.sup_g - d.slack;
  return d;
}

std::vector<double> borell_default_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 80; ++i) g.push_back(0.5 * i);
  return g;
}

TailCheck borell_tail_check(std::span<const double> samples, double conf, std::span<const double> grid) {
  if (samples.empty()) throw std::invalid_argument("borell_tail_check: empty sample");
  if (!(conf > 0.0 && conf < 1.0)) throw std::invalid_argument("borell_tail_check: conf must lie in (0, 1)");
  const std::vector<double> fallback = borell_default_grid();
  if (grid.empty()) grid = fallback;
  std::vector<double> v(samples.size());
  std::transform(samples.begin(), samples.end(), v.begin(), [](double x) { return std::abs(x); });
  std::sort(v.begin(), v.end());
  const double m = static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += x * x;
  TailCheck out;
  out.scale = std::sqrt(sq / m);
  out.passes = true;
  out.first_failure = std::numeric_limits<double>::quiet_NaN();
  const double z = std_normal_quantile(conf);
  for (double t : grid) {
    const auto at_least = v.end() - std::lower_bound(v.begin(), v.end(), t * out.scale);
    const double tail = static_cast<double>(at_least) / m;
    const double env = 2.0 * std::exp(-t / 10.0);
    const double b = std::min(env, 1.0);
    const double slack = z * std::sqrt(b * (1.0 - b) / m) + 1.0 / m;
    out.t.push_back(t);
    out.empirical.push_back(tail);
    out.envelope.push_back(env);
    out.slack.push_back(slack);
    if (tail > env + slack && out.passes) {
      out.passes = false;
      out.first_failure = t;
    }
  }
  return out;
}

double grunbaum_constant() { return 1.0 - std::exp(-1.0); }

GrunbaumResult grunbaum_check(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("grunbaum_check: need at least two samples");
  const double mean = sample_mean(samples);
  mean_gate(samples, mean, std::sqrt(sample_variance(samples, mean)), "grunbaum_check");
  const double m = static_cast<double>(samples.size());
  GrunbaumResult r;
  r.fraction_negative =
      static_cast<double>(std::count_if(samples.begin(), samples.end(), [](double x) { return x < 0.0; })) / m;
  r.threshold = grunbaum_constant() + 1.5 / std::sqrt(m);
  r.passes = r.fraction_negative <= r.threshold;
  return r;
}

Convolution convolve_gaussian_1d(const Density1D& f, double v, std::span<const double> grid) {
  if (!(v > 0.0)) throw std::invalid_argument("convolve_gaussian_1d: variance must be positive");
  const double sd = std::sqrt(v);
  Convolution out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.reserve(grid.size());
  for (double x : grid) {
    auto integrand = [&](double y) {
      const double fy = (y < f.lo || y > f.hi) ? 0.0 : f.pdf(y);
      return fy == 0.0 ? 0.0 : fy * std_normal_pdf((x - y) / sd) / sd;
    };
    std::vector<double> cuts{f.lo, f.hi};
    if (x > f.lo && x < f.hi) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    out.values.push_back(integrate_pieces(integrand, cuts, 1e-10, 0.0, 20000).value);
  }
  out.log_concave = true;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double a = out.values[i - 1], b = out.values[i], c = out.values[i + 1];
    if (a < 1e-300 || b < 1e-300 || c < 1e-300) continue;
    const double lam = (grid[i + 1] - grid[i]) / (grid[i + 1] - grid[i - 1]);
    const double rhs = lam * std::log(a) + (1.0 - lam) * std::log(c);
    if (std::log(b) < rhs - 1e-7 * std::max(1.0, std::abs(rhs))) out.log_concave = false;
  }
  return out;
}

EnvelopeCheck lower_envelope_check(const LogConcave1D& f, int n) {
  const double t_n = t_p_solve(f, static_cast<double>(n));
  const double floor = -(n - 1.0) + f.log_f(0.0);
  EnvelopeCheck out{true, kInf};
  for (int j = 0; j < 100; ++j) {
    const double margin = f.log_f(t_n * j / 99.0) - floor;
    out.worst_margin = std::min(out.worst_margin, margin);
  }
  out.passes = out.worst_margin >= -1e-9;
  return out;
}

EnvelopeCheck upper_envelope_check(const LogConcave1D& f, int n, double alpha) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("upper_envelope_check: alpha must be >= 1");
  const double t_n = t_p_solve(f, static_cast<double>(n));
  const double ceiling = -(alpha - 1.0) * (n - 1.0) + f.log_f(t_n);
  EnvelopeCheck out{true, kInf};
  for (int j = 0; j < 100; ++j) {
    const double margin = ceiling - f.log_f(alpha * t_n + 10.0 * t_n * j / 99.0);
    out.worst_margin = std::min(out.worst_margin, margin);
  }
  out.passes = out.worst_margin >= -1e-9;
  return out;
}

}  // namespace cltlab

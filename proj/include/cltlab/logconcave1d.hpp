#pragma once

#include "cltlab/model.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cltlab {

/// A log-concave function on an interval, given by its logarithm.
///
/// Construction spot-checks log-concavity on 1000 random triples (midpoint
/// inequality with 1e-9 slack) and checks that the integral is finite and
/// positive. A spot check is not a proof: pathological inputs can evade it.
class LogConcave1D {
 public:
  using Fn = std::function<double(double)>;

  /// `dlog_f` may be empty, in which case derivatives are central differences
  /// with step 1e-6 max(|t|, scale). Throws std::invalid_argument when the
  /// checks fail.
  LogConcave1D(Fn log_f, double lo, double hi, std::string label, Fn dlog_f = {}, double scale = 1.0);

  /// Built-in laws: "exp", "half_gaussian" on [0, inf); "gaussian",
  /// "two_sided_exp" (unit variance) on R; "uniform" on [-sqrt 3, sqrt 3].
  static LogConcave1D named(const std::string& label);

  /// -inf outside [lo, hi].
  double log_f(double t) const;
  double dlog_f(double t) const;
  double operator()(double t) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double scale() const { return scale_; }
  const std::string& label() const { return label_; }

  /// t -> f(delta t).
  LogConcave1D scaled(double delta) const;

 private:
  Fn log_f_;
  Fn dlog_f_;
  double lo_;
  double hi_;
  std::string label_;
  double scale_;
};

/// The unique t > 0 with t (log f)'(t) + p - 1 = 0, by bracketing and a
/// safeguarded Illinois iteration to relative accuracy `tol`. Throws
/// std::domain_error when no sign change exists in the support or when
/// h(t) = t (log f)'(t) + p - 1 fails to decrease during bracketing.
double t_p_solve(const LogConcave1D& f, double p, double tol = 1e-10);

struct ShellMassResult {
  double t_n = 0.0;
  double ratio = 0.0;
  int n = 0;
  double epsilon = 0.0;
};

/// Fraction of the mass of t^{n-1} f(t) on [0, inf) lying in
/// [t_n (1 - eps), t_n (1 + eps)], with all integrals taken in the log domain.
/// Throws std::runtime_error when the quadrature does not converge.
ShellMassResult shell_mass_ratio(const LogConcave1D& f, int n, double epsilon, double tol = 1e-10);

/// Largest midpoint defect (psi_{i-1} + psi_{i+1}) / 2 - psi_i over a
/// uniform grid, taken at strides 1, 10 and 100. Nonpositive for concave data.
double concavity_defect(std::span<const double> values);

struct ConcavityCheck {
  bool passes = false;
  double worst_defect = 0.0;
  double slack = 0.0;
};

/// With phi(t) = t^{n-1} f(t) normalized and Phi its distribution function,
/// checks that psi = phi o Phi^{-1} is concave on (0, 1). Phi^{-1} is a
/// monotone cubic (PCHIP) interpolant on `grid_size` points; slack is 1e-6
/// relative to max psi.
ConcavityCheck bobkov_concavity_check(const LogConcave1D& f, int n, int grid_size = 10000);

struct HensleyDiagnostics {
  double g0 = 0.0;
  double sup_g = 0.0;
  double slack = 0.0;
  bool passes = false;
};

/// Histogram (width 0.05) estimates of g(0) and sup g for an isotropic
/// one-dimensional sample; passes when 1/10 - slack <= g(0) and
/// sup g <= 1 + slack with slack = 3 sqrt(sup g / (m w)). Throws
/// std::domain_error when mean or variance fail the isotropy gate.
HensleyDiagnostics hensley_check(std::span<const double> samples);

/// Compares g(0) with e^{-1} sup g for a centered one-dimensional sample, the
/// n = 1 case of f(0) >= e^{-n} sup f. Same estimates and slack as above.
HensleyDiagnostics center_density_check(std::span<const double> samples);

struct TailCheck {
  std::vector<double> t;
  std::vector<double> empirical;
  std::vector<double> envelope;
  std::vector<double> slack;
  bool passes = false;
  /// First grid point where the envelope is exceeded, or NaN.
  double first_failure = 0.0;
  double scale = 0.0;
};

/// Prob{F >= t E} <= 2 e^{-t/10} on a grid, E = sqrt(mean F^2). The slack is
/// z_conf sqrt(b (1 - b) / m) + 1/m with b the envelope value.
TailCheck borell_tail_check(std::span<const double> samples, double conf = 0.999,
                            std::span<const double> grid = {});

/// Default grid 0, 0.5, ..., 40.
std::vector<double> borell_default_grid();

struct GrunbaumResult {
  double fraction_negative = 0.0;
  double threshold = 0.0;
  bool passes = false;
};

/// 1 - 1/e.
double grunbaum_constant();

/// Empirical P(X < 0) against 1 - 1/e + 3 / (2 sqrt m). Throws
/// std::domain_error when |mean| exceeds 5 sd / sqrt(m).
GrunbaumResult grunbaum_check(std::span<const double> samples);

struct Convolution {
  std::vector<double> grid;
  std::vector<double> values;
  bool log_concave = false;
};

/// (f * gamma_{1, v}) on the grid, each point by adaptive quadrature to 1e-10.
/// log_concave reports a second-difference check of log values.
Convolution convolve_gaussian_1d(const Density1D& f, double v, std::span<const double> grid);

struct EnvelopeCheck {
  bool passes = false;
  /// Smallest margin in log units (negative means violated).
  double worst_margin = 0.0;
};

/// f(t) >= e^{-(n-1)} f(0) for t in [0, t_n] on a 100-point grid.
EnvelopeCheck lower_envelope_check(const LogConcave1D& f, int n);
/// f(t) <= e^{-(alpha-1)(n-1)} f(t_n) for t >= alpha t_n on a 100-point grid
/// reaching out to (alpha + 10) t_n.
EnvelopeCheck upper_envelope_check(const LogConcave1D& f, int n, double alpha);

}  // namespace cltlab

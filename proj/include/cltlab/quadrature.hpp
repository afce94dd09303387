#pragma once

#include <functional>
#include <span>

namespace cltlab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature with global bisection of the
/// panel carrying the largest error. Infinite limits are mapped to finite ones
/// by x = a + t / (1 - t). Stops when error <= max(abs_tol, rel_tol |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol = 0.0, int max_panels = 4000);

/// Sum of integrate() over consecutive intervals of a sorted breakpoint list.
QuadratureResult integrate_pieces(const std::function<double(double)>& f, std::span<const double> points,
                                  double abs_tol, double rel_tol = 0.0, int max_panels = 4000);

struct LogQuadratureResult {
  /// log of the integral; -inf when the integrand vanishes.
  double log_value = 0.0;
  /// Estimated relative error of exp(log_value).
  double relative_error = 0.0;
  int panels = 0;
  bool converged = false;
};

/// Integral of exp(log_f) over the finite interval [a, b], computed entirely
/// in the log domain: each panel is evaluated against its own peak and panel
/// contributions are combined by log-sum-exp. `breakpoints` seed the initial
/// subdivision (e.g. the integrand's peak).
LogQuadratureResult log_integrate(const std::function<double(double)>& log_f, double a, double b,
                                  double rel_tol, std::span<const double> breakpoints = {},
                                  int max_panels = 4000);

}  // namespace cltlab

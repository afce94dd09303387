#include "cltlab/quadrature.hpp"

#include "cltlab/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace cltlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kron += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  return Panel{a, b, kron * half, std::abs((kron - gauss) * half)};
}

/// Maps an integral over a possibly infinite interval to one over a finite one.
struct Transformed {
  std::function<double(double)> g;
  double lo, hi;
};

Transformed to_finite(const std::function<double(double)>& f, double a, double b) {
  const bool ia = std::isinf(a), ib = std::isinf(b);
  if (!ia && !ib) return {f, a, b};
  if (!ia && ib) {
    return {[f, a](double t) {
              const double u = 1.0 - t;
              return f(a + t / u) / (u * u);
            },
            0.0, 1.0};
  }
  if (ia && !ib) {
    return {[f, b](double t) {
              const double u = 1.0 - t;
              return f(b - t / u) / (u * u);
            },
            0.0, 1.0};
  }
  return {[f](double t) {
            const double u = 1.0 - t * t;
            return f(t / u) * (1.0 + t * t) / (u * u);
          },
          -1.0, 1.0};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol, int max_panels) {
  if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("integrate: NaN limit");
  if (a == b) return QuadratureResult{0.0, 0.0, 0, true};
  if (a > b) {
    QuadratureResult r = integrate(f, b, a, abs_tol, rel_tol, max_panels);
    r.value = -r.value;
    return r;
  }
  const Transformed t = to_finite(f, a, b);
  std::priority_queue<Panel> heap;
  Panel first = kronrod(t.g, t.lo, t.hi);
  double value = first.value, error = first.error;
  heap.push(first);
  int panels = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && panels < max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = kronrod(t.g, worst.a, mid);
    const Panel right = kronrod(t.g, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed accumulated rounding from the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return QuadratureResult{value, error, panels, error <= std::max(abs_tol, rel_tol * std::abs(value))};
}

QuadratureResult integrate_pieces(const std::function<double(double)>& f, std::span<const double> points,
                                  double abs_tol, double rel_tol, int max_panels) {
  QuadratureResult total{0.0, 0.0, 0, true};
  if (points.size() < 2) return total;
  const double share = abs_tol / static_cast<double>(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] < points[i]) throw std::invalid_argument("integrate_pieces: unsorted breakpoints");
    const QuadratureResult r = integrate(f, points[i], points[i + 1], share, rel_tol, max_panels);
    total.value += r.value;
    total.error += r.error;
    total.panels += r.panels;
    total.converged = total.converged && r.converged;
  }
  return total;
}

// ---------------------------------------------------------------------------

namespace {

struct LogPanel {
  double a, b, log_value, log_error;
  bool operator<(const LogPanel& o) const { return log_error < o.log_error; }
};

LogPanel log_kronrod(const std::function<double(double)>& log_f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double nodes[15];
  nodes[7] = log_f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    nodes[j] = log_f(center - dx);
    nodes[14 - j] = log_f(center + dx);
  }
  const double peak = *std::max_element(nodes, nodes + 15);
  if (peak == kNegInf) return LogPanel{a, b, kNegInf, kNegInf};
  auto rel = [&](int i) { return std::exp(nodes[i] - peak); };
  double kron = rel(7) * kWgk[7];
  double gauss = rel(7) * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double sum = rel(j) + rel(14 - j);
    kron += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  const double diff = std::abs(kron - gauss);
  return LogPanel{a, b, peak + std::log(kron * half),
                  diff > 0.0 ? peak + std::log(diff * half) : kNegInf};
}

}  // namespace

LogQuadratureResult log_integrate(const std::function<double(double)>& log_f, double a, double b,
                                  double rel_tol, std::span<const double> breakpoints, int max_panels) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw std::invalid_argument("log_integrate: need finite limits a < b");
  }
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<LogPanel> panels;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) panels.push_back(log_kronrod(log_f, cuts[i], cuts[i + 1]));
  std::make_heap(panels.begin(), panels.end());

  auto totals = [&](double& lv, double& le) {
    lv = kNegInf;
    le = kNegInf;
    for (const auto& p : panels) {
      lv = log_add_exp(lv, p.log_value);
      le = log_add_exp(le, p.log_error);
    }
  };
  const double log_tol = std::log(rel_tol);
  double log_value, log_error;
  totals(log_value, log_error);
  while (log_value != kNegInf && log_error - log_value > log_tol &&
         static_cast<int>(panels.size()) < max_panels) {
    std::pop_heap(panels.begin(), panels.end());
    const LogPanel worst = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    panels.push_back(log_kronrod(log_f, worst.a, mid));
    std::push_heap(panels.begin(), panels.end());
    panels.push_back(log_kronrod(log_f, mid, worst.b));
    std::push_heap(panels.begin(), panels.end());
    // Incremental log-domain updates lose precision; recompute every pass.
    totals(log_value, log_error);
  }
  LogQuadratureResult r;
  r.log_value = log_value;
  r.relative_error = log_value == kNegInf ? 0.0 : std::exp(log_error - log_value);
  r.panels = static_cast<int>(panels.size());
  r.converged = log_value == kNegInf || log_error - log_value <= log_tol;
  return r;
}

}  // namespace cltlab

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 when
// every criterion passes or fails only as a documented known failure.

#include "cltlab/experiments/config.hpp"
#include "cltlab/experiments/runners.hpp"
#include "cltlab/isotropy.hpp"
#include "cltlab/logconcave1d.hpp"
#include "cltlab/marginals.hpp"
#include "cltlab/metrics.hpp"
#include "cltlab/samplers.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace cltlab;

struct Outcome {
  bool passed = false;
  std::string detail;
  bool known_failure = false;
};

std::string fmt(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

Density1D gaussian_density(double variance) {
  return {[variance](double x) { return std::exp(-x * x / (2 * variance)) / std::sqrt(2 * M_PI * variance); },
          -kInf, kInf, "gaussian"};
}

/// Every assertion of the report, or the names of the failing ones.
Outcome all_assertions(const ExperimentReport& r) {
  Outcome o{true, "", false};
  int failed = 0;
  for (const auto& a : r.assertions) {
    if (!a.passed) {
      o.passed = false;
      o.detail += (failed++ ? "; " : "failed: ") + a.name + " [" + a.detail + "]";
    }
  }
  if (o.passed) o.detail = std::to_string(r.assertions.size()) + " assertions";
  return o;
}

const Table& table(const ExperimentReport& r, const std::string& name) {
  for (const auto& t : r.tables)
    if (t.name == name) return t;
  throw std::runtime_error("missing table " + name);
}

double cell(const Table& t, std::size_t row, const std::string& column) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == column) return t.rows.at(row)[i].get<double>();
  throw std::runtime_error("missing column " + column);
}

ExperimentReport run(const Json& j) { return run_experiment(config_from_json(j)); }

// 1. Closed-form critical points.
Outcome criterion_1() {
  constexpr double kTol = 1e-8;
  const auto e = LogConcave1D::named("exp");
  const auto g = LogConcave1D::named("half_gaussian");
  double worst = 0.0;
  for (double p : {2.0, 5.0, 10.0, 100.0}) {
    worst = std::max(worst, std::abs(t_p_solve(e, p) - (p - 1)) / (p - 1));
    worst = std::max(worst, std::abs(t_p_solve(g, p) - std::sqrt(p - 1)) / std::sqrt(p - 1));
    for (double delta : {0.5, 3.0}) {
      worst = std::max(worst, std::abs(t_p_solve(e.scaled(delta), p) * delta - t_p_solve(e, p)) / t_p_solve(e, p));
      worst = std::max(worst, std::abs(t_p_solve(g.scaled(delta), p) * delta - t_p_solve(g, p)) / t_p_solve(g, p));
    }
  }
  return {worst <= kTol, "max relative error " + fmt(worst, 3) + " <= " + fmt(kTol)};
}

// 2. Shell mass against the incomplete-gamma value.
Outcome criterion_2() {
  constexpr double kOracle = 0.951051816819997242;
  constexpr double kTol = 1e-6;
  const auto e = LogConcave1D::named("exp");
  const double r = shell_mass_ratio(e, 100, 0.2).ratio;
  bool monotone = true;
  double previous = -1.0;
  for (int i = 1; i <= 10; ++i) {
    const double v = shell_mass_ratio(e, 100, 0.05 * i).ratio;
    if (!(v >= previous)) monotone = false;
    previous = v;
  }
  return {std::abs(r - kOracle) <= kTol && monotone,
          "ratio " + fmt(r, 12) + " vs " + fmt(kOracle, 12) + ", monotone in epsilon: " + (monotone ? "yes" : "no")};
}

// 3. Gaussian TV in closed form.
Outcome criterion_3() {
  constexpr double kTol = 1e-6;
  double worst = 0.0;
  for (auto [a, b] : {std::pair{1.0, 4.0}, {1.0, 1.1}, {2.0, 2.0}}) {
    worst = std::max(worst, std::abs(gaussian_tv(1, a, b) - tv_1d_quadrature(gaussian_density(a), gaussian_density(b))));
  }
  bool bounded = true;
  for (Index n : {1, 4, 16, 64}) bounded &= gaussian_tv(n, 1.0, 1.01) <= 2.0 * std::sqrt(double(n)) * 0.01;
  return {worst <= kTol && bounded,
          "closed form vs quadrature " + fmt(worst, 3) + ", 2 sqrt(n) |beta/alpha - 1| bound: " + (bounded ? "holds" : "violated")};
}

// 4. Thin shell on the cube, with the hit-and-run cross-check.
Outcome criterion_4() {
  return all_assertions(run({{"experiment", "thin_shell"},
                             {"body_or_density", {{"type", "cube"}}},
                             {"n", {16, 64, 256}},
                             {"epsilon_grid", {0.1}},
                             {"m", 1000000},
                             {"hit_and_run_check", {{"n", 16}, {"m", 200000}}},
                             {"seed", 20240101}}));
}

// 5. CLT marginals on the cube, plus a gaussian control.
Outcome criterion_5() {
  constexpr double kNoiseFloor = 0.005;
  const Json base = {{"experiment", "clt_marginal"}, {"n", {16, 64}}, {"m", 100000}, {"direction_count", 200},
                     {"seed", 20240102}};
  Json cube = base;
  cube["body_or_density"] = {{"type", "cube"}};
  const auto rc = run(cube);
  Outcome o{false, "", false};
  bool decreasing = false;
  for (const auto& a : rc.assertions)
    if (a.name == "median Kolmogorov decreasing in n") {
      decreasing = a.passed;
      o.detail = a.detail;
    }
  Json gauss = base;
  gauss["body_or_density"] = {{"type", "gaussian"}};
  const auto rg = run(gauss);
  const auto& s = table(rg, "summary");
  double worst = 0.0;
  for (std::size_t i = 0; i < s.rows.size(); ++i) worst = std::max(worst, cell(s, i, "p90_kolmogorov"));
  o.passed = decreasing && worst <= kNoiseFloor;
  o.detail += "; gaussian p90 Kolmogorov " + fmt(worst, 4) + " <= " + fmt(kNoiseFloor);
  return o;
}

// 6. Diagonal sum of the cube.
Outcome criterion_6() {
  return all_assertions(run({{"experiment", "unconditional_diag"},
                             {"body_or_density", {{"type", "cube"}}},
                             {"n", 100},
                             {"m", 1000000},
                             {"threshold", 0.01},
                             {"seed", 20240103}}));
}

// 7. Projections of the sphere.
Outcome criterion_7() {
  return all_assertions(run({{"experiment", "diaconis_freedman"},
                             {"pairs", {{50, 1}, {200, 1}, {200, 3}}},
                             {"m", 10000000},
                             {"threshold", 0.02},
                             {"seed", 20240104}}));
}

// 8. Random projections of a fixed vector.
Outcome criterion_8() {
  return all_assertions(run({{"experiment", "jl_check"},
                             {"n", 100},
                             {"k", {4, 25}},
                             {"epsilon_grid", {0.2}},
                             {"subspace_count", 100000},
                             {"seed", 20240105}}));
}

// 9. Rigidity properties across the body zoo.
Outcome criterion_9() {
  constexpr Index kM = 100000;
  const double noise = 2.0 / std::sqrt(double(kM));
  const double tail_noise = 1.5 / std::sqrt(double(kM));
  int checks = 0;
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  };
  for (Index n : {8, 32}) {
    Vector axes(n);
    for (Index i = 0; i < n; ++i) axes(i) = 1.0 + 3.0 * double(i) / double(n - 1);
    // Uniform law on {x^T A^{-1} x <= 1} has covariance A / (n + 2).
    const AffineMap to_iso(Matrix(axes.cwiseSqrt().cwiseInverse().asDiagonal()) * std::sqrt(n + 2.0), Vector::Zero(n));
    const std::vector<std::pair<std::string, std::function<SampleBatch(RandomSeed)>>> zoo = {
        {"cube", [&](RandomSeed s) { return sample_uniform(BodySpec::isotropic_cube(n), kM, s); }},
        {"ball", [&](RandomSeed s) { return sample_uniform(BodySpec::isotropic_ball(n), kM, s); }},
        {"simplex", [&](RandomSeed s) { return sample_uniform(BodySpec::simplex(n, true), kM, s); }},
        {"ellipsoid",
         [&](RandomSeed s) {
           return apply_affine(sample_uniform(BodySpec::ellipsoid(Matrix(axes.asDiagonal())), kM, s), to_iso);
         }},
        {"product",
         [&](RandomSeed s) {
           return sample_uniform(BodySpec::product({BodySpec::isotropic_cube(n / 2), BodySpec::isotropic_ball(n / 2)}),
                                 kM, s);
         }},
    };
    std::uint64_t tag = 0;
    for (const auto& [name, draw] : zoo) {
      const std::string at = name + " n=" + std::to_string(n);
      const RandomSeed seed{20240109, ++tag * 100 + static_cast<std::uint64_t>(n)};
      const SampleBatch b = draw(seed);
      expect(isotropy_report(b).passes, at + " isotropy");
      const Vector norms = b.data.rowwise().norm();
      expect(borell_tail_check(std::span<const double>(norms.data(), norms.size())).passes, at + " Borell |x|");
      for (int d = 0; d < 2; ++d) {
        const Direction theta = d == 0 ? Direction::axis(n, 0) : sample_direction(n, seed.child(1));
        const Vector y = project_rows(b.data, theta.coords());
        const std::span<const double> ys(y.data(), y.size());
        const Vector neg = -y;
        const std::string where = at + (d == 0 ? " e1" : " random direction");
        expect(hensley_check(ys).passes, where + " Hensley");
        expect(borell_tail_check(ys).passes, where + " Borell marginal");
        expect(grunbaum_check(ys).passes, where + " Grunbaum");
        expect(grunbaum_check(std::span<const double>(neg.data(), neg.size())).passes, where + " Grunbaum reflected");
        const auto grid = TGrid{-20.0, 20.0, 0.01}.points();
        const auto curve = empirical_Mf_curve(y, theta, grid);
        bool monotone = true, lipschitz = true, tails = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          if (i > 0) {
            const double dv = curve.values[i] - curve.values[i - 1];
            monotone &= dv >= 0.0;
            lipschitz &= dv <= grid[i] - grid[i - 1] + noise;
          }
          const double env = 2.0 * std::exp(-std::abs(grid[i]) / 10.0) + tail_noise;
          if (grid[i] <= 0) tails &= curve.values[i] <= env;
          if (grid[i] >= 0) tails &= 1.0 - curve.values[i] <= env;
        }
        expect(monotone, where + " M_f monotone");
        expect(lipschitz, where + " M_f 1-Lipschitz in t");
        expect(tails, where + " M_f tails");
      }
    }
  }
  std::string detail = std::to_string(checks - int(failures.size())) + "/" + std::to_string(checks) + " checks";
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

// 10. Concentration of M_f over random subspaces. Expected to fail: for a
// centrally symmetric body M_f(theta, 0) = 1/2 in every direction, so the
// within-subspace oscillation at t = 0 is pure sampling noise, the same at
// every n. The t = 1 comparison is reported alongside; at this m its signal
// is also below the noise.
Outcome criterion_10() {
  constexpr double kGaussianNoise = 3.0;  // multiples of 1/sqrt(m), matching the runner
  const Json base = {{"experiment", "mf_concentration"}, {"n", {50, 200}}, {"k", {2}}, {"m", 100000},
                     {"t_grid", {0.0, 1.0}}, {"seed", 20240110}};
  Json cube = base;
  cube["body_or_density"] = {{"type", "cube"}};
  const auto rc = run(cube);
  bool t0 = false, t1 = false;
  std::string d0, d1;
  for (const auto& a : rc.assertions) {
    if (a.name.find("oscillation decreasing in n") == std::string::npos) continue;
    if (a.name.find("t=0)") != std::string::npos) t0 = a.passed, d0 = a.detail;
    if (a.name.find("t=1)") != std::string::npos) t1 = a.passed, d1 = a.detail;
  }
  Json gauss = base;
  gauss["body_or_density"] = {{"type", "gaussian"}};
  const auto rg = run(gauss);
  bool control = true;
  for (const auto& a : rg.assertions)
    if (a.name.find("gaussian input at noise level") != std::string::npos) control &= a.passed;
  Outcome o;
  o.passed = t0 && control;
  o.known_failure = !t0 && control;
  o.detail = "t=0 decreasing: " + std::string(t0 ? "yes" : "no") + " [" + d0 + "]; gaussian control at " +
             fmt(kGaussianNoise) + "/sqrt(m): " + (control ? "yes" : "no") + "; supplementary t=1 decreasing: " +
             (t1 ? "yes" : "no") + " [" + d1 + "]";
  if (o.known_failure) o.detail += "; known failure, see decisions ledger";
  return o;
}

// 11. Byte-identical reports on re-runs.
Outcome criterion_11() {
  const std::vector<Json> configs = {
      {{"experiment", "thin_shell"}, {"n", {8, 16}}, {"m", 20000}, {"epsilon_grid", {0.1}}},
      {{"experiment", "clt_marginal"}, {"n", {8, 16}}, {"m", 20000}, {"direction_count", 10}},
      {{"experiment", "unconditional_diag"}, {"n", {8}}, {"m", 20000}},
      {{"experiment", "multidim_marginal"}, {"n", {12}}, {"k", {1, 2}}, {"m", 20000}, {"subspace_count", 5},
       {"direction_count", 5}},
      {{"experiment", "diaconis_freedman"}, {"pairs", {{20, 1}, {20, 2}}}, {"m", 20000}},
      {{"experiment", "jl_check"}, {"n", 30}, {"k", {2, 8}}, {"subspace_count", 2000}},
      {{"experiment", "mf_concentration"}, {"n", {10, 20}}, {"k", {2}}, {"m", 20000}, {"global_direction_count", 100},
       {"directions_per_subspace", 10}, {"subspace_count", 10}},
  };
  int same = 0;
  std::string detail;
  for (Json c : configs) {
    c["seed"] = 20240111;
    c["workers"] = 2;
    const auto a = run(c).to_json().dump();
    const auto b = run(c).to_json().dump();
    if (a == b) {
      ++same;
    } else {
      detail += "; differs: " + c["experiment"].get<std::string>();
    }
  }
  return {same == int(configs.size()), std::to_string(same) + "/" + std::to_string(configs.size()) +
                                           " experiments byte-identical" + detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form t_p", criterion_1},        {"shell mass", criterion_2},
      {"gaussian TV", criterion_3},            {"thin shell", criterion_4},
      {"CLT marginals", criterion_5},          {"unconditional diagonal", criterion_6},
      {"Diaconis-Freedman", criterion_7},      {"Johnson-Lindenstrauss", criterion_8},
      {"rigidity suite", criterion_9},         {"M_f concentration", criterion_10},
      {"determinism", criterion_11},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what(), false};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.passed ? "PASS" : "FAIL") << "  " << std::setw(2) << i + 1 << "  " << criteria[i].first << "  ("
              << fmt(secs, 3) << " s)  " << o.detail << std::endl;
    if (!o.passed && !o.known_failure) ++unexpected;
  }
  std::cout << (unexpected == 0 ? "acceptance: no unexpected failures" : "acceptance: unexpected failures") << "\n";
  return unexpected == 0 ? 0 : 1;
}

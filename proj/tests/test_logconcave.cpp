#include "cltlab/logconcave1d.hpp"
#include "cltlab/rng.hpp"
#include "cltlab/samplers.hpp"
#include "cltlab/special.hpp"

#include <doctest.h>

#include <cmath>

using namespace cltlab;

TEST_CASE("t_p solves the first-order condition") {
  const auto e = LogConcave1D::named("exp");
  CHECK(t_p_solve(e, 100) == doctest::Approx(99.0).epsilon(1e-9));
  CHECK(t_p_solve(e, 2) == doctest::Approx(1.0).epsilon(1e-9));
  const auto g = LogConcave1D::named("half_gaussian");
  CHECK(t_p_solve(g, 17) == doctest::Approx(4.0).epsilon(1e-9));
  // t -> f(delta t) moves the critical point to t_p / delta.
  CHECK(t_p_solve(e.scaled(2.0), 100) == doctest::Approx(49.5).epsilon(1e-9));
  CHECK_THROWS_AS(t_p_solve(e, 1.0), std::invalid_argument);
}

TEST_CASE("log-concavity is checked at construction") {
  CHECK_THROWS_AS(LogConcave1D([](double t) { return t * t / 4.0; }, 0.0, kInf, "convex"), std::invalid_argument);
  CHECK_NOTHROW(LogConcave1D([](double t) { return -t * t; }, 0.0, kInf, "ok"));
}

TEST_CASE("shell mass matches independent values") {
  const auto e = LogConcave1D::named("exp");
  const std::pair<double, double> cases[] = {{0.1, 0.679449355760174},   {0.2, 0.951051816819997242},
                                             {0.3, 0.995856389858595},   {0.5, 0.999990005414654},
                                             {0.8, 0.99999999993327},    {1.0, 0.9999999999999949}};
  for (auto [eps, expect] : cases) {
    const auto r = shell_mass_ratio(e, 100, eps);
    CHECK(r.ratio == doctest::Approx(expect).epsilon(1e-9));
    CHECK(r.t_n == doctest::Approx(99.0).epsilon(1e-9));
  }
  CHECK(shell_mass_ratio(e, 20, 1.0).ratio == doctest::Approx(0.999487487403415).epsilon(1e-9));
  CHECK(shell_mass_ratio(e, 50, 1.0).ratio == doctest::Approx(0.99999996704018).epsilon(1e-9));
  CHECK(shell_mass_ratio(e, 100, 0.0).ratio == 0.0);

  double previous = 0.0;
  for (int n : {10, 30, 100, 300, 1000}) {
    const double r = shell_mass_ratio(e, n, 0.2).ratio;
    CHECK(r > previous);
    previous = r;
  }
  for (const char* law : {"exp", "half_gaussian"})
    for (int n : {20, 50, 200}) CHECK(shell_mass_ratio(LogConcave1D::named(law), n, 1.0).ratio >= 1.0 - std::exp(-1.0));
}

TEST_CASE("shell concavity") {
  CHECK(bobkov_concavity_check(LogConcave1D::named("exp"), 10).passes);
  CHECK(bobkov_concavity_check(LogConcave1D::named("half_gaussian"), 3).passes);
  const std::vector<double> concave{0.0, 1.0, 1.5, 1.75};
  CHECK(concavity_defect(concave) <= 0.0);
  const std::vector<double> convex{0.0, 0.25, 1.0, 2.25};
  CHECK(concavity_defect(convex) > 0.0);
}

TEST_CASE("density at the center") {
  const auto cube = sample_cube(1, 1000000, RandomSeed{50, 0});
  const std::span<const double> c(cube.data.data(), cube.data.size());
  const auto h = hensley_check(c);
  CHECK(h.passes);
  CHECK(h.g0 == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0))).epsilon(0.03));
  CHECK(center_density_check(c).passes);

  std::vector<double> shifted(c.begin(), c.end());
  for (auto& x : shifted) x += 1.0;
  CHECK_THROWS_AS(hensley_check(shifted), std::domain_error);
}

TEST_CASE("tails") {
  Rng rng(RandomSeed{51, 0});
  std::vector<double> laplace(1000000);
  for (auto& x : laplace) x = sample_named_law("two_sided_exp", rng);
  const auto ok = borell_tail_check(laplace);
  CHECK(ok.passes);
  CHECK(ok.t.size() == borell_default_grid().size());
  CHECK(ok.scale == doctest::Approx(1.0).epsilon(0.01));

  // A sample with rare huge values: tails stay heavier than any e^{-t/10}.
  std::vector<double> spiky(1000000);
  for (auto& x : spiky) x = rng.uniform() < 2e-5 ? 1e5 : rng.normal();
  std::vector<double> wide;
  for (int i = 0; i <= 500; ++i) wide.push_back(0.5 * i);
  const auto bad = borell_tail_check(spiky, 0.999, wide);
  CHECK_FALSE(bad.passes);
  CHECK(bad.first_failure > 100.0);
}

TEST_CASE("Grunbaum") {
  CHECK(grunbaum_constant() == doctest::Approx(0.632120558828557678).epsilon(1e-15));
  const auto s = sample_simplex(1, 1000000, RandomSeed{52, 0}, true);
  const auto r = grunbaum_check(std::span<const double>(s.data.data(), s.data.size()));
  CHECK(r.passes);
  // The one-dimensional simplex is [0, 1], symmetric about its centroid.
  CHECK(r.fraction_negative == doctest::Approx(0.5).epsilon(0.01));

  Rng rng(RandomSeed{52, 1});
  std::vector<double> exp_centered(1000000);
  for (auto& x : exp_centered) x = rng.exponential() - 1.0;
  const auto e = grunbaum_check(exp_centered);
  CHECK(e.passes);
  CHECK(e.fraction_negative == doctest::Approx(grunbaum_constant()).epsilon(0.005));
}

TEST_CASE("gaussian smoothing preserves log-concavity") {
  const Density1D box{[](double) { return 0.5; }, -1.0, 1.0, "uniform"};
  std::vector<double> grid;
  for (int i = -40; i <= 40; ++i) grid.push_back(0.1 * i);
  const auto c = convolve_gaussian_1d(box, 0.25, grid);
  CHECK(c.log_concave);
  CHECK(c.values[40] == doctest::Approx(0.5 * (2 * std_normal_cdf(2.0) - 1.0)).epsilon(1e-9));

  const Density1D two_bumps{[](double x) { return std::abs(std::abs(x) - 3.0) < 0.5 ? 0.5 : 0.0; }, -3.5, 3.5,
                            "bimodal"};
  CHECK_FALSE(convolve_gaussian_1d(two_bumps, 0.1, grid).log_concave);
}

TEST_CASE("envelopes around the critical point") {
  for (const char* law : {"exp", "half_gaussian"}) {
    const auto f = LogConcave1D::named(law);
    for (int n : {5, 20, 100}) {
      CHECK(lower_envelope_check(f, n).passes);
      CHECK(upper_envelope_check(f, n, 2.0).passes);
    }
  }
}

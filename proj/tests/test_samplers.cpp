#include "cltlab/isotropy.hpp"
#include "cltlab/marginals.hpp"
#include "cltlab/metrics.hpp"
#include "cltlab/samplers.hpp"

#include <doctest.h>

#include <cmath>

using namespace cltlab;

namespace {
double column_variance(const RowMatrix& x, Index j) {
  const double mean = x.col(j).mean();
  return (x.col(j).array() - mean).square().mean();
}
}  // namespace

TEST_CASE("cube") {
  const auto b = sample_cube(1, 1000000, RandomSeed{1, 0});
  CHECK(std::abs(column_variance(b.data, 0) - 1.0) <= 0.01);
  const auto c = sample_cube(3, 10000, RandomSeed{2, 0});
  CHECK(c.data.cwiseAbs().maxCoeff() <= std::sqrt(3.0));
  CHECK(sample_cube(3, 5000, RandomSeed{2, 0}).data == sample_cube(3, 5000, RandomSeed{2, 0}).data);
}

TEST_CASE("output does not depend on the worker count") {
  const auto a = sample_ball(7, 20000, RandomSeed{3, 1}, 1);
  const auto b = sample_ball(7, 20000, RandomSeed{3, 1}, 4);
  CHECK(a.data == b.data);
}

TEST_CASE("ball") {
  const Index n = 10;
  const auto b = sample_ball(n, 1000000, RandomSeed{4, 0});
  for (Index j = 0; j < n; ++j) CHECK(std::abs(column_variance(b.data, j) - 1.0) <= 0.01);
  CHECK(b.data.rowwise().norm().maxCoeff() <= std::sqrt(n + 2.0) + 1e-12);
  const auto one = sample_ball(1, 200000, RandomSeed{4, 1});
  CHECK(one.data.cwiseAbs().maxCoeff() <= std::sqrt(3.0));
}

TEST_CASE("simplex") {
  const auto raw = sample_simplex(2, 1000000, RandomSeed{5, 0}, false);
  CHECK(std::abs(raw.data.col(0).mean() - 1.0 / 3.0) <= 0.002);
  CHECK(std::abs(raw.data.col(1).mean() - 1.0 / 3.0) <= 0.002);
  CHECK(raw.data.minCoeff() >= 0.0);
  CHECK(raw.data.rowwise().sum().maxCoeff() <= 1.0);
  const auto iso = sample_simplex(2, 1000000, RandomSeed{5, 1}, true);
  const auto mom = empirical_moments(iso);
  CHECK((mom.covariance - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 0.02);
}

TEST_CASE("gaussian") {
  const auto g = sample_gaussian(1, 1000000, RandomSeed{6, 0}, 1.0);
  CHECK(std::abs(column_variance(g.data, 0) - 1.0) <= 0.01);
  const auto g4 = sample_gaussian(1, 1000000, RandomSeed{6, 1}, 4.0);
  CHECK(std::abs(column_variance(g4.data, 0) - 4.0) <= 0.04);
  const Index n = 5;
  const auto g5 = sample_gaussian(n, 200000, RandomSeed{6, 2}, 2.0);
  const Vector sq = g5.data.rowwise().squaredNorm();
  const double mean = sq.mean();
  const double se = std::sqrt((sq.array() - mean).square().mean() / static_cast<double>(sq.size()));
  CHECK(std::abs(mean - n * 2.0) <= 3.0 * se);
}

TEST_CASE("hit-and-run matches the exact cube sampler") {
  const Index n = 5;
  const auto body = BodySpec::isotropic_cube(n);
  const auto b = sample_hit_and_run(body, 100000, RandomSeed{7, 0}, HitAndRunConfig::defaults(body));
  CHECK(b.burn_in == 10 * n * n);
  CHECK(b.thinning == n);
  const auto uniform_cdf = [](double t) { return std::clamp((t + std::sqrt(3.0)) / (2 * std::sqrt(3.0)), 0.0, 1.0); };
  for (Index j = 0; j < n; ++j) {
    const Vector col = b.data.col(j);
    CHECK(kolmogorov_distance(ecdf(std::span<const double>(col.data(), col.size())), uniform_cdf) <= 0.01);
  }
}

TEST_CASE("hit-and-run on the ball has E|X|^2 = n") {
  const Index n = 5;
  const auto body = BodySpec::isotropic_ball(n);
  const auto b = sample_hit_and_run(body, 100000, RandomSeed{8, 0}, HitAndRunConfig::defaults(body));
  const Vector sq = b.data.rowwise().squaredNorm();
  const double mean = sq.mean();
  // Batch means for the standard error of a correlated chain.
  const Index batches = 50, per = sq.size() / batches;
  double ss = 0;
  for (Index i = 0; i < batches; ++i) ss += std::pow(sq.segment(i * per, per).mean() - mean, 2);
  const double se = std::sqrt(ss / (batches - 1) / batches);
  CHECK(std::abs(mean - n) <= 3.0 * se);
}

TEST_CASE("hit-and-run single step") {
  const auto body = BodySpec::isotropic_cube(3);
  HitAndRunConfig cfg;
  cfg.burn_in = 0;
  cfg.thinning = 1;
  cfg.start = Vector::Zero(3);
  const auto b = sample_hit_and_run(body, 1, RandomSeed{9, 0}, cfg);
  CHECK(b.size() == 1);
  CHECK(membership(body, b.data.row(0).transpose()));
  CHECK(b.data.row(0).norm() > 0.0);
}

TEST_CASE("hit-and-run serves polytopes") {
  Matrix a(4, 2);
  a << 1, 1, -1, 0, 0, -1, 1, -1;
  Vector off(4);
  off << 1, 0, 0, 0.5;
  Vector interior(2);
  interior << 0.3, 0.2;
  const auto poly = BodySpec::hpolytope(a, off, interior);
  const auto b = sample_uniform(poly, 2000, RandomSeed{10, 0});
  for (Index i = 0; i < b.size(); ++i) CHECK(membership(poly, b.data.row(i).transpose()));
}

TEST_CASE("directions") {
  Rng rng(RandomSeed{11, 0});
  for (int i = 0; i < 100; ++i) CHECK(std::abs(sample_direction(7, rng).coords().norm() - 1.0) <= 1e-12);

  // Angles of planar directions: chi-square over 100 cells at the 0.1% level.
  const int draws = 1000000, cells = 100;
  std::vector<long long> count(cells, 0);
  for (int i = 0; i < draws; ++i) {
    const Vector u = sample_direction(2, rng).coords();
    const double a = std::atan2(u(1), u(0)) + M_PI;
    ++count[std::min(cells - 1, static_cast<int>(a / (2 * M_PI) * cells))];
  }
  double chi2 = 0;
  const double expected = static_cast<double>(draws) / cells;
  for (auto c : count) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 148.2);  // 99.9% quantile of chi-square with 99 degrees of freedom

  // First coordinate on S^{n-1}: density prop. (1 - x^2)^{(n-3)/2}.
  const Index n = 5;
  std::vector<double> first;
  for (int i = 0; i < 200000; ++i) first.push_back(sample_direction(n, rng).coords()(0));
  const auto cdf = [](double x) {
    // n = 5: density 3/4 (1 - x^2), cdf 1/2 + 3/4 (x - x^3/3).
    x = std::clamp(x, -1.0, 1.0);
    return 0.5 + 0.75 * (x - x * x * x / 3.0);
  };
  CHECK(kolmogorov_distance(ecdf(first), cdf) < 1.95 / std::sqrt(200000.0));
}

TEST_CASE("subspaces") {
  Rng rng(RandomSeed{12, 0});
  const auto e = sample_subspace(9, 4, rng);
  CHECK((e.basis() * e.basis().transpose() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
  const auto full = sample_subspace(5, 5, rng);
  CHECK(std::abs(std::abs(full.basis().determinant()) - 1.0) <= 1e-10);

  // k = 1 draws the same vector as sample_direction from the same stream.
  Rng r1(RandomSeed{13, 0}), r2(RandomSeed{13, 0});
  const auto line = sample_subspace(8, 1, r1);
  CHECK((line.basis().row(0).transpose() - sample_direction(8, r2).coords()).norm() <= 1e-15);

  const Index n = 20, k = 3, count = 100000;
  Vector x = Vector::Zero(n);
  x(0) = 1.0;
  x(5) = 2.0;
  double s1 = 0, s2 = 0;
  for (Index i = 0; i < count; ++i) {
    const double r = project(sample_subspace(n, k, rng), x).squaredNorm() / x.squaredNorm();
    s1 += r;
    s2 += r * r;
  }
  const double mean = s1 / count;
  const double se = std::sqrt((s2 / count - mean * mean) / count);
  CHECK(std::abs(mean - static_cast<double>(k) / n) <= 3.0 * se);
}

TEST_CASE("named laws are standardized") {
  Rng rng(RandomSeed{14, 0});
  for (const char* law : {"gaussian", "two_sided_exp", "uniform"}) {
    double s1 = 0, s2 = 0;
    const int m = 400000;
    for (int i = 0; i < m; ++i) {
      const double x = sample_named_law(law, rng);
      s1 += x;
      s2 += x * x;
    }
    CHECK(std::abs(s1 / m) < 0.01);
    CHECK(std::abs(s2 / m - 1.0) < 0.02);
  }
}

#include "cltlab/marginals.hpp"
#include "cltlab/samplers.hpp"

#include <doctest.h>

#include <cmath>

using namespace cltlab;

TEST_CASE("ecdf") {
  const std::vector<double> v{3.0, 1.0, 2.0};
  const auto f = ecdf(v);
  CHECK(f(0.5) == 0.0);
  CHECK(f(1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(f(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(f(2.5) == doctest::Approx(2.0 / 3.0));
  CHECK(f(3.0) == 1.0);
  CHECK(f.sorted_values() == std::vector<double>{1.0, 2.0, 3.0});

  const std::vector<double> ties{0.0, 0.0};
  CHECK(ecdf(ties)(0.0) == 1.0);
  CHECK(ecdf(ties)(-1e-300) == 0.0);
  CHECK_THROWS_AS(ecdf(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("one-dimensional histogram") {
  const std::vector<double> v{-6.0, -0.01, 0.0, 0.04, 0.06, 6.0, 7.0, -6.5};
  const auto h = histogram_1d(v);
  CHECK(h.bins() == 240);
  CHECK(h.total == 8);
  CHECK(h.out_of_range == 2);
  CHECK(h.counts[0] == 1);
  CHECK(h.counts[119] == 1);
  CHECK(h.counts[120] == 2);
  CHECK(h.counts[121] == 1);
  CHECK(h.counts[239] == 1);
  CHECK(h.bin_center(120) == doctest::Approx(0.025));
  CHECK(h.density(120) == doctest::Approx(2.0 / (8 * 0.05)));

  const auto odd = histogram_1d(v, 0.0, 1.0, 0.3);
  CHECK(odd.bins() == 4);
  CHECK(odd.hi == doctest::Approx(1.2));
}

TEST_CASE("product histogram") {
  RowMatrix x(3, 2);
  x << 0.1, 0.1, -0.1, 0.1, 10.0, 0.0;
  const auto h = histogram_nd(x);
  CHECK(h.bins_per_axis == 60);
  CHECK(h.total == 3);
  CHECK(h.out_of_range == 1);
  CHECK(h.counts[30 * 60 + 30] == 1);
  CHECK(h.counts[29 * 60 + 30] == 1);
}

TEST_CASE("projections") {
  const auto b = sample_cube(4, 1000, RandomSeed{30, 0});
  const auto e = Subspace(Matrix::Identity(4, 4).topRows(2));
  const auto p = project_batch(b, e);
  CHECK(p.dim() == 2);
  CHECK((p.data - b.data.leftCols(2)).cwiseAbs().maxCoeff() < 1e-15);
  const auto theta = Direction::axis(4, 3);
  CHECK((project_rows(b.data, theta.coords()) - b.data.col(3)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("marginal distribution function of the cube") {
  const Index m = 1000000;
  const auto b = sample_cube(3, m, RandomSeed{31, 0});
  const double p = 0.5 + 1.0 / (2.0 * std::sqrt(3.0));
  const double se = std::sqrt(p * (1 - p) / m);
  CHECK(std::abs(empirical_Mf(b, Direction::axis(3, 0), 1.0) - p) <= 4.0 * se);

  const std::vector<double> grid{-2.0, 0.0, 1.0, 2.0};
  const auto curve = empirical_Mf_curve(b, Direction::axis(3, 1), grid);
  CHECK(curve.values[0] == 0.0);
  CHECK(std::abs(curve.values[1] - 0.5) <= 4.0 * 0.5 / std::sqrt(double(m)));
  CHECK(std::abs(curve.values[2] - p) <= 4.0 * se);
  CHECK(curve.values[3] == 1.0);
  CHECK(curve.sample_count == m);

  const std::vector<double> unsorted{1.0, 0.0};
  CHECK_THROWS_AS(empirical_Mf_curve(b, Direction::axis(3, 1), unsorted), std::invalid_argument);
}

TEST_CASE("direction Lipschitz constant of the ball marginal is small") {
  // Every marginal of the ball is the same law, so differences are noise.
  const auto b = sample_ball(5, 200000, RandomSeed{32, 0});
  const double lip = mf_direction_lipschitz(b, 0.5, 50, RandomSeed{32, 1});
  CHECK(lip >= 0.0);
  CHECK(lip < 0.05);
}

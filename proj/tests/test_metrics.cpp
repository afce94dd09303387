#include "cltlab/metrics.hpp"
#include "cltlab/samplers.hpp"

#include <doctest.h>

#include <cmath>

using namespace cltlab;

namespace {
Density1D gaussian_density(double variance) {
  return {[variance](double x) { return std::exp(-x * x / (2 * variance)) / std::sqrt(2 * M_PI * variance); },
          -kInf, kInf, "gaussian"};
}
}  // namespace

TEST_CASE("Kolmogorov distance") {
  CHECK(kolmogorov_distance(ecdf(std::vector<double>{0.0})) == doctest::Approx(0.5).epsilon(1e-14));
  const std::vector<double> two{-1.0, 1.0};
  const double expect = std::max(std_normal_cdf(-1.0), 0.5 - std_normal_cdf(-1.0));
  CHECK(kolmogorov_distance(ecdf(two)) == doctest::Approx(expect).epsilon(1e-14));

  const auto g = sample_gaussian(1, 200000, RandomSeed{40, 0}, 1.0);
  CHECK(kolmogorov_distance(ecdf(g)) < 1.95 / std::sqrt(200000.0));
}

TEST_CASE("binned TV") {
  const std::vector<double> far(1000, 5.0);
  const auto unit = [](double t) { return std::clamp(t + 1.0, 0.0, 1.0); };
  CHECK(binned_tv(histogram_1d(far), unit) == doctest::Approx(2.0));

  const auto g = sample_gaussian(1, 1000000, RandomSeed{41, 0}, 1.0);
  const Vector col = g.data.col(0);
  const auto h = histogram_1d(std::span<const double>(col.data(), col.size()));
  const double tv = binned_tv(h, [](double t) { return std_normal_cdf(t); });
  // Noise floor of 240 bins at m = 1e6 is about 0.03.
  CHECK(tv < 0.04);
  CHECK(binned_tv(h, std_normal_density()) == doctest::Approx(tv).epsilon(1e-6));
}

TEST_CASE("binned TV in two dimensions") {
  const auto g = sample_gaussian(2, 1000000, RandomSeed{42, 0}, 1.0);
  CHECK(binned_tv_gaussian(histogram_nd(g.data)) < 0.07);
  const auto c = sample_cube(2, 1000000, RandomSeed{42, 1});
  CHECK(binned_tv_gaussian(histogram_nd(c.data)) > 0.2);
}

TEST_CASE("TV by quadrature matches independent values") {
  CHECK(tv_1d_quadrature(gaussian_density(1.0), gaussian_density(4.0)) ==
        doctest::Approx(0.6453491376695373).epsilon(1e-8));
  CHECK(tv_1d_quadrature(gaussian_density(1.0), gaussian_density(1.1)) ==
        doctest::Approx(0.0461158195700075).epsilon(1e-8));
  CHECK(tv_1d_quadrature(std_normal_density(), std_normal_density()) < 1e-10);
  CHECK(tv_1d_quadrature(ball_marginal_density(10), std_normal_density()) ==
        doctest::Approx(0.0646659280206234).epsilon(1e-7));
  CHECK(tv_1d_quadrature(ball_marginal_density(100), std_normal_density()) ==
        doctest::Approx(0.0069415843336679).epsilon(1e-6));

  const Density1D half{[](double x) { return 2.0 * x; }, 0.0, 1.0, "triangle"};
  const Density1D bad{[](double) { return 2.0; }, 0.0, 1.0, "unnormalized"};
  CHECK_THROWS_AS(tv_1d_quadrature(half, bad), std::invalid_argument);
}

TEST_CASE("closed-form gaussian TV") {
  CHECK(gaussian_tv(1, 1.0, 4.0) == doctest::Approx(0.6453491376695373).epsilon(1e-12));
  CHECK(gaussian_tv(1, 4.0, 1.0) == doctest::Approx(0.6453491376695373).epsilon(1e-12));
  CHECK(gaussian_tv(3, 2.0, 2.0) == 0.0);
  CHECK(gaussian_tv(1, 1.0, 1.01) == doctest::Approx(0.0048153676).epsilon(1e-7));
  CHECK(gaussian_tv(4, 1.0, 1.01) == doctest::Approx(0.0107729579).epsilon(1e-7));
  CHECK(gaussian_tv(16, 1.0, 1.01) == doctest::Approx(0.0222221814).epsilon(1e-7));
  CHECK(gaussian_tv(64, 1.0, 1.01) == doctest::Approx(0.0447882718).epsilon(1e-7));
  CHECK(gaussian_tv(1, 1.0, 1.1) == doctest::Approx(tv_1d_quadrature(gaussian_density(1.0), gaussian_density(1.1))));
}

TEST_CASE("T-distance") {
  const TGrid grid;
  CHECK(grid.points().size() == 1201);
  CHECK(grid.points().front() == -6.0);
  CHECK(grid.points().back() == doctest::Approx(6.0));

  const auto g = sample_gaussian(3, 100000, RandomSeed{43, 0}, 1.0);
  CHECK(t_distance(g.data, 20, grid, RandomSeed{43, 1}) <= 0.01);
  const RowMatrix zero = RowMatrix::Zero(1000, 3);
  CHECK(t_distance(zero, 5, grid, RandomSeed{43, 2}) >= 0.5 - 1e-12);

  // The grid supremum never exceeds the full Kolmogorov distance.
  const auto c = sample_cube(3, 50000, RandomSeed{43, 3});
  const Vector col = c.data.col(0);
  CHECK(t_distance_direction(col, grid) <=
        kolmogorov_distance(ecdf(std::span<const double>(col.data(), col.size()))) + 1e-12);
  CHECK(t_distance(c.data, 8, grid, RandomSeed{43, 4}, 1) == t_distance(c.data, 8, grid, RandomSeed{43, 4}, 3));
}

TEST_CASE("distance report serializes") {
  DistanceReport r;
  r.kolmogorov = 0.1;
  r.binned_tv = 0.2;
  r.meta.sample_count = 10;
  const auto j = r.to_json();
  CHECK(j["kolmogorov"] == 0.1);
  CHECK(j["t_distance"].is_null());
  CHECK(DistanceReport::csv_header().find("kolmogorov") != std::string::npos);
}

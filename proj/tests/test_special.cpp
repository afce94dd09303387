#include "cltlab/special.hpp"

#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

using namespace cltlab;

TEST_CASE("normal cdf") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  // mpmath, 30 digits.
  CHECK(std_normal_cdf(1.3596) == doctest::Approx(0.913021730920476).epsilon(1e-14));
  for (double t = -8.0; t <= 8.0; t += 0.25) CHECK(std::abs(std_normal_cdf(t) + std_normal_cdf(-t) - 1.0) < 1e-12);
  CHECK(std_normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-15));
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.7, 0.975, 1 - 1e-9}) {
    CHECK(std_normal_cdf(std_normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
}

TEST_CASE("regularized incomplete gamma against boost") {
  for (double s : {0.5, 1.0, 2.5, 10.0, 50.0, 128.0}) {
    for (double x : {1e-3, 0.1, 1.0, 5.0, 20.0, 60.0, 150.0, 300.0}) {
      const double p = boost::math::gamma_p(s, x);
      const double q = boost::math::gamma_q(s, x);
      CHECK(gamma_p(s, x) == doctest::Approx(p).epsilon(1e-12));
      if (q > 1e-300) CHECK(gamma_q(s, x) == doctest::Approx(q).epsilon(1e-10));
    }
  }
  CHECK(gamma_p(3.0, 0.0) == 0.0);
}

TEST_CASE("log_add_exp") {
  CHECK(log_add_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(log_add_exp(-INFINITY, 3.0) == 3.0);
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
}

#pragma once

#include "cltlab/json_io.hpp"
#include "cltlab/marginals.hpp"
#include "cltlab/model.hpp"
#include "cltlab/special.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace cltlab {

// Every TV-type distance here is the L1 distance between densities, i.e.
// twice the largest discrepancy over measurable sets. Values lie in [0, 2].

/// sup_t |F_hat(t) - F(t)|, evaluated on both sides of every jump.
double kolmogorov_distance(const EmpiricalCDF& ecdf, const std::function<double(double)>& cdf);
/// Against the standard normal.
double kolmogorov_distance(const EmpiricalCDF& ecdf);

/// sum over bins of |p_hat - p| plus both out-of-range masses, with the
/// reference bin masses taken from differences of `ref_cdf`. Underestimates
/// the continuous distance as bins coarsen.
double binned_tv(const Histogram1D& hist, const std::function<double(double)>& ref_cdf);
/// Same, with bin masses of a reference density integrated by quadrature.
double binned_tv(const Histogram1D& hist, const Density1D& ref);
/// k-dimensional product binning against the standard gaussian on R^k.
double binned_tv_gaussian(const HistogramND& hist);

/// The standard normal density as a Density1D.
Density1D std_normal_density();
/// Marginal of the uniform law on the ball of radius sqrt(n + 2), which is
/// proportional to (1 - t^2 / (n + 2))^((n - 1) / 2).
Density1D ball_marginal_density(Index n);

/// Integral of |f - g| by adaptive quadrature, split at the support
/// endpoints and at sign changes of f - g located by a scan. Throws
/// std::invalid_argument if either density's mass differs from 1 by more
/// than 100 tol.
double tv_1d_quadrature(const Density1D& f, const Density1D& g, double tol = 1e-8);

/// d_TV(gamma_{n, alpha}, gamma_{n, beta}) in closed form: the densities cross
/// on the sphere |x|^2 = n ln(beta / alpha) alpha beta / (beta - alpha), and
/// the masses inside it are incomplete gamma values.
double gaussian_tv(Index n, double alpha, double beta);

/// The evaluation grid of the T-distance.
struct TGrid {
  double lo = -6.0;
  double hi = 6.0;
  double step = 0.01;

  std::vector<double> points() const;
};

/// sup |M_hat(theta, t) - Phi(t)| over one direction and a grid, from its
/// projections. Counting is O(m), independent of the grid size.
double t_distance_direction(const Vector& projections, const TGrid& grid);

/// Max of t_distance_direction over `direction_count` random directions of
/// the batch's space. Direction j comes from seed.child(j). A lower bound
/// for the true supremum.
double t_distance(const RowMatrix& data, int direction_count, const TGrid& grid, RandomSeed seed,
                  int workers = 1);

struct EstimatorMeta {
  Index sample_count = 0;
  double bin_width = 0.0;
  int direction_count = 0;
  std::string grid;
};

struct DistanceReport {
  double kolmogorov = 0.0;
  double binned_tv = 0.0;
  std::optional<double> t_distance;
  EstimatorMeta meta;

  Json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

}  // namespace cltlab

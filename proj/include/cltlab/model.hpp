#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cltlab {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Sample blocks keep one sample per contiguous row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Point = Vector;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
/// Absolute slack on boundary inequalities in membership tests.
inline constexpr double kBoundarySlack = 1e-12;

/// A unit vector theta in S^{n-1}.
class Direction {
 public:
  /// Throws std::invalid_argument unless | |coords| - 1 | <= 1e-12.
  explicit Direction(Vector coords);
  /// Normalizes a nonzero vector.
  static Direction normalized(const Vector& v);
  static Direction axis(Index n, Index i);

  const Vector& coords() const { return coords_; }
  Index dim() const { return coords_.size(); }

 private:
  Vector coords_;
};

/// E in G_{n,k}, stored as a k x n frame with orthonormal rows.
class Subspace {
 public:
  /// Throws std::invalid_argument if basis * basis^T deviates from I_k by
  /// more than 1e-10 in any entry, or if k is not in [1, n].
  explicit Subspace(Matrix basis);

  const Matrix& basis() const { return basis_; }
  Index dim() const { return basis_.rows(); }
  Index ambient_dim() const { return basis_.cols(); }

  /// Maps coordinates u in E (length k) to the ambient unit vector basis^T u.
  Direction embed(const Direction& u) const;

 private:
  Matrix basis_;
};

/// Coordinates of Proj_E(x) in the frame of E (length k).
Vector project(const Subspace& sub, const Point& x);

class BodySpec;

namespace body {
struct Cube {
  double half_side;
};
struct Ball {
  double radius;
};
/// The standard simplex {x >= 0, sum x <= 1}. `standardize` asks samplers to
/// bring it to isotropic position.
struct Simplex {
  bool standardize;
};
/// {x : <a_i, x> <= b_i}, with normals a_i stored as rows.
struct HPolytope {
  Matrix normals;
  Vector offsets;
  Vector interior;
  /// Box [lower, upper] certified by interval propagation at construction.
  Vector lower;
  Vector upper;
};
/// {x : x^T A^{-1} x <= 1} for SPD shape A (semi-axes are sqrt(eig A)).
struct Ellipsoid {
  Matrix shape;
  Matrix inverse;
  Matrix sqrt_shape;
  double max_eigenvalue;
};
struct Product {
  std::vector<BodySpec> factors;
};
}  // namespace body

/// Declarative description of a convex body in R^n.
class BodySpec {
 public:
  using Shape =
      std::variant<body::Cube, body::Ball, body::Simplex, body::HPolytope, body::Ellipsoid, body::Product>;

  static BodySpec cube(Index n, double half_side);
  /// [-sqrt(3), sqrt(3)]^n.
  static BodySpec isotropic_cube(Index n);
  static BodySpec ball(Index n, double radius);
  /// The ball of radius sqrt(n + 2).
  static BodySpec isotropic_ball(Index n);
  static BodySpec simplex(Index n, bool standardize);
  /// Requires `interior` to satisfy every inequality strictly, and the
  /// inequalities to bound a box under interval propagation.
  static BodySpec hpolytope(Matrix normals, Vector offsets, Vector interior);
  static BodySpec ellipsoid(Matrix shape);
  static BodySpec product(std::vector<BodySpec> factors);

  Index dim() const { return dim_; }
  const Shape& shape() const { return shape_; }
  std::string kind() const;

  /// Canonical interior point: origin for centered bodies, centroid for the
  /// simplex, a chord-midpoint centering of the given point for polytopes.
  Point interior_point() const;

  /// Uniform law has zero mean and identity covariance exactly.
  bool is_isotropic() const;
  /// Invariant under every coordinate reflection x_i -> -x_i.
  bool is_unconditional() const;

 private:
  BodySpec(Index dim, Shape shape) : dim_(dim), shape_(std::move(shape)) {}

  Index dim_;
  Shape shape_;
};

struct Chord {
  double lo;
  double hi;
};

/// x in K, inclusive of the boundary up to kBoundarySlack.
bool membership(const BodySpec& body, const Point& x);

/// {x + t d : t in [lo, hi]} = K intersected with the line through x.
/// Throws std::invalid_argument when x is outside K and std::domain_error when
/// the chord is unbounded.
Chord chord(const BodySpec& body, const Point& x, const Direction& d);

/// Same as chord() for an arbitrary nonzero direction vector.
Chord chord_along(const BodySpec& body, const Point& x, const Vector& d);

/// R such that K is contained in the ball of radius R.
double bounding_radius(const BodySpec& body);

/// Names accepted by one-dimensional law descriptors.
inline constexpr std::array<std::string_view, 5> kNamedLaws = {"exp", "half_gaussian", "gaussian",
                                                                 "uniform", "two_sided_exp"};
bool is_named_law(std::string_view label);

class DensitySpec;

namespace density {
struct Uniform {
  BodySpec body;
};
struct Gaussian {
  Index dim;
  double variance;
};
/// Independent coordinates, coordinate i following the named law labels[i].
struct Product1D {
  std::vector<std::string> labels;
};
}  // namespace density

/// A log-concave density on R^n, known by construction.
class DensitySpec {
 public:
  using Shape = std::variant<density::Uniform, density::Gaussian, density::Product1D>;

  static DensitySpec uniform_on(BodySpec body);
  static DensitySpec gaussian(Index n, double variance);
  static DensitySpec product_1d(std::vector<std::string> labels);

  Index dim() const;
  const Shape& shape() const { return shape_; }
  std::string kind() const;
  bool is_isotropic() const;
  bool is_unconditional() const;

 private:
  explicit DensitySpec(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

/// A one-dimensional probability density with support [lo, hi].
struct Density1D {
  std::function<double(double)> pdf;
  double lo = -kInf;
  double hi = kInf;
  std::string label;
};

}  // namespace cltlab

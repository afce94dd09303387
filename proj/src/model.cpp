#include "cltlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cltlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(Index expected, Index got, const char* what) {
  if (expected != got) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

/// Intersects [lo, hi] with {t : a.x + t a.d <= b}.
void clip_halfspace(double ax, double ad, double b, double& lo, double& hi) {
  if (ad > 0.0) {
    hi = std::min(hi, (b - ax) / ad);
  } else if (ad < 0.0) {
    lo = std::max(lo, (b - ax) / ad);
  }
}

/// Roots of the quadratic form q(x + t d) = 1 where q(y) = y^T Q y and q(x) <= 1.
void clip_quadric(double a, double b, double c, double& lo, double& hi) {
  if (a <= 0.0) return;
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  const double root = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(root, b));
  double t1, t2;
  if (q == 0.0) {
    t1 = t2 = 0.0;
  } else {
    t1 = q / a;
    t2 = c / q;
  }
  lo = std::max(lo, std::min(t1, t2));
  hi = std::min(hi, std::max(t1, t2));
}

void chord_into(const BodySpec& body, const Vector& x, const Vector& d, double& lo, double& hi);

void chord_into(const BodySpec& body, const Vector& x, const Vector& d, double& lo, double& hi) {
  std::visit(
      Overloaded{
          [&](const body::Cube& c) {
            for (Index i = 0; i < x.size(); ++i) {
              clip_halfspace(x[i], d[i], c.half_side, lo, hi);
              clip_halfspace(-x[i], -d[i], c.half_side, lo, hi);
            }
          },
          [&](const body::Ball& b) {
            clip_quadric(d.squaredNorm(), 2.0 * d.dot(x), x.squaredNorm() - b.radius * b.radius, lo,
                         hi);
          },
          [&](const body::Simplex&) {
            for (Index i = 0; i < x.size(); ++i) clip_halfspace(-x[i], -d[i], 0.0, lo, hi);
            clip_halfspace(x.sum(), d.sum(), 1.0, lo, hi);
          },
          [&](const body::HPolytope& p) {
            const Vector ax = p.normals * x;
            const Vector ad = p.normals * d;
            for (Index i = 0; i < ax.size(); ++i) clip_halfspace(ax[i], ad[i], p.offsets[i], lo, hi);
          },
          [&](const body::Ellipsoid& e) {
            const Vector id = e.inverse * d;
            clip_quadric(d.dot(id), 2.0 * x.dot(id), x.dot(e.inverse * x) - 1.0, lo, hi);
          },
          [&](const body::Product& p) {
            Index offset = 0;
            for (const auto& f : p.factors) {
              const Index k = f.dim();
              const auto db = d.segment(offset, k);
              if (!db.isZero(0.0)) chord_into(f, x.segment(offset, k), db, lo, hi);
              offset += k;
            }
          },
      },
      body.shape());
}

/// Interval propagation of {a_i . x <= b_i} to a coordinate box.
void propagate_box(const Matrix& a, const Vector& b, Vector& lower, Vector& upper) {
  const Index n = a.cols();
  lower = Vector::Constant(n, -kInf);
  upper = Vector::Constant(n, kInf);
  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool changed = false;
    for (Index i = 0; i < a.rows(); ++i) {
      // Minimum of a_i . x over the current box, split into finite part and
      // the count of unbounded terms.
      double finite_min = 0.0;
      int unbounded = 0;
      Index unbounded_at = -1;
      for (Index j = 0; j < n; ++j) {
        const double c = a(i, j);
        if (c == 0.0) continue;
        const double bound = c > 0.0 ? lower[j] : upper[j];
        if (std::isinf(bound)) {
          ++unbounded;
          unbounded_at = j;
        } else {
          finite_min += c * bound;
        }
      }
      if (unbounded > 1) continue;
      for (Index j = 0; j < n; ++j) {
        const double c = a(i, j);
        if (c == 0.0) continue;
        if (unbounded == 1 && j != unbounded_at) continue;
        const double own = c > 0.0 ? lower[j] : upper[j];
        const double rest = unbounded == 1 ? finite_min : finite_min - c * own;
        const double limit = (b[i] - rest) / c;
        if (c > 0.0 && limit < upper[j] - 1e-12 * (1.0 + std::abs(limit))) {
          upper[j] = limit;
          changed = true;
        } else if (c < 0.0 && limit > lower[j] + 1e-12 * (1.0 + std::abs(limit))) {
          lower[j] = limit;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
}

}  // namespace

Direction::Direction(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 1 || !coords_.allFinite()) {
    throw std::invalid_argument("Direction: coordinates must be finite and nonempty");
  }
  if (std::abs(coords_.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("Direction: vector is not of unit length");
  }
}

Direction Direction::normalized(const Vector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("Direction: cannot normalize a zero or non-finite vector");
  }
  return Direction(v / norm);
}

Direction Direction::axis(Index n, Index i) {
  if (i < 0 || i >= n) throw std::invalid_argument("Direction::axis: index out of range");
  return Direction(Vector::Unit(n, i));
}

Subspace::Subspace(Matrix basis) : basis_(std::move(basis)) {
  const Index k = basis_.rows();
  const Index n = basis_.cols();
  if (k < 1 || k > n) throw std::invalid_argument("Subspace: require 1 <= k <= n");
  if (!basis_.allFinite()) throw std::invalid_argument("Subspace: non-finite basis");
  const Matrix gram = basis_ * basis_.transpose();
  const double deviation = (gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (deviation > 1e-10) {
    throw std::invalid_argument("Subspace: rows are not orthonormal (Gram deviation " +
                                std::to_string(deviation) + ")");
  }
}

Direction Subspace::embed(const Direction& u) const {
  require_dim(dim(), u.dim(), "Subspace::embed");
  return Direction::normalized(basis_.transpose() * u.coords());
}

Vector project(const Subspace& sub, const Point& x) {
  require_dim(sub.ambient_dim(), x.size(), "project");
  return sub.basis() * x;
}

// ---------------------------------------------------------------------------
// BodySpec

BodySpec BodySpec::cube(Index n, double half_side) {
  if (n < 1) throw std::invalid_argument("cube: dimension must be >= 1");
  if (!(half_side > 0.0) || !std::isfinite(half_side)) {
    throw std::invalid_argument("cube: half_side must be positive and finite");
  }
  return BodySpec(n, body::Cube{half_side});
}

BodySpec BodySpec::isotropic_cube(Index n) { return cube(n, std::sqrt(3.0)); }

BodySpec BodySpec::ball(Index n, double radius) {
  if (n < 1) throw std::invalid_argument("ball: dimension must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ball: radius must be positive and finite");
  }
  return BodySpec(n, body::Ball{radius});
}

BodySpec BodySpec::isotropic_ball(Index n) { return ball(n, std::sqrt(static_cast<double>(n) + 2.0)); }

BodySpec BodySpec::simplex(Index n, bool standardize) {
  if (n < 1) throw std::invalid_argument("simplex: dimension must be >= 1");
  return BodySpec(n, body::Simplex{standardize});
}

BodySpec BodySpec::hpolytope(Matrix normals, Vector offsets, Vector interior) {
  const Index n = normals.cols();
  if (n < 1 || normals.rows() < 1) throw std::invalid_argument("hpolytope: empty constraint set");
  require_dim(normals.rows(), offsets.size(), "hpolytope offsets");
  require_dim(n, interior.size(), "hpolytope interior point");
  if (!normals.allFinite() || !offsets.allFinite() || !interior.allFinite()) {
    throw std::invalid_argument("hpolytope: non-finite data");
  }
  const Vector slack = offsets - normals * interior;
  if ((slack.array() <= 0.0).any()) {
    throw std::invalid_argument("hpolytope: supplied point is not strictly interior");
  }
  body::HPolytope p{std::move(normals), std::move(offsets), std::move(interior), {}, {}};
  propagate_box(p.normals, p.offsets, p.lower, p.upper);
  if (!p.lower.allFinite() || !p.upper.allFinite()) {
    throw std::invalid_argument("hpolytope: boundedness could not be certified by interval propagation");
  }
  return BodySpec(n, std::move(p));
}

BodySpec BodySpec::ellipsoid(Matrix shape) {
  const Index n = shape.rows();
  if (n < 1 || shape.cols() != n) throw std::invalid_argument("ellipsoid: shape must be square");
  if (!shape.allFinite()) throw std::invalid_argument("ellipsoid: non-finite shape");
  const double scale = shape.cwiseAbs().maxCoeff();
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale)) {
    throw std::invalid_argument("ellipsoid: shape must be symmetric");
  }
  const Matrix sym = 0.5 * (shape + shape.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Vector lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 1e-12 * lambda.maxCoeff()) || !(lambda.minCoeff() > 0.0)) {
    throw std::invalid_argument("ellipsoid: shape must be positive definite");
  }
  const Matrix& v = eig.eigenvectors();
  Matrix inverse = v * lambda.cwiseInverse().asDiagonal() * v.transpose();
  Matrix root = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
  return BodySpec(n, body::Ellipsoid{sym, std::move(inverse), std::move(root), lambda.maxCoeff()});
}

BodySpec BodySpec::product(std::vector<BodySpec> factors) {
  if (factors.empty()) throw std::invalid_argument("product: needs at least one factor");
  Index n = 0;
  for (const auto& f : factors) n += f.dim();
  return BodySpec(n, body::Product{std::move(factors)});
}

std::string BodySpec::kind() const {
  return std::visit(Overloaded{
                        [](const body::Cube&) { return std::string("cube"); },
                        [](const body::Ball&) { return std::string("ball"); },
                        [](const body::Simplex&) { return std::string("simplex"); },
                        [](const body::HPolytope&) { return std::string("hpolytope"); },
                        [](const body::Ellipsoid&) { return std::string("ellipsoid"); },
                        [](const body::Product&) { return std::string("product"); },
                    },
                    shape_);
}

Point BodySpec::interior_point() const {
  return std::visit(
      Overloaded{
          [&](const body::Simplex&) -> Point {
            return Point::Constant(dim_, 1.0 / static_cast<double>(dim_ + 1));
          },
          [&](const body::HPolytope& p) -> Point {
            // Coordinate sweeps moving to chord midpoints.
            Point x = p.interior;
            for (int sweep = 0; sweep < 3; ++sweep) {
              for (Index j = 0; j < dim_; ++j) {
                const Chord c = chord_along(*this, x, Vector::Unit(dim_, j));
                x[j] += 0.5 * (c.lo + c.hi);
              }
            }
            return x;
          },
          [&](const body::Product& p) -> Point {
            Point x(dim_);
            Index offset = 0;
            for (const auto& f : p.factors) {
              x.segment(offset, f.dim()) = f.interior_point();
              offset += f.dim();
            }
            return x;
          },
          [&](const auto&) -> Point { return Point::Zero(dim_); },
      },
      shape_);
}

bool BodySpec::is_isotropic() const {
  return std::visit(
      Overloaded{
          [](const body::Cube& c) { return std::abs(c.half_side - std::sqrt(3.0)) < 1e-12; },
          [&](const body::Ball& b) {
            return std::abs(b.radius - std::sqrt(static_cast<double>(dim_) + 2.0)) < 1e-12;
          },
          [&](const body::Ellipsoid& e) {
            const Matrix target = (static_cast<double>(dim_) + 2.0) * Matrix::Identity(dim_, dim_);
            return (e.shape - target).cwiseAbs().maxCoeff() < 1e-12;
          },
          [](const body::Product& p) {
            return std::all_of(p.factors.begin(), p.factors.end(),
                               [](const BodySpec& f) { return f.is_isotropic(); });
          },
          [](const auto&) { return false; },
      },
      shape_);
}

bool BodySpec::is_unconditional() const {
  return std::visit(
      Overloaded{
          [](const body::Cube&) { return true; },
          [](const body::Ball&) { return true; },
          [](const body::Ellipsoid& e) {
            const Matrix off = e.shape - Matrix(e.shape.diagonal().asDiagonal());
            return off.cwiseAbs().maxCoeff() == 0.0;
          },
          [](const body::Product& p) {
            return std::all_of(p.factors.begin(), p.factors.end(),
                               [](const BodySpec& f) { return f.is_unconditional(); });
          },
          [](const auto&) { return false; },
      },
      shape_);
}

// ---------------------------------------------------------------------------
// Oracles

bool membership(const BodySpec& body, const Point& x) {
  require_dim(body.dim(), x.size(), "membership");
  return std::visit(
      Overloaded{
          [&](const body::Cube& c) { return x.cwiseAbs().maxCoeff() <= c.half_side + kBoundarySlack; },
          [&](const body::Ball& b) { return x.norm() <= b.radius + kBoundarySlack; },
          [&](const body::Simplex&) {
            return x.minCoeff() >= -kBoundarySlack && x.sum() <= 1.0 + kBoundarySlack;
          },
          [&](const body::HPolytope& p) {
            return ((p.normals * x - p.offsets).array() <= kBoundarySlack).all();
          },
          [&](const body::Ellipsoid& e) { return x.dot(e.inverse * x) <= 1.0 + kBoundarySlack; },
          [&](const body::Product& p) {
            Index offset = 0;
            for (const auto& f : p.factors) {
              if (!membership(f, x.segment(offset, f.dim()))) return false;
              offset += f.dim();
            }
            return true;
          },
      },
      body.shape());
}

Chord chord_along(const BodySpec& body, const Point& x, const Vector& d) {
  require_dim(body.dim(), x.size(), "chord point");
  require_dim(body.dim(), d.size(), "chord direction");
  if (d.isZero(0.0)) throw std::invalid_argument("chord: zero direction");
  if (!membership(body, x)) throw std::invalid_argument("chord: point outside body");
  double lo = -kInf;
  double hi = kInf;
  chord_into(body, x, d, lo, hi);
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::domain_error("chord: unbounded chord (invalid body)");
  }
  return Chord{std::min(lo, 0.0), std::max(hi, 0.0)};
}

Chord chord(const BodySpec& body, const Point& x, const Direction& d) {
  return chord_along(body, x, d.coords());
}

double bounding_radius(const BodySpec& body) {
  const double n = static_cast<double>(body.dim());
  return std::visit(Overloaded{
                        [&](const body::Cube& c) { return c.half_side * std::sqrt(n); },
                        [](const body::Ball& b) { return b.radius; },
                        // Farthest vertex from the origin is a unit basis vector.
                        [](const body::Simplex&) { return 1.0; },
                        [](const body::HPolytope& p) {
                          return p.lower.cwiseAbs().cwiseMax(p.upper.cwiseAbs()).norm();
                        },
                        [](const body::Ellipsoid& e) { return std::sqrt(e.max_eigenvalue); },
                        [](const body::Product& p) {
                          double sq = 0.0;
                          for (const auto& f : p.factors) {
                            const double r = bounding_radius(f);
                            sq += r * r;
                          }
                          return std::sqrt(sq);
                        },
                    },
                    body.shape());
}

// ---------------------------------------------------------------------------
// DensitySpec

bool is_named_law(std::string_view label) {
  return std::find(kNamedLaws.begin(), kNamedLaws.end(), label) != kNamedLaws.end();
}

DensitySpec DensitySpec::uniform_on(BodySpec body) { return DensitySpec(density::Uniform{std::move(body)}); }

DensitySpec DensitySpec::gaussian(Index n, double variance) {
  if (n < 1) throw std::invalid_argument("gaussian: dimension must be >= 1");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("gaussian: variance must be positive");
  }
  return DensitySpec(density::Gaussian{n, variance});
}

DensitySpec DensitySpec::product_1d(std::vector<std::string> labels) {
  if (labels.empty()) throw std::invalid_argument("product_1d: needs at least one coordinate");
  for (const auto& l : labels) {
    if (!is_named_law(l)) throw std::invalid_argument("product_1d: unknown law '" + l + "'");
  }
  return DensitySpec(density::Product1D{std::move(labels)});
}

Index DensitySpec::dim() const {
  return std::visit(Overloaded{
                        [](const density::Uniform& u) { return u.body.dim(); },
                        [](const density::Gaussian& g) { return g.dim; },
                        [](const density::Product1D& p) { return static_cast<Index>(p.labels.size()); },
                    },
                    shape_);
}

std::string DensitySpec::kind() const {
  return std::visit(Overloaded{
                        [](const density::Uniform& u) { return "uniform(" + u.body.kind() + ")"; },
                        [](const density::Gaussian&) { return std::string("gaussian"); },
                        [](const density::Product1D&) { return std::string("product_1d"); },
                    },
                    shape_);
}

namespace {
bool symmetric_unit_law(const std::string& l) {
  return l == "gaussian" || l == "uniform" || l == "two_sided_exp";
}
}  // namespace

bool DensitySpec::is_isotropic() const {
  return std::visit(Overloaded{
                        [](const density::Uniform& u) { return u.body.is_isotropic(); },
                        [](const density::Gaussian& g) { return g.variance == 1.0; },
                        [](const density::Product1D& p) {
                          return std::all_of(p.labels.begin(), p.labels.end(), symmetric_unit_law);
                        },
                    },
                    shape_);
}

bool DensitySpec::is_unconditional() const {
  return std::visit(Overloaded{
                        [](const density::Uniform& u) { return u.body.is_unconditional(); },
                        [](const density::Gaussian&) { return true; },
                        [](const density::Product1D& p) {
                          return std::all_of(p.labels.begin(), p.labels.end(), symmetric_unit_law);
                        },
                    },
                    shape_);
}

}  // namespace cltlab

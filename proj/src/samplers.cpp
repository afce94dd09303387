#include "cltlab/samplers.hpp"

#include "cltlab/isotropy.hpp"

#include <cmath>
#include <span>
#include <stdexcept>

namespace cltlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const double kSqrt3 = std::sqrt(3.0);

void require_positive(Index n, Index m) {
  if (n < 1) throw std::invalid_argument("sampler: dimension must be >= 1");
  if (m < 1) throw std::invalid_argument("sampler: sample count must be >= 1");
}

void draw_unit_ball(std::span<double> out, Rng& rng) {
  double sq = 0.0;
  do {
    sq = 0.0;
    for (double& v : out) {
      v = rng.normal();
      sq += v * v;
    }
  } while (sq == 0.0);
  const double n = static_cast<double>(out.size());
  const double scale = std::pow(rng.uniform_open(), 1.0 / n) / std::sqrt(sq);
  for (double& v : out) v *= scale;
}

bool has_exact_body_sampler(const BodySpec& body) {
  return std::visit(Overloaded{
                        [](const body::HPolytope&) { return false; },
                        [](const body::Product& p) {
                          for (const auto& f : p.factors) {
                            if (!has_exact_body_sampler(f)) return false;
                          }
                          return true;
                        },
                        [](const auto&) { return true; },
                    },
                    body.shape());
}

void draw_uniform(const BodySpec& body, std::span<double> out, Rng& rng) {
  std::visit(
      Overloaded{
          [&](const body::Cube& c) {
            for (double& v : out) v = rng.uniform(-c.half_side, c.half_side);
          },
          [&](const body::Ball& b) {
            draw_unit_ball(out, rng);
            for (double& v : out) v *= b.radius;
          },
          [&](const body::Simplex&) {
            // Exponential spacings: (E_1, ..., E_n) / (E_1 + ... + E_{n+1}).
            double total = 0.0;
            for (double& v : out) {
              v = rng.exponential();
              total += v;
            }
            total += rng.exponential();
            for (double& v : out) v /= total;
          },
          [&](const body::HPolytope&) {
            throw std::invalid_argument("hpolytope bodies have no exact sampler; use hit-and-run");
          },
          [&](const body::Ellipsoid& e) {
            Vector u(static_cast<Index>(out.size()));
            draw_unit_ball(std::span<double>(u.data(), out.size()), rng);
            Eigen::Map<Vector>(out.data(), u.size()) = e.sqrt_shape * u;
          },
          [&](const body::Product& p) {
            std::size_t offset = 0;
            for (const auto& f : p.factors) {
              const auto k = static_cast<std::size_t>(f.dim());
              draw_uniform(f, out.subspan(offset, k), rng);
              offset += k;
            }
          },
      },
      body.shape());
}

SampleBatch make_batch(RowMatrix data, RandomSeed seed, std::string id) {
  SampleBatch b;
  b.data = std::move(data);
  b.seed = seed;
  b.sampler_id = std::move(id);
  return b;
}

bool strictly_interior(const BodySpec& body, const Point& x) {
  if (!membership(body, x)) return false;
  for (Index j = 0; j < body.dim(); ++j) {
    const Chord c = chord_along(body, x, Vector::Unit(body.dim(), j));
    if (!(c.lo < 0.0 && c.hi > 0.0)) return false;
  }
  return true;
}

}  // namespace

double sample_named_law(std::string_view label, Rng& rng) {
  if (label == "gaussian") return rng.normal();
  if (label == "uniform") return rng.uniform(-kSqrt3, kSqrt3);
  if (label == "exp") return rng.exponential();
  if (label == "half_gaussian") return std::abs(rng.normal());
  if (label == "two_sided_exp") {
    // Laplace law with scale 1/sqrt(2): unit variance.
    const double e = rng.exponential() / std::sqrt(2.0);
    return rng.uniform() < 0.5 ? -e : e;
  }
  throw std::invalid_argument("unknown named law '" + std::string(label) + "'");
}

void fill_uniform_rows(const BodySpec& body, Eigen::Ref<RowMatrix> out, Rng& rng) {
  if (out.cols() != body.dim()) throw std::invalid_argument("fill_uniform_rows: dimension mismatch");
  const auto n = static_cast<std::size_t>(out.cols());
  for (Index i = 0; i < out.rows(); ++i) draw_uniform(body, std::span<double>(out.row(i).data(), n), rng);
}

void fill_density_rows(const DensitySpec& density, Eigen::Ref<RowMatrix> out, Rng& rng) {
  if (out.cols() != density.dim()) {
    throw std::invalid_argument("fill_density_rows: dimension mismatch");
  }
  std::visit(Overloaded{
                 [&](const density::Uniform& u) { fill_uniform_rows(u.body, out, rng); },
                 [&](const density::Gaussian& g) {
                   const double sd = std::sqrt(g.variance);
                   for (Index i = 0; i < out.rows(); ++i) {
                     for (Index j = 0; j < out.cols(); ++j) out(i, j) = sd * rng.normal();
                   }
                 },
                 [&](const density::Product1D& p) {
                   for (Index i = 0; i < out.rows(); ++i) {
                     for (Index j = 0; j < out.cols(); ++j) {
                       out(i, j) = sample_named_law(p.labels[static_cast<std::size_t>(j)], rng);
                     }
                   }
                 },
             },
             density.shape());
}

bool has_exact_sampler(const DensitySpec& density) {
  if (const auto* u = std::get_if<density::Uniform>(&density.shape())) {
    return has_exact_body_sampler(u->body);
  }
  return true;
}

SampleBatch sample_cube(Index n, Index m, RandomSeed seed, int workers) {
  require_positive(n, m);
  const BodySpec cube = BodySpec::isotropic_cube(n);
  auto data = generate_chunked(n, m, seed, workers,
                               [&](auto& block, Rng& rng) { fill_uniform_rows(cube, block, rng); });
  return make_batch(std::move(data), seed, "cube");
}

SampleBatch sample_ball(Index n, Index m, RandomSeed seed, int workers) {
  require_positive(n, m);
  const BodySpec ball = BodySpec::isotropic_ball(n);
  auto data = generate_chunked(n, m, seed, workers,
                               [&](auto& block, Rng& rng) { fill_uniform_rows(ball, block, rng); });
  return make_batch(std::move(data), seed, "ball");
}

SampleBatch sample_simplex(Index n, Index m, RandomSeed seed, bool standardize, int workers) {
  require_positive(n, m);
  const BodySpec simplex = BodySpec::simplex(n, false);
  auto fill = [&](auto& block, Rng& rng) { fill_uniform_rows(simplex, block, rng); };
  SampleBatch batch = make_batch(generate_chunked(n, m, seed, workers, fill), seed, "simplex");
  if (!standardize) return batch;
  const RandomSeed pilot_seed = seed.child(kPilotStream);
  const SampleBatch pilot =
      make_batch(generate_chunked(n, kPilotRows, pilot_seed, workers, fill), pilot_seed, "simplex");
  return apply_affine(batch, whitening_map(empirical_moments(pilot, workers)));
}

SampleBatch sample_gaussian(Index n, Index m, RandomSeed seed, double variance, int workers) {
  require_positive(n, m);
  if (!(variance > 0.0)) throw std::invalid_argument("sample_gaussian: variance must be positive");
  const DensitySpec g = DensitySpec::gaussian(n, variance);
  auto data = generate_chunked(n, m, seed, workers,
                               [&](auto& block, Rng& rng) { fill_density_rows(g, block, rng); });
  return make_batch(std::move(data), seed, "gaussian");
}

SampleBatch sample_sphere(Index n, Index m, double radius, RandomSeed seed, int workers) {
  require_positive(n, m);
  if (!(radius > 0.0)) throw std::invalid_argument("sample_sphere: radius must be positive");
  auto data = generate_chunked(n, m, seed, workers, [&](auto& block, Rng& rng) {
    for (Index i = 0; i < block.rows(); ++i) {
      block.row(i) = radius * sample_direction(n, rng).coords().transpose();
    }
  });
  return make_batch(std::move(data), seed, "sphere");
}

HitAndRunConfig HitAndRunConfig::defaults(const BodySpec& body) {
  const long n = static_cast<long>(body.dim());
  HitAndRunConfig cfg;
  cfg.burn_in = 10 * n * n;
  cfg.thinning = n;
  cfg.start = body.interior_point();
  return cfg;
}

SampleBatch sample_hit_and_run(const BodySpec& body, Index m, RandomSeed seed,
                               const HitAndRunConfig& cfg, int workers) {
  const Index n = body.dim();
  require_positive(n, m);
  if (cfg.burn_in < 0) throw std::invalid_argument("hit-and-run: burn_in must be >= 0");
  if (cfg.thinning < 1) throw std::invalid_argument("hit-and-run: thinning must be >= 1");
  if (cfg.chains < 1) throw std::invalid_argument("hit-and-run: chains must be >= 1");
  if (cfg.start.size() != n) throw std::invalid_argument("hit-and-run: start dimension mismatch");
  if (!strictly_interior(body, cfg.start)) {
    throw std::invalid_argument("hit-and-run: start point is not strictly interior");
  }

  RowMatrix data(m, n);
  const auto chains = static_cast<Index>(cfg.chains);
  parallel_for(static_cast<std::size_t>(chains), workers, [&](std::size_t c) {
    const Index ci = static_cast<Index>(c);
    const Index first = ci * (m / chains) + std::min(ci, m % chains);
    const Index rows = m / chains + (ci < m % chains ? 1 : 0);
    Rng rng(seed.child(c));
    Point x = cfg.start;
    Point candidate(n);
    auto step = [&] {
      const Direction d = sample_direction(n, rng);
      const Chord ch = chord(body, x, d);
      // Redraw on the (rare) rounding excursion past the boundary slack.
      do {
        const double t = ch.lo + (ch.hi - ch.lo) * rng.uniform_open();
        candidate = x + t * d.coords();
      } while (!membership(body, candidate));
      x.swap(candidate);
    };
    for (long s = 0; s < cfg.burn_in; ++s) step();
    for (Index i = 0; i < rows; ++i) {
      for (long s = 0; s < cfg.thinning; ++s) step();
      data.row(first + i) = x.transpose();
    }
  });
  SampleBatch batch = make_batch(std::move(data), seed, "hit_and_run(" + body.kind() + ")");
  batch.burn_in = cfg.burn_in;
  batch.thinning = cfg.thinning;
  return batch;
}

SampleBatch sample_uniform(const BodySpec& body, Index m, RandomSeed seed, int workers) {
  require_positive(body.dim(), m);
  if (!has_exact_body_sampler(body)) {
    return sample_hit_and_run(body, m, seed, HitAndRunConfig::defaults(body), workers);
  }
  if (const auto* s = std::get_if<body::Simplex>(&body.shape())) {
    return sample_simplex(body.dim(), m, seed, s->standardize, workers);
  }
  auto data = generate_chunked(body.dim(), m, seed, workers,
                               [&](auto& block, Rng& rng) { fill_uniform_rows(body, block, rng); });
  return make_batch(std::move(data), seed, body.kind());
}

SampleBatch sample_density(const DensitySpec& density, Index m, RandomSeed seed, int workers) {
  if (const auto* u = std::get_if<density::Uniform>(&density.shape())) {
    return sample_uniform(u->body, m, seed, workers);
  }
  require_positive(density.dim(), m);
  auto data = generate_chunked(density.dim(), m, seed, workers,
                               [&](auto& block, Rng& rng) { fill_density_rows(density, block, rng); });
  return make_batch(std::move(data), seed, density.kind());
}

Direction sample_direction(Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_direction: dimension must be >= 1");
  Vector g(n);
  double sq = 0.0;
  do {
    for (Index i = 0; i < n; ++i) g[i] = rng.normal();
    sq = g.squaredNorm();
  } while (sq == 0.0);
  return Direction(g / std::sqrt(sq));
}

Direction sample_direction(Index n, RandomSeed seed) {
  Rng rng(seed);
  return sample_direction(n, rng);
}

Subspace sample_subspace(Index n, Index k, Rng& rng) {
  if (k < 1 || k > n) throw std::invalid_argument("sample_subspace: require 1 <= k <= n");
  // Row-major fill of the k x n gaussian frame, stored transposed for QR.
  Matrix frame(n, k);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < n; ++c) frame(c, r) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(frame);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const auto& packed = qr.matrixQR();
  for (Index i = 0; i < k; ++i) {
    if (packed(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return Subspace(q.transpose());
}

Subspace sample_subspace(Index n, Index k, RandomSeed seed) {
  Rng rng(seed);
  return sample_subspace(n, k, rng);
}

}  // namespace cltlab

#pragma once

#include "cltlab/model.hpp"
#include "cltlab/parallel.hpp"
#include "cltlab/rng.hpp"

#include <string>
#include <string_view>

namespace cltlab {

/// m samples in R^n, one per row, with enough provenance to regenerate them.
struct SampleBatch {
  RowMatrix data;
  RandomSeed seed;
  std::string sampler_id;
  long burn_in = 0;
  long thinning = 1;

  Index size() const { return data.rows(); }
  Index dim() const { return data.cols(); }
};

/// Rows per independent RNG stream. Chunk c of a batch seeded with `seed`
/// draws from seed.child(c), so output is independent of the worker count.
inline constexpr Index kChunkRows = 4096;
/// Rows in the pilot batch used to estimate standardizing maps.
inline constexpr Index kPilotRows = 200000;
/// Stream tag reserved for pilot batches.
inline constexpr std::uint64_t kPilotStream = 0x70696c6f74ull;

/// Fills `m` rows chunk by chunk; fill(block, rng) must write every entry of
/// `block` using only `rng`.
template <class Fill>
RowMatrix generate_chunked(Index n, Index m, RandomSeed seed, int workers, Fill&& fill) {
  RowMatrix out(m, n);
  const auto chunks = static_cast<std::size_t>((m + kChunkRows - 1) / kChunkRows);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const Index first = static_cast<Index>(c) * kChunkRows;
    const Index rows = std::min(kChunkRows, m - first);
    Rng rng(seed.child(c));
    auto block = out.middleRows(first, rows);
    fill(block, rng);
  });
  return out;
}

SampleBatch sample_cube(Index n, Index m, RandomSeed seed, int workers = 1);
SampleBatch sample_ball(Index n, Index m, RandomSeed seed, int workers = 1);
/// Uniform on the standard simplex; if `standardize`, whitened with a map
/// estimated from an independent pilot batch.
SampleBatch sample_simplex(Index n, Index m, RandomSeed seed, bool standardize, int workers = 1);
SampleBatch sample_gaussian(Index n, Index m, RandomSeed seed, double variance, int workers = 1);
/// Uniform on the sphere of the given radius (normalized gaussians).
SampleBatch sample_sphere(Index n, Index m, double radius, RandomSeed seed, int workers = 1);

struct HitAndRunConfig {
  long burn_in = 0;
  long thinning = 1;
  Point start;
  /// Independent chains; the m kept states are split between them in order.
  int chains = 1;

  /// burn_in = 10 n^2, thinning = n, start = body's canonical interior point.
  static HitAndRunConfig defaults(const BodySpec& body);
};

SampleBatch sample_hit_and_run(const BodySpec& body, Index m, RandomSeed seed,
                               const HitAndRunConfig& cfg, int workers = 1);

/// Exact sampler where one exists (everything but hpolytope), hit-and-run with
/// default settings otherwise. Simplex bodies honor their standardize flag.
SampleBatch sample_uniform(const BodySpec& body, Index m, RandomSeed seed, int workers = 1);
SampleBatch sample_density(const DensitySpec& density, Index m, RandomSeed seed, int workers = 1);

Direction sample_direction(Index n, RandomSeed seed);
Direction sample_direction(Index n, Rng& rng);
/// sigma_{n,k}: QR of a gaussian frame with the triangular factor's diagonal
/// made positive.
Subspace sample_subspace(Index n, Index k, RandomSeed seed);
Subspace sample_subspace(Index n, Index k, Rng& rng);

/// One draw from a named one-dimensional law (see kNamedLaws).
double sample_named_law(std::string_view label, Rng& rng);

/// Raw exact row generators (no standardization), used for streaming.
/// fill_uniform_rows throws std::invalid_argument for hpolytope bodies.
void fill_uniform_rows(const BodySpec& body, Eigen::Ref<RowMatrix> out, Rng& rng);
void fill_density_rows(const DensitySpec& density, Eigen::Ref<RowMatrix> out, Rng& rng);
/// True when fill_density_rows can serve the density (no MCMC needed).
bool has_exact_sampler(const DensitySpec& density);

}  // namespace cltlab

#pragma once

#include "cltlab/isotropy.hpp"
#include "cltlab/model.hpp"
#include "cltlab/parallel.hpp"
#include "cltlab/samplers.hpp"

#include <optional>

namespace cltlab {

/// Rows of a density's sample, generated chunk by chunk so that experiments
/// never hold an m x n block when m n is large. Chunk c always holds the same
/// rows whatever the worker count, so every reduction below is reproducible.
///
/// Densities that are not isotropic by construction are whitened with a map
/// estimated from a pilot batch on a separate stream. Bodies without an exact
/// sampler are served by one hit-and-run chain per chunk.
class SampleSource {
 public:
  SampleSource(DensitySpec density, RandomSeed seed, int workers);
  /// Uniform law on the sphere of the given radius in R^n (normalized
  /// gaussians), used as is without whitening.
  static SampleSource sphere(Index n, double radius, RandomSeed seed, int workers);

  Index dim() const { return density_.dim(); }
  int workers() const { return workers_; }
  const DensitySpec& density() const { return density_; }
  const std::optional<AffineMap>& whitening() const { return whitening_; }
  RandomSeed seed() const { return seed_; }

  /// Writes chunk c (rows [c kChunkRows, ...) of the stream) into `out`.
  void fill_chunk(std::size_t c, Eigen::Ref<RowMatrix> out) const;

  /// Calls fn(first_row, block) for every chunk of the first m rows, in
  /// parallel. fn must only write to per-row or per-chunk slots.
  template <class Fn>
  void for_each_chunk(Index m, Fn&& fn) const {
    const auto chunks = static_cast<std::size_t>((m + kChunkRows - 1) / kChunkRows);
    parallel_for(chunks, workers_, [&](std::size_t c) {
      const Index first = static_cast<Index>(c) * kChunkRows;
      RowMatrix block(std::min(kChunkRows, m - first), dim());
      fill_chunk(c, block);
      fn(first, block);
    });
  }

  /// Folds the first m rows into an accumulator: each chunk is reduced into a
  /// fresh copy of `init` by fn(acc, block), and the per-chunk partials are
  /// merged into the result strictly in chunk order, by merge(total, part).
  template <class Acc, class Fn, class Merge>
  Acc reduce(Index m, const Acc& init, Fn&& fn, Merge&& merge) const {
    const auto chunks = static_cast<std::size_t>((m + kChunkRows - 1) / kChunkRows);
    const std::size_t wave = static_cast<std::size_t>(std::max(1, resolve_workers(workers_))) * 2;
    Acc total = init;
    for (std::size_t start = 0; start < chunks; start += wave) {
      const std::size_t stop = std::min(chunks, start + wave);
      std::vector<Acc> parts(stop - start, init);
      parallel_for(stop - start, workers_, [&](std::size_t i) {
        const std::size_t c = start + i;
        const Index first = static_cast<Index>(c) * kChunkRows;
        RowMatrix block(std::min(kChunkRows, m - first), dim());
        fill_chunk(c, block);
        fn(parts[i], block);
      });
      for (auto& p : parts) merge(total, p);
    }
    return total;
  }

  /// The whole first m rows as a batch.
  SampleBatch materialize(Index m) const;

  /// Moments of the first min(m, 50000) rows against 5 sqrt(n / m_gate).
  IsotropyDiagnostics gate(Index m) const;

  std::string sampler_id() const;

 private:
  DensitySpec density_;
  RandomSeed seed_;
  int workers_;
  bool exact_;
  std::optional<AffineMap> whitening_;
  std::optional<BodySpec> mcmc_body_;
  std::optional<double> sphere_radius_;
};

/// Rows checked by SampleSource::gate.
inline constexpr Index kGateRows = 50000;

}  // namespace cltlab

#include "cltlab/experiments/source.hpp"

#include <stdexcept>

namespace cltlab {

SampleSource::SampleSource(DensitySpec density, RandomSeed seed, int workers)
    : density_(std::move(density)), seed_(seed), workers_(workers), exact_(has_exact_sampler(density_)) {
  if (!exact_) mcmc_body_ = std::get<density::Uniform>(density_.shape()).body;
  if (!density_.is_isotropic()) {
    const RandomSeed pilot_seed = seed_.child(kPilotStream);
    SampleBatch pilot;
    if (exact_) {
      pilot.data = generate_chunked(dim(), kPilotRows, pilot_seed, workers_,
                                    [&](auto& block, Rng& rng) { fill_density_rows(density_, block, rng); });
    } else {
      HitAndRunConfig cfg = HitAndRunConfig::defaults(*mcmc_body_);
      cfg.chains = 8;
      pilot = sample_hit_and_run(*mcmc_body_, kPilotRows, pilot_seed, cfg, workers_);
    }
    whitening_ = whitening_map(empirical_moments(pilot, workers_));
  }
}

SampleSource SampleSource::sphere(Index n, double radius, RandomSeed seed, int workers) {
  if (!(radius > 0.0)) throw std::invalid_argument("SampleSource::sphere: radius must be positive");
  // The gaussian density stands in for the dimension; it is never sampled.
  SampleSource s(DensitySpec::gaussian(n, 1.0), seed, workers);
  s.sphere_radius_ = radius;
  return s;
}

void SampleSource::fill_chunk(std::size_t c, Eigen::Ref<RowMatrix> out) const {
  if (out.cols() != dim()) throw std::invalid_argument("SampleSource: dimension mismatch");
  const RandomSeed s = seed_.child(c);
  if (sphere_radius_) {
    Rng rng(s);
    for (Index i = 0; i < out.rows(); ++i) out.row(i) = *sphere_radius_ * sample_direction(dim(), rng).coords().transpose();
    return;
  }
  if (exact_) {
    Rng rng(s);
    fill_density_rows(density_, out, rng);
  } else {
    out = sample_hit_and_run(*mcmc_body_, out.rows(), s, HitAndRunConfig::defaults(*mcmc_body_), 1).data;
  }
  if (whitening_) whitening_->apply_rows(out);
}

SampleBatch SampleSource::materialize(Index m) const {
  SampleBatch b;
  b.data.resize(m, dim());
  for_each_chunk(m, [&](Index first, const RowMatrix& block) { b.data.middleRows(first, block.rows()) = block; });
  b.seed = seed_;
  b.sampler_id = sampler_id();
  if (!exact_) {
    const HitAndRunConfig cfg = HitAndRunConfig::defaults(*mcmc_body_);
    b.burn_in = cfg.burn_in;
    b.thinning = cfg.thinning;
  }
  return b;
}

IsotropyDiagnostics SampleSource::gate(Index m) const {
  const Index rows = std::min(m, kGateRows);
  const MomentAccumulator acc = reduce(
      rows, MomentAccumulator(dim()), [](MomentAccumulator& a, const RowMatrix& block) { a.add(block); },
      [](MomentAccumulator& total, const MomentAccumulator& part) { total.merge(part); });
  return isotropy_report(acc.estimate(), default_isotropy_tolerance(dim(), rows));
}

std::string SampleSource::sampler_id() const {
  if (sphere_radius_) return "sphere";
  std::string id = exact_ ? density_.kind() : "hit_and_run(" + density_.kind() + ")";
  if (whitening_) id += "+affine:" + whitening_->fingerprint();
  return id;
}

}  // namespace cltlab

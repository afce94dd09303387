#include "cltlab/experiments/runners.hpp"

#include "cltlab/experiments/source.hpp"
#include "cltlab/marginals.hpp"
#include "cltlab/metrics.hpp"
#include "cltlab/special.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cltlab {

namespace {

constexpr std::uint64_t kSampleTag = 1;
constexpr std::uint64_t kDirectionTag = 2;
constexpr std::uint64_t kSubspaceTag = 3;
constexpr std::uint64_t kGlobalTag = 4;
constexpr std::uint64_t kBootstrapTag = 5;
constexpr std::uint64_t kChainTag = 6;
constexpr std::uint64_t kInnerDirectionTag = 7;

/// Bound on doubles held at once by a projection matrix.
constexpr double kProjectionBudget = 2.5e7;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::vector<Index> sorted_unique(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Json gate_json(const IsotropyDiagnostics& d) {
  return {{"max_abs_mean", d.max_abs_mean},
          {"max_abs_cov_deviation", d.max_abs_cov_deviation},
          {"min_eigenvalue", d.min_eigenvalue},
          {"max_eigenvalue", d.max_eigenvalue},
          {"tolerance", d.tolerance},
          {"passes", d.passes}};
}

/// Runs the isotropy gate, records it, and throws GateFailure on failure.
void gate(const SampleSource& src, Index m, ExperimentReport& rep, Index n) {
  const IsotropyDiagnostics d = src.gate(m);
  rep.summary["isotropy_gate"][std::to_string(n)] = gate_json(d);
  rep.summary["sampler"][std::to_string(n)] = src.sampler_id();
  if (!d.passes) {
    throw GateFailure("isotropy gate failed at n = " + std::to_string(n) + ": max |mean| = " + fmt(d.max_abs_mean) +
                      ", max |cov - I| = " + fmt(d.max_abs_cov_deviation) + ", tolerance " + fmt(d.tolerance));
  }
}

/// Projections of the first m rows onto the columns of `dirs` (n x D), as an
/// m x D column-major matrix.
Matrix project_stream(const SampleSource& src, Index m, const Matrix& dirs) {
  Matrix out(m, dirs.cols());
  src.for_each_chunk(m, [&](Index first, const RowMatrix& block) {
    out.middleRows(first, block.rows()).noalias() = block * dirs;
  });
  return out;
}

/// Processes the columns of `dirs` in groups small enough to keep the
/// projection matrix within budget; fn(column_index, projections) per column.
template <class Fn>
void for_each_projection(const SampleSource& src, Index m, const Matrix& dirs, int workers, Fn&& fn) {
  const Index group = std::max<Index>(1, static_cast<Index>(kProjectionBudget / static_cast<double>(m)));
  for (Index start = 0; start < dirs.cols(); start += group) {
    const Index cols = std::min(group, dirs.cols() - start);
    const Matrix p = project_stream(src, m, dirs.middleCols(start, cols));
    parallel_for(static_cast<std::size_t>(cols), workers, [&](std::size_t c) {
      fn(start + static_cast<Index>(c), p.col(static_cast<Index>(c)));
    });
  }
}

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// Kolmogorov and binned TV (width 0.05) of a one-dimensional sample against N(0, 1).
DistanceReport distances_1d(const Vector& values) {
  DistanceReport r;
  const std::vector<double> v = to_std(values);
  r.kolmogorov = kolmogorov_distance(ecdf(v));
  r.binned_tv = binned_tv(histogram_1d(v), std_normal_cdf);
  r.meta.sample_count = values.size();
  r.meta.bin_width = 0.05;
  r.meta.direction_count = 1;
  r.meta.grid = "[-6,6]";
  return r;
}

/// "values strictly decrease with 3 sigma separation between neighbours".
bool decreasing_3sigma(const std::vector<double>& v, const std::vector<double>& se, std::string& detail) {
  bool ok = true;
  std::ostringstream os;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double gap = v[i] - v[i + 1];
    const double sigma = std::sqrt(se[i] * se[i] + se[i + 1] * se[i + 1]);
    const double z = sigma > 0.0 ? gap / sigma : (gap > 0.0 ? kInf : 0.0);
    os << (i ? "; " : "") << fmt(v[i]) << " -> " << fmt(v[i + 1]) << " (" << fmt(z) << " sigma)";
    if (!(z >= 3.0)) ok = false;
  }
  detail = os.str();
  return ok;
}

Json stats_json(const std::vector<double>& v) {
  return {{"median", quantile(v, 0.5)},
          {"p10", quantile(v, 0.1)},
          {"p90", quantile(v, 0.9)},
          {"min", *std::min_element(v.begin(), v.end())},
          {"max", *std::max_element(v.begin(), v.end())}};
}

double fraction_at_most(const std::vector<double>& v, double threshold) {
  const auto c = std::count_if(v.begin(), v.end(), [&](double x) { return x <= threshold; });
  return static_cast<double>(c) / static_cast<double>(v.size());
}

bool is_gaussian(const ExperimentConfig& cfg, Index n) {
  return std::holds_alternative<density::Gaussian>(cfg.density(n).shape());
}

Matrix direction_matrix(const ExperimentConfig& cfg, Index n, int count) {
  Matrix dirs(n, count);
  for (int j = 0; j < count; ++j) {
    Rng rng(direction_seed(cfg, n).child(static_cast<std::uint64_t>(j)));
    dirs.col(j) = sample_direction(n, rng).coords();
  }
  return dirs;
}

Subspace subspace_at(const ExperimentConfig& cfg, Index n, Index k, int j) {
  Rng rng(direction_seed(cfg, n).child(static_cast<std::uint64_t>(j)));
  return sample_subspace(n, k, rng);
}

}  // namespace

RandomSeed sample_seed(const ExperimentConfig& cfg, Index n) {
  return cfg.seed.child(kSampleTag).child(static_cast<std::uint64_t>(n));
}

RandomSeed direction_seed(const ExperimentConfig& cfg, Index n) {
  return cfg.seed.child(kDirectionTag).child(static_cast<std::uint64_t>(n));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double bootstrap_median_se(std::span<const double> values, RandomSeed seed) {
  constexpr int kResamples = 200;
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  Rng rng(seed);
  std::vector<double> medians(kResamples);
  std::vector<double> draw(n);
  for (int b = 0; b < kResamples; ++b) {
    for (auto& d : draw) d = values[static_cast<std::size_t>(rng.uniform() * static_cast<double>(n))];
    medians[static_cast<std::size_t>(b)] = quantile(draw, 0.5);
  }
  const double mean = std::accumulate(medians.begin(), medians.end(), 0.0) / kResamples;
  double ss = 0.0;
  for (double m : medians) ss += (m - mean) * (m - mean);
  return std::sqrt(ss / (kResamples - 1));
}

double diaconis_freedman_bound(Index n, Index k) {
  return 2.0 * static_cast<double>(k + 3) / static_cast<double>(n - k - 3);
}

// ---------------------------------------------------------------------------

ExperimentReport run_thin_shell(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config = cfg;
  const std::vector<Index> ns = sorted_unique(cfg.n_values);
  const std::size_t ne = cfg.epsilon_grid.size();
  Table table{"thin_shell", {"n", "epsilon", "probability", "std_error", "hits", "m"}, {}};
  Table norms{"norm_moments", {"n", "mean_sq_norm_over_n"}, {}};
  // prob[e][i] for epsilon e at ns[i].
  std::vector<std::vector<double>> prob(ne), se(ne);
  std::vector<std::vector<double>> exact_at_check;

  struct Acc {
    std::vector<long long> hits;
    double sq = 0.0;
  };
  for (Index n : ns) {
    const SampleSource src(cfg.density(n), sample_seed(cfg, n), cfg.workers);
    gate(src, cfg.m, rep, n);
    const double root_n = std::sqrt(static_cast<double>(n));
    const Acc acc = src.reduce(
        cfg.m, Acc{std::vector<long long>(ne, 0), 0.0},
        [&](Acc& a, const RowMatrix& block) {
          for (Index i = 0; i < block.rows(); ++i) {
            const double sq = block.row(i).squaredNorm();
            a.sq += sq;
            const double dev = std::abs(std::sqrt(sq) / root_n - 1.0);
            for (std::size_t e = 0; e < ne; ++e) {
              if (dev >= cfg.epsilon_grid[e]) ++a.hits[e];
            }
          }
        },
        [](Acc& total, const Acc& part) {
          for (std::size_t e = 0; e < total.hits.size(); ++e) total.hits[e] += part.hits[e];
          total.sq += part.sq;
        });
    const double m = static_cast<double>(cfg.m);
    for (std::size_t e = 0; e < ne; ++e) {
      const double p = static_cast<double>(acc.hits[e]) / m;
      const double s = std::sqrt(p * (1.0 - p) / m);
      prob[e].push_back(p);
      se[e].push_back(s);
      table.add({n, cfg.epsilon_grid[e], p, s, acc.hits[e], cfg.m});
    }
    norms.add({n, acc.sq / (m * static_cast<double>(n))});
  }

  for (std::size_t e = 0; e < ne; ++e) {
    const double eps = cfg.epsilon_grid[e];
    PlotSeries plot{"probability_eps" + fmt(eps), "n", "probability", {}, prob[e]};
    for (Index n : ns) plot.x.push_back(static_cast<double>(n));
    rep.plots.push_back(std::move(plot));
    if (eps == 0.0) {
      const bool certain = std::all_of(prob[e].begin(), prob[e].end(), [](double p) { return p == 1.0; });
      rep.check("epsilon=0 gives probability 1", certain, "the event |X|/sqrt(n) - 1| >= 0 is certain");
      continue;
    }
    if (ns.size() >= 2) {
      std::string detail;
      const bool ok = decreasing_3sigma(prob[e], se[e], detail);
      rep.check("decreasing in n at epsilon=" + fmt(eps), ok, detail);
    }
  }

  if (cfg.hit_and_run_check) {
    const auto [hn, hm] = *cfg.hit_and_run_check;
    const DensitySpec dens = cfg.density(hn);
    const auto* u = std::get_if<density::Uniform>(&dens.shape());
    if (!u) throw std::invalid_argument("hit_and_run_check needs a uniform-on-body input");
    const SampleSource src(dens, sample_seed(cfg, hn), cfg.workers);
    SampleBatch chain = sample_hit_and_run(u->body, hm, cfg.seed.child(kChainTag), HitAndRunConfig::defaults(u->body),
                                           cfg.workers);
    if (src.whitening()) src.whitening()->apply_rows(chain.data);
    // Exact reference at the same n, from the experiment's own stream.
    std::vector<long long> exact_hits(ne, 0);
    const std::vector<long long> hits = src.reduce(
        cfg.m, exact_hits,
        [&](std::vector<long long>& h, const RowMatrix& block) {
          for (Index i = 0; i < block.rows(); ++i) {
            const double dev = std::abs(block.row(i).norm() / std::sqrt(static_cast<double>(hn)) - 1.0);
            for (std::size_t e = 0; e < ne; ++e) h[e] += dev >= cfg.epsilon_grid[e];
          }
        },
        [](std::vector<long long>& t, const std::vector<long long>& p) {
          for (std::size_t e = 0; e < t.size(); ++e) t[e] += p[e];
        });
    // Batch means give the chain's standard error despite autocorrelation.
    constexpr Index kBatches = 50;
    Table t{"hit_and_run_check", {"n", "epsilon", "chain_probability", "chain_std_error", "exact_probability",
                                  "exact_std_error", "z"}, {}};
    for (std::size_t e = 0; e < ne; ++e) {
      std::vector<double> means;
      const Index per = hm / kBatches;
      long long total = 0;
      for (Index b = 0; b < kBatches; ++b) {
        long long c = 0;
        for (Index i = b * per; i < (b + 1) * per; ++i) {
          c += std::abs(chain.data.row(i).norm() / std::sqrt(static_cast<double>(hn)) - 1.0) >= cfg.epsilon_grid[e];
        }
        total += c;
        means.push_back(static_cast<double>(c) / static_cast<double>(per));
      }
      const double pc = static_cast<double>(total) / static_cast<double>(per * kBatches);
      double ss = 0.0;
      for (double x : means) ss += (x - pc) * (x - pc);
      const double sc = std::sqrt(ss / (kBatches - 1) / kBatches);
      const double pe = static_cast<double>(hits[e]) / static_cast<double>(cfg.m);
      const double sx = std::sqrt(pe * (1.0 - pe) / static_cast<double>(cfg.m));
      const double sigma = std::sqrt(sc * sc + sx * sx);
      const double z = sigma > 0.0 ? std::abs(pc - pe) / sigma : (pc == pe ? 0.0 : kInf);
      t.add({hn, cfg.epsilon_grid[e], pc, sc, pe, sx, z});
      rep.check("hit-and-run agrees with exact sampler at n=" + std::to_string(hn) + ", epsilon=" +
                    fmt(cfg.epsilon_grid[e]),
                z <= 3.0, "chain " + fmt(pc) + " vs exact " + fmt(pe) + " (" + fmt(z) + " sigma)");
    }
    rep.tables.push_back(std::move(t));
  }
  rep.tables.insert(rep.tables.begin(), std::move(norms));
  rep.tables.insert(rep.tables.begin(), std::move(table));
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_clt_marginal(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config = cfg;
  const std::vector<Index> ns = sorted_unique(cfg.n_values);
  const int dcount = cfg.direction_count;
  Table per_dir{"directions", {"n", "direction", "kolmogorov", "binned_tv"}, {}};
  Table summary{"summary", {"n", "median_kolmogorov", "median_se", "p90_kolmogorov", "pass_fraction",
                            "median_binned_tv", "p90_binned_tv", "e1_kolmogorov", "e1_binned_tv"}, {}};
  std::vector<double> medians, median_se;
  for (Index n : ns) {
    const SampleSource src(cfg.density(n), sample_seed(cfg, n), cfg.workers);
    gate(src, cfg.m, rep, n);
    Matrix dirs(n, dcount + 1);
    dirs.leftCols(dcount) = direction_matrix(cfg, n, dcount);
    dirs.col(dcount) = Vector::Unit(n, 0);
    std::vector<DistanceReport> d(static_cast<std::size_t>(dcount + 1));
    for_each_projection(src, cfg.m, dirs, cfg.workers,
                        [&](Index j, const Vector& p) { d[static_cast<std::size_t>(j)] = distances_1d(p); });
    std::vector<double> ks, tvs;
    for (int j = 0; j < dcount; ++j) {
      ks.push_back(d[static_cast<std::size_t>(j)].kolmogorov);
      tvs.push_back(d[static_cast<std::size_t>(j)].binned_tv);
      per_dir.add({n, j, ks.back(), tvs.back()});
    }
    const DistanceReport& e1 = d.back();
    const double med = quantile(ks, 0.5);
    const double mse = bootstrap_median_se(ks, cfg.seed.child(kBootstrapTag).child(static_cast<std::uint64_t>(n)));
    medians.push_back(med);
    median_se.push_back(mse);
    const double pass = fraction_at_most(ks, cfg.threshold);
    summary.add({n, med, mse, quantile(ks, 0.9), pass, quantile(tvs, 0.5), quantile(tvs, 0.9), e1.kolmogorov,
                 e1.binned_tv});
    Json s;
    s["kolmogorov"] = stats_json(ks);
    s["binned_tv"] = stats_json(tvs);
    s["median_kolmogorov_se"] = mse;
    s["pass_fraction"] = pass;
    s["threshold"] = cfg.threshold;
    s["e1"] = e1.to_json();
    rep.summary["per_n"][std::to_string(n)] = std::move(s);

    if (is_gaussian(cfg, n)) {
      const double floor = 1.628 / std::sqrt(static_cast<double>(cfg.m));
      rep.check("gaussian input at noise floor (n=" + std::to_string(n) + ")", quantile(ks, 0.9) <= floor,
                "p90 Kolmogorov " + fmt(quantile(ks, 0.9)) + " vs 1.628/sqrt(m) = " + fmt(floor));
    }
  }
  rep.summary["note"] =
      "e1 is reported separately and excluded from the random-direction statistics; binned TV uses the factor-2 "
      "convention and underestimates the continuous distance";
  if (ns.size() >= 2 && !is_gaussian(cfg, ns.front())) {
    std::string detail;
    const bool ok = decreasing_3sigma(medians, median_se, detail);
    rep.check("median Kolmogorov decreasing in n", ok, detail);
  }
  PlotSeries plot{"median_kolmogorov", "n", "median_kolmogorov", {}, medians};
  for (Index n : ns) plot.x.push_back(static_cast<double>(n));
  rep.plots.push_back(std::move(plot));
  rep.tables.push_back(std::move(summary));
  rep.tables.push_back(std::move(per_dir));
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_unconditional_diag(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config = cfg;
  const std::vector<Index> ns = sorted_unique(cfg.n_values);
  Table table{"unconditional", {"n", "kolmogorov", "binned_tv", "third_abs_moment", "berry_esseen_ceiling"}, {}};
  std::vector<double> ks;
  for (Index n : ns) {
    const DensitySpec dens = cfg.density(n);
    if (!dens.is_unconditional()) {
      throw std::invalid_argument("unconditional_diag: input '" + dens.kind() + "' is not unconditional");
    }
    const SampleSource src(dens, sample_seed(cfg, n), cfg.workers);
    gate(src, cfg.m, rep, n);
    const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n));
    Vector sums(cfg.m);
    const auto chunks = static_cast<std::size_t>((cfg.m + kChunkRows - 1) / kChunkRows);
    std::vector<double> cubes(chunks, 0.0);
    src.for_each_chunk(cfg.m, [&](Index first, const RowMatrix& block) {
      sums.segment(first, block.rows()) = block.rowwise().sum() * inv_root_n;
      cubes[static_cast<std::size_t>(first / kChunkRows)] = block.array().abs().cube().sum();
    });
    const double rho = std::accumulate(cubes.begin(), cubes.end(), 0.0) /
                       (static_cast<double>(cfg.m) * static_cast<double>(n));
    const DistanceReport d = distances_1d(sums);
    const double ceiling = kBerryEsseen * rho * inv_root_n;
    ks.push_back(d.kolmogorov);
    table.add({n, d.kolmogorov, d.binned_tv, rho, ceiling});
    Json s = d.to_json();
    s["third_abs_moment"] = rho;
    s["berry_esseen_ceiling"] = ceiling;
    rep.summary["per_n"][std::to_string(n)] = std::move(s);
    rep.check("Kolmogorov <= " + fmt(cfg.threshold) + " at n=" + std::to_string(n), d.kolmogorov <= cfg.threshold,
              "Kolmogorov " + fmt(d.kolmogorov));
    rep.check("Kolmogorov below Berry-Esseen ceiling at n=" + std::to_string(n), d.kolmogorov <= ceiling,
              fmt(d.kolmogorov) + " <= " + fmt(ceiling));
  }
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) decreasing = decreasing && ks[i + 1] < ks[i];
  rep.summary["trend_decreasing"] = decreasing;
  rep.summary["note"] = "theta = (1, ..., 1) / sqrt(n); the trend is reported, not asserted, since at large n both "
                        "distances sit at the Monte Carlo noise floor";
  PlotSeries plot{"kolmogorov", "n", "kolmogorov", {}, ks};
  for (Index n : ns) plot.x.push_back(static_cast<double>(n));
  rep.plots.push_back(std::move(plot));
  rep.tables.push_back(std::move(table));
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_multidim_marginal(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config = cfg;
  const std::vector<Index> ns = sorted_unique(cfg.n_values);
  const std::vector<Index> ks = sorted_unique(cfg.k_values);
  const int sc = cfg.subspace_count;
  const TGrid grid;
  Table per_sub{"subspaces", {"n", "k", "subspace", "t_distance", "kolmogorov", "binned_tv"}, {}};
  Table summary{"summary", {"n", "k", "median_t_distance", "p90_t_distance", "pass_fraction", "median_binned_tv"}, {}};
  for (Index n : ns) {
    const SampleSource src(cfg.density(n), sample_seed(cfg, n), cfg.workers);
    gate(src, cfg.m, rep, n);
    for (Index k : ks) {
      if (k > 3) {
        rep.warnings.push_back("k = " + std::to_string(k) +
                               " > 3: binned TV is unreliable and skipped; T-distance only");
      }
      std::vector<Subspace> subs;
      Matrix frames(n, sc * k);
      for (int j = 0; j < sc; ++j) {
        subs.push_back(subspace_at(cfg, n, k, j));
        frames.middleCols(j * k, k) = subs.back().basis().transpose();
      }
      // Whole subspaces per group, so each task sees all k columns at once.
      const Index per_group =
          std::max<Index>(1, static_cast<Index>(kProjectionBudget / (static_cast<double>(cfg.m) * k)));
      std::vector<double> tds(static_cast<std::size_t>(sc)), kol(static_cast<std::size_t>(sc), kInf),
          btv(static_cast<std::size_t>(sc), std::numeric_limits<double>::quiet_NaN());
      for (int start = 0; start < sc; start += static_cast<int>(per_group)) {
        const int count = std::min(sc - start, static_cast<int>(per_group));
        const Matrix p = project_stream(src, cfg.m, frames.middleCols(start * k, count * k));
        parallel_for(static_cast<std::size_t>(count), cfg.workers, [&](std::size_t i) {
          const auto j = static_cast<std::size_t>(start) + i;
          const RowMatrix y = p.middleCols(static_cast<Index>(i) * k, k);
          const RandomSeed inner =
              direction_seed(cfg, n).child(kInnerDirectionTag).child(static_cast<std::uint64_t>(k)).child(j);
          tds[j] = t_distance(y, cfg.direction_count, grid, inner, 1);
          if (k == 1) {
            const DistanceReport d = distances_1d(y.col(0));
            kol[j] = d.kolmogorov;
            btv[j] = d.binned_tv;
          } else if (k <= 3) {
            btv[j] = binned_tv_gaussian(histogram_nd(y));
          }
        });
      }
      for (int j = 0; j < sc; ++j) {
        const auto u = static_cast<std::size_t>(j);
        per_sub.add({n, k, j, tds[u], k == 1 ? Json(kol[u]) : Json(nullptr),
                     std::isnan(btv[u]) ? Json(nullptr) : Json(btv[u])});
      }
      const double pass = fraction_at_most(tds, cfg.threshold);
      const double med_tv = k <= 3 ? quantile(btv, 0.5) : std::numeric_limits<double>::quiet_NaN();
      summary.add({n, k, quantile(tds, 0.5), quantile(tds, 0.9), pass, std::isnan(med_tv) ? Json(nullptr) : Json(med_tv)});
      Json s;
      s["t_distance"] = stats_json(tds);
      s["pass_fraction"] = pass;
      s["threshold"] = cfg.threshold;
      s["estimator"] = {{"sample_count", cfg.m}, {"direction_count", cfg.direction_count}, {"grid", "-6:0.01:6"},
                        {"bin_width", k == 1 ? 0.05 : 0.2}};
      if (k <= 3) s["binned_tv"] = stats_json(btv);
      if (k >= 2 && k <= 3) {
        s["binned_tv_note"] = "product binning of width 0.2 on [-6,6]^k: a lower bound on d_TV with uncontrolled gap";
      }
      rep.summary["per_nk"][std::to_string(n) + "," + std::to_string(k)] = std::move(s);
      rep.check("T-distance <= " + fmt(cfg.threshold) + " for >= " + fmt(cfg.pass_fraction) +
                    " of subspaces (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")",
                pass >= cfg.pass_fraction, "fraction " + fmt(pass));
      if (is_gaussian(cfg, n)) {
        const double floor = 2.5 / std::sqrt(static_cast<double>(cfg.m));
        rep.check("gaussian input at noise floor (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")",
                  quantile(tds, 0.5) <= floor,
                  "median T-distance " + fmt(quantile(tds, 0.5)) + " vs 2.5/sqrt(m) = " + fmt(floor));
      }
    }
  }
  rep.tables.push_back(std::move(summary));
  rep.tables.push_back(std::move(per_sub));
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_diaconis_freedman(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config = cfg;
  Table table{"diaconis_freedman", {"n", "k", "binned_tv", "noise_floor", "bound", "bound_plus_slack", "vacuous"}, {}};
  std::vector<Index> ns;
  for (const auto& pr : cfg.pairs) ns.push_back(pr.first);
  ns = sorted_unique(ns);
  for (Index n : ns) {
    std::vector<Index> ks;
    for (const auto& [pn, pk] : cfg.pairs) {
      if (pn == n) ks.push_back(pk);
    }
    ks = sorted_unique(ks);
    const SampleSource src = SampleSource::sphere(n, std::sqrt(static_cast<double>(n)), sample_seed(cfg, n), cfg.workers);
    std::vector<Subspace> subs;
    for (Index k : ks) subs.push_back(subspace_at(cfg, n, k, 0));

    // One histogram per k; k = 1 uses width 0.05, larger k width 0.2.
    struct Acc {
      std::vector<std::vector<long long>> counts;
      std::vector<Index> out;
    };
    std::vector<Index> bins(ks.size());
    std::vector<double> widths(ks.size());
    Acc init;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      widths[i] = ks[i] == 1 ? 0.05 : 0.2;
      bins[i] = static_cast<Index>(std::llround(12.0 / widths[i]));
      init.counts.emplace_back(static_cast<std::size_t>(std::pow(static_cast<double>(bins[i]), static_cast<double>(ks[i]))), 0);
      init.out.push_back(0);
    }
    const Acc acc = src.reduce(
        cfg.m, init,
        [&](Acc& a, const RowMatrix& block) {
          for (std::size_t i = 0; i < ks.size(); ++i) {
            const RowMatrix y = block * subs[i].basis().transpose();
            const HistogramND h = histogram_nd(y, -6.0, 6.0, widths[i]);
            for (std::size_t c = 0; c < h.counts.size(); ++c) a.counts[i][c] += h.counts[c];
            a.out[i] += h.out_of_range;
          }
        },
        [](Acc& t, const Acc& p) {
          for (std::size_t i = 0; i < t.counts.size(); ++i) {
            for (std::size_t c = 0; c < t.counts[i].size(); ++c) t.counts[i][c] += p.counts[i][c];
            t.out[i] += p.out[i];
          }
        });
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const Index k = ks[i];
      HistogramND h;
      h.k = k;
      h.lo = -6.0;
      h.hi = 6.0;
      h.bin_width = widths[i];
      h.bins_per_axis = bins[i];
      h.counts = acc.counts[i];
      h.total = cfg.m;
      h.out_of_range = acc.out[i];
      const double tv = binned_tv_gaussian(h);
      // Expected sum |p_hat - p| for an exact sample: sum sqrt(2 p / (pi m)).
      double floor = 0.0;
      {
        std::vector<double> axis(static_cast<std::size_t>(bins[i]));
        for (std::size_t b = 0; b < axis.size(); ++b) {
          const double a = -6.0 + static_cast<double>(b) * widths[i];
          axis[b] = std_normal_cdf(a + widths[i]) - std_normal_cdf(a);
        }
        for (std::size_t flat = 0; flat < h.counts.size(); ++flat) {
          double p = 1.0;
          std::size_t rest = flat;
          for (Index a = 0; a < k; ++a) {
            p *= axis[rest % axis.size()];
            rest /= axis.size();
          }
          floor += std::sqrt(2.0 * p * (1.0 - p) / (M_PI * static_cast<double>(cfg.m)));
        }
      }
      const double bound = diaconis_freedman_bound(n, k);
      const bool vacuous = bound >= 2.0;
      table.add({n, k, tv, floor, bound, bound + cfg.threshold, vacuous});
      const std::string label = "(n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")";
      if (vacuous) {
        rep.warnings.push_back("bound is vacuous (>= 2) at " + label);
        rep.check("binned TV within bound " + label, true, "vacuous bound " + fmt(bound) + "; nothing to check");
      } else {
        rep.check("binned TV within bound " + label, tv <= bound + cfg.threshold,
                  fmt(tv) + " <= " + fmt(bound) + " + " + fmt(cfg.threshold));
      }
    }
  }
  rep.summary["note"] = "X uniform on sqrt(n) S^{n-1}; binned TV (factor-2 convention) of Proj_E X against the "
                        "standard gaussian on E, bins of width 0.05 (k=1) or 0.2 (k>=2) on [-6,6]^k";
  rep.tables.push_back(std::move(table));
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_jl_check(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config = cfg;
  const std::vector<Index> ns = sorted_unique(cfg.n_values);
  const std::vector<Index> ks = sorted_unique(cfg.k_values);
  const int count = cfg.subspace_count;
  Table moments{"ratio_moments", {"n", "k", "mean_ratio", "std_error", "expected", "z"}, {}};
  Table table{"deviation", {"n", "k", "epsilon", "probability", "std_error"}, {}};
  for (Index n : ns) {
    const Vector x = cfg.jl_point ? *cfg.jl_point : Vector(std::sqrt(static_cast<double>(n)) * Vector::Unit(n, 0));
    const double x_sq = x.squaredNorm();
    std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_eps;
    for (Index k : ks) {
      std::vector<double> ratio(static_cast<std::size_t>(count));
      const RandomSeed base = cfg.seed.child(kSubspaceTag).child(static_cast<std::uint64_t>(n)).child(static_cast<std::uint64_t>(k));
      parallel_for(ratio.size(), cfg.workers, [&](std::size_t j) {
        const Subspace e = sample_subspace(n, k, base.child(j));
        ratio[j] = project(e, x).squaredNorm() / x_sq;
      });
      const double kn = static_cast<double>(k) / static_cast<double>(n);
      const double mean = std::accumulate(ratio.begin(), ratio.end(), 0.0) / count;
      double ss = 0.0;
      for (double r : ratio) ss += (r - mean) * (r - mean);
      const double se = std::sqrt(ss / (count - 1) / count);
      const double z = se > 0.0 ? std::abs(mean - kn) / se : 0.0;
      moments.add({n, k, mean, se, kn, z});
      rep.check("mean |Proj x|^2/|x|^2 = k/n (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")", z <= 3.0,
                fmt(mean) + " vs " + fmt(kn) + " (" + fmt(z) + " se)");
      for (double eps : cfg.epsilon_grid) {
        const double target = std::sqrt(kn);
        const auto hits = std::count_if(ratio.begin(), ratio.end(),
                                        [&](double r) { return std::abs(std::sqrt(r) - target) >= eps * target; });
        const double p = static_cast<double>(hits) / count;
        const double s = std::sqrt(p * (1.0 - p) / count);
        table.add({n, k, eps, p, s});
        by_eps[eps].first.push_back(p);
        by_eps[eps].second.push_back(s);
      }
    }
    for (const auto& [eps, ps] : by_eps) {
      if (eps == 0.0) {
        const bool certain = std::all_of(ps.first.begin(), ps.first.end(), [](double p) { return p == 1.0; });
        rep.check("epsilon=0 gives probability 1 (n=" + std::to_string(n) + ")", certain, "");
        continue;
      }
      if (ks.size() >= 2) {
        std::string detail;
        const bool ok = decreasing_3sigma(ps.first, ps.second, detail);
        rep.check("deviation probability decreasing in k (n=" + std::to_string(n) + ", epsilon=" + fmt(eps) + ")", ok,
                  detail);
      }
    }
  }
  rep.tables.push_back(std::move(moments));
  rep.tables.push_back(std::move(table));
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_mf_concentration(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config = cfg;
  const std::vector<Index> ns = sorted_unique(cfg.n_values);
  const std::vector<Index> ls = sorted_unique(cfg.k_values);
  const std::vector<double>& ts = cfg.t_grid;
  const std::size_t nt = ts.size();
  const int sc = cfg.subspace_count;
  const int dps = cfg.directions_per_subspace;
  const int gcount = cfg.global_direction_count;
  Table table{"oscillation", {"n", "l", "t", "sphere_average", "median_within_subspace", "median_se",
                              "p90_within_subspace", "median_global_group"}, {}};
  // medians[(l, t)] over the n sweep.
  std::map<std::pair<Index, std::size_t>, std::pair<std::vector<double>, std::vector<double>>> sweep;

  for (Index n : ns) {
    const SampleSource src(cfg.density(n), sample_seed(cfg, n), cfg.workers);
    gate(src, cfg.m, rep, n);
    Rng grng(cfg.seed.child(kGlobalTag).child(static_cast<std::uint64_t>(n)));
    Matrix global(n, gcount);
    for (int g = 0; g < gcount; ++g) global.col(g) = sample_direction(n, grng).coords();

    for (Index l : ls) {
      // Frames of the subspaces and, in their own coordinates, the directions.
      Matrix frames(n, sc * l);
      std::vector<Matrix> inner(static_cast<std::size_t>(sc));
      for (int s = 0; s < sc; ++s) {
        Rng rng(cfg.seed.child(kSubspaceTag).child(static_cast<std::uint64_t>(n)).child(static_cast<std::uint64_t>(l)).child(
            static_cast<std::uint64_t>(s)));
        const Subspace e = sample_subspace(n, l, rng);
        frames.middleCols(s * l, l) = e.basis().transpose();
        Matrix u(l, dps);
        for (int d = 0; d < dps; ++d) u.col(d) = sample_direction(l, rng).coords();
        inner[static_cast<std::size_t>(s)] = std::move(u);
      }
      const std::size_t slots = static_cast<std::size_t>(sc * dps + gcount) * nt;
      auto count_into = [&](std::vector<long long>& c, std::size_t base, const Vector& p) {
        for (double v : p) {
          for (std::size_t ti = 0; ti < nt; ++ti) c[base * nt + ti] += v <= ts[ti];
        }
      };
      const std::vector<long long> counts = src.reduce(
          cfg.m, std::vector<long long>(slots, 0),
          [&](std::vector<long long>& c, const RowMatrix& block) {
            const Matrix y = block * frames;
            for (int s = 0; s < sc; ++s) {
              const Matrix proj = y.middleCols(s * l, l) * inner[static_cast<std::size_t>(s)];
              for (int d = 0; d < dps; ++d) count_into(c, static_cast<std::size_t>(s * dps + d), proj.col(d));
            }
            const Matrix gp = block * global;
            for (int g = 0; g < gcount; ++g) count_into(c, static_cast<std::size_t>(sc * dps + g), gp.col(g));
          },
          [](std::vector<long long>& t, const std::vector<long long>& p) {
            for (std::size_t i = 0; i < t.size(); ++i) t[i] += p[i];
          });
      const double m = static_cast<double>(cfg.m);
      auto mhat = [&](std::size_t slot, std::size_t ti) { return static_cast<double>(counts[slot * nt + ti]) / m; };
      for (std::size_t ti = 0; ti < nt; ++ti) {
        std::vector<double> osc(static_cast<std::size_t>(sc));
        for (int s = 0; s < sc; ++s) {
          double lo = 1.0, hi = 0.0;
          for (int d = 0; d < dps; ++d) {
            const double v = mhat(static_cast<std::size_t>(s * dps + d), ti);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
          osc[static_cast<std::size_t>(s)] = hi - lo;
        }
        double avg = 0.0;
        std::vector<double> gosc;
        for (int g0 = 0; g0 + dps <= gcount; g0 += dps) {
          double lo = 1.0, hi = 0.0;
          for (int g = g0; g < g0 + dps; ++g) {
            const double v = mhat(static_cast<std::size_t>(sc * dps + g), ti);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
          gosc.push_back(hi - lo);
        }
        for (int g = 0; g < gcount; ++g) avg += mhat(static_cast<std::size_t>(sc * dps + g), ti);
        avg /= gcount;
        const double med = quantile(osc, 0.5);
        const double se = bootstrap_median_se(
            osc, cfg.seed.child(kBootstrapTag).child(static_cast<std::uint64_t>(n)).child(static_cast<std::uint64_t>(l)).child(ti));
        const double gmed = quantile(gosc, 0.5);
        table.add({n, l, ts[ti], avg, med, se, quantile(osc, 0.9), gmed});
        sweep[{l, ti}].first.push_back(med);
        sweep[{l, ti}].second.push_back(se);
        const std::string label = "(n=" + std::to_string(n) + ", l=" + std::to_string(l) + ", t=" + fmt(ts[ti]) + ")";
        rep.check("within-subspace oscillation below global-group oscillation " + label, med < gmed,
                  fmt(med) + " < " + fmt(gmed));
        if (is_gaussian(cfg, n)) {
          const double floor = 3.0 / std::sqrt(m);
          rep.check("gaussian input at noise level " + label, med <= floor, fmt(med) + " <= 3/sqrt(m) = " + fmt(floor));
        }
      }
    }
  }
  if (ns.size() >= 2 && !is_gaussian(cfg, ns.front())) {
    for (const auto& [key, v] : sweep) {
      std::string detail;
      const bool ok = decreasing_3sigma(v.first, v.second, detail);
      rep.check("oscillation decreasing in n (l=" + std::to_string(key.first) + ", t=" + fmt(ts[key.second]) + ")", ok,
                detail);
    }
  }
  rep.summary["note"] = "oscillation = max - min of the estimated M_f(theta, t) over the directions of one random "
                        "l-dimensional subspace; global groups use the same number of independent directions";
  rep.tables.push_back(std::move(table));
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  switch (cfg.experiment) {
    case ExperimentKind::thin_shell:
      rep = run_thin_shell(cfg);
      break;
    case ExperimentKind::clt_marginal:
      rep = run_clt_marginal(cfg);
      break;
    case ExperimentKind::unconditional_diag:
      rep = run_unconditional_diag(cfg);
      break;
    case ExperimentKind::multidim_marginal:
      rep = run_multidim_marginal(cfg);
      break;
    case ExperimentKind::diaconis_freedman:
      rep = run_diaconis_freedman(cfg);
      break;
    case ExperimentKind::jl_check:
      rep = run_jl_check(cfg);
      break;
    case ExperimentKind::mf_concentration:
      rep = run_mf_concentration(cfg);
      break;
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace cltlab

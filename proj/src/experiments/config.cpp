#include "cltlab/experiments/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace cltlab {

namespace {

struct Named {
  ExperimentKind kind;
  std::string_view name;
};

constexpr Named kNames[] = {
    {ExperimentKind::thin_shell, "thin_shell"},
    {ExperimentKind::clt_marginal, "clt_marginal"},
    {ExperimentKind::unconditional_diag, "unconditional_diag"},
    {ExperimentKind::multidim_marginal, "multidim_marginal"},
    {ExperimentKind::diaconis_freedman, "diaconis_freedman"},
    {ExperimentKind::jl_check, "jl_check"},
    {ExperimentKind::mf_concentration, "mf_concentration"},
};

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  throw std::invalid_argument("config field '" + field + "': " + msg);
}

Index positive_index(const Json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 1) bad(field, "expected a positive integer");
  return static_cast<Index>(v.get<long long>());
}

std::vector<Index> index_list(const Json& v, const std::string& field) {
  std::vector<Index> out;
  if (v.is_array()) {
    if (v.empty()) bad(field, "list must not be empty");
    for (const auto& e : v) out.push_back(positive_index(e, field));
  } else {
    out.push_back(positive_index(v, field));
  }
  return out;
}

std::vector<double> real_list(const Json& v, const std::string& field) {
  std::vector<double> out;
  const Json arr = v.is_array() ? v : Json::array({v});
  if (arr.empty()) bad(field, "list must not be empty");
  for (const auto& e : arr) {
    if (!e.is_number()) bad(field, "expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

double real(const Json& v, const std::string& field) {
  if (!v.is_number()) bad(field, "expected a number");
  return v.get<double>();
}

int count(const Json& v, const std::string& field) {
  const Index c = positive_index(v, field);
  if (c > 100000000) bad(field, "too large");
  return static_cast<int>(c);
}

const std::set<std::string> kKnownKeys = {
    "experiment", "body_or_density", "n", "k", "m", "direction_count", "epsilon_grid", "seed", "workers",
    "out_dir", "pairs", "subspace_count", "t_grid", "threshold", "pass_fraction", "global_direction_count",
    "directions_per_subspace", "hit_and_run_check", "x"};

void defaults_for(ExperimentConfig& c) {
  c.body_or_density = Json{{"type", "cube"}};
  switch (c.experiment) {
    case ExperimentKind::thin_shell:
      c.n_values = {16, 64, 256};
      c.m = 1000000;
      c.epsilon_grid = {0.1};
      break;
    case ExperimentKind::clt_marginal:
      c.n_values = {16, 64};
      c.m = 100000;
      c.threshold = 0.02;
      break;
    case ExperimentKind::unconditional_diag:
      c.n_values = {16, 64, 256};
      c.m = 1000000;
      c.threshold = 0.01;
      break;
    case ExperimentKind::multidim_marginal:
      c.n_values = {100};
      c.k_values = {2};
      c.m = 100000;
      c.threshold = 0.02;
      break;
    case ExperimentKind::diaconis_freedman:
      c.pairs = {{50, 1}, {200, 1}, {200, 3}};
      c.m = 10000000;
      c.threshold = 0.02;
      break;
    case ExperimentKind::jl_check:
      c.n_values = {100};
      c.k_values = {4, 25};
      c.epsilon_grid = {0.2};
      c.subspace_count = 100000;
      break;
    case ExperimentKind::mf_concentration:
      c.n_values = {50, 200};
      c.k_values = {2};
      c.m = 100000;
      c.t_grid = {0.0};
      break;
  }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& n : kNames) {
    if (n.kind == kind) return n.name;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.kind;
  }
  return std::nullopt;
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> all = [] {
    std::vector<ExperimentKind> v;
    for (const auto& n : kNames) v.push_back(n.kind);
    return v;
  }();
  return all;
}

DensitySpec ExperimentConfig::density(Index n) const { return density_from_json(body_or_density, n); }

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.count(key)) bad(key, "unknown field");
  }
  if (!j.contains("experiment") || !j["experiment"].is_string()) bad("experiment", "required string");
  const auto kind = parse_experiment(j["experiment"].get<std::string>());
  if (!kind) bad("experiment", "unknown experiment '" + j["experiment"].get<std::string>() + "'");

  ExperimentConfig c;
  c.experiment = *kind;
  defaults_for(c);
  if (j.contains("body_or_density")) c.body_or_density = j["body_or_density"];
  if (j.contains("n")) c.n_values = index_list(j["n"], "n");
  if (j.contains("k")) c.k_values = index_list(j["k"], "k");
  if (j.contains("m")) c.m = positive_index(j["m"], "m");
  if (j.contains("direction_count")) c.direction_count = count(j["direction_count"], "direction_count");
  if (j.contains("epsilon_grid")) c.epsilon_grid = real_list(j["epsilon_grid"], "epsilon_grid");
  if (j.contains("seed")) {
    const Json& s = j["seed"];
    if (s.is_number_unsigned() || s.is_number_integer()) {
      if (s.is_number_integer() && s.get<long long>() < 0) bad("seed", "must be nonnegative");
      c.seed = RandomSeed{s.get<std::uint64_t>(), 0};
    } else if (s.is_object() && s.contains("seed")) {
      c.seed.seed = s["seed"].get<std::uint64_t>();
      c.seed.stream_id = s.value("stream_id", std::uint64_t{0});
    } else {
      bad("seed", "expected an unsigned integer or {\"seed\", \"stream_id\"}");
    }
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer()) bad("workers", "expected an integer");
    c.workers = j["workers"].get<int>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) bad("out_dir", "expected a string");
    c.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("pairs")) {
    c.pairs.clear();
    if (!j["pairs"].is_array() || j["pairs"].empty()) bad("pairs", "expected a nonempty list of [n, k]");
    for (const auto& p : j["pairs"]) {
      if (!p.is_array() || p.size() != 2) bad("pairs", "expected [n, k] entries");
      c.pairs.emplace_back(positive_index(p[0], "pairs"), positive_index(p[1], "pairs"));
    }
  }
  if (j.contains("subspace_count")) c.subspace_count = count(j["subspace_count"], "subspace_count");
  if (j.contains("t_grid")) c.t_grid = real_list(j["t_grid"], "t_grid");
  if (j.contains("threshold")) c.threshold = real(j["threshold"], "threshold");
  if (j.contains("pass_fraction")) c.pass_fraction = real(j["pass_fraction"], "pass_fraction");
  if (j.contains("global_direction_count")) {
    c.global_direction_count = count(j["global_direction_count"], "global_direction_count");
  }
  if (j.contains("directions_per_subspace")) {
    c.directions_per_subspace = count(j["directions_per_subspace"], "directions_per_subspace");
  }
  if (j.contains("hit_and_run_check")) {
    const Json& h = j["hit_and_run_check"];
    if (!h.is_object() || !h.contains("n") || !h.contains("m")) bad("hit_and_run_check", "expected {\"n\", \"m\"}");
    c.hit_and_run_check = std::make_pair(positive_index(h["n"], "hit_and_run_check.n"),
                                         positive_index(h["m"], "hit_and_run_check.m"));
  }
  if (j.contains("x")) c.jl_point = vector_from_json(j["x"], "x");

  // Invariants.
  if (c.m < 1000) bad("m", "must be at least 1000");
  if (std::any_of(c.epsilon_grid.begin(), c.epsilon_grid.end(), [](double e) { return !(e >= 0.0); })) {
    bad("epsilon_grid", "values must be nonnegative");
  }
  if (!(c.pass_fraction >= 0.0 && c.pass_fraction <= 1.0)) bad("pass_fraction", "must lie in [0, 1]");
  if (!(c.threshold >= 0.0)) bad("threshold", "must be nonnegative");
  const bool uses_k = c.experiment == ExperimentKind::multidim_marginal || c.experiment == ExperimentKind::jl_check ||
                      c.experiment == ExperimentKind::mf_concentration;
  if (uses_k) {
    if (c.k_values.empty()) bad("k", "required for this experiment");
    for (Index n : c.n_values) {
      for (Index k : c.k_values) {
        if (k > n) bad("k", "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
      }
    }
  }
  if (c.experiment == ExperimentKind::diaconis_freedman) {
    if (!j.contains("pairs") && (j.contains("n") || j.contains("k"))) {
      c.pairs.clear();
      const std::vector<Index> ks = c.k_values.empty() ? std::vector<Index>{1} : c.k_values;
      for (Index n : c.n_values) {
        for (Index k : ks) c.pairs.emplace_back(n, k);
      }
    }
    for (const auto& [n, k] : c.pairs) {
      if (n < k + 4) bad("pairs", "need n >= k + 4 (got n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
    }
  }
  if (c.experiment == ExperimentKind::jl_check && c.jl_point) {
    if (c.n_values.size() != 1 || c.jl_point->size() != c.n_values[0]) bad("x", "length must equal the single n");
    if (c.jl_point->norm() == 0.0) bad("x", "must be nonzero");
  }
  if (c.experiment == ExperimentKind::mf_concentration) {
    if (c.t_grid.empty()) bad("t_grid", "must not be empty");
    if (c.directions_per_subspace < 2) bad("directions_per_subspace", "need at least 2");
    if (c.global_direction_count < c.directions_per_subspace) {
      bad("global_direction_count", "must be at least directions_per_subspace");
    }
  }
  // Bind the density once per n so that malformed descriptions fail here.
  if (c.experiment != ExperimentKind::diaconis_freedman) {
    for (Index n : c.n_values) {
      try {
        const DensitySpec d = c.density(n);
        if (d.dim() != n) bad("body_or_density", "dimension " + std::to_string(d.dim()) + " does not match n = " + std::to_string(n));
      } catch (const std::invalid_argument& e) {
        if (std::string(e.what()).rfind("config field", 0) == 0) throw;
        bad("body_or_density", e.what());
      }
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument(path.string() + ": cannot open config");
  Json j;
  try {
    j = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["experiment"] = std::string(to_string(experiment));
  j["body_or_density"] = body_or_density;
  j["n"] = n_values;
  // Sweeps that do not apply to the experiment are left out.
  if (!k_values.empty()) j["k"] = k_values;
  j["m"] = m;
  j["direction_count"] = direction_count;
  if (!epsilon_grid.empty()) j["epsilon_grid"] = epsilon_grid;
  j["seed"] = {{"seed", seed.seed}, {"stream_id", seed.stream_id}};
  j["workers"] = workers;
  j["out_dir"] = out_dir.string();
  Json p = Json::array();
  for (const auto& [n, k] : pairs) p.push_back({n, k});
  if (!p.empty()) j["pairs"] = std::move(p);
  j["subspace_count"] = subspace_count;
  if (!t_grid.empty()) j["t_grid"] = t_grid;
  j["threshold"] = threshold;
  j["pass_fraction"] = pass_fraction;
  j["global_direction_count"] = global_direction_count;
  j["directions_per_subspace"] = directions_per_subspace;
  if (hit_and_run_check) {
    j["hit_and_run_check"] = {{"n", hit_and_run_check->first}, {"m", hit_and_run_check->second}};
  }
  if (jl_point) j["x"] = cltlab::to_json(*jl_point);
  return j;
}

std::string ExperimentConfig::hash() const {
  Json j = to_json();
  j.erase("out_dir");
  j.erase("workers");
  const std::string text = j.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("config hash: SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < 16; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace cltlab

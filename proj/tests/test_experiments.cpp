#include "cltlab/experiments/config.hpp"
#include "cltlab/experiments/report.hpp"
#include "cltlab/experiments/runners.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cltlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("cltlab-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

const Table& table(const ExperimentReport& r, const std::string& name) {
  for (const auto& t : r.tables)
    if (t.name == name) return t;
  throw std::runtime_error("no table " + name);
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  throw std::runtime_error("no column " + name);
}

}  // namespace

TEST_CASE("config validation") {
  const Json ok = {{"experiment", "clt_marginal"}, {"n", 8}, {"m", 2000}};
  CHECK_NOTHROW(config_from_json(ok));
  CHECK(config_from_json(ok).n_values == std::vector<Index>{8});

  auto with = [&](const char* key, Json v) {
    Json j = ok;
    j[key] = std::move(v);
    return j;
  };
  CHECK_THROWS_WITH_AS(config_from_json(with("bogus", 1)), doctest::Contains("bogus"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(config_from_json(with("m", 999)), doctest::Contains("'m'"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(with("experiment", "nope")), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(with("body_or_density", Json{{"type", "torus"}})), std::invalid_argument);

  const Json md = {{"experiment", "multidim_marginal"}, {"n", 4}, {"k", 5}};
  CHECK_THROWS_WITH_AS(config_from_json(md), doctest::Contains("exceeds"), std::invalid_argument);
  const Json df = {{"experiment", "diaconis_freedman"}, {"pairs", {{6, 3}}}};
  CHECK_THROWS_WITH_AS(config_from_json(df), doctest::Contains("n >= k + 4"), std::invalid_argument);
}

TEST_CASE("config hash ignores out_dir and workers") {
  Json a = {{"experiment", "thin_shell"}, {"n", {16, 64}}};
  Json b = a;
  b["out_dir"] = "elsewhere";
  b["workers"] = 3;
  CHECK(config_from_json(a).hash() == config_from_json(b).hash());
  b["seed"] = 7;
  CHECK(config_from_json(a).hash() != config_from_json(b).hash());
  const auto round = config_from_json(config_from_json(a).to_json());
  CHECK(round.hash() == config_from_json(a).hash());
}

TEST_CASE("k = 1 marginals agree between the one- and multi-dimensional pipelines") {
  const Json body = {{"type", "uniform"}, {"body", {{"type", "cube"}}}};
  Json c1 = {{"experiment", "clt_marginal"}, {"n", 100},         {"m", 20000},
             {"direction_count", 10},        {"body_or_density", body}, {"seed", 11}};
  Json c2 = {{"experiment", "multidim_marginal"}, {"n", 100},         {"k", 1},     {"m", 20000},
             {"subspace_count", 10},              {"direction_count", 1}, {"body_or_density", body}, {"seed", 11}};
  const auto r1 = run_experiment(config_from_json(c1));
  const auto r2 = run_experiment(config_from_json(c2));
  const auto& t1 = table(r1, "directions");
  const auto& t2 = table(r2, "subspaces");
  REQUIRE(t1.rows.size() == 10);
  REQUIRE(t2.rows.size() == 10);
  const auto k1 = column(t1, "kolmogorov"), k2 = column(t2, "kolmogorov");
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(std::abs(t1.rows[j][k1].get<double>() - t2.rows[j][k2].get<double>()) <= 1e-12);
  }
}

TEST_CASE("reports are byte-reproducible and worker-independent") {
  Json c = {{"experiment", "thin_shell"}, {"n", {8, 16}}, {"m", 20000}, {"epsilon_grid", {0.0, 0.1}}, {"seed", 5}};
  const auto out1 = scratch("det1"), out2 = scratch("det2");
  c["out_dir"] = out1.string();
  c["workers"] = 1;
  const auto d1 = write_report(run_experiment(config_from_json(c)), out1);
  c["out_dir"] = out2.string();
  c["workers"] = 3;
  const auto d2 = write_report(run_experiment(config_from_json(c)), out2);
  CHECK(d1.filename() == d2.filename());
  CHECK(std::filesystem::exists(d1 / "timing.json"));
  CHECK(std::filesystem::exists(d1 / "tables" / "thin_shell.csv"));
  CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
  CHECK(slurp(d1 / "tables" / "thin_shell.csv") == slurp(d2 / "tables" / "thin_shell.csv"));
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
}

TEST_CASE("missing output directories are created") {
  const auto out = scratch("nested") / "a" / "b";
  Json c = {{"experiment", "thin_shell"}, {"n", 8}, {"m", 5000}};
  const auto dir = write_report(run_experiment(config_from_json(c)), out);
  CHECK(std::filesystem::exists(dir / "report.json"));
  std::filesystem::remove_all(out.parent_path().parent_path());
}

TEST_CASE("non-isotropic input is whitened before the gate") {
  const Json raw = {{"type", "uniform"}, {"body", {{"type", "simplex"}, {"standardize", false}}}};
  Json c = {{"experiment", "clt_marginal"}, {"n", 8}, {"m", 20000}, {"direction_count", 5}, {"body_or_density", raw}};
  const auto r = run_experiment(config_from_json(c));
  CHECK(r.summary["sampler"]["8"].get<std::string>().find("+affine:") != std::string::npos);
  CHECK(r.summary["isotropy_gate"]["8"]["passes"] == true);
}

TEST_CASE("unconditional diagnostic rejects bodies without coordinate symmetry") {
  const Json s = {{"type", "uniform"}, {"body", {{"type", "simplex"}}}};
  Json c = {{"experiment", "unconditional_diag"}, {"n", 8}, {"m", 5000}, {"body_or_density", s}};
  CHECK_THROWS_AS(run_experiment(config_from_json(c)), std::invalid_argument);
}

TEST_CASE("helpers") {
  CHECK(quantile({3.0, 1.0, 2.0, 4.0}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.9) == doctest::Approx(4.6));
  CHECK(diaconis_freedman_bound(50, 1) == doctest::Approx(8.0 / 46.0));
  CHECK(diaconis_freedman_bound(200, 3) == doctest::Approx(12.0 / 194.0));
  const std::vector<double> v(101, 1.0);
  CHECK(bootstrap_median_se(v, RandomSeed{1, 0}) == 0.0);
}

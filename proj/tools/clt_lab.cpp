// clt-lab: runs the desk-scale experiments from a JSON config and writes
// report.json, tables/*.csv and plotdata/*.csv under the output directory.
//
// Exit status: 0 when every assertion passes, 1 when some assertion fails
// (the report is still written), 2 on configuration or runtime errors.

#include "cltlab/experiments/config.hpp"
#include "cltlab/experiments/report.hpp"
#include "cltlab/experiments/runners.hpp"
#include "cltlab/json_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using namespace cltlab;

constexpr int kOk = 0;
constexpr int kAssertionFailure = 1;
constexpr int kError = 2;

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

Json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument(path + ": cannot open config");
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

int workers_from_env() {
  const char* env = std::getenv("CLT_LAB_WORKERS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) throw std::invalid_argument("CLT_LAB_WORKERS: expected a positive integer");
  return static_cast<int>(v);
}

int run(ExperimentKind kind, const RunOptions& opt) {
  Json j = read_json(opt.config);
  if (!j.is_object()) throw std::invalid_argument(opt.config + ": expected a JSON object");
  const std::string name(to_string(kind));
  if (!j.contains("experiment")) {
    j["experiment"] = name;
  } else if (j["experiment"] != name) {
    throw std::invalid_argument(opt.config + ": config is for '" + j["experiment"].dump() + "', not '" + name + "'");
  }
  ExperimentConfig cfg = config_from_json(j);
  if (opt.seed) cfg.seed = RandomSeed{*opt.seed, 0};
  if (opt.workers) {
    cfg.workers = *opt.workers;
  } else if (!j.contains("workers")) {
    if (const int w = workers_from_env()) cfg.workers = w;
  }
  if (opt.out) cfg.out_dir = *opt.out;

  const ExperimentReport report = run_experiment(cfg);
  const auto dir = write_report(report, cfg.out_dir);
  for (const auto& a : report.assertions) {
    std::cout << (a.passed ? "PASS  " : "FAIL  ") << a.name;
    if (!a.detail.empty()) std::cout << "  [" << a.detail << "]";
    std::cout << "\n";
  }
  for (const auto& w : report.warnings) std::cout << "WARN  " << w << "\n";
  std::cout << "report: " << (dir / "report.json").string() << "  (" << report.wall_clock_seconds << " s)\n";
  return report.all_passed() ? kOk : kAssertionFailure;
}

void list_bodies() {
  std::cout << "bodies (uniform law; \"type\" tag and optional fields):\n"
               "  cube         half_side (default sqrt(3), isotropic)\n"
               "  ball         radius (default sqrt(n+2), isotropic)\n"
               "  simplex      standardize (default true)\n"
               "  hpolytope    normals, offsets, interior\n"
               "  ellipsoid    shape | diag\n"
               "  product      factors (each a body; dims split evenly when omitted)\n"
               "densities:\n"
               "  uniform      body\n"
               "  gaussian     variance (default 1)\n"
               "  product_1d   labels (one label repeats across coordinates)\n"
               "named one-dimensional laws:\n";
  for (auto law : kNamedLaws) std::cout << "  " << law << "\n";
}

int validate(const std::string& path) {
  const ExperimentConfig cfg = load_config(path);
  std::cout << cfg.to_json().dump(2) << "\nconfig hash: " << cfg.hash() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo checks of the central limit theorem for convex bodies", "clt-lab"};
  app.set_version_flag("--version", cltlab::library_version());
  app.require_subcommand(1);

  std::vector<std::pair<cltlab::ExperimentKind, CLI::App*>> experiment_commands;
  RunOptions opt;
  for (auto kind : cltlab::all_experiments()) {
    auto* sub = app.add_subcommand(std::string(cltlab::to_string(kind)), "run the " +
                                                                           std::string(cltlab::to_string(kind)) +
                                                                           " experiment");
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--workers", opt.workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", opt.out, "output directory");
    experiment_commands.emplace_back(kind, sub);
  }
  auto* list = app.add_subcommand("list-bodies", "list body and density types");
  std::string validate_path;
  auto* val = app.add_subcommand("validate-config", "parse a config and print it with defaults filled in");
  val->add_option("path", validate_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*list) {
      list_bodies();
      return kOk;
    }
    if (*val) return validate(validate_path);
    for (const auto& [kind, sub] : experiment_commands) {
      if (*sub) return run(kind, opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "clt-lab: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

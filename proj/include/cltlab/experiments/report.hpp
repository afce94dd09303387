#pragma once

#include "cltlab/experiments/config.hpp"
#include "cltlab/json_io.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cltlab {

/// A named table, written as tables/<name>.csv and embedded in report.json.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  void add(std::vector<Json> row) { rows.push_back(std::move(row)); }
  Json to_json() const;
};

/// An (x, y) series, written as plotdata/<name>.csv.
struct PlotSeries {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  ExperimentConfig config;
  Json summary = Json::object();
  std::vector<Table> tables;
  std::vector<PlotSeries> plots;
  std::vector<Assertion> assertions;
  std::vector<std::string> warnings;
  /// Kept out of report.json so that the report is byte-reproducible.
  double wall_clock_seconds = 0.0;

  void check(std::string name, bool passed, std::string detail);
  bool all_passed() const;
  Json to_json() const;
};

/// Library version string.
std::string library_version();

/// Writes <out_dir>/<experiment>-<hash>/{report.json, timing.json,
/// tables/*.csv, plotdata/*.csv}, creating directories as needed, and
/// returns the run directory. I/O failures throw std::runtime_error naming
/// the path.
std::filesystem::path write_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

}  // namespace cltlab

#include "cltlab/experiments/report.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace cltlab {

namespace {

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (v.is_number_float()) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, r.ptr);
  }
  return v.dump();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  os << text;
  if (!os) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace

Json Table::to_json() const {
  Json j;
  j["columns"] = columns;
  Json r = Json::array();
  for (const auto& row : rows) r.push_back(row);
  j["rows"] = std::move(r);
  return j;
}

void ExperimentReport::check(std::string name, bool passed, std::string detail) {
  assertions.push_back(Assertion{std::move(name), passed, std::move(detail)});
}

bool ExperimentReport::all_passed() const {
  for (const auto& a : assertions) {
    if (!a.passed) return false;
  }
  return true;
}

std::string library_version() { return CLTLAB_VERSION; }

Json ExperimentReport::to_json() const {
  Json j;
  j["experiment"] = std::string(to_string(config.experiment));
  j["library_version"] = library_version();
  j["config_hash"] = config.hash();
  Json echo = config.to_json();
  echo.erase("out_dir");
  echo.erase("workers");
  j["config"] = std::move(echo);
  j["summary"] = summary;
  Json a = Json::array();
  for (const auto& x : assertions) a.push_back({{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
  j["assertions"] = std::move(a);
  j["all_passed"] = all_passed();
  j["warnings"] = warnings;
  Json t = Json::object();
  for (const auto& table : tables) t[table.name] = table.to_json();
  j["tables"] = std::move(t);
  return j;
}

std::filesystem::path write_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = out_dir / (std::string(to_string(report.config.experiment)) + "-" + report.config.hash());
  std::error_code ec;
  fs::create_directories(dir / "tables", ec);
  if (!ec) fs::create_directories(dir / "plotdata", ec);
  if (ec) throw std::runtime_error(dir.string() + ": cannot create directory (" + ec.message() + ")");

  write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  Json timing;
  timing["wall_clock_seconds"] = report.wall_clock_seconds;
  timing["workers"] = report.config.workers;
  write_text(dir / "timing.json", timing.dump(2) + "\n");

  for (const auto& table : report.tables) {
    std::string text;
    for (std::size_t i = 0; i < table.columns.size(); ++i) text += (i ? "," : "") + table.columns[i];
    text += "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + csv_cell(row[i]);
      text += "\n";
    }
    write_text(dir / "tables" / (table.name + ".csv"), text);
  }
  for (const auto& plot : report.plots) {
    std::string text = plot.x_label + "," + plot.y_label + "\n";
    for (std::size_t i = 0; i < plot.x.size(); ++i) {
      text += csv_cell(Json(plot.x[i])) + "," + csv_cell(Json(plot.y[i])) + "\n";
    }
    write_text(dir / "plotdata" / (plot.name + ".csv"), text);
  }
  return dir;
}

}  // namespace cltlab

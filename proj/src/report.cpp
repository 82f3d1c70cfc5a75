#include "l2hodge/report.hpp"

#include "l2hodge/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace l2hodge {

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Report::add(std::string name, nlohmann::json expected, nlohmann::json actual, nlohmann::json tol, bool pass) {
  checks.push_back({std::move(name), std::move(expected), std::move(actual), std::move(tol), pass});
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"expected", c.expected}, {"actual", c.actual}, {"tol", c.tol}, {"pass", c.pass}});
  }
  return {
      {"schema_version", kSchemaVersion},
      {"scenario", {{"name", report.scenario}, {"kind", report.kind}}},
      {"params", report.params},
      {"checks", checks},
      {"passed", report.passed()},
      {"data_refs", report.data_refs},
  };
}

std::string dump_report(const Report& report) { return to_json(report).dump(2) + "\n"; }

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

std::string dump_csv(const DataSeries& series) {
  std::string out = "# schema_version " + std::to_string(kSchemaVersion) + "\n";
  for (std::size_t i = 0; i < series.columns.size(); ++i) out += (i ? "," : "") + series.columns[i];
  out += "\n";
  for (const auto& row : series.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + number(row[i]);
    out += "\n";
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(Report& report, const std::vector<DataSeries>& series,
                                               const std::filesystem::path& dir, const EmitOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  report.data_refs.clear();
  if (options.csv) {
    for (const auto& s : series) {
      const std::string name = report.scenario + "." + s.name + ".csv";
      write_file(dir / name, dump_csv(s));
      report.data_refs.push_back(name);
      written.push_back(dir / name);
    }
  }
  if (options.json) {
    write_file(dir / (report.scenario + ".json"), dump_report(report));
    written.push_back(dir / (report.scenario + ".json"));
  }
  const nlohmann::json run = {{"scenario", report.scenario},
                              {"timestamp", options.timestamp},
                              {"elapsed_seconds", options.elapsed_seconds},
                              {"passed", report.passed()}};
  write_file(dir / (report.scenario + ".run.json"), run.dump(2) + "\n");
  written.push_back(dir / (report.scenario + ".run.json"));
  return written;
}

}  // namespace l2hodge

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace l2hodge {

inline constexpr int kSchemaVersion = 1;

struct Check {
  std::string name;
  nlohmann::json expected;
  nlohmann::json actual;
  nlohmann::json tol;  // number or null
  bool pass = false;
};

struct Report {
  std::string scenario;
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<std::string> data_refs;

  bool passed() const;
  void add(std::string name, nlohmann::json expected, nlohmann::json actual, nlohmann::json tol, bool pass);
};

/// Plot-ready table; written as <scenario>.<name>.csv.
struct DataSeries {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

nlohmann::json to_json(const Report& report);
/// Deterministic text: sorted keys, two-space indent, trailing newline.
std::string dump_report(const Report& report);
std::string dump_csv(const DataSeries& series);

struct EmitOptions {
  bool json = true;
  bool csv = true;
  std::string timestamp;  // goes to <scenario>.run.json only
  double elapsed_seconds = 0.0;
};

/// Writes <dir>/<scenario>.json, the CSV series and <dir>/<scenario>.run.json.
/// Fills report.data_refs with the CSV file names. Throws IoError.
std::vector<std::filesystem::path> emit_report(Report& report, const std::vector<DataSeries>& series,
                                               const std::filesystem::path& dir, const EmitOptions& options);

}  // namespace l2hodge

#pragma once

#include "l2hodge/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace l2hodge {

/// One experiment. Config files are JSON objects with the keys
///   name    file stem of every output, [A-Za-z0-9_.-]+
///   kind    one of scenario_kinds()
///   seed    non-negative integer, mandatory for randomized kinds
///   params  overrides of scenario_defaults(kind)
///   output  {"dir": "...", "formats": ["json", "csv"]}
/// Unknown keys, wrong types and out-of-range values raise ConfigError.
struct ScenarioConfig {
  std::string name;
  std::string kind;
  std::optional<std::uint64_t> seed;
  nlohmann::json params = nlohmann::json::object();  // effective values, defaults filled in
  std::filesystem::path out_dir = "out";
  bool json = true;
  bool csv = true;
};

std::vector<std::string> scenario_kinds();
/// Default parameters of a kind. Throws ConfigError for an unknown kind.
nlohmann::json scenario_defaults(const std::string& kind);
bool scenario_needs_seed(const ScenarioConfig& config);

ScenarioConfig parse_scenario(const nlohmann::json& document);
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct ScenarioResult {
  Report report;
  std::vector<DataSeries> series;
};

/// Runs the experiment. Library errors caused by parameter combinations
/// (InvalidArgument, DegreeOutOfRange, GridTooCoarse) become ConfigError;
/// any other library error is recorded as a failed "completed" check.
ScenarioResult run_scenario(const ScenarioConfig& config);

struct RunOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::string>> formats;
};

/// Exit status: 0 all checks pass, 1 a check failed (report still written),
/// 2 ConfigError, 3 IoError.
int run_scenario_file(const std::filesystem::path& path, const RunOverrides& overrides, std::ostream& log);

/// Applies a comma list such as "json,csv". Throws ConfigError.
void set_formats(ScenarioConfig& config, const std::vector<std::string>& formats);

}  // namespace l2hodge

// Copyright 2026 The ShieldSyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef SHIELDSYN_CONFIG_IO_HPP_
#define SHIELDSYN_CONFIG_IO_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchmarks.hpp"
#include "cegis.hpp"
#include "environment.hpp"
#include "shield.hpp"

namespace shieldsyn {

using Json = nlohmann::ordered_json;

inline constexpr const char* kEnvFormat = "shieldsyn-env/1";
inline constexpr const char* kShieldFormat = "shieldsyn-shield/1";
inline constexpr const char* kReportFormat = "shieldsyn-report/1";

/// Environment file. Infinite bounds are null; with "angle_unit": "deg" the
/// S0 and safe box bounds of `angle_dims` are read in degrees (disturbance
/// bounds stay in derivative units). Printing always uses radians.
Json env_to_json(const EnvironmentSpec& env);
EnvironmentSpec env_from_json(const Json& j);

/// Environment plus optional "presets" (network, training, distillation and
/// CEGIS settings). Absent preset fields keep their defaults.
Json benchmark_to_json(const BenchmarkDef& b);
BenchmarkDef benchmark_from_json(const Json& j);

/// Parses JSON text; throws ParseError with the parser message.
Json parse_json(const std::string& text);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// A registered name, or a path to a benchmark file.
BenchmarkDef load_benchmark(const std::string& name_or_path);

Json shield_to_json(const ShieldPolicy& sp,
                    const std::vector<std::string>& state_names = {});
ShieldPolicy shield_from_json(const Json& j);
/// Loads a shield file and checks it against the environment dimensions.
ShieldPolicy load_shield(const std::string& path, const EnvironmentSpec& env);

Json metrics_to_json(const ShieldedRunMetrics& m);

/// Status, attempts and the accepted certificates of a CEGIS run.
Json cegis_to_json(const CegisResult& r,
                   const std::vector<std::string>& state_names = {});

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

struct RunReport {
  std::string command;
  std::string benchmark;
  std::string config_hash;
  uint64_t seed = 0;
  std::string started;
  std::string finished;
  /// Command-specific outputs ("metrics" for simulate, "cegis" for cegis).
  Json results = Json::object();
  std::map<std::string, std::string> artifacts;
};

Json report_to_json(const RunReport& r);
RunReport report_from_json(const Json& j);
/// Header line plus one row of flattened fields.
std::string report_to_csv(const RunReport& r);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// One row per benchmark, merging its cegis and simulate reports.
struct ReportRow {
  std::string benchmark;
  std::string failures = "-";
  std::string size = "-";
  std::string synthesis_time = "-";
  std::string overhead = "-";
  std::string interventions = "-";
  std::string performance = "-";
};

std::vector<ReportRow> aggregate_reports(const std::vector<RunReport>& reports);
std::string format_table(const std::vector<ReportRow>& rows);
std::string format_table_csv(const std::vector<ReportRow>& rows);

}  // namespace shieldsyn

#endif  // SHIELDSYN_CONFIG_IO_HPP_

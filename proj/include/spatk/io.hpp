// Copyright 2026 The spatk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPATK_IO_HPP
#define SPATK_IO_HPP

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "spatk/data_model.hpp"
#include "spatk/simulation.hpp"

namespace spatk {

inline constexpr const char* kReportSchemaVersion = "1";

// Reads `pop,x,y,value` CSV (UTF-8, '.' decimal separator, columns matched by
// header name in any order) and validates it into a dataset. Throws
// SchemaError for a missing or unknown column, ParseError with the line
// number for an unparseable field, EmptyInput for a file with no data rows.
SpatialDataset load_csv(const std::string& path);
SpatialDataset load_csv_stream(std::istream& in, const std::string& origin);

// Key-value scenario description, e.g.
//
//   k = 2
//   counts = 50, 50
//   domain = 0, 0, 1, 1
//   locations = uniform            # or: cluster
//   field = iid                    # or: moving_average
//   range = 0.2                    # moving_average only
//   margin_1 = normal(0, 1)
//   margin_2 = normal(1, 1)
//   seed = 42
//
// '#' starts a comment. Throws ParseError / SchemaError with locations.
ScenarioSpec load_scenario(const std::string& path);
ScenarioSpec load_scenario_stream(std::istream& in, const std::string& origin);

// JSON echo of every configuration value that affects the result.
nlohmann::json config_to_json(const TestConfig& config);
nlohmann::json scenario_to_json(const ScenarioSpec& scenario);

// Single structured report for a `test` run. `timing` may be any JSON value;
// everything else is deterministic for a fixed seed.
nlohmann::json build_test_report(const TestResult& result,
                                 const SpatialDataset& dataset,
                                 const std::string& input_name,
                                 const nlohmann::json& timing);

// Report for a `simulate` run.
nlohmann::json build_simulate_report(const MonteCarloResult& mc,
                                     const ScenarioSpec& scenario,
                                     const TestConfig& config,
                                     const nlohmann::json& timing);

// One value per line, round-trip precision.
void write_null_values(const std::string& path, const std::vector<double>& values);

}  // namespace spatk

#endif  // SPATK_IO_HPP

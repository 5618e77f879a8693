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

#include "spatk/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace spatk {

namespace {

std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& field, std::size_t line, const std::string& what) {
  std::string t = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError(line, "cannot parse " + what + " from '" + t + "'");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& field, std::size_t line, const std::string& what) {
  std::string t = trim(field);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError(line, "cannot parse " + what + " from '" + t + "'");
  }
  return value;
}

}  // namespace

SpatialDataset load_csv_stream(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyInput(origin + ": empty file");
  // Strip a UTF-8 byte-order mark if present.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  auto header = split(line, ',');
  int col_pop = -1, col_x = -1, col_y = -1, col_value = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name = trim(header[c]);
    int* slot = nullptr;
    if (name == "pop") slot = &col_pop;
    else if (name == "x") slot = &col_x;
    else if (name == "y") slot = &col_y;
    else if (name == "value") slot = &col_value;
    else throw SchemaError(name, origin + ": unknown column '" + name + "'");
    if (*slot != -1) throw SchemaError(name, origin + ": duplicate column '" + name + "'");
    *slot = static_cast<int>(c);
  }
  if (col_pop == -1) throw SchemaError("pop", origin + ": missing column 'pop'");
  if (col_x == -1) throw SchemaError("x", origin + ": missing column 'x'");
  if (col_y == -1) throw SchemaError("y", origin + ": missing column 'y'");
  if (col_value == -1) throw SchemaError("value", origin + ": missing column 'value'");

  std::vector<RawObservation> raw;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) +
                                    " fields, got " + std::to_string(fields.size()));
    }
    RawObservation r;
    r.label = trim(fields[static_cast<std::size_t>(col_pop)]);
    if (r.label.empty()) throw ParseError(line_no, "empty population label");
    r.x = parse_double(fields[static_cast<std::size_t>(col_x)], line_no, "x");
    r.y = parse_double(fields[static_cast<std::size_t>(col_y)], line_no, "y");
    r.value = parse_double(fields[static_cast<std::size_t>(col_value)], line_no, "value");
    raw.push_back(std::move(r));
  }
  if (raw.empty()) throw EmptyInput(origin + ": no data rows");
  return validate_dataset(raw);
}

SpatialDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return load_csv_stream(in, path);
}

namespace {

MarginSpec parse_margin(const std::string& text, std::size_t line) {
  std::string t = trim(text);
  auto open = t.find('(');
  auto close = t.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw ParseError(line, "margin must look like normal(mu, sigma) or uniform(a, b)");
  }
  std::string name = trim(t.substr(0, open));
  auto args = split(t.substr(open + 1, close - open - 1), ',');
  if (args.size() != 2) throw ParseError(line, "margin needs exactly two parameters");
  double a = parse_double(args[0], line, "margin parameter");
  double b = parse_double(args[1], line, "margin parameter");
  if (name == "normal") {
    if (!(b > 0.0)) throw ParseError(line, "normal margin needs sigma > 0");
    return MarginSpec::normal(a, b);
  }
  if (name == "uniform") {
    if (!(b > a)) throw ParseError(line, "uniform margin needs upper > lower");
    return MarginSpec::uniform(a, b);
  }
  throw ParseError(line, "unknown margin family '" + name + "'");
}

}  // namespace

ScenarioSpec load_scenario_stream(std::istream& in, const std::string& origin) {
  ScenarioSpec spec;
  spec.counts.clear();
  spec.margins.clear();

  std::vector<std::pair<int, MarginSpec>> margins;
  bool have_counts = false;
  std::optional<int> declared_k;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));

    if (key == "k") {
      declared_k = static_cast<int>(parse_u64(value, line_no, "k"));
    } else if (key == "counts") {
      for (const auto& f : split(value, ',')) {
        spec.counts.push_back(static_cast<std::int64_t>(parse_u64(f, line_no, "count")));
      }
      have_counts = true;
    } else if (key == "domain") {
      auto f = split(value, ',');
      if (f.size() != 4) throw ParseError(line_no, "domain needs min_x, min_y, max_x, max_y");
      spec.domain = Rectangle{parse_double(f[0], line_no, "domain"),
                              parse_double(f[1], line_no, "domain"),
                              parse_double(f[2], line_no, "domain"),
                              parse_double(f[3], line_no, "domain")};
    } else if (key == "locations") {
      if (value == "uniform") spec.location_model = LocationModel::UniformIID;
      else if (value == "cluster") spec.location_model = LocationModel::ClusterMixture;
      else throw ParseError(line_no, "locations must be 'uniform' or 'cluster'");
    } else if (key == "field") {
      if (value == "iid") spec.field_model = FieldModel::IIDNoise;
      else if (value == "moving_average") spec.field_model = FieldModel::MovingAverage;
      else throw ParseError(line_no, "field must be 'iid' or 'moving_average'");
    } else if (key == "range") {
      spec.field_range = parse_double(value, line_no, "range");
    } else if (key == "seed") {
      spec.seed = parse_u64(value, line_no, "seed");
    } else if (key.rfind("margin_", 0) == 0) {
      int pop = static_cast<int>(parse_u64(key.substr(7), line_no, "margin index"));
      margins.emplace_back(pop, parse_margin(value, line_no));
    } else {
      throw SchemaError(key, origin + ": unknown key '" + key + "' on line " +
                                 std::to_string(line_no));
    }
  }

  if (!have_counts) throw SchemaError("counts", origin + ": missing 'counts'");
  spec.k = declared_k.value_or(static_cast<int>(spec.counts.size()));
  if (spec.k != static_cast<int>(spec.counts.size())) {
    throw SchemaError("counts", origin + ": counts has " +
                                    std::to_string(spec.counts.size()) +
                                    " entries but k = " + std::to_string(spec.k));
  }

  spec.margins.assign(static_cast<std::size_t>(spec.k), MarginSpec{});
  std::vector<char> seen(static_cast<std::size_t>(spec.k), 0);
  for (const auto& [pop, margin] : margins) {
    if (pop < 1 || pop > spec.k) {
      throw SchemaError("margin_" + std::to_string(pop),
                        origin + ": margin index outside 1.." + std::to_string(spec.k));
    }
    spec.margins[static_cast<std::size_t>(pop - 1)] = margin;
    seen[static_cast<std::size_t>(pop - 1)] = 1;
  }
  for (int p = 1; p <= spec.k; ++p) {
    if (!seen[static_cast<std::size_t>(p - 1)]) {
      throw SchemaError("margin_" + std::to_string(p),
                        origin + ": missing 'margin_" + std::to_string(p) + "'");
    }
  }
  spec.check();
  return spec;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return load_scenario_stream(in, path);
}

namespace {

std::string kernel_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::Epanechnikov2D: return "epanechnikov";
    case KernelFamily::GaussianTruncated: return "gaussian";
  }
  return "?";
}

std::string method_name(ResamplingMethod method) {
  switch (method) {
    case ResamplingMethod::Permutation: return "perm";
    case ResamplingMethod::BlockBootstrap: return "block-boot";
  }
  return "?";
}

std::string bandwidth_name(const BandwidthChoice& choice) {
  switch (choice.mode) {
    case BandwidthMode::Explicit: return std::to_string(choice.value);
    case BandwidthMode::AutoCrossValidation: return "auto-cv";
    case BandwidthMode::AutoRuleOfThumb: return "auto-rot";
  }
  return "?";
}

}  // namespace

nlohmann::json config_to_json(const TestConfig& config) {
  nlohmann::json j;
  j["kernel"] = kernel_name(config.kernel.family);
  j["truncation_radius"] = config.kernel.truncation_radius;
  j["bandwidth"] = config.bandwidth.mode == BandwidthMode::Explicit
                       ? nlohmann::json(config.bandwidth.value)
                       : nlohmann::json(bandwidth_name(config.bandwidth));
  j["grid_resolution"] = config.grid_resolution;
  if (config.weight_table) {
    j["weight"] = "table";
    j["weight_table"] = *config.weight_table;
  } else {
    j["weight"] = "uniform";
  }
  j["method"] = method_name(config.method);
  j["replicates"] = config.replicates;
  j["block_side"] = config.block_side > 0.0 ? nlohmann::json(config.block_side)
                                            : nlohmann::json("auto");
  j["alpha"] = config.alpha;
  j["seed"] = config.seed;
  j["min_denominator"] = config.min_denominator;
  j["min_coverage"] = config.min_coverage;
  j["y_subsample"] = config.y_subsample;
  j["bootstrap_labels"] = config.bootstrap_literal ? "literal" : "permute";
  return j;
}

nlohmann::json scenario_to_json(const ScenarioSpec& scenario) {
  nlohmann::json j;
  j["k"] = scenario.k;
  j["counts"] = scenario.counts;
  j["domain"] = {scenario.domain.min_x, scenario.domain.min_y, scenario.domain.max_x,
                 scenario.domain.max_y};
  j["locations"] =
      scenario.location_model == LocationModel::UniformIID ? "uniform" : "cluster";
  j["field"] = scenario.field_model == FieldModel::IIDNoise ? "iid" : "moving_average";
  j["range"] = scenario.field_range;
  std::vector<std::string> margins;
  for (const auto& m : scenario.margins) margins.push_back(m.describe());
  j["margins"] = margins;
  j["seed"] = scenario.seed;
  return j;
}

namespace {

nlohmann::json summarize(const std::vector<double>& values) {
  nlohmann::json j;
  if (values.empty()) return j;
  double lo = values[0], hi = values[0], sum = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  j["min"] = lo;
  j["max"] = hi;
  j["mean"] = sum / static_cast<double>(values.size());
  return j;
}

}  // namespace

nlohmann::json build_test_report(const TestResult& result,
                                 const SpatialDataset& dataset,
                                 const std::string& input_name,
                                 const nlohmann::json& timing) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["input"] = input_name;

  nlohmann::json data;
  data["k"] = dataset.k();
  data["n"] = dataset.total();
  data["counts"] = dataset.counts();
  data["labels"] = dataset.label_names();
  const auto& box = dataset.bounding_box();
  data["bounding_box"] = {box.min_x, box.min_y, box.max_x, box.max_y};
  j["data"] = data;

  j["config"] = config_to_json(result.config);

  nlohmann::json res;
  res["observed_Tn"] = result.observed_tn;
  res["p_value"] = result.p_value;
  res["p_value_add_one"] = result.p_value_add_one;
  res["reject"] = result.reject;
  j["result"] = res;

  nlohmann::json diag;
  diag["bandwidth_used"] = result.bandwidth_used;
  if (result.block_side_used > 0.0) diag["block_side_used"] = result.block_side_used;
  diag["excluded_nodes"] = result.excluded_nodes;
  diag["coverage_fraction"] = result.coverage_fraction;
  nlohmann::json var;
  var["formula"] = "F(y)(1-F(y)) / integral(K^2)";
  var["probe_y"] = result.variance_diagnostic.probe_y;
  var["min"] = result.variance_diagnostic.min;
  var["mean"] = result.variance_diagnostic.mean;
  var["max"] = result.variance_diagnostic.max;
  diag["pointwise_variance"] = var;
  diag["null_values"] = summarize(result.null_values);
  j["diagnostics"] = diag;

  j["timing"] = timing;
  return j;
}

nlohmann::json build_simulate_report(const MonteCarloResult& mc,
                                     const ScenarioSpec& scenario,
                                     const TestConfig& config,
                                     const nlohmann::json& timing) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = scenario_to_json(scenario);
  j["config"] = config_to_json(config);

  nlohmann::json res;
  res["trials"] = mc.trials;
  res["rejections"] = mc.rejections;
  res["rejection_rate"] = mc.rate;
  res["p_values"] = mc.p_values;
  res["p_values_add_one"] = mc.p_values_add_one;
  j["result"] = res;

  j["timing"] = timing;
  return j;
}

void write_null_values(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
}

}  // namespace spatk

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

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "spatk/io.hpp"
#include "spatk/kernels.hpp"
#include "spatk/resampling.hpp"
#include "spatk/simulation.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CommonOptions {
  std::string kernel = "epanechnikov";
  double truncation_radius = 3.0;
  std::string bandwidth = "auto-rot";
  int grid = 16;
  std::string method = "perm";
  int replicates = 1000;
  std::string block_side = "auto";
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int y_subsample = 1;
  double min_denominator = 1e-12;
  double min_coverage = 0.5;
  int workers = 0;
  bool bootstrap_literal = false;
  std::string weight_table_path;
  std::string output = "-";
  std::string null_values_path;
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--kernel", opt.kernel, "Kernel family: epanechnikov | gaussian")
      ->check(CLI::IsMember({"epanechnikov", "gaussian"}));
  cmd->add_option("--truncation-radius", opt.truncation_radius,
                  "Gaussian truncation radius in bandwidth units");
  cmd->add_option("--bandwidth", opt.bandwidth, "Bandwidth: REAL | auto-cv | auto-rot");
  cmd->add_option("--grid", opt.grid, "Grid resolution per axis")->check(CLI::Range(2, 4096));
  cmd->add_option("--method", opt.method, "Resampling method: perm | block-boot")
      ->check(CLI::IsMember({"perm", "block-boot"}));
  cmd->add_option("--B", opt.replicates, "Number of resampling replicates");
  cmd->add_option("--block-side", opt.block_side,
                  "Bootstrap block side: REAL | auto (= 4x bandwidth)");
  cmd->add_option("--alpha", opt.alpha, "Significance level");
  cmd->add_option("--seed", opt.seed, "RNG seed");
  cmd->add_option("--y-subsample", opt.y_subsample,
                  "Keep every m-th pooled order statistic in the value integral");
  cmd->add_option("--min-denominator", opt.min_denominator,
                  "Smallest kernel-weight denominator treated as estimable");
  cmd->add_option("--min-coverage", opt.min_coverage,
                  "Minimum fraction of usable grid nodes");
  cmd->add_option("--workers", opt.workers, "Parallel workers (0 = auto)");
  cmd->add_flag("--bootstrap-literal", opt.bootstrap_literal,
                "Keep original labels in bootstrap resamples instead of re-permuting");
  cmd->add_option("--weight-table", opt.weight_table_path,
                  "File with one weight per grid node (overrides uniform w)");
  cmd->add_option("--output", opt.output, "Report path, or - for stdout");
  cmd->add_option("--null-values", opt.null_values_path,
                  "Also dump the resampled statistic values, one per line");
}

spatk::TestConfig make_config(const CommonOptions& opt) {
  spatk::TestConfig config;
  config.kernel.family = opt.kernel == "gaussian"
                             ? spatk::KernelFamily::GaussianTruncated
                             : spatk::KernelFamily::Epanechnikov2D;
  config.kernel.truncation_radius = opt.truncation_radius;

  if (opt.bandwidth == "auto-cv") {
    config.bandwidth.mode = spatk::BandwidthMode::AutoCrossValidation;
  } else if (opt.bandwidth == "auto-rot") {
    config.bandwidth.mode = spatk::BandwidthMode::AutoRuleOfThumb;
  } else {
    try {
      config.bandwidth = spatk::BandwidthChoice::fixed(std::stod(opt.bandwidth));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--bandwidth",
                                 "expected a number, 'auto-cv', or 'auto-rot'");
    }
  }

  if (opt.block_side == "auto") {
    config.block_side = 0.0;
  } else {
    try {
      config.block_side = std::stod(opt.block_side);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--block-side", "expected a number or 'auto'");
    }
    if (!(config.block_side > 0.0)) {
      throw CLI::ValidationError("--block-side", "must be positive");
    }
  }

  config.grid_resolution = opt.grid;
  config.method = opt.method == "block-boot" ? spatk::ResamplingMethod::BlockBootstrap
                                             : spatk::ResamplingMethod::Permutation;
  config.replicates = opt.replicates;
  config.alpha = opt.alpha;
  config.seed = opt.seed;
  config.y_subsample = opt.y_subsample;
  config.min_denominator = opt.min_denominator;
  config.min_coverage = opt.min_coverage;
  config.workers = opt.workers;
  config.bootstrap_literal = opt.bootstrap_literal;

  if (!opt.weight_table_path.empty()) {
    std::ifstream in(opt.weight_table_path);
    if (!in) throw spatk::DataError("cannot open '" + opt.weight_table_path + "'");
    std::vector<double> weights;
    double w;
    while (in >> w) weights.push_back(w);
    if (!in.eof()) {
      throw spatk::ParseError(weights.size() + 1,
                              "bad entry in weight table '" + opt.weight_table_path + "'");
    }
    config.weight_table = std::move(weights);
  }
  return config;
}

void emit_report(const nlohmann::json& report, const std::string& output) {
  if (output == "-") {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(output);
  if (!out) throw spatk::DataError("cannot write '" + output + "'");
  out << report.dump(2) << "\n";
}

int run_test_command(const std::string& input, const CommonOptions& opt) {
  auto t0 = Clock::now();
  spatk::TestConfig config = make_config(opt);

  spatk::SpatialDataset dataset = spatk::load_csv(input);
  double load_s = seconds_since(t0);

  auto t1 = Clock::now();
  spatk::TestResult result = spatk::run_test(dataset, config);
  double test_s = seconds_since(t1);

  if (!opt.null_values_path.empty()) {
    spatk::write_null_values(opt.null_values_path, result.null_values);
  }

  nlohmann::json timing;
  timing["load_s"] = load_s;
  timing["test_s"] = test_s;
  timing["total_s"] = seconds_since(t0);
  emit_report(spatk::build_test_report(result, dataset, input, timing), opt.output);
  return 0;
}

int run_simulate_command(const std::string& scenario_path, int trials,
                         const CommonOptions& opt) {
  auto t0 = Clock::now();
  spatk::TestConfig config = make_config(opt);
  spatk::ScenarioSpec scenario = spatk::load_scenario(scenario_path);

  spatk::MonteCarloResult mc = spatk::monte_carlo_rejection_rate(scenario, config, trials);

  nlohmann::json timing;
  timing["total_s"] = seconds_since(t0);
  emit_report(spatk::build_simulate_report(mc, scenario, config, timing), opt.output);
  return 0;
}

int run_bandwidth_command(const std::string& input, const CommonOptions& opt,
                          const std::string& candidates_arg) {
  spatk::TestConfig config = make_config(opt);
  spatk::SpatialDataset dataset = spatk::load_csv(input);

  std::vector<double> candidates;
  if (candidates_arg.empty()) {
    candidates = spatk::default_bandwidth_candidates(dataset);
  } else {
    std::stringstream ss(candidates_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        candidates.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--candidates", "expected comma-separated numbers");
      }
    }
  }

  auto scores = spatk::cross_validation_scores(dataset, config.kernel, candidates,
                                               config.min_denominator);

  // Same selection rule as select_bandwidth_cv: smallest score, ties toward
  // the smaller lambda.
  const spatk::CvScore* best = nullptr;
  for (const auto& s : scores) {
    if (!s.score) continue;
    if (best == nullptr || *s.score < *best->score ||
        (*s.score == *best->score && s.lambda < best->lambda)) {
      best = &s;
    }
  }

  std::cout << "lambda\tcv_score\tused\n";
  for (const auto& s : scores) {
    std::cout << s.lambda << "\t";
    if (s.score) {
      std::cout << *s.score;
    } else {
      std::cout << "disqualified";
    }
    std::cout << "\t" << s.used;
    if (best != nullptr && &s == best) std::cout << "\t<- selected";
    std::cout << "\n";
  }
  if (best == nullptr) {
    throw spatk::BandwidthSelectionFailed(
        "every candidate bandwidth was disqualified; see the table above");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution-free k-sample test for spatially indexed observations"};
  app.require_subcommand(1);

  CommonOptions test_opt;
  std::string test_input;
  CLI::App* test_cmd = app.add_subcommand(
      "test", "Run the k-sample test on a pop,x,y,value CSV file");
  test_cmd->add_option("--input", test_input, "Input CSV")->required();
  add_common_options(test_cmd, test_opt);

  CommonOptions sim_opt;
  std::string scenario_path;
  int trials = 100;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Monte Carlo size/power study on synthetic data");
  sim_cmd->add_option("--scenario", scenario_path, "Scenario description file")->required();
  sim_cmd->add_option("--trials", trials, "Number of Monte Carlo trials");
  add_common_options(sim_cmd, sim_opt);

  CommonOptions bw_opt;
  std::string bw_input;
  std::string candidates_arg;
  CLI::App* bw_cmd = app.add_subcommand(
      "bandwidth", "Print the cross-validation score table");
  bw_cmd->add_option("--input", bw_input, "Input CSV")->required();
  bw_cmd->add_option("--candidates", candidates_arg,
                     "Comma-separated bandwidths (default: rule-of-thumb ladder)");
  add_common_options(bw_cmd, bw_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "Run with --help for usage.\n";
    return 1;
  }

  try {
    if (test_cmd->parsed()) return run_test_command(test_input, test_opt);
    if (sim_cmd->parsed()) return run_simulate_command(scenario_path, trials, sim_opt);
    if (bw_cmd->parsed()) return run_bandwidth_command(bw_input, bw_opt, candidates_arg);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const spatk::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const spatk::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const spatk::StatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

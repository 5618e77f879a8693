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

#ifndef SPATK_DATA_MODEL_HPP
#define SPATK_DATA_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatk/errors.hpp"

namespace spatk {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
  bool contains(const Point& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

// One measured value at one planar location, tagged with a dense population
// index in 1..k.
struct Observation {
  double value = 0.0;
  Point location;
  int population = 0;
};

// Input row before validation; the population label is still a free-form name.
struct RawObservation {
  double value = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

// Immutable collection of observations grouped into k >= 2 populations.
// Construct through validate_dataset() or the factories below; all of them
// re-establish the class invariants (dense labels, per-population counts that
// sum to the total, a bounding box containing every location).
class SpatialDataset {
 public:
  int k() const { return k_; }
  std::int64_t total() const { return static_cast<std::int64_t>(observations_.size()); }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  const std::vector<Observation>& observations() const { return observations_; }
  const BoundingBox& bounding_box() const { return box_; }

  // Original label names, indexed by population - 1.
  const std::vector<std::string>& label_names() const { return label_names_; }

  // Observation indices belonging to population pop (1-based).
  const std::vector<std::int32_t>& members(int pop) const;

  // Observation indices of population pop sorted ascending by value
  // (ties broken by index, so the order is deterministic).
  const std::vector<std::int32_t>& members_by_value(int pop) const;

  // All observed values, pooled over populations and sorted ascending.
  const std::vector<double>& pooled_sorted_values() const { return pooled_sorted_values_; }

  // Same observations with a new label vector (used by the resampling
  // schemes). Every population 1..k must stay represented.
  SpatialDataset replace_labels(const std::vector<int>& labels) const;

  // Builds a dataset from pre-validated observations with dense labels 1..k.
  // Counts and bounding box are recomputed; every population must be present.
  static SpatialDataset from_observations(std::vector<Observation> observations,
                                          int k,
                                          std::vector<std::string> label_names);

 private:
  SpatialDataset() = default;
  void rebuild_indexes();

  friend SpatialDataset validate_dataset(const std::vector<RawObservation>& raw);

  std::vector<Observation> observations_;
  int k_ = 0;
  std::vector<std::int64_t> counts_;
  BoundingBox box_;
  std::vector<std::string> label_names_;
  std::vector<std::vector<std::int32_t>> members_;
  std::vector<std::vector<std::int32_t>> members_by_value_;
  std::vector<double> pooled_sorted_values_;
};

// Validates raw rows and assembles a SpatialDataset. Labels are compacted to
// 1..k in first-appearance order. Throws ValidationError (with the offending
// row index) on non-finite fields and InsufficientPopulations when fewer than
// two distinct labels are present.
SpatialDataset validate_dataset(const std::vector<RawObservation>& raw);

enum class KernelFamily {
  Epanechnikov2D,
  GaussianTruncated,
};

// Smoothing kernel: nonnegative, radially symmetric, bounded, and normalized
// to integrate to 1 over the plane. The truncated Gaussian is cut at
// truncation_radius (in bandwidth units) and renormalized.
struct KernelSpec {
  KernelFamily family = KernelFamily::Epanechnikov2D;
  double truncation_radius = 3.0;
};

// Spatial smoothing scale, in the same units as the locations.
struct Bandwidth {
  double lambda = 1.0;
};

struct GridNode {
  Point location;
  double weight = 1.0;
  double cell_area = 0.0;
};

// Spatial quadrature nodes with weight values w(s) and cell areas, plus a
// per-node inclusion mask maintained by the estimator.
struct EvaluationGrid {
  std::vector<GridNode> nodes;
  std::vector<std::uint8_t> included;  // 1 = usable at this node
  double coverage_fraction = 1.0;

  std::size_t size() const { return nodes.size(); }
  std::size_t included_count() const;

  // Sum of w(s) * cell_area over included nodes (the discrete measure of the
  // spatial integral).
  double included_weight_total() const;
};

enum class ResamplingMethod {
  Permutation,
  BlockBootstrap,
};

enum class BandwidthMode {
  Explicit,
  AutoCrossValidation,
  AutoRuleOfThumb,
};

struct BandwidthChoice {
  BandwidthMode mode = BandwidthMode::AutoRuleOfThumb;
  double value = 0.0;  // only read when mode == Explicit

  static BandwidthChoice fixed(double lambda) {
    return BandwidthChoice{BandwidthMode::Explicit, lambda};
  }
};

struct TestConfig {
  KernelSpec kernel;
  BandwidthChoice bandwidth;
  int grid_resolution = 16;
  std::optional<std::vector<double>> weight_table;  // per-node; empty = uniform
  ResamplingMethod method = ResamplingMethod::Permutation;
  int replicates = 1000;
  double block_side = 0.0;  // <= 0 selects the default (4 * lambda)
  double alpha = 0.05;
  std::uint64_t seed = 0;
  double min_denominator = 1e-12;
  double min_coverage = 0.5;
  int y_subsample = 1;   // keep every m-th pooled order statistic
  int workers = 0;       // 0 = hardware concurrency
  bool bootstrap_literal = false;  // keep resampled labels instead of re-permuting

  void check() const;
};

struct VarianceDiagnostic {
  double probe_y = 0.0;  // pooled median value
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct TestResult {
  double observed_tn = 0.0;
  std::vector<double> null_values;
  double p_value = 1.0;           // (1/B) sum 1{T^(b) >= T}
  double p_value_add_one = 1.0;   // (1 + count) / (1 + B)
  bool reject = false;
  int excluded_nodes = 0;
  double coverage_fraction = 1.0;
  double bandwidth_used = 0.0;
  double block_side_used = 0.0;   // 0 when permutation was used
  VarianceDiagnostic variance_diagnostic;
  TestConfig config;
};

}  // namespace spatk

#endif  // SPATK_DATA_MODEL_HPP

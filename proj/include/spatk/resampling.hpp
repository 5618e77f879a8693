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

#ifndef SPATK_RESAMPLING_HPP
#define SPATK_RESAMPLING_HPP

#include <cstdint>
#include <vector>

#include "spatk/data_model.hpp"
#include "spatk/rng.hpp"
#include "spatk/statistic.hpp"

namespace spatk {

struct BlockRect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

// Non-overlapping half-open cells tiling the bounding box, each holding the
// indices of the observations it contains. Empty cells are retained.
struct BlockPartition {
  std::vector<BlockRect> rects;
  std::vector<std::vector<std::int32_t>> member_indices;
  double block_side = 0.0;
  int nx = 0;
  int ny = 0;

  std::size_t size() const { return rects.size(); }
};

// Uniformly permutes the population labels across observations; every
// (value, location) pair stays fixed and the counts n_i are preserved.
SpatialDataset permute_labels(const SpatialDataset& dataset, RngStream& rng);

// Tiles the bounding box with ceil(W/side) x ceil(H/side) half-open cells
// anchored at (min_x, min_y). A point on an interior cell boundary belongs to
// the higher-index cell; the outer edge of the last cell is closed so every
// observation lands in exactly one block.
BlockPartition partition_blocks(const SpatialDataset& dataset, double block_side);

// Draws one block uniformly with replacement per tile position and translates
// its observations onto that tile. The assembled observations then get their
// labels replaced by a uniform permutation of the original label multiset
// (truncated, or extended by uniform draws from the multiset, when the
// assembled count differs from n), so the resampled statistic is
// null-calibrated. With literal_labels the copied observations keep their
// original labels instead. Throws BootstrapDegenerate when some population
// cannot be made non-empty within 100 retries.
SpatialDataset block_bootstrap_sample(const SpatialDataset& dataset,
                                      const BlockPartition& partition,
                                      RngStream& rng,
                                      bool literal_labels = false);

// B resampled statistic values, ordered by replicate. Replicate b draws its
// randomness from a substream derived from (config.seed, b) and recomputes
// the statistic with the same kernel, bandwidth, and grid geometry (the
// inclusion mask is re-derived on the resampled data), so the output is
// byte-identical for a fixed seed at any worker count. A failing replicate
// aborts the run with its index attached.
std::vector<double> null_distribution(const SpatialDataset& dataset,
                                      const TestConfig& config,
                                      const EvaluationGrid& grid,
                                      Bandwidth lambda,
                                      double block_side);

// (1/B) sum_b 1{null[b] >= observed}; with add_one, (1 + count) / (1 + B).
// Throws InvalidArgument on an empty null sample.
double p_value(double observed, const std::vector<double>& null_values,
               bool add_one = false);

// Full test: bandwidth resolution (explicit > cross-validation >
// rule-of-thumb), grid construction, observed statistic, null distribution,
// p-value, and the strict p < alpha decision.
TestResult run_test(const SpatialDataset& dataset, const TestConfig& config);

}  // namespace spatk

#endif  // SPATK_RESAMPLING_HPP

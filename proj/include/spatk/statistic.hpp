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

#ifndef SPATK_STATISTIC_HPP
#define SPATK_STATISTIC_HPP

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "spatk/data_model.hpp"
#include "spatk/estimator.hpp"

namespace spatk {

// T_n with its decomposition over population pairs (i < l, 1-based).
struct StatisticBreakdown {
  double total = 0.0;
  std::map<std::pair<int, int>, double> pairwise;
  int included_nodes = 0;
};

// Tiles the dataset's bounding box with resolution x resolution cell-center
// nodes (x fastest, then y); cell_area = box_area / resolution^2. A uniform
// weight sets w(s) = 1 everywhere; a table must carry one weight per node.
// Throws DegenerateGeometry when the box has zero area, InvalidArgument for
// resolution < 2, ValidationError for a table of the wrong length.
EvaluationGrid build_grid(const SpatialDataset& dataset, int resolution,
                          const std::optional<std::vector<double>>& weight_table = std::nullopt);

// The aggregated squared-difference statistic:
//
//   T_n = sum_{i<l} sum_{included s} [ (1/n) sum_m (F_i(s, y_m) - F_l(s, y_m))^2 ]
//         * w(s) * cell_area
//
// where the y_m run over the sorted pooled observed values, each carrying
// mass 1/n (the inner integral against the pooled ECDF is a finite sum, so it
// is evaluated exactly). With y_subsample = m > 1 only every m-th pooled
// order statistic is kept and the inner sum becomes the average over the kept
// probes. Node exclusion follows build_cdf_fields: a node is dropped for all
// pairs when any population is undefined there, and the same rule is applied
// when the statistic is recomputed on resampled data. Throws
// InsufficientCoverage through build_cdf_fields.
StatisticBreakdown compute_statistic(const SpatialDataset& dataset,
                                     EvaluationGrid& grid,
                                     const KernelSpec& kernel,
                                     Bandwidth lambda,
                                     double min_denominator,
                                     double min_coverage,
                                     int y_subsample = 1);

// Probe values used by compute_statistic: the sorted pooled values, thinned
// to every m-th order statistic when y_subsample > 1.
std::vector<double> statistic_probes(const SpatialDataset& dataset, int y_subsample);

}  // namespace spatk

#endif  // SPATK_STATISTIC_HPP

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

#ifndef SPATK_SIMULATION_HPP
#define SPATK_SIMULATION_HPP

#include <cstdint>
#include <vector>

#include "spatk/data_model.hpp"
#include "spatk/distributions.hpp"

namespace spatk {

enum class LocationModel {
  UniformIID,
  ClusterMixture,
};

enum class FieldModel {
  IIDNoise,
  MovingAverage,  // compact-range spatial dependence
};

struct Rectangle {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 1.0;
  double max_y = 1.0;
};

// Synthetic-data generator configuration. Locations are drawn per
// location_model, a latent standard-normal field with compact-range
// dependence is drawn per field_model, and each population's values are the
// latent field pushed through that population's margin, so the marginal
// distribution is exact.
struct ScenarioSpec {
  int k = 2;
  std::vector<std::int64_t> counts;
  Rectangle domain;
  LocationModel location_model = LocationModel::UniformIID;
  FieldModel field_model = FieldModel::IIDNoise;
  double field_range = 0.0;  // MovingAverage: correlation vanishes beyond 2 * range
  std::vector<MarginSpec> margins;  // one per population
  std::uint64_t seed = 0;

  void check() const;

  // Same scenario with every population count replaced and a derived seed.
  ScenarioSpec with_counts(std::int64_t per_population, std::uint64_t salt) const;
};

// Draws one dataset. The latent field attaches an i.i.d. standard normal
// seed to every point and sets each point's latent value to the normalized
// sum of the seeds within field_range, so latent values are marginally
// standard normal and exactly uncorrelated beyond 2 * field_range.
// Identical scenarios (including seed) produce identical datasets.
SpatialDataset generate_dataset(const ScenarioSpec& scenario);

// Limit of the statistic under a fixed alternative:
//
//   C = weight_total * sum_{i<l} integral [F_i(y) - F_l(y)]^2 dF(y)
//
// with F the mixture of the margins under mixture_weights (the n_i / n view
// of the pooled distribution) and the y-integral evaluated by midpoint
// quadrature with y_quadrature points per mixture component.
double plugin_constant(const std::vector<MarginSpec>& margins,
                       const std::vector<double>& mixture_weights,
                       double weight_total,
                       int y_quadrature = 4096);

struct MonteCarloResult {
  double rate = 0.0;
  int trials = 0;
  int rejections = 0;
  std::vector<double> p_values;          // plain resampling p-values
  std::vector<double> p_values_add_one;  // (1 + count) / (1 + B) variant
};

// Runs the full test on `trials` independently seeded datasets and reports
// the rejection fraction at config.alpha. Deterministic given
// (scenario.seed, config.seed); trials may run in parallel.
MonteCarloResult monte_carlo_rejection_rate(const ScenarioSpec& scenario,
                                            const TestConfig& config,
                                            int trials);

struct ConsistencyPoint {
  std::int64_t n_per_population = 0;
  double mean_tn = 0.0;
  double plugin_c = 0.0;      // computed with the realized quadrature measure
  double weight_total = 0.0;  // mean over replicates of sum w * cell_area
};

// Mean observed statistic across replicates for each per-population size,
// reported next to the plug-in constant computed with the matching
// weight_total. No resampling is involved.
std::vector<ConsistencyPoint> consistency_curve(const ScenarioSpec& scenario,
                                                const std::vector<std::int64_t>& sizes,
                                                int replicates,
                                                const TestConfig& config);

}  // namespace spatk

#endif  // SPATK_SIMULATION_HPP

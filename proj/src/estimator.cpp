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

#include "spatk/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace spatk {

SmoothedCdfField::SmoothedCdfField(int population, std::size_t num_nodes,
                                   std::size_t num_probes, double min_denominator)
    : population_(population),
      num_nodes_(num_nodes),
      num_probes_(num_probes),
      min_denominator_(min_denominator),
      denominators_(num_nodes, 0.0),
      values_(num_nodes * num_probes, 0.0) {}

// Weights are accumulated in ascending-value order (ties by index) in every
// estimator entry point, so the pointwise, batched, and statistic paths all
// perform the identical float additions and agree bit for bit.
std::optional<double> smoothed_cdf(const SpatialDataset& dataset, int population,
                                   Point s, double y, const KernelSpec& kernel,
                                   Bandwidth lambda, double min_denominator) {
  const auto& order = dataset.members_by_value(population);  // throws IndexError
  const auto& obs = dataset.observations();

  double num = 0.0;
  double den = 0.0;
  for (std::int32_t j : order) {
    const auto& o = obs[static_cast<std::size_t>(j)];
    double w = scaled_kernel(kernel, lambda, s.x - o.location.x, s.y - o.location.y);
    den += w;
    if (o.value <= y) num += w;
  }
  if (den < min_denominator) return std::nullopt;
  return num / den;
}

std::optional<double> pooled_smoothed_cdf(const SpatialDataset& dataset, Point s,
                                          double y, const KernelSpec& kernel,
                                          Bandwidth lambda, double min_denominator) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& o : dataset.observations()) {
    double w = scaled_kernel(kernel, lambda, s.x - o.location.x, s.y - o.location.y);
    den += w;
    if (o.value <= y) num += w;
  }
  if (den < min_denominator) return std::nullopt;
  return num / den;
}

double pooled_ecdf(const SpatialDataset& dataset, double y) {
  const auto& v = dataset.pooled_sorted_values();
  auto it = std::upper_bound(v.begin(), v.end(), y);
  return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

std::vector<SmoothedCdfField> build_cdf_fields(const SpatialDataset& dataset,
                                               EvaluationGrid& grid,
                                               const std::vector<double>& probe_ys,
                                               const KernelSpec& kernel,
                                               Bandwidth lambda,
                                               double min_denominator,
                                               double min_coverage) {
  if (!std::is_sorted(probe_ys.begin(), probe_ys.end())) {
    throw InvalidArgument("probe values must be sorted ascending");
  }

  const std::size_t num_nodes = grid.size();
  const std::size_t num_probes = probe_ys.size();
  const auto& obs = dataset.observations();

  std::vector<SmoothedCdfField> fields;
  fields.reserve(static_cast<std::size_t>(dataset.k()));
  for (int pop = 1; pop <= dataset.k(); ++pop) {
    fields.emplace_back(pop, num_nodes, num_probes, min_denominator);
  }

  std::vector<double> weights;  // reused per (node, population)
  for (int pop = 1; pop <= dataset.k(); ++pop) {
    const auto& order = dataset.members_by_value(pop);
    auto& field = fields[static_cast<std::size_t>(pop - 1)];
    weights.resize(order.size());

    for (std::size_t node = 0; node < num_nodes; ++node) {
      const Point s = grid.nodes[node].location;
      double den = 0.0;
      for (std::size_t m = 0; m < order.size(); ++m) {
        const auto& o = obs[static_cast<std::size_t>(order[m])];
        double w = scaled_kernel(kernel, lambda, s.x - o.location.x, s.y - o.location.y);
        weights[m] = w;
        den += w;
      }
      field.set_denominator(node, den);
      if (den < min_denominator) continue;

      // One pass over the value-sorted observations serves every probe.
      double* row = field.mutable_row(node);
      double cum = 0.0;
      std::size_t m = 0;
      for (std::size_t p = 0; p < num_probes; ++p) {
        while (m < order.size() &&
               obs[static_cast<std::size_t>(order[m])].value <= probe_ys[p]) {
          cum += weights[m];
          ++m;
        }
        row[p] = cum / den;
      }
    }
  }

  grid.included.assign(num_nodes, 1);
  std::size_t included = 0;
  for (std::size_t node = 0; node < num_nodes; ++node) {
    bool ok = true;
    for (const auto& field : fields) {
      if (!field.defined_at(node)) {
        ok = false;
        break;
      }
    }
    grid.included[node] = ok ? 1 : 0;
    included += ok;
  }
  grid.coverage_fraction =
      num_nodes == 0 ? 0.0 : static_cast<double>(included) / static_cast<double>(num_nodes);

  if (grid.coverage_fraction < min_coverage) {
    throw InsufficientCoverage(
        grid.coverage_fraction, min_coverage,
        "only " + std::to_string(included) + " of " + std::to_string(num_nodes) +
            " grid nodes have every population estimable; bandwidth too small or "
            "populations spatially disjoint");
  }
  return fields;
}

double asymptotic_variance(double f_y, const KernelSpec& kernel) {
  if (!(f_y >= 0.0 && f_y <= 1.0)) {
    throw InvalidArgument("F(y) must lie in [0, 1]");
  }
  return f_y * (1.0 - f_y) / kernel_l2_integral(kernel);
}

}  // namespace spatk

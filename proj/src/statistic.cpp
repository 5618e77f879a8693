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

#include "spatk/statistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spatk {

EvaluationGrid build_grid(const SpatialDataset& dataset, int resolution,
                          const std::optional<std::vector<double>>& weight_table) {
  if (resolution < 2) throw InvalidArgument("grid resolution must be >= 2");
  const auto& box = dataset.bounding_box();
  if (!(box.area() > 0.0)) {
    throw DegenerateGeometry("bounding box has zero area; spatial quadrature undefined");
  }

  const auto res = static_cast<std::size_t>(resolution);
  const std::size_t count = res * res;
  if (weight_table && weight_table->size() != count) {
    throw ValidationError(weight_table->size(),
                          "weight table has " + std::to_string(weight_table->size()) +
                              " entries, grid needs " + std::to_string(count));
  }
  if (weight_table) {
    double sum = 0.0;
    for (std::size_t i = 0; i < weight_table->size(); ++i) {
      double w = (*weight_table)[i];
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ValidationError(i, "weights must be finite and nonnegative");
      }
      sum += w;
    }
    if (!(sum > 0.0)) {
      throw ValidationError(0, "weight table must have positive total mass");
    }
  }

  EvaluationGrid grid;
  grid.nodes.reserve(count);
  const double dx = box.width() / resolution;
  const double dy = box.height() / resolution;
  const double cell_area = box.area() / static_cast<double>(count);
  for (std::size_t iy = 0; iy < res; ++iy) {
    for (std::size_t ix = 0; ix < res; ++ix) {
      GridNode node;
      node.location = Point{box.min_x + (static_cast<double>(ix) + 0.5) * dx,
                            box.min_y + (static_cast<double>(iy) + 0.5) * dy};
      node.weight = weight_table ? (*weight_table)[iy * res + ix] : 1.0;
      node.cell_area = cell_area;
      grid.nodes.push_back(node);
    }
  }
  grid.included.assign(count, 1);
  grid.coverage_fraction = 1.0;
  return grid;
}

std::vector<double> statistic_probes(const SpatialDataset& dataset, int y_subsample) {
  if (y_subsample < 1) throw InvalidArgument("y_subsample must be >= 1");
  const auto& pooled = dataset.pooled_sorted_values();
  if (y_subsample == 1) return pooled;
  std::vector<double> probes;
  for (std::size_t i = static_cast<std::size_t>(y_subsample) - 1; i < pooled.size();
       i += static_cast<std::size_t>(y_subsample)) {
    probes.push_back(pooled[i]);
  }
  if (probes.empty()) {
    throw InvalidArgument("y_subsample larger than the pooled sample size");
  }
  return probes;
}

// The inner integral against the pooled ECDF is a finite sum over the probe
// values, so each node is handled by one sweep through the observations in
// ascending value order: per-population weight accumulators advance with the
// probe pointer, and the squared pairwise differences of the running ratios
// are emitted at each probe. The accumulation order per population matches
// build_cdf_fields exactly.
StatisticBreakdown compute_statistic(const SpatialDataset& dataset,
                                     EvaluationGrid& grid,
                                     const KernelSpec& kernel,
                                     Bandwidth lambda,
                                     double min_denominator,
                                     double min_coverage,
                                     int y_subsample) {
  const int k = dataset.k();
  const auto& obs = dataset.observations();
  const std::size_t n = obs.size();
  const std::vector<double> probes = statistic_probes(dataset, y_subsample);
  const double probe_mass = 1.0 / static_cast<double>(probes.size());

  // Pooled sweep order: ascending value, ties by index.
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&obs](std::int32_t a, std::int32_t b) {
    double va = obs[static_cast<std::size_t>(a)].value;
    double vb = obs[static_cast<std::size_t>(b)].value;
    if (va != vb) return va < vb;
    return a < b;
  });

  std::vector<double> sweep_value(n), sweep_x(n), sweep_y(n);
  std::vector<int> sweep_pop(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = obs[static_cast<std::size_t>(order[i])];
    sweep_value[i] = o.value;
    sweep_x[i] = o.location.x;
    sweep_y[i] = o.location.y;
    sweep_pop[i] = o.population - 1;
  }

  const std::size_t num_nodes = grid.size();
  const std::size_t num_pairs = static_cast<std::size_t>(k) * (k - 1) / 2;
  std::vector<double> pair_totals(num_pairs, 0.0);
  std::vector<double> weights(n), den(static_cast<std::size_t>(k)),
      cum(static_cast<std::size_t>(k)), ratio(static_cast<std::size_t>(k)),
      node_pair(num_pairs);

  grid.included.assign(num_nodes, 1);
  std::size_t included = 0;

  for (std::size_t node = 0; node < num_nodes; ++node) {
    const Point s = grid.nodes[node].location;

    std::fill(den.begin(), den.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double w = scaled_kernel(kernel, lambda, s.x - sweep_x[i], s.y - sweep_y[i]);
      weights[i] = w;
      den[static_cast<std::size_t>(sweep_pop[i])] += w;
    }

    bool ok = true;
    for (int p = 0; p < k; ++p) {
      if (den[static_cast<std::size_t>(p)] < min_denominator) {
        ok = false;
        break;
      }
    }
    grid.included[node] = ok ? 1 : 0;
    if (!ok) continue;
    ++included;

    std::fill(cum.begin(), cum.end(), 0.0);
    std::fill(ratio.begin(), ratio.end(), 0.0);
    std::fill(node_pair.begin(), node_pair.end(), 0.0);
    std::size_t i = 0;
    for (double probe : probes) {
      while (i < n && sweep_value[i] <= probe) {
        auto p = static_cast<std::size_t>(sweep_pop[i]);
        cum[p] += weights[i];
        ratio[p] = cum[p] / den[p];
        ++i;
      }
      std::size_t pair = 0;
      for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b, ++pair) {
          double d = ratio[static_cast<std::size_t>(a)] - ratio[static_cast<std::size_t>(b)];
          node_pair[pair] += d * d;
        }
      }
    }

    const double measure = grid.nodes[node].weight * grid.nodes[node].cell_area * probe_mass;
    for (std::size_t pair = 0; pair < num_pairs; ++pair) {
      pair_totals[pair] += node_pair[pair] * measure;
    }
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

  StatisticBreakdown out;
  out.included_nodes = static_cast<int>(included);
  std::size_t pair = 0;
  for (int a = 1; a <= k; ++a) {
    for (int b = a + 1; b <= k; ++b, ++pair) {
      out.pairwise[{a, b}] = pair_totals[pair];
      out.total += pair_totals[pair];
    }
  }
  return out;
}

}  // namespace spatk

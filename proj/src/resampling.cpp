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

#include "spatk/resampling.hpp"

#include <algorithm>
#include <cmath>

#include "spatk/estimator.hpp"
#include "spatk/kernels.hpp"
#include "spatk/parallel.hpp"

namespace spatk {

namespace {

// Stream-purpose salts keep the resampling substreams disjoint from the
// simulator's data-generation substreams even when both use the same seed.
constexpr std::uint64_t kReplicateSalt = 0x7245504Cu;  // "rEPL"

constexpr int kBootstrapLabelRetries = 100;

}  // namespace

SpatialDataset permute_labels(const SpatialDataset& dataset, RngStream& rng) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(dataset.total()));
  for (const auto& o : dataset.observations()) labels.push_back(o.population);
  rng.shuffle(labels);
  return dataset.replace_labels(labels);
}

BlockPartition partition_blocks(const SpatialDataset& dataset, double block_side) {
  if (!(block_side > 0.0) || !std::isfinite(block_side)) {
    throw InvalidArgument("block side must be positive and finite");
  }
  const auto& box = dataset.bounding_box();
  const int nx = std::max(1, static_cast<int>(std::ceil(box.width() / block_side)));
  const int ny = std::max(1, static_cast<int>(std::ceil(box.height() / block_side)));

  BlockPartition part;
  part.block_side = block_side;
  part.nx = nx;
  part.ny = ny;
  part.rects.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  part.member_indices.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), {});
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      BlockRect r;
      r.min_x = box.min_x + ix * block_side;
      r.min_y = box.min_y + iy * block_side;
      r.max_x = r.min_x + block_side;
      r.max_y = r.min_y + block_side;
      part.rects.push_back(r);
    }
  }

  const auto& obs = dataset.observations();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    // Half-open cells: a point on an interior boundary floors into the
    // higher-index cell; the outermost edge is clamped shut.
    int ix = std::min(nx - 1, static_cast<int>(std::floor((obs[i].location.x - box.min_x) /
                                                          block_side)));
    int iy = std::min(ny - 1, static_cast<int>(std::floor((obs[i].location.y - box.min_y) /
                                                          block_side)));
    ix = std::max(ix, 0);
    iy = std::max(iy, 0);
    part.member_indices[static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
                        static_cast<std::size_t>(ix)]
        .push_back(static_cast<std::int32_t>(i));
  }
  return part;
}

namespace {

std::vector<Observation> assemble_blocks(const SpatialDataset& dataset,
                                         const BlockPartition& partition,
                                         RngStream& rng) {
  const auto& obs = dataset.observations();
  const std::size_t ntiles = partition.size();
  std::vector<Observation> assembled;
  assembled.reserve(obs.size());
  for (std::size_t tile = 0; tile < ntiles; ++tile) {
    const std::size_t drawn = static_cast<std::size_t>(rng.uniform_below(ntiles));
    const double dx = partition.rects[tile].min_x - partition.rects[drawn].min_x;
    const double dy = partition.rects[tile].min_y - partition.rects[drawn].min_y;
    for (std::int32_t idx : partition.member_indices[drawn]) {
      Observation o = obs[static_cast<std::size_t>(idx)];
      o.location.x += dx;
      o.location.y += dy;
      assembled.push_back(o);
    }
  }
  return assembled;
}

bool all_populations_present(const std::vector<int>& labels, int k) {
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  int found = 0;
  for (int l : labels) {
    auto& s = seen[static_cast<std::size_t>(l - 1)];
    if (!s) {
      s = 1;
      if (++found == k) return true;
    }
  }
  return found == k;
}

}  // namespace

SpatialDataset block_bootstrap_sample(const SpatialDataset& dataset,
                                      const BlockPartition& partition,
                                      RngStream& rng,
                                      bool literal_labels) {
  const int k = dataset.k();

  if (literal_labels) {
    // Paper-literal variant: blocks keep the labels they carried. Redraw when
    // a population vanishes entirely.
    for (int attempt = 0; attempt < kBootstrapLabelRetries; ++attempt) {
      std::vector<Observation> assembled = assemble_blocks(dataset, partition, rng);
      std::vector<int> labels;
      labels.reserve(assembled.size());
      for (const auto& o : assembled) labels.push_back(o.population);
      if (!assembled.empty() && all_populations_present(labels, k)) {
        return SpatialDataset::from_observations(std::move(assembled), k,
                                                 dataset.label_names());
      }
    }
    throw BootstrapDegenerate("block resamples kept missing a population after " +
                              std::to_string(kBootstrapLabelRetries) + " redraws");
  }

  std::vector<Observation> assembled = assemble_blocks(dataset, partition, rng);
  const std::size_t m = assembled.size();
  const std::size_t n = static_cast<std::size_t>(dataset.total());

  // Null calibration: the assembled observations receive a uniformly permuted
  // copy of the original label multiset, extended by uniform draws from that
  // multiset when the assembly came out larger than n.
  std::vector<int> original_labels;
  original_labels.reserve(n);
  for (const auto& o : dataset.observations()) original_labels.push_back(o.population);

  for (int attempt = 0; attempt < kBootstrapLabelRetries; ++attempt) {
    std::vector<int> pool = original_labels;
    rng.shuffle(pool);
    std::vector<int> labels(pool.begin(),
                            pool.begin() + static_cast<std::ptrdiff_t>(std::min(m, n)));
    while (labels.size() < m) {
      labels.push_back(
          original_labels[static_cast<std::size_t>(rng.uniform_below(n))]);
    }
    if (m > 0 && all_populations_present(labels, k)) {
      std::vector<Observation> relabeled = assembled;
      for (std::size_t i = 0; i < m; ++i) relabeled[i].population = labels[i];
      return SpatialDataset::from_observations(std::move(relabeled), k,
                                               dataset.label_names());
    }
  }
  throw BootstrapDegenerate("could not assign all " + std::to_string(k) +
                            " populations to a bootstrap assembly of size " +
                            std::to_string(m) + " after " +
                            std::to_string(kBootstrapLabelRetries) + " label redraws");
}

std::vector<double> null_distribution(const SpatialDataset& dataset,
                                      const TestConfig& config,
                                      const EvaluationGrid& grid,
                                      Bandwidth lambda,
                                      double block_side) {
  if (config.replicates < 1) throw InvalidArgument("replicates must be >= 1");

  BlockPartition partition;
  if (config.method == ResamplingMethod::BlockBootstrap) {
    partition = partition_blocks(dataset, block_side);
  }

  std::vector<double> values(static_cast<std::size_t>(config.replicates), 0.0);
  parallel_for(values.size(), config.workers, [&](std::size_t b) {
    try {
      RngStream rng = derive_stream(mix64(config.seed, kReplicateSalt), b);
      SpatialDataset resampled =
          config.method == ResamplingMethod::Permutation
              ? permute_labels(dataset, rng)
              : block_bootstrap_sample(dataset, partition, rng, config.bootstrap_literal);
      EvaluationGrid replicate_grid = grid;
      values[b] = compute_statistic(resampled, replicate_grid, config.kernel, lambda,
                                    config.min_denominator, config.min_coverage,
                                    config.y_subsample)
                      .total;
    } catch (const std::exception& e) {
      throw ReplicateError(b, e.what());
    }
  });
  return values;
}

double p_value(double observed, const std::vector<double>& null_values, bool add_one) {
  if (null_values.empty()) throw InvalidArgument("null sample is empty");
  std::size_t count = 0;
  for (double v : null_values) count += (v >= observed);
  if (add_one) {
    return static_cast<double>(1 + count) / static_cast<double>(1 + null_values.size());
  }
  return static_cast<double>(count) / static_cast<double>(null_values.size());
}

TestResult run_test(const SpatialDataset& dataset, const TestConfig& config) {
  config.check();

  Bandwidth lambda{};
  switch (config.bandwidth.mode) {
    case BandwidthMode::Explicit:
      lambda = Bandwidth{config.bandwidth.value};
      break;
    case BandwidthMode::AutoCrossValidation:
      lambda = select_bandwidth_cv(dataset, config.kernel,
                                   default_bandwidth_candidates(dataset),
                                   config.min_denominator);
      break;
    case BandwidthMode::AutoRuleOfThumb:
      lambda = rule_of_thumb_bandwidth(dataset);
      break;
  }

  EvaluationGrid grid = build_grid(dataset, config.grid_resolution, config.weight_table);
  const double block_side = config.block_side > 0.0 ? config.block_side : 4.0 * lambda.lambda;

  EvaluationGrid observed_grid = grid;
  StatisticBreakdown observed = compute_statistic(dataset, observed_grid, config.kernel,
                                                  lambda, config.min_denominator,
                                                  config.min_coverage, config.y_subsample);

  std::vector<double> nulls = null_distribution(dataset, config, grid, lambda, block_side);

  TestResult result;
  result.observed_tn = observed.total;
  result.null_values = std::move(nulls);
  result.p_value = p_value(result.observed_tn, result.null_values, false);
  result.p_value_add_one = p_value(result.observed_tn, result.null_values, true);
  result.reject = result.p_value < config.alpha;
  result.excluded_nodes =
      static_cast<int>(observed_grid.size()) - observed.included_nodes;
  result.coverage_fraction = observed_grid.coverage_fraction;
  result.bandwidth_used = lambda.lambda;
  result.block_side_used =
      config.method == ResamplingMethod::BlockBootstrap ? block_side : 0.0;
  result.config = config;

  // Pointwise-variance diagnostic at the pooled (lower) median, evaluated per
  // included node with the pooled smoothed CDF as the plug-in for F.
  const auto& pooled = dataset.pooled_sorted_values();
  const double y_med = pooled[(pooled.size() - 1) / 2];
  double vmin = 0.0, vmax = 0.0, vsum = 0.0;
  std::size_t vcount = 0;
  for (std::size_t node = 0; node < observed_grid.size(); ++node) {
    if (!observed_grid.included[node]) continue;
    auto f = pooled_smoothed_cdf(dataset, observed_grid.nodes[node].location, y_med,
                                 config.kernel, lambda, config.min_denominator);
    if (!f) continue;
    double v = asymptotic_variance(std::clamp(*f, 0.0, 1.0), config.kernel);
    if (vcount == 0) {
      vmin = vmax = v;
    } else {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    vsum += v;
    ++vcount;
  }
  result.variance_diagnostic.probe_y = y_med;
  if (vcount > 0) {
    result.variance_diagnostic.min = vmin;
    result.variance_diagnostic.max = vmax;
    result.variance_diagnostic.mean = vsum / static_cast<double>(vcount);
  }
  return result;
}

}  // namespace spatk

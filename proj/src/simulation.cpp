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

#include "spatk/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "spatk/kernels.hpp"
#include "spatk/parallel.hpp"
#include "spatk/resampling.hpp"
#include "spatk/rng.hpp"
#include "spatk/statistic.hpp"

namespace spatk {

namespace {

// Stream-purpose salts (disjoint from the resampling substreams).
constexpr std::uint64_t kLocationSalt = 0x4C4F4341u;  // "LOCA"
constexpr std::uint64_t kFieldSalt = 0x4649454Cu;     // "FIEL"
constexpr std::uint64_t kTrialDataSalt = 0x54444154u; // "TDAT"
constexpr std::uint64_t kTrialTestSalt = 0x54545354u; // "TTST"
constexpr std::uint64_t kSizeSalt = 0x53495A45u;      // "SIZE"

constexpr int kClusterCount = 4;
constexpr double kClusterSpreadFraction = 0.1;

}  // namespace

void ScenarioSpec::check() const {
  if (k < 2) throw InvalidArgument("scenario needs k >= 2");
  if (counts.size() != static_cast<std::size_t>(k)) {
    throw InvalidArgument("scenario needs one count per population");
  }
  for (auto c : counts) {
    if (c < 1) throw InvalidArgument("population counts must be positive");
  }
  if (margins.size() != static_cast<std::size_t>(k)) {
    throw InvalidArgument("scenario needs one margin per population");
  }
  for (const auto& m : margins) {
    if (m.family == MarginSpec::Family::Normal && !(m.b > 0.0)) {
      throw InvalidArgument("normal margin needs sigma > 0");
    }
    if (m.family == MarginSpec::Family::Uniform && !(m.b > m.a)) {
      throw InvalidArgument("uniform margin needs upper > lower");
    }
  }
  if (!(domain.max_x > domain.min_x) || !(domain.max_y > domain.min_y)) {
    throw InvalidArgument("scenario domain must have positive area");
  }
  if (field_model == FieldModel::MovingAverage && field_range < 0.0) {
    throw InvalidArgument("field range must be >= 0");
  }
}

ScenarioSpec ScenarioSpec::with_counts(std::int64_t per_population,
                                       std::uint64_t salt) const {
  ScenarioSpec out = *this;
  out.counts.assign(static_cast<std::size_t>(k), per_population);
  out.seed = mix64(seed, static_cast<std::uint64_t>(per_population), salt);
  return out;
}

namespace {

std::vector<Point> draw_locations(const ScenarioSpec& scenario, std::size_t n,
                                  RngStream& rng) {
  const auto& d = scenario.domain;
  const double w = d.max_x - d.min_x;
  const double h = d.max_y - d.min_y;
  std::vector<Point> pts;
  pts.reserve(n);

  if (scenario.location_model == LocationModel::UniformIID) {
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(Point{d.min_x + w * rng.uniform01(), d.min_y + h * rng.uniform01()});
    }
    return pts;
  }

  // ClusterMixture: a handful of uniformly placed centers, each point picks a
  // center and scatters around it; clamped into the domain.
  std::vector<Point> centers;
  centers.reserve(kClusterCount);
  for (int c = 0; c < kClusterCount; ++c) {
    centers.push_back(Point{d.min_x + w * rng.uniform01(), d.min_y + h * rng.uniform01()});
  }
  const double spread = kClusterSpreadFraction * std::min(w, h);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centers[static_cast<std::size_t>(rng.uniform_below(kClusterCount))];
    double x = std::clamp(c.x + spread * rng.normal(), d.min_x, d.max_x);
    double y = std::clamp(c.y + spread * rng.normal(), d.min_y, d.max_y);
    pts.push_back(Point{x, y});
  }
  return pts;
}

// Latent field: i.i.d. standard normal seeds g_j per point; with a positive
// range each point's latent value is sum(neighbor seeds) / sqrt(#neighbors)
// over points within `range`, which keeps the marginal standard normal and
// makes the correlation exactly zero beyond 2 * range.
std::vector<double> draw_latent_field(const ScenarioSpec& scenario,
                                      const std::vector<Point>& pts, RngStream& rng) {
  const std::size_t n = pts.size();
  std::vector<double> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = rng.normal();

  const double range = scenario.field_model == FieldModel::MovingAverage
                           ? scenario.field_range
                           : 0.0;
  if (range <= 0.0) return seeds;

  // Spatial hash with cell size = range; neighbor indices are sorted so the
  // accumulation order is reproducible.
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> cells;
  auto cell_key = [range](const Point& p) {
    auto cx = static_cast<std::int64_t>(std::floor(p.x / range));
    auto cy = static_cast<std::int64_t>(std::floor(p.y / range));
    return (static_cast<std::uint64_t>(cx) << 32) ^
           (static_cast<std::uint64_t>(cy) & 0xFFFFFFFFull);
  };
  for (std::size_t i = 0; i < n; ++i) {
    cells[cell_key(pts[i])].push_back(static_cast<std::int32_t>(i));
  }

  std::vector<double> latent(n);
  std::vector<std::int32_t> neighbors;
  const double r2 = range * range;
  for (std::size_t i = 0; i < n; ++i) {
    neighbors.clear();
    auto cx = static_cast<std::int64_t>(std::floor(pts[i].x / range));
    auto cy = static_cast<std::int64_t>(std::floor(pts[i].y / range));
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        std::uint64_t key = (static_cast<std::uint64_t>(cx + dx) << 32) ^
                            (static_cast<std::uint64_t>(cy + dy) & 0xFFFFFFFFull);
        auto it = cells.find(key);
        if (it == cells.end()) continue;
        for (std::int32_t j : it->second) {
          double ddx = pts[i].x - pts[static_cast<std::size_t>(j)].x;
          double ddy = pts[i].y - pts[static_cast<std::size_t>(j)].y;
          if (ddx * ddx + ddy * ddy <= r2) neighbors.push_back(j);
        }
      }
    }
    std::sort(neighbors.begin(), neighbors.end());
    double sum = 0.0;
    for (std::int32_t j : neighbors) sum += seeds[static_cast<std::size_t>(j)];
    latent[i] = sum / std::sqrt(static_cast<double>(neighbors.size()));
  }
  return latent;
}

}  // namespace

SpatialDataset generate_dataset(const ScenarioSpec& scenario) {
  scenario.check();

  std::size_t n = 0;
  for (auto c : scenario.counts) n += static_cast<std::size_t>(c);

  RngStream loc_rng = derive_stream(mix64(scenario.seed, kLocationSalt), 0);
  std::vector<Point> pts = draw_locations(scenario, n, loc_rng);

  RngStream field_rng = derive_stream(mix64(scenario.seed, kFieldSalt), 0);
  std::vector<double> latent = draw_latent_field(scenario, pts, field_rng);

  std::vector<Observation> obs;
  obs.reserve(n);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(scenario.k));
  std::size_t at = 0;
  for (int pop = 1; pop <= scenario.k; ++pop) {
    names.push_back(std::to_string(pop));
    const auto& margin = scenario.margins[static_cast<std::size_t>(pop - 1)];
    for (std::int64_t j = 0; j < scenario.counts[static_cast<std::size_t>(pop - 1)]; ++j) {
      obs.push_back(Observation{margin.from_standard_normal(latent[at]), pts[at], pop});
      ++at;
    }
  }
  return SpatialDataset::from_observations(std::move(obs), scenario.k, std::move(names));
}

double plugin_constant(const std::vector<MarginSpec>& margins,
                       const std::vector<double>& mixture_weights,
                       double weight_total,
                       int y_quadrature) {
  if (margins.size() < 2) throw InvalidArgument("need at least two margins");
  if (margins.size() != mixture_weights.size()) {
    throw InvalidArgument("one mixture weight per margin required");
  }
  if (y_quadrature < 1) throw InvalidArgument("y_quadrature must be >= 1");
  double wsum = 0.0;
  for (double w : mixture_weights) {
    if (w < 0.0) throw InvalidArgument("mixture weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw InvalidArgument("mixture weights must sum to 1");
  }

  // integral [F_i - F_l]^2 dF with F the mixture: expand dF over the
  // components and substitute y = F_m^{-1}(u), so each component contributes
  // a midpoint quadrature over u in (0, 1).
  const int k = static_cast<int>(margins.size());
  double total = 0.0;
  for (std::size_t m = 0; m < margins.size(); ++m) {
    if (mixture_weights[m] == 0.0) continue;
    double component = 0.0;
    for (int t = 0; t < y_quadrature; ++t) {
      double u = (static_cast<double>(t) + 0.5) / static_cast<double>(y_quadrature);
      double y = margins[m].quantile(u);
      for (int i = 0; i < k; ++i) {
        for (int l = i + 1; l < k; ++l) {
          double d = margins[static_cast<std::size_t>(i)].cdf(y) -
                     margins[static_cast<std::size_t>(l)].cdf(y);
          component += d * d;
        }
      }
    }
    total += mixture_weights[m] * component / static_cast<double>(y_quadrature);
  }
  return weight_total * total;
}

MonteCarloResult monte_carlo_rejection_rate(const ScenarioSpec& scenario,
                                            const TestConfig& config,
                                            int trials) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  scenario.check();
  config.check();

  MonteCarloResult out;
  out.trials = trials;
  out.p_values.assign(static_cast<std::size_t>(trials), 0.0);
  out.p_values_add_one.assign(static_cast<std::size_t>(trials), 0.0);
  std::vector<std::uint8_t> rejected(static_cast<std::size_t>(trials), 0);

  parallel_for(static_cast<std::size_t>(trials), config.workers, [&](std::size_t t) {
    try {
      ScenarioSpec trial_scenario = scenario;
      trial_scenario.seed = mix64(scenario.seed, kTrialDataSalt, t);
      TestConfig trial_config = config;
      trial_config.seed = mix64(config.seed, kTrialTestSalt, t);
      trial_config.workers = 1;  // trials are the unit of parallelism

      SpatialDataset data = generate_dataset(trial_scenario);
      TestResult result = run_test(data, trial_config);
      out.p_values[t] = result.p_value;
      out.p_values_add_one[t] = result.p_value_add_one;
      rejected[t] = result.reject ? 1 : 0;
    } catch (const std::exception& e) {
      throw StatError("trial " + std::to_string(t) + ": " + e.what());
    }
  });

  for (auto r : rejected) out.rejections += r;
  out.rate = static_cast<double>(out.rejections) / static_cast<double>(trials);
  return out;
}

std::vector<ConsistencyPoint> consistency_curve(const ScenarioSpec& scenario,
                                                const std::vector<std::int64_t>& sizes,
                                                int replicates,
                                                const TestConfig& config) {
  if (replicates < 1) throw InvalidArgument("replicates must be >= 1");
  scenario.check();
  config.check();

  std::vector<double> mixture(static_cast<std::size_t>(scenario.k),
                              1.0 / static_cast<double>(scenario.k));

  std::vector<ConsistencyPoint> points;
  for (std::int64_t size : sizes) {
    std::vector<double> totals(static_cast<std::size_t>(replicates), 0.0);
    std::vector<double> measures(static_cast<std::size_t>(replicates), 0.0);

    parallel_for(static_cast<std::size_t>(replicates), config.workers, [&](std::size_t r) {
      ScenarioSpec rep = scenario.with_counts(size, mix64(kSizeSalt, r));
      SpatialDataset data = generate_dataset(rep);
      Bandwidth lambda = config.bandwidth.mode == BandwidthMode::Explicit
                             ? Bandwidth{config.bandwidth.value}
                             : rule_of_thumb_bandwidth(data);
      EvaluationGrid grid = build_grid(data, config.grid_resolution, config.weight_table);
      StatisticBreakdown stat =
          compute_statistic(data, grid, config.kernel, lambda, config.min_denominator,
                            config.min_coverage, config.y_subsample);
      totals[r] = stat.total;
      measures[r] = grid.included_weight_total();
    });

    ConsistencyPoint p;
    p.n_per_population = size;
    for (int r = 0; r < replicates; ++r) {
      p.mean_tn += totals[static_cast<std::size_t>(r)];
      p.weight_total += measures[static_cast<std::size_t>(r)];
    }
    p.mean_tn /= static_cast<double>(replicates);
    p.weight_total /= static_cast<double>(replicates);
    p.plugin_c = plugin_constant(scenario.margins, mixture, p.weight_total);
    points.push_back(p);
  }
  return points;
}

}  // namespace spatk

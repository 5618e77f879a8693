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

// Test-only oracles and fixtures. The statistic oracle is a literal
// quadruple-loop evaluation with its own kernel arithmetic, independent of
// the library's batched path.

#ifndef SPATK_TESTS_HELPERS_HPP
#define SPATK_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "spatk/data_model.hpp"
#include "spatk/rng.hpp"

namespace spatk_test {

inline spatk::SpatialDataset make_dataset(
    const std::vector<std::tuple<double, double, double, std::string>>& rows) {
  std::vector<spatk::RawObservation> raw;
  for (const auto& [value, x, y, label] : rows) {
    raw.push_back(spatk::RawObservation{value, x, y, label});
  }
  return spatk::validate_dataset(raw);
}

// ---------------------------------------------------------------------------
// Independent statistic oracle.

inline double oracle_kernel(const spatk::KernelSpec& kernel, double dx, double dy,
                            double lambda) {
  const double r = std::sqrt(dx * dx + dy * dy) / lambda;
  double k = 0.0;
  if (kernel.family == spatk::KernelFamily::Epanechnikov2D) {
    if (r < 1.0) k = (2.0 / std::numbers::pi) * (1.0 - r * r);
  } else {
    const double radius = kernel.truncation_radius;
    if (r <= radius) {
      k = std::exp(-0.5 * r * r) /
          (2.0 * std::numbers::pi * (1.0 - std::exp(-0.5 * radius * radius)));
    }
  }
  return k / (lambda * lambda);
}

struct OracleResult {
  double total = 0.0;
  int included_nodes = 0;
  bool coverage_ok = true;
  double coverage = 0.0;
};

// Literal evaluation of the discretized statistic: for every population pair,
// every grid node, and every pooled value, recompute both smoothed CDFs by a
// direct loop over the population's observations.
inline OracleResult oracle_statistic(const spatk::SpatialDataset& data,
                                     const std::vector<spatk::GridNode>& nodes,
                                     const spatk::KernelSpec& kernel, double lambda,
                                     double min_denominator, double min_coverage) {
  const auto& obs = data.observations();
  std::vector<double> pooled;
  for (const auto& o : obs) pooled.push_back(o.value);
  std::sort(pooled.begin(), pooled.end());
  const double n = static_cast<double>(pooled.size());

  OracleResult out;
  double total = 0.0;
  for (const auto& node : nodes) {
    std::vector<double> denom(static_cast<std::size_t>(data.k()), 0.0);
    for (const auto& o : obs) {
      denom[static_cast<std::size_t>(o.population - 1)] +=
          oracle_kernel(kernel, node.location.x - o.location.x,
                        node.location.y - o.location.y, lambda);
    }
    bool usable = true;
    for (double d : denom) {
      if (d < min_denominator) usable = false;
    }
    if (!usable) continue;
    out.included_nodes++;

    for (int i = 1; i <= data.k(); ++i) {
      for (int l = i + 1; l <= data.k(); ++l) {
        double inner = 0.0;
        for (double y : pooled) {
          double num_i = 0.0, num_l = 0.0;
          for (const auto& o : obs) {
            if (o.value > y) continue;
            double w = oracle_kernel(kernel, node.location.x - o.location.x,
                                     node.location.y - o.location.y, lambda);
            if (o.population == i) num_i += w;
            if (o.population == l) num_l += w;
          }
          double diff = num_i / denom[static_cast<std::size_t>(i - 1)] -
                        num_l / denom[static_cast<std::size_t>(l - 1)];
          inner += diff * diff;
        }
        total += (inner / n) * node.weight * node.cell_area;
      }
    }
  }
  out.total = total;
  out.coverage = nodes.empty()
                     ? 0.0
                     : static_cast<double>(out.included_nodes) /
                           static_cast<double>(nodes.size());
  out.coverage_ok = out.coverage >= min_coverage;
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature oracles.

// 2 pi * integral_0^R f(r) r dr by composite Simpson. The endpoint sample is
// nudged inside the interval: truncated kernels jump to zero there and a
// rounded-up r * r would otherwise drop the boundary term.
inline double polar_mass(const std::function<double(double)>& profile, double radius,
                         int intervals = 20000) {
  if (intervals % 2 == 1) ++intervals;
  const double h = radius / intervals;
  double sum = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    double r = i == intervals ? std::nextafter(radius, 0.0) : i * h;
    double f = profile(r) * r;
    double c = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += c * f;
  }
  return 2.0 * std::numbers::pi * sum * h / 3.0;
}

// Plain midpoint quadrature over a square; cruder than the polar rule but
// makes no use of radial symmetry.
inline double cartesian_mass(const std::function<double(double, double)>& f,
                             double half_extent, int cells_per_axis = 1200) {
  const double h = 2.0 * half_extent / cells_per_axis;
  double sum = 0.0;
  for (int ix = 0; ix < cells_per_axis; ++ix) {
    double x = -half_extent + (ix + 0.5) * h;
    for (int iy = 0; iy < cells_per_axis; ++iy) {
      double y = -half_extent + (iy + 0.5) * h;
      sum += f(x, y);
    }
  }
  return sum * h * h;
}

// ---------------------------------------------------------------------------
// Statistical test helpers.

// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

// Asymptotic critical value of the KS statistic at significance alpha.
inline double ks_critical(std::size_t n, double alpha) {
  double c;
  if (alpha == 0.01) c = 1.6276;
  else if (alpha == 0.05) c = 1.3581;
  else if (alpha == 0.10) c = 1.2238;
  else c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c / std::sqrt(static_cast<double>(n));
}

inline bool ks_pass(const std::vector<double>& sample,
                    const std::function<double(double)>& cdf, double alpha) {
  return ks_statistic(sample, cdf) < ks_critical(sample.size(), alpha);
}

inline double pearson_correlation(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// Random fixtures.

struct FixtureOptions {
  std::int64_t min_n = 4;
  std::int64_t max_n = 12;
  int max_k = 3;
  int max_grid = 3;
};

struct RandomFixture {
  spatk::SpatialDataset data;
  std::vector<spatk::GridNode> nodes;
  double lambda = 0.5;
};

inline RandomFixture random_fixture(spatk::RngStream& rng,
                                    const FixtureOptions& opt = {}) {
  const int k = 2 + static_cast<int>(rng.uniform_below(
                        static_cast<std::uint64_t>(opt.max_k - 1)));
  const auto n = static_cast<std::int64_t>(
      static_cast<std::uint64_t>(opt.min_n) +
      rng.uniform_below(static_cast<std::uint64_t>(opt.max_n - opt.min_n + 1)));

  std::vector<spatk::RawObservation> raw;
  for (std::int64_t i = 0; i < n; ++i) {
    spatk::RawObservation r;
    // Every population has at least one row; the rest are assigned uniformly.
    int pop = i < k ? static_cast<int>(i)
                    : static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k)));
    r.label = std::string(1, static_cast<char>('a' + pop));
    r.x = rng.uniform01();
    r.y = rng.uniform01();
    r.value = rng.normal();
    raw.push_back(r);
  }

  RandomFixture fx{spatk::validate_dataset(raw), {}, 0.3 + 0.7 * rng.uniform01()};
  const int g = 2 + static_cast<int>(rng.uniform_below(
                        static_cast<std::uint64_t>(opt.max_grid - 1)));
  const auto& box = fx.data.bounding_box();
  for (int iy = 0; iy < g; ++iy) {
    for (int ix = 0; ix < g; ++ix) {
      spatk::GridNode node;
      node.location = spatk::Point{box.min_x + (ix + 0.5) * box.width() / g,
                                   box.min_y + (iy + 0.5) * box.height() / g};
      node.weight = 0.5 + rng.uniform01();
      node.cell_area = box.area() / (g * g);
      fx.nodes.push_back(node);
    }
  }
  return fx;
}

inline spatk::EvaluationGrid grid_from_nodes(const std::vector<spatk::GridNode>& nodes) {
  spatk::EvaluationGrid grid;
  grid.nodes = nodes;
  grid.included.assign(nodes.size(), 1);
  grid.coverage_fraction = 1.0;
  return grid;
}

}  // namespace spatk_test

#endif  // SPATK_TESTS_HELPERS_HPP

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

#include "spatk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spatk {

namespace {

constexpr double kPi = std::numbers::pi;

// Epanechnikov profile (2/pi)(1 - r^2) on the unit disc; the constant makes
// the planar integral 1.
double epanechnikov(double r2) {
  if (r2 >= 1.0) return 0.0;
  return (2.0 / kPi) * (1.0 - r2);
}

// Gaussian profile exp(-r^2/2) / (2 pi), truncated at radius R and divided by
// its retained mass 1 - exp(-R^2/2) so the truncated kernel still integrates
// to 1.
double gaussian_truncated(double r2, double radius) {
  if (r2 > radius * radius) return 0.0;
  double retained = 1.0 - std::exp(-0.5 * radius * radius);
  return std::exp(-0.5 * r2) / (2.0 * kPi * retained);
}

}  // namespace

double kernel_eval(const KernelSpec& kernel, double dx, double dy) {
  double r2 = dx * dx + dy * dy;
  switch (kernel.family) {
    case KernelFamily::Epanechnikov2D:
      return epanechnikov(r2);
    case KernelFamily::GaussianTruncated:
      return gaussian_truncated(r2, kernel.truncation_radius);
  }
  return 0.0;
}

double scaled_kernel(const KernelSpec& kernel, Bandwidth lambda, double dx, double dy) {
  double inv = 1.0 / lambda.lambda;
  return inv * inv * kernel_eval(kernel, dx * inv, dy * inv);
}

double kernel_support_radius(const KernelSpec& kernel) {
  switch (kernel.family) {
    case KernelFamily::Epanechnikov2D:
      return 1.0;
    case KernelFamily::GaussianTruncated:
      return kernel.truncation_radius;
  }
  return 0.0;
}

double kernel_l2_integral(const KernelSpec& kernel) {
  switch (kernel.family) {
    case KernelFamily::Epanechnikov2D:
      return 4.0 / (3.0 * kPi);
    case KernelFamily::GaussianTruncated: {
      double r = kernel.truncation_radius;
      double retained = 1.0 - std::exp(-0.5 * r * r);
      return (1.0 - std::exp(-r * r)) / (4.0 * kPi * retained * retained);
    }
  }
  return 0.0;
}

double rule_of_thumb_lambda(double box_width, double box_height, std::int64_t n) {
  double extent = std::max(box_width, box_height);
  if (!(extent > 0.0)) {
    throw DegenerateGeometry("all locations coincide; no spatial scale to derive");
  }
  return extent * std::pow(static_cast<double>(n), -1.0 / 6.0);
}

Bandwidth rule_of_thumb_bandwidth(const SpatialDataset& dataset) {
  const auto& box = dataset.bounding_box();
  return Bandwidth{rule_of_thumb_lambda(box.width(), box.height(), dataset.total())};
}

std::vector<double> default_bandwidth_candidates(const SpatialDataset& dataset) {
  double rot = rule_of_thumb_bandwidth(dataset).lambda;
  return {0.25 * rot, 0.5 * rot, rot, 2.0 * rot, 4.0 * rot};
}

namespace {

// Pooled-value deciles, probed with the inverse-ECDF convention.
std::vector<double> pooled_deciles(const SpatialDataset& dataset) {
  const auto& v = dataset.pooled_sorted_values();
  auto n = static_cast<double>(v.size());
  std::vector<double> probes;
  probes.reserve(9);
  for (int d = 1; d <= 9; ++d) {
    auto idx = static_cast<std::size_t>(std::ceil(0.1 * d * n)) - 1;
    idx = std::min(idx, v.size() - 1);
    probes.push_back(v[idx]);
  }
  return probes;
}

}  // namespace

std::vector<CvScore> cross_validation_scores(const SpatialDataset& dataset,
                                             const KernelSpec& kernel,
                                             const std::vector<double>& candidates,
                                             double min_denominator) {
  if (candidates.empty()) throw InvalidArgument("candidate list is empty");
  for (double c : candidates) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw InvalidArgument("bandwidth candidates must be positive and finite");
    }
  }

  const std::vector<double> probes = pooled_deciles(dataset);
  const auto& obs = dataset.observations();
  std::vector<CvScore> scores;
  scores.reserve(candidates.size());

  for (double lambda : candidates) {
    Bandwidth bw{lambda};
    double sum = 0.0;
    std::int64_t used = 0;

    for (int pop = 1; pop <= dataset.k(); ++pop) {
      const auto& idx = dataset.members(pop);
      for (std::int32_t j : idx) {
        const auto& oj = obs[static_cast<std::size_t>(j)];
        // Leave-one-out numerators at each probe and denominator at s_j.
        double denom = 0.0;
        double nums[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
        for (std::int32_t m : idx) {
          if (m == j) continue;
          const auto& om = obs[static_cast<std::size_t>(m)];
          double w = scaled_kernel(kernel, bw, oj.location.x - om.location.x,
                                   oj.location.y - om.location.y);
          if (w == 0.0) continue;
          denom += w;
          for (int p = 0; p < 9; ++p) {
            if (om.value <= probes[static_cast<std::size_t>(p)]) nums[p] += w;
          }
        }
        if (denom < min_denominator) continue;
        double err = 0.0;
        for (int p = 0; p < 9; ++p) {
          double ind = (oj.value <= probes[static_cast<std::size_t>(p)]) ? 1.0 : 0.0;
          double d = ind - nums[p] / denom;
          err += d * d;
        }
        sum += err / 9.0;
        ++used;
      }
    }

    CvScore s;
    s.lambda = lambda;
    s.used = used;
    if (used > 0) s.score = sum / static_cast<double>(used);
    scores.push_back(s);
  }
  return scores;
}

Bandwidth select_bandwidth_cv(const SpatialDataset& dataset,
                              const KernelSpec& kernel,
                              const std::vector<double>& candidates,
                              double min_denominator) {
  auto scores = cross_validation_scores(dataset, kernel, candidates, min_denominator);
  std::sort(scores.begin(), scores.end(),
            [](const CvScore& a, const CvScore& b) { return a.lambda < b.lambda; });

  const CvScore* best = nullptr;
  for (const auto& s : scores) {
    if (!s.score) continue;
    if (best == nullptr || *s.score < *best->score) best = &s;  // ties keep the smaller lambda
  }
  if (best == nullptr) {
    throw BandwidthSelectionFailed(
        "every candidate bandwidth left all leave-one-out denominators below " +
        std::to_string(min_denominator));
  }
  return Bandwidth{best->lambda};
}

}  // namespace spatk

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

#ifndef SPATK_KERNELS_HPP
#define SPATK_KERNELS_HPP

#include <optional>
#include <vector>

#include "spatk/data_model.hpp"

namespace spatk {

// K(u) for displacement u = (dx, dy). Radially symmetric, nonnegative,
// integrates to 1 over the plane, zero outside its support (the unit disc
// for Epanechnikov2D, truncation_radius for GaussianTruncated).
double kernel_eval(const KernelSpec& kernel, double dx, double dy);

// Scaled kernel (1/lambda^2) K(u / lambda).
double scaled_kernel(const KernelSpec& kernel, Bandwidth lambda, double dx, double dy);

// Radius beyond which the kernel is identically zero (in kernel units).
double kernel_support_radius(const KernelSpec& kernel);

// Integral of K^2 over the plane, in closed form per family.
// Epanechnikov2D: 4 / (3 pi). GaussianTruncated at radius R:
// (1 - exp(-R^2)) / (4 pi (1 - exp(-R^2 / 2))^2).
double kernel_l2_integral(const KernelSpec& kernel);

// Default bandwidth: lambda = max(box_width, box_height) * n^(-1/6). Shrinks
// with n on a fixed domain while n * lambda^2 still grows. Throws
// DegenerateGeometry when all locations coincide.
Bandwidth rule_of_thumb_bandwidth(const SpatialDataset& dataset);

// Formula behind rule_of_thumb_bandwidth, exposed for direct checks.
double rule_of_thumb_lambda(double box_width, double box_height, std::int64_t n);

// Default candidate ladder for data-driven selection: rule-of-thumb scaled by
// {0.25, 0.5, 1, 2, 4}.
std::vector<double> default_bandwidth_candidates(const SpatialDataset& dataset);

struct CvScore {
  double lambda = 0.0;
  std::optional<double> score;  // empty when every observation was skipped
  std::int64_t used = 0;        // observations entering the average
};

// Leave-one-out score per candidate: for each observation j, the smoothed CDF
// of j's own population is re-estimated without j at j's location and
// compared against 1{Y_j <= y} over the pooled-value deciles (9 probes).
// Observations whose leave-one-out denominator falls below min_denominator
// are skipped; a candidate with no usable observation gets no score.
std::vector<CvScore> cross_validation_scores(const SpatialDataset& dataset,
                                             const KernelSpec& kernel,
                                             const std::vector<double>& candidates,
                                             double min_denominator = 1e-12);

// Returns the candidate minimizing the leave-one-out score, ties broken
// toward the smaller lambda. Throws BandwidthSelectionFailed when every
// candidate is disqualified, InvalidArgument on an empty or non-positive
// candidate list.
Bandwidth select_bandwidth_cv(const SpatialDataset& dataset,
                              const KernelSpec& kernel,
                              const std::vector<double>& candidates,
                              double min_denominator = 1e-12);

}  // namespace spatk

#endif  // SPATK_KERNELS_HPP

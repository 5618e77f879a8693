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

#ifndef SPATK_ESTIMATOR_HPP
#define SPATK_ESTIMATOR_HPP

#include <optional>
#include <vector>

#include "spatk/data_model.hpp"
#include "spatk/kernels.hpp"

namespace spatk {

// Spatially smoothed CDF of one population, evaluated over a grid of
// locations and a sorted list of probe values. An entry is defined exactly
// when the node's kernel-weight denominator reaches min_denominator; since
// the denominator depends only on the location, definedness is per node.
class SmoothedCdfField {
 public:
  SmoothedCdfField(int population, std::size_t num_nodes, std::size_t num_probes,
                   double min_denominator);

  int population() const { return population_; }
  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_probes() const { return num_probes_; }

  bool defined_at(std::size_t node) const {
    return denominators_[node] >= min_denominator_;
  }
  double denominator(std::size_t node) const { return denominators_[node]; }

  std::optional<double> value(std::size_t node, std::size_t probe) const {
    if (!defined_at(node)) return std::nullopt;
    return values_[node * num_probes_ + probe];
  }

  // Raw access for the statistic's inner loops; only meaningful where
  // defined_at(node) holds.
  const double* row(std::size_t node) const { return &values_[node * num_probes_]; }

  double* mutable_row(std::size_t node) { return &values_[node * num_probes_]; }
  void set_denominator(std::size_t node, double d) { denominators_[node] = d; }

 private:
  int population_;
  std::size_t num_nodes_;
  std::size_t num_probes_;
  double min_denominator_;
  std::vector<double> denominators_;
  std::vector<double> values_;
};

// Pointwise smoothed CDF of population `population` at location s and value
// y: sum_j K_lambda(s - s_ij) 1{Y_ij <= y} / sum_j K_lambda(s - s_ij) over
// that population's observations. Empty when the denominator falls below
// min_denominator. Throws IndexError for a population outside 1..k.
std::optional<double> smoothed_cdf(const SpatialDataset& dataset, int population,
                                   Point s, double y, const KernelSpec& kernel,
                                   Bandwidth lambda, double min_denominator);

// Same numerator/denominator but pooled over every observation regardless of
// population; used for the per-node variance diagnostic.
std::optional<double> pooled_smoothed_cdf(const SpatialDataset& dataset, Point s,
                                          double y, const KernelSpec& kernel,
                                          Bandwidth lambda, double min_denominator);

// Pooled empirical CDF: (1/n) sum over all observations of 1{Y <= y}.
double pooled_ecdf(const SpatialDataset& dataset, double y);

// Evaluates every population's smoothed CDF at every (grid node, probe value)
// pair. Values match pointwise smoothed_cdf bit for bit; per node the
// population's observations are visited once in value order, so the cost per
// node is O(n_i + #probes) instead of O(n_i * #probes).
//
// A node is excluded when ANY population is undefined there; grid.included
// and grid.coverage_fraction are updated in place. Throws
// InsufficientCoverage when the surviving fraction drops below min_coverage.
std::vector<SmoothedCdfField> build_cdf_fields(const SpatialDataset& dataset,
                                               EvaluationGrid& grid,
                                               const std::vector<double>& probe_ys,
                                               const KernelSpec& kernel,
                                               Bandwidth lambda,
                                               double min_denominator,
                                               double min_coverage);

// Pointwise limit variance F(y)(1 - F(y)) / integral(K^2), with the kernel
// integral in closed form. Diagnostic only; inference is resampling-based.
double asymptotic_variance(double f_y, const KernelSpec& kernel);

}  // namespace spatk

#endif  // SPATK_ESTIMATOR_HPP

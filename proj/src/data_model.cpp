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

#include "spatk/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace spatk {

namespace {

BoundingBox compute_box(const std::vector<Observation>& observations) {
  BoundingBox box;
  box.min_x = box.min_y = std::numeric_limits<double>::infinity();
  box.max_x = box.max_y = -std::numeric_limits<double>::infinity();
  for (const auto& o : observations) {
    box.min_x = std::min(box.min_x, o.location.x);
    box.min_y = std::min(box.min_y, o.location.y);
    box.max_x = std::max(box.max_x, o.location.x);
    box.max_y = std::max(box.max_y, o.location.y);
  }
  return box;
}

}  // namespace

void SpatialDataset::rebuild_indexes() {
  box_ = compute_box(observations_);

  counts_.assign(static_cast<std::size_t>(k_), 0);
  members_.assign(static_cast<std::size_t>(k_), {});
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    int pop = observations_[i].population;
    counts_[static_cast<std::size_t>(pop - 1)]++;
    members_[static_cast<std::size_t>(pop - 1)].push_back(static_cast<std::int32_t>(i));
  }

  // Value-sorted member lists, ties broken by index for a deterministic
  // accumulation order shared by the pointwise and batched estimators.
  members_by_value_ = members_;
  for (auto& idx : members_by_value_) {
    std::sort(idx.begin(), idx.end(), [this](std::int32_t a, std::int32_t b) {
      double va = observations_[static_cast<std::size_t>(a)].value;
      double vb = observations_[static_cast<std::size_t>(b)].value;
      if (va != vb) return va < vb;
      return a < b;
    });
  }

  pooled_sorted_values_.clear();
  pooled_sorted_values_.reserve(observations_.size());
  for (const auto& o : observations_) pooled_sorted_values_.push_back(o.value);
  std::sort(pooled_sorted_values_.begin(), pooled_sorted_values_.end());
}

const std::vector<std::int32_t>& SpatialDataset::members(int pop) const {
  if (pop < 1 || pop > k_) {
    throw IndexError("population index " + std::to_string(pop) + " outside 1.." +
                     std::to_string(k_));
  }
  return members_[static_cast<std::size_t>(pop - 1)];
}

const std::vector<std::int32_t>& SpatialDataset::members_by_value(int pop) const {
  if (pop < 1 || pop > k_) {
    throw IndexError("population index " + std::to_string(pop) + " outside 1.." +
                     std::to_string(k_));
  }
  return members_by_value_[static_cast<std::size_t>(pop - 1)];
}

SpatialDataset SpatialDataset::replace_labels(const std::vector<int>& labels) const {
  if (labels.size() != observations_.size()) {
    throw InvalidArgument("label vector length " + std::to_string(labels.size()) +
                          " does not match observation count " +
                          std::to_string(observations_.size()));
  }
  SpatialDataset out;
  out.observations_ = observations_;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > k_) {
      throw InvalidArgument("label " + std::to_string(labels[i]) + " outside 1.." +
                            std::to_string(k_));
    }
    out.observations_[i].population = labels[i];
  }
  out.k_ = k_;
  out.label_names_ = label_names_;
  out.rebuild_indexes();
  for (auto c : out.counts_) {
    if (c == 0) throw InvalidArgument("some population lost every observation");
  }
  return out;
}

SpatialDataset SpatialDataset::from_observations(std::vector<Observation> observations,
                                                 int k,
                                                 std::vector<std::string> label_names) {
  if (observations.empty()) throw EmptyInput("no observations");
  if (k < 2) throw InsufficientPopulations("need at least 2 populations, got " +
                                           std::to_string(k));
  SpatialDataset out;
  out.observations_ = std::move(observations);
  out.k_ = k;
  out.label_names_ = std::move(label_names);
  for (std::size_t i = 0; i < out.observations_.size(); ++i) {
    int pop = out.observations_[i].population;
    if (pop < 1 || pop > k) {
      throw ValidationError(i, "population label " + std::to_string(pop) +
                                   " outside 1.." + std::to_string(k));
    }
  }
  out.rebuild_indexes();
  for (std::size_t p = 0; p < out.counts_.size(); ++p) {
    if (out.counts_[p] == 0) {
      throw InsufficientPopulations("population " + std::to_string(p + 1) +
                                    " has no observations");
    }
  }
  return out;
}

SpatialDataset validate_dataset(const std::vector<RawObservation>& raw) {
  if (raw.empty()) throw EmptyInput("no observations");

  SpatialDataset out;
  out.observations_.reserve(raw.size());
  std::unordered_map<std::string, int> label_to_pop;

  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& r = raw[i];
    if (!std::isfinite(r.value)) {
      throw ValidationError(i, "non-finite value");
    }
    if (!std::isfinite(r.x) || !std::isfinite(r.y)) {
      throw ValidationError(i, "non-finite coordinate");
    }
    auto [it, inserted] = label_to_pop.try_emplace(r.label, 0);
    if (inserted) {
      it->second = static_cast<int>(label_to_pop.size());
      out.label_names_.push_back(r.label);
    }
    out.observations_.push_back(Observation{r.value, Point{r.x, r.y}, it->second});
  }

  out.k_ = static_cast<int>(label_to_pop.size());
  if (out.k_ < 2) {
    throw InsufficientPopulations("need at least 2 distinct population labels, got " +
                                  std::to_string(out.k_));
  }
  out.rebuild_indexes();
  return out;
}

std::size_t EvaluationGrid::included_count() const {
  std::size_t c = 0;
  for (auto v : included) c += (v != 0);
  return c;
}

double EvaluationGrid::included_weight_total() const {
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (included.empty() || included[i]) total += nodes[i].weight * nodes[i].cell_area;
  }
  return total;
}

void TestConfig::check() const {
  if (replicates < 1) throw InvalidArgument("replicates must be >= 1");
  if (grid_resolution < 2) throw InvalidArgument("grid resolution must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(min_denominator > 0.0)) throw InvalidArgument("min_denominator must be > 0");
  if (!(min_coverage > 0.0 && min_coverage <= 1.0)) {
    throw InvalidArgument("min_coverage must lie in (0, 1]");
  }
  if (y_subsample < 1) throw InvalidArgument("y_subsample must be >= 1");
  if (bandwidth.mode == BandwidthMode::Explicit &&
      !(bandwidth.value > 0.0 && std::isfinite(bandwidth.value))) {
    throw InvalidArgument("explicit bandwidth must be positive and finite");
  }
  if (kernel.family == KernelFamily::GaussianTruncated &&
      !(kernel.truncation_radius > 0.0)) {
    throw InvalidArgument("truncation radius must be > 0");
  }
}

}  // namespace spatk

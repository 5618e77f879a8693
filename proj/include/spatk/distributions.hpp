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

#ifndef SPATK_DISTRIBUTIONS_HPP
#define SPATK_DISTRIBUTIONS_HPP

#include <string>

#include "spatk/errors.hpp"

namespace spatk {

double normal_cdf(double z);

// Inverse standard normal CDF (Acklam's rational approximation, refined with
// one Halley step; absolute error well below 1e-12 away from the endpoints).
double normal_quantile(double p);

// Marginal distribution of one population's values.
struct MarginSpec {
  enum class Family { Normal, Uniform };
  Family family = Family::Normal;
  double a = 0.0;  // Normal: mean.  Uniform: lower endpoint.
  double b = 1.0;  // Normal: standard deviation (> 0).  Uniform: upper endpoint (> a).

  static MarginSpec normal(double mu, double sigma);
  static MarginSpec uniform(double lo, double hi);

  double cdf(double y) const;
  double quantile(double u) const;

  // Maps a standard normal draw to this margin through the probability
  // integral transform (exact for Normal margins).
  double from_standard_normal(double z) const;

  std::string describe() const;
  bool operator==(const MarginSpec&) const = default;
};

}  // namespace spatk

#endif  // SPATK_DISTRIBUTIONS_HPP

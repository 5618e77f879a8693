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

#include "spatk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spatk {

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument("normal quantile needs p in (0, 1)");
  }

  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley refinement step against the exact CDF.
  constexpr double inv_sqrt_2pi = 0.39894228040143267793994605993438;
  double e = normal_cdf(x) - p;
  double u = e / (inv_sqrt_2pi * std::exp(-0.5 * x * x));
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

MarginSpec MarginSpec::normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("normal margin needs sigma > 0");
  return MarginSpec{Family::Normal, mu, sigma};
}

MarginSpec MarginSpec::uniform(double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("uniform margin needs upper > lower");
  return MarginSpec{Family::Uniform, lo, hi};
}

double MarginSpec::cdf(double y) const {
  switch (family) {
    case Family::Normal:
      return normal_cdf((y - a) / b);
    case Family::Uniform:
      return std::clamp((y - a) / (b - a), 0.0, 1.0);
  }
  return 0.0;
}

double MarginSpec::quantile(double u) const {
  switch (family) {
    case Family::Normal:
      return a + b * normal_quantile(u);
    case Family::Uniform:
      return a + (b - a) * u;
  }
  return 0.0;
}

double MarginSpec::from_standard_normal(double z) const {
  switch (family) {
    case Family::Normal:
      return a + b * z;
    case Family::Uniform:
      return a + (b - a) * normal_cdf(z);
  }
  return 0.0;
}

std::string MarginSpec::describe() const {
  auto num = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  switch (family) {
    case Family::Normal:
      return "normal(" + num(a) + ", " + num(b) + ")";
    case Family::Uniform:
      return "uniform(" + num(a) + ", " + num(b) + ")";
  }
  return "?";
}

}  // namespace spatk

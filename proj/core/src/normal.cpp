// Copyright 2026 The costbo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "costbo/normal.hpp"

#include <cmath>

namespace costbo::normal {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kLogSwitch = -6.0;
constexpr int kContinuedFractionDepth = 96;

// 1/(x + 2/(x + 3/(x + ...))), which equals 1/R(x) - x for the Mills ratio R.
double mills_tail(double x) {
  double tail = x;
  for (int k = kContinuedFractionDepth; k >= 2; --k) {
    tail = x + k / tail;
  }
  return 1.0 / tail;
}

}  // namespace

double pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double cdf(double z) { return 0.5 * std::erfc(-z * kSqrt1_2); }

double log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double h(double z) {
  if (z < kLogSwitch) {
    return std::exp(log_h(z));
  }
  return z * cdf(z) + pdf(z);
}

double log_h(double z) {
  if (z >= kLogSwitch) {
    return std::log(z * cdf(z) + pdf(z));
  }
  if (std::isinf(z)) {
    return -INFINITY;
  }
  const double x = -z;
  const double tail = mills_tail(x);
  return log_pdf(z) + std::log(tail) - std::log(x + tail);
}

}  // namespace costbo::normal

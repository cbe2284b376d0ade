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

#pragma once

// Standard normal helpers used by the acquisition functions.

namespace costbo::normal {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double pdf(double z);
double cdf(double z);
double log_pdf(double z);

/// h(z) = z * Phi(z) + phi(z), so that EI(mu, sigma; y) = sigma * h((y - mu) / sigma).
double h(double z);

/// log h(z), accurate for every finite z. Below z = -6 it switches to a
/// continued fraction for the Mills ratio instead of the direct formula.
double log_h(double z);

}  // namespace costbo::normal

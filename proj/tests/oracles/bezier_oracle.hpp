// Copyright 2026 The GaitForge Authors
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

#include <vector>

namespace oracle {

// Repeated linear interpolation of the control polygon.
inline double DeCasteljau(std::vector<double> points, double t) {
  for (size_t level = points.size() - 1; level > 0; --level) {
    for (size_t i = 0; i < level; ++i) points[i] = (1.0 - t) * points[i] + t * points[i + 1];
  }
  return points[0];
}

// Derivative in t from the hodograph, itself evaluated by De Casteljau.
inline double DeCasteljauDerivative(const std::vector<double>& points, double t) {
  const size_t n = points.size() - 1;
  std::vector<double> diff(n);
  for (size_t i = 0; i < n; ++i) diff[i] = static_cast<double>(n) * (points[i + 1] - points[i]);
  return DeCasteljau(diff, t);
}

}  // namespace oracle

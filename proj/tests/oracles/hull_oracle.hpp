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

// Jarvis march (gift wrapping), counter-clockwise from the lowest-leftmost
// point. Collinear points on an edge are skipped.

#include <vector>

#include <Eigen/Core>

namespace gaitforge::oracle {

inline std::vector<Eigen::Vector2d> GiftWrap(const std::vector<Eigen::Vector2d>& pts) {
  if (pts.size() < 3) return pts;
  size_t start = 0;
  for (size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].x() < pts[start].x() ||
        (pts[i].x() == pts[start].x() && pts[i].y() < pts[start].y())) {
      start = i;
    }
  }
  std::vector<Eigen::Vector2d> hull;
  size_t current = start;
  do {
    hull.push_back(pts[current]);
    size_t next = (current + 1) % pts.size();
    for (size_t i = 0; i < pts.size(); ++i) {
      const Eigen::Vector2d a = pts[next] - pts[current];
      const Eigen::Vector2d b = pts[i] - pts[current];
      const double cross = a.x() * b.y() - a.y() * b.x();
      // Prefer the clockwise-most candidate; on ties keep the farthest.
      if (cross < 0.0 || (cross == 0.0 && b.squaredNorm() > a.squaredNorm())) next = i;
    }
    current = next;
  } while (current != start && hull.size() <= pts.size());
  return hull;
}

}  // namespace gaitforge::oracle

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

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gaitforge {

// Ground height field z(x, y) with a per-cell friction scale and a contact
// stiffness scale. All queries are pure.
class TerrainProfile {
 public:
  enum class Kind : std::uint8_t { kFlat, kInclined, kBumpy, kCompliant };

  static TerrainProfile Flat();
  // Slope rises along +x by `degrees`.
  static TerrainProfile Inclined(double degrees);
  // Smooth random field: peak amplitude (m), correlation length (m).
  static TerrainProfile Bumpy(double amplitude, double correlation_length,
                              std::uint64_t seed);
  // Flat ground with reduced contact stiffness and damping.
  static TerrainProfile Compliant(double stiffness_scale);

  Kind kind() const { return kind_; }
  std::string Describe() const;

  double Height(double x, double y) const;
  // Unit upward surface normal.
  Eigen::Vector3d Normal(double x, double y) const;
  double FrictionScale(double x, double y) const;
  double stiffness_scale() const { return stiffness_scale_; }

  // Per-cell friction multipliers on a square grid (cell size in m) centered
  // at the origin; cells outside the grid use 1.
  void SetFrictionCells(double cell_size, int cells_per_side,
                        std::vector<double> scales);

 private:
  struct Wave {
    double kx, ky, phase, weight;
  };

  Kind kind_ = Kind::kFlat;
  double slope_ = 0.0;  // dz/dx
  double amplitude_ = 0.0;
  std::vector<Wave> waves_;
  double stiffness_scale_ = 1.0;
  double cell_size_ = 1.0;
  int cells_per_side_ = 0;
  std::vector<double> friction_cells_;
};

}  // namespace gaitforge

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

#include "gaitforge/terrain.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gaitforge/errors.hpp"

namespace gaitforge {

TerrainProfile TerrainProfile::Flat() { return TerrainProfile{}; }

TerrainProfile TerrainProfile::Inclined(double degrees) {
  TerrainProfile t;
  t.kind_ = Kind::kInclined;
  t.slope_ = std::tan(degrees * std::numbers::pi / 180.0);
  return t;
}

TerrainProfile TerrainProfile::Bumpy(double amplitude, double correlation_length,
                                     std::uint64_t seed) {
  if (!(correlation_length > 0.0)) {
    throw ConfigError("bumpy terrain correlation length must be > 0");
  }
  TerrainProfile t;
  t.kind_ = Kind::kBumpy;
  t.amplitude_ = amplitude;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kWaves = 16;
  double total_weight = 0.0;
  for (int i = 0; i < kWaves; ++i) {
    // Wavelengths spread around the correlation length, random headings.
    const double wavelength = correlation_length * (0.5 + 1.5 * unit(rng));
    const double heading = 2.0 * std::numbers::pi * unit(rng);
    const double k = 2.0 * std::numbers::pi / wavelength;
    Wave w{k * std::cos(heading), k * std::sin(heading),
           2.0 * std::numbers::pi * unit(rng), 0.5 + unit(rng)};
    total_weight += w.weight;
    t.waves_.push_back(w);
  }
  // Normalise so |z| <= amplitude everywhere.
  for (auto& w : t.waves_) w.weight /= total_weight;
  return t;
}

TerrainProfile TerrainProfile::Compliant(double stiffness_scale) {
  if (!(stiffness_scale > 0.0)) {
    throw ConfigError("compliant terrain stiffness scale must be > 0");
  }
  TerrainProfile t;
  t.kind_ = Kind::kCompliant;
  t.stiffness_scale_ = stiffness_scale;
  return t;
}

std::string TerrainProfile::Describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kFlat:
      os << "flat";
      break;
    case Kind::kInclined:
      os << "incline(" << std::atan(slope_) * 180.0 / std::numbers::pi << " deg)";
      break;
    case Kind::kBumpy:
      os << "bumpy(" << amplitude_ << " m)";
      break;
    case Kind::kCompliant:
      os << "compliant(" << stiffness_scale_ << ")";
      break;
  }
  return os.str();
}

double TerrainProfile::Height(double x, double y) const {
  switch (kind_) {
    case Kind::kFlat:
    case Kind::kCompliant:
      return 0.0;
    case Kind::kInclined:
      return slope_ * x;
    case Kind::kBumpy: {
      double z = 0.0;
      for (const auto& w : waves_) z += w.weight * std::sin(w.kx * x + w.ky * y + w.phase);
      return amplitude_ * z;
    }
  }
  return 0.0;
}

Eigen::Vector3d TerrainProfile::Normal(double x, double y) const {
  double dzdx = 0.0;
  double dzdy = 0.0;
  if (kind_ == Kind::kInclined) {
    dzdx = slope_;
  } else if (kind_ == Kind::kBumpy) {
    for (const auto& w : waves_) {
      const double c = w.weight * std::cos(w.kx * x + w.ky * y + w.phase);
      dzdx += amplitude_ * c * w.kx;
      dzdy += amplitude_ * c * w.ky;
    }
  } else {
    return Eigen::Vector3d::UnitZ();
  }
  return Eigen::Vector3d(-dzdx, -dzdy, 1.0).normalized();
}

void TerrainProfile::SetFrictionCells(double cell_size, int cells_per_side,
                                      std::vector<double> scales) {
  if (!(cell_size > 0.0) || cells_per_side < 0 ||
      scales.size() != static_cast<size_t>(cells_per_side) * cells_per_side) {
    throw ConfigError("friction cell grid has inconsistent dimensions");
  }
  cell_size_ = cell_size;
  cells_per_side_ = cells_per_side;
  friction_cells_ = std::move(scales);
}

double TerrainProfile::FrictionScale(double x, double y) const {
  if (cells_per_side_ == 0) return 1.0;
  const double half = 0.5 * cells_per_side_ * cell_size_;
  const int ix = static_cast<int>(std::floor((x + half) / cell_size_));
  const int iy = static_cast<int>(std::floor((y + half) / cell_size_));
  if (ix < 0 || iy < 0 || ix >= cells_per_side_ || iy >= cells_per_side_) return 1.0;
  return friction_cells_[static_cast<size_t>(iy) * cells_per_side_ + ix];
}

}  // namespace gaitforge

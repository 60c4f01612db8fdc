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

#include <array>

#include <Eigen/Core>

#include "gaitforge/model.hpp"

namespace gaitforge {

inline constexpr int kBezierDegree = 5;
inline constexpr int kBezierRows = kBezierDegree + 1;
// Hip roll, hip yaw, hip pitch, knee of the right leg, then the left leg.
inline constexpr int kPlannedJoints = 8;
inline constexpr int kFreeRows = 4;  // rows 1..4 are planned by the network
inline constexpr int kPolicyOutputs = kFreeRows * kPlannedJoints;

using CoeffMatrix = Eigen::Matrix<double, kBezierRows, kPlannedJoints>;
using BezierCoeffs = Eigen::Matrix<double, kBezierRows, 1>;
using PlannedVector = Eigen::Matrix<double, kPlannedJoints, 1>;
using FreeRows = Eigen::Matrix<double, kFreeRows, kPlannedJoints>;
using PolicyOutput = Eigen::Matrix<double, kPolicyOutputs, 1>;

// Column of `joint` (hip roll .. knee) of `side` in a CoeffMatrix.
constexpr int PlannedColumn(Side side, LegJoint joint) {
  return (side == Side::kRight ? 0 : 4) + joint;
}
// Index into JointVector of a CoeffMatrix column.
constexpr int PlannedToJointIndex(int column) {
  return JointIndex(column < 4 ? Side::kRight : Side::kLeft,
                    static_cast<LegJoint>(column % 4));
}

PlannedVector PlannedFromJoints(const JointVector& q);

// Signed permutation T swapping the legs; roll and yaw change sign.
struct SymmetryMap {
  std::array<int, kPlannedJoints> source{};
  std::array<double, kPlannedJoints> sign{};

  static SymmetryMap Default();
  // (T x)_i = sign_i * x_{source_i}
  PlannedVector Apply(const PlannedVector& x) const;
  Eigen::Matrix<double, kPlannedJoints, kPlannedJoints> Matrix() const;
};

struct BezierFlags {
  bool tau_clamped = false;
  bool output_clamped = false;
};

// Bernstein-basis evaluation; tau outside [0, 1] is clamped and flagged.
double BezierEval(const BezierCoeffs& coeffs, double tau, BezierFlags* flags = nullptr);
// d/dt of the curve for a step lasting `step_duration` seconds.
double BezierRate(const BezierCoeffs& coeffs, double tau, double step_duration,
                  BezierFlags* flags = nullptr);

PlannedVector EvalAll(const CoeffMatrix& alpha, double tau, BezierFlags* flags = nullptr);
PlannedVector EvalRateAll(const CoeffMatrix& alpha, double tau, double step_duration,
                          BezierFlags* flags = nullptr);

// alpha_L = T alpha_R, applied to every row.
CoeffMatrix Mirror(const CoeffMatrix& alpha, const SymmetryMap& map);

CoeffMatrix AnchorInitial(const CoeffMatrix& alpha, const PlannedVector& q_measured);

// Row 5 = T row 0, so that the relabelled next step starts where this one ends.
CoeffMatrix EnforceTerminalContinuity(const CoeffMatrix& alpha, const SymmetryMap& map);

// Per-coefficient admissible ranges. Rows 0 and 5 are not planned but their
// bounds document the joint limits.
struct CoeffBounds {
  CoeffMatrix lower;
  CoeffMatrix upper;

  static CoeffBounds FromJointLimits(const KinematicParams& params);
  // Ranges used by the default planner: narrower than the joint limits.
  static CoeffBounds Default(const KinematicParams& params);
  // Bounds for the mirrored (left-stance) coefficient matrix.
  CoeffBounds Mirrored(const SymmetryMap& map) const;
  bool Contains(const CoeffMatrix& alpha, double tolerance = 0.0) const;
  void Validate() const;
};

// u is joint-major: u[4 * column + (row - 1)]. Entries outside [0, 1] are
// clamped and flagged.
FreeRows ScaleOutputs(const PolicyOutput& u, const CoeffBounds& bounds,
                      BezierFlags* flags = nullptr);

}  // namespace gaitforge

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

#include "gaitforge/bezier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gaitforge/errors.hpp"

namespace gaitforge {
namespace {

constexpr double kBinomial5[kBezierRows] = {1, 5, 10, 10, 5, 1};
constexpr double kBinomial4[kBezierDegree] = {1, 4, 6, 4, 1};

double ClampTau(double tau, BezierFlags* flags) {
  if (tau < 0.0 || tau > 1.0) {
    if (flags != nullptr) flags->tau_clamped = true;
    return std::clamp(tau, 0.0, 1.0);
  }
  return tau;
}

}  // namespace

PlannedVector PlannedFromJoints(const JointVector& q) {
  PlannedVector out;
  for (int c = 0; c < kPlannedJoints; ++c) out(c) = q(PlannedToJointIndex(c));
  return out;
}

SymmetryMap SymmetryMap::Default() {
  SymmetryMap map;
  // Sagittal joints are mirror-even, frontal and transverse joints mirror-odd.
  const double joint_sign[4] = {-1.0, -1.0, 1.0, 1.0};
  for (int c = 0; c < kPlannedJoints; ++c) {
    map.source[c] = (c + 4) % kPlannedJoints;
    map.sign[c] = joint_sign[c % 4];
  }
  return map;
}

PlannedVector SymmetryMap::Apply(const PlannedVector& x) const {
  PlannedVector out;
  for (int i = 0; i < kPlannedJoints; ++i) out(i) = sign[i] * x(source[i]);
  return out;
}

Eigen::Matrix<double, kPlannedJoints, kPlannedJoints> SymmetryMap::Matrix() const {
  Eigen::Matrix<double, kPlannedJoints, kPlannedJoints> t;
  t.setZero();
  for (int i = 0; i < kPlannedJoints; ++i) t(i, source[i]) = sign[i];
  return t;
}

double BezierEval(const BezierCoeffs& coeffs, double tau, BezierFlags* flags) {
  const double t = ClampTau(tau, flags);
  const double s = 1.0 - t;
  double t_pow[kBezierRows];
  double s_pow[kBezierRows];
  t_pow[0] = s_pow[0] = 1.0;
  for (int k = 1; k < kBezierRows; ++k) {
    t_pow[k] = t_pow[k - 1] * t;
    s_pow[k] = s_pow[k - 1] * s;
  }
  double value = 0.0;
  for (int k = 0; k < kBezierRows; ++k) {
    value += coeffs(k) * kBinomial5[k] * t_pow[k] * s_pow[kBezierDegree - k];
  }
  return value;
}

double BezierRate(const BezierCoeffs& coeffs, double tau, double step_duration,
                  BezierFlags* flags) {
  const double t = ClampTau(tau, flags);
  const double s = 1.0 - t;
  double t_pow[kBezierDegree];
  double s_pow[kBezierDegree];
  t_pow[0] = s_pow[0] = 1.0;
  for (int k = 1; k < kBezierDegree; ++k) {
    t_pow[k] = t_pow[k - 1] * t;
    s_pow[k] = s_pow[k - 1] * s;
  }
  double rate = 0.0;
  for (int k = 0; k < kBezierDegree; ++k) {
    rate += (coeffs(k + 1) - coeffs(k)) * kBinomial4[k] * t_pow[k] *
            s_pow[kBezierDegree - 1 - k];
  }
  return kBezierDegree * rate / step_duration;
}

PlannedVector EvalAll(const CoeffMatrix& alpha, double tau, BezierFlags* flags) {
  PlannedVector out;
  for (int c = 0; c < kPlannedJoints; ++c) out(c) = BezierEval(alpha.col(c), tau, flags);
  return out;
}

PlannedVector EvalRateAll(const CoeffMatrix& alpha, double tau, double step_duration,
                          BezierFlags* flags) {
  PlannedVector out;
  for (int c = 0; c < kPlannedJoints; ++c) {
    out(c) = BezierRate(alpha.col(c), tau, step_duration, flags);
  }
  return out;
}

CoeffMatrix Mirror(const CoeffMatrix& alpha, const SymmetryMap& map) {
  CoeffMatrix out;
  for (int c = 0; c < kPlannedJoints; ++c) {
    out.col(c) = map.sign[c] * alpha.col(map.source[c]);
  }
  return out;
}

CoeffMatrix AnchorInitial(const CoeffMatrix& alpha, const PlannedVector& q_measured) {
  CoeffMatrix out = alpha;
  out.row(0) = q_measured.transpose();
  return out;
}

CoeffMatrix EnforceTerminalContinuity(const CoeffMatrix& alpha, const SymmetryMap& map) {
  CoeffMatrix out = alpha;
  out.row(kBezierDegree) = map.Apply(alpha.row(0).transpose()).transpose();
  return out;
}

CoeffBounds CoeffBounds::FromJointLimits(const KinematicParams& params) {
  CoeffBounds b;
  for (int c = 0; c < kPlannedJoints; ++c) {
    b.lower.col(c).setConstant(params.joint_lower(PlannedToJointIndex(c)));
    b.upper.col(c).setConstant(params.joint_upper(PlannedToJointIndex(c)));
  }
  return b;
}

CoeffBounds CoeffBounds::Default(const KinematicParams& params) {
  CoeffBounds b = FromJointLimits(params);
  // Right-stance frame: columns 0-3 stance leg, 4-7 swing leg.
  const double stance_lo[4] = {-0.10, -0.10, -0.45, 0.05};
  const double stance_hi[4] = {0.10, 0.10, 0.45, 0.75};
  const double swing_lo[4] = {-0.15, -0.10, -0.70, 0.10};
  const double swing_hi[4] = {0.15, 0.10, 0.40, 1.30};
  for (int c = 0; c < kPlannedJoints; ++c) {
    const double lo = c < 4 ? stance_lo[c] : swing_lo[c - 4];
    const double hi = c < 4 ? stance_hi[c] : swing_hi[c - 4];
    for (int r = 1; r <= kFreeRows; ++r) {
      b.lower(r, c) = lo;
      b.upper(r, c) = hi;
    }
  }
  return b;
}

CoeffBounds CoeffBounds::Mirrored(const SymmetryMap& map) const {
  CoeffBounds out;
  const CoeffMatrix lo = Mirror(lower, map);
  const CoeffMatrix hi = Mirror(upper, map);
  out.lower = lo.cwiseMin(hi);
  out.upper = lo.cwiseMax(hi);
  return out;
}

bool CoeffBounds::Contains(const CoeffMatrix& alpha, double tolerance) const {
  return (alpha.array() >= lower.array() - tolerance).all() &&
         (alpha.array() <= upper.array() + tolerance).all();
}

void CoeffBounds::Validate() const {
  for (int r = 0; r < kBezierRows; ++r) {
    for (int c = 0; c < kPlannedJoints; ++c) {
      if (!(lower(r, c) <= upper(r, c))) {
        throw ConfigError("coefficient bound lower > upper at row " + std::to_string(r) +
                          ", column " + std::to_string(c));
      }
    }
  }
}

FreeRows ScaleOutputs(const PolicyOutput& u, const CoeffBounds& bounds,
                      BezierFlags* flags) {
  FreeRows rows;
  for (int c = 0; c < kPlannedJoints; ++c) {
    for (int r = 0; r < kFreeRows; ++r) {
      double x = u(kFreeRows * c + r);
      if (!(x >= 0.0 && x <= 1.0)) {
        if (flags != nullptr) flags->output_clamped = true;
        x = std::isnan(x) ? 0.5 : std::clamp(x, 0.0, 1.0);
      }
      const double lo = bounds.lower(r + 1, c);
      const double hi = bounds.upper(r + 1, c);
      rows(r, c) = std::clamp((1.0 - x) * lo + x * hi, lo, hi);
    }
  }
  return rows;
}

}  // namespace gaitforge

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

#include "gaitforge/reward.hpp"

#include <cmath>
#include <numbers>

#include "gaitforge/errors.hpp"

namespace gaitforge {
namespace {

double HalvingSharpness(double noticeable) {
  return std::numbers::ln2 / (noticeable * noticeable);
}

}  // namespace

const char* RewardTermName(int term) {
  static const char* kNames[kRewardTerms] = {"r_vx",  "r_vy",  "r_h",
                                             "r_a",   "r_com", "r_ang",
                                             "r_angvel", "r_u", "r_fd"};
  return term >= 0 && term < kRewardTerms ? kNames[term] : "?";
}

RewardParams::RewardParams() {
  weights << 0.25, 0.15, 0.10, 0.10, 0.10, 0.05, 0.05, 0.10, 0.10;
  sharpness << HalvingSharpness(0.3),   // m/s
      HalvingSharpness(0.3),            // m/s
      HalvingSharpness(0.05),           // m
      HalvingSharpness(0.1),            // rad
      HalvingSharpness(0.05),           // m
      HalvingSharpness(0.1),            // rad
      HalvingSharpness(0.5),            // rad/s
      HalvingSharpness(0.2),            // fraction of the torque limit
      HalvingSharpness(0.05);           // m
}

void RewardParams::Validate() const {
  if (!(weights.minCoeff() >= 0.0)) throw ConfigError("reward weights must be >= 0");
  if (!(sharpness.minCoeff() >= 0.0)) throw ConfigError("reward sharpness must be >= 0");
  if (!(nominal_stance_width > 0.0)) throw ConfigError("nominal stance width must be > 0");
}

RewardBreakdown ComputeReward(const RobotState& state, const JointVector& torques,
                              const JointVector& torque_limit,
                              const Eigen::Vector2d& cmd, const RewardInputs& inputs,
                              const RewardParams& params) {
  const auto kernel = [&](int term, double squared_error) {
    return std::exp(-params.sharpness(term) * squared_error);
  };
  const auto& base = state.base;
  const auto sq = [](double x) { return x * x; };

  // Foot separation measured across the heading.
  const double yaw = base.yaw();
  const Eigen::Vector2d lateral(-std::sin(yaw), std::cos(yaw));
  const Eigen::Vector2d feet =
      inputs.left_foot.head<2>() - inputs.right_foot.head<2>();
  const Eigen::Vector2d mid =
      0.5 * (inputs.left_foot.head<2>() + inputs.right_foot.head<2>());

  RewardBreakdown r;
  r.terms(kRewardVx) = kernel(kRewardVx, sq(base.linear_velocity.x() - cmd.x()));
  r.terms(kRewardVy) = kernel(kRewardVy, sq(base.linear_velocity.y() - cmd.y()));
  r.terms(kRewardHeight) = kernel(
      kRewardHeight, sq(base.position.z() - inputs.ground_height - params.nominal_height));
  r.terms(kRewardUpright) = kernel(kRewardUpright, sq(base.roll()) + sq(base.pitch()));
  r.terms(kRewardCom) = kernel(kRewardCom, (inputs.com.head<2>() - mid).squaredNorm());
  r.terms(kRewardHeading) = kernel(kRewardHeading, sq(yaw - params.yaw_desired));
  r.terms(kRewardAngularRate) =
      kernel(kRewardAngularRate, base.angular_velocity.squaredNorm());
  r.terms(kRewardTorque) =
      kernel(kRewardTorque, torques.cwiseQuotient(torque_limit).squaredNorm() / kNumJoints);
  r.terms(kRewardFootDistance) = kernel(
      kRewardFootDistance, sq(std::abs(feet.dot(lateral)) - params.nominal_stance_width));
  r.total = params.weights.dot(r.terms);
  return r;
}

}  // namespace gaitforge

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

inline constexpr int kRewardTerms = 9;

// Order: vx, vy, height, uprightness, CoM, heading, angular rate, torque,
// foot distance.
enum RewardTerm : int {
  kRewardVx = 0,
  kRewardVy,
  kRewardHeight,
  kRewardUpright,
  kRewardCom,
  kRewardHeading,
  kRewardAngularRate,
  kRewardTorque,
  kRewardFootDistance,
};

const char* RewardTermName(int term);

using RewardVector = Eigen::Matrix<double, kRewardTerms, 1>;

struct RewardParams {
  RewardVector weights;
  // Kernel sharpness c in exp(-c err^2); each default halves its term at a
  // "noticeable" error.
  RewardVector sharpness;
  double nominal_height = 0.91;
  double nominal_stance_width = 0.30;
  double yaw_desired = 0.0;

  RewardParams();
  void Validate() const;
};

// Quantities the reward reads besides the state itself.
struct RewardInputs {
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Vector3d left_foot = Eigen::Vector3d::Zero();
  Eigen::Vector3d right_foot = Eigen::Vector3d::Zero();
  double ground_height = 0.0;  // terrain under the pelvis
};

struct RewardBreakdown {
  RewardVector terms = RewardVector::Zero();
  double total = 0.0;
};

RewardBreakdown ComputeReward(const RobotState& state, const JointVector& torques,
                              const JointVector& torque_limit,
                              const Eigen::Vector2d& cmd, const RewardInputs& inputs,
                              const RewardParams& params);

}  // namespace gaitforge

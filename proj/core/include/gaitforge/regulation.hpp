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

#include <Eigen/Core>

#include "gaitforge/model.hpp"

namespace gaitforge {

struct RegulationGains {
  // Foot placement, rad per m/s.
  double kpx = 0.15;
  double kdx = 0.05;
  double kpy = 0.2;
  double kdy = 0.05;
  // Drift compensation integrators, rad per m.
  double ki_beta_x = 0.05;
  double ki_beta_y = 0.05;
  double beta_max = 0.1;
  // Torso compensation, N*m/rad and N*m*s/rad.
  double kp_torso_roll = 80.0;
  double kd_torso_roll = 2.0;
  double kp_torso_pitch = 80.0;
  double kd_torso_pitch = 2.0;
  JointVector kp;
  JointVector kd;
  double velocity_filter_hz = 20.0;

  RegulationGains();
  void Validate() const;
};

struct RegulationState {
  double beta_x = 0.0;
  double beta_y = 0.0;
  // Pelvis velocity latched at the end of the previous step.
  double vx_last_step = 0.0;
  double vy_last_step = 0.0;
  Side stance = Side::kRight;
  double tau = 0.0;
  double yaw_desired = 0.0;
};

// Swing-leg hip offsets: roll (dq1), yaw (dq2) and pitch (dq3).
struct FootPlacementDeltas {
  double roll = 0.0;
  double yaw = 0.0;
  double pitch = 0.0;
};

// `velocity` is the (filtered) pelvis velocity (x, y); `cmd` the desired one.
FootPlacementDeltas ComputeFootPlacement(const Eigen::Vector2d& velocity, double yaw,
                                         const RegulationState& reg,
                                         const RegulationGains& gains,
                                         const Eigen::Vector2d& cmd);
// Same, reading the raw pelvis velocity and yaw from `state`.
FootPlacementDeltas ComputeFootPlacement(const RobotState& state,
                                         const RegulationState& reg,
                                         const RegulationGains& gains,
                                         const Eigen::Vector2d& cmd);

// beta <- clamp(beta + K_i * error * dt, +-beta_max); error is (x, y).
RegulationState UpdateBeta(const RegulationState& reg, const Eigen::Vector2d& error,
                           double dt, const RegulationGains& gains);

struct TorsoSetpoint {
  double roll = 0.0;
  double pitch = 0.0;
  double roll_rate = 0.0;
  double pitch_rate = 0.0;
};

// Torques u_q1 (stance hip roll) and u_q3 (stance hip pitch).
struct TorsoTorques {
  double hip_roll = 0.0;
  double hip_pitch = 0.0;
};

TorsoTorques ComputeTorsoCompensation(const RobotState& state, Side stance,
                                      const RegulationGains& gains,
                                      const TorsoSetpoint& setpoint = {});

struct FootOrientation {
  double pitch = 0.0;  // q7
  double roll = 0.0;   // q8
};

// Swing-foot targets with the fixed mechanism offsets (21 and 6 degrees).
FootOrientation SwingFootOrientation(const RobotState& state, Side swing);

// PD tracking K_p (q_ref - q) - K_d dq, torso torques added on the stance hip,
// stance foot pitch and roll left passive, everything clamped to the limits.
JointVector ComputeJointTorques(const JointVector& q_ref, const JointVector& q,
                                const JointVector& dq, const RegulationGains& gains,
                                Side stance, const TorsoTorques& torso,
                                const JointVector& torque_limit);

// First-order low-pass filter y += a (x - y), a = dt / (dt + 1 / (2 pi fc)).
class VelocityFilter {
 public:
  VelocityFilter(double cutoff_hz, double dt);
  void Reset(const Eigen::Vector3d& value);
  const Eigen::Vector3d& Update(const Eigen::Vector3d& raw);
  const Eigen::Vector3d& value() const { return value_; }

 private:
  double alpha_;
  Eigen::Vector3d value_ = Eigen::Vector3d::Zero();
};

}  // namespace gaitforge

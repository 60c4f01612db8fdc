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

#include "gaitforge/regulation.hpp"

#include <algorithm>
#include <numbers>

#include "gaitforge/errors.hpp"

namespace gaitforge {

RegulationGains::RegulationGains() {
  const double leg_kp[kJointsPerLeg] = {300, 300, 300, 300, 40, 40};
  const double leg_kd[kJointsPerLeg] = {5, 5, 5, 5, 1, 1};
  for (Side side : {Side::kLeft, Side::kRight}) {
    for (int j = 0; j < kJointsPerLeg; ++j) {
      kp(JointIndex(side, static_cast<LegJoint>(j))) = leg_kp[j];
      kd(JointIndex(side, static_cast<LegJoint>(j))) = leg_kd[j];
    }
  }
}

void RegulationGains::Validate() const {
  const double scalars[] = {kpx,           kdx,           kpy,
                            kdy,           ki_beta_x,     ki_beta_y,
                            kp_torso_roll, kd_torso_roll, kp_torso_pitch,
                            kd_torso_pitch};
  for (double g : scalars) {
    if (!(g >= 0.0)) throw ConfigError("regulation gains must be >= 0");
  }
  if (!(kp.minCoeff() >= 0.0) || !(kd.minCoeff() >= 0.0)) {
    throw ConfigError("joint PD gains must be >= 0");
  }
  if (!(beta_max > 0.0)) throw ConfigError("beta_max must be > 0");
  if (!(velocity_filter_hz > 0.0)) throw ConfigError("velocity filter cutoff must be > 0");
}

FootPlacementDeltas ComputeFootPlacement(const Eigen::Vector2d& velocity, double yaw,
                                         const RegulationState& reg,
                                         const RegulationGains& gains,
                                         const Eigen::Vector2d& cmd) {
  const double s_y = SideSign(Opposite(reg.stance));
  const double t = reg.tau;
  FootPlacementDeltas d;
  d.roll = s_y * (t * (gains.kpy * (velocity.y() - cmd.y()) +
                       gains.kdy * (velocity.y() - reg.vy_last_step)) +
                  reg.beta_y);
  d.yaw = t * (yaw - reg.yaw_desired);
  d.pitch = -(t * (gains.kpx * (velocity.x() - cmd.x()) +
                   gains.kdx * (velocity.x() - reg.vx_last_step)) +
              reg.beta_x);
  return d;
}

FootPlacementDeltas ComputeFootPlacement(const RobotState& state,
                                         const RegulationState& reg,
                                         const RegulationGains& gains,
                                         const Eigen::Vector2d& cmd) {
  return ComputeFootPlacement(state.base.linear_velocity.head<2>(), state.base.yaw(), reg,
                              gains, cmd);
}

RegulationState UpdateBeta(const RegulationState& reg, const Eigen::Vector2d& error,
                           double dt, const RegulationGains& gains) {
  RegulationState out = reg;
  out.beta_x = std::clamp(reg.beta_x + gains.ki_beta_x * error.x() * dt, -gains.beta_max,
                          gains.beta_max);
  out.beta_y = std::clamp(reg.beta_y + gains.ki_beta_y * error.y() * dt, -gains.beta_max,
                          gains.beta_max);
  return out;
}

TorsoTorques ComputeTorsoCompensation(const RobotState& state, Side stance,
                                      const RegulationGains& gains,
                                      const TorsoSetpoint& setpoint) {
  const double s_theta = SideSign(stance);
  TorsoTorques u;
  u.hip_roll = -(gains.kp_torso_roll * (state.base.roll() - setpoint.roll) +
                 gains.kd_torso_roll * (state.base.angular_velocity.x() - setpoint.roll_rate));
  u.hip_pitch =
      s_theta * (gains.kp_torso_pitch * (state.base.pitch() - setpoint.pitch) +
                 gains.kd_torso_pitch * (state.base.angular_velocity.y() - setpoint.pitch_rate));
  return u;
}

FootOrientation SwingFootOrientation(const RobotState& state, Side swing) {
  const double s_f = SideSign(swing);
  constexpr double kDeg = std::numbers::pi / 180.0;
  FootOrientation f;
  f.pitch = state.base.roll() + state.q(JointIndex(swing, kHipRoll)) + s_f * (21.0 * kDeg);
  f.roll = state.base.pitch() + state.q(JointIndex(swing, kHipPitch)) + s_f * (6.0 * kDeg);
  return f;
}

JointVector ComputeJointTorques(const JointVector& q_ref, const JointVector& q,
                                const JointVector& dq, const RegulationGains& gains,
                                Side stance, const TorsoTorques& torso,
                                const JointVector& torque_limit) {
  JointVector tau = gains.kp.cwiseProduct(q_ref - q) - gains.kd.cwiseProduct(dq);
  tau(JointIndex(stance, kHipRoll)) += torso.hip_roll;
  tau(JointIndex(stance, kHipPitch)) += torso.hip_pitch;
  tau(JointIndex(stance, kFootPitch)) = 0.0;
  tau(JointIndex(stance, kFootRoll)) = 0.0;
  for (int i = 0; i < kNumJoints; ++i) {
    tau(i) = std::clamp(tau(i), -torque_limit(i), torque_limit(i));
  }
  return tau;
}

VelocityFilter::VelocityFilter(double cutoff_hz, double dt) {
  const double rc = 1.0 / (2.0 * std::numbers::pi * cutoff_hz);
  alpha_ = dt / (dt + rc);
}

void VelocityFilter::Reset(const Eigen::Vector3d& value) { value_ = value; }

const Eigen::Vector3d& VelocityFilter::Update(const Eigen::Vector3d& raw) {
  value_ += alpha_ * (raw - value_);
  return value_;
}

}  // namespace gaitforge

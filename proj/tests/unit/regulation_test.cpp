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

#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gaitforge/errors.hpp"
#include "gaitforge/regulation.hpp"

namespace gaitforge {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

RegulationState Reg(Side stance, double tau) {
  RegulationState reg;
  reg.stance = stance;
  reg.tau = tau;
  return reg;
}

TEST(FootPlacement, ZeroErrorIsFixedPoint) {
  RegulationGains gains;
  RegulationState reg = Reg(Side::kRight, 0.7);
  reg.vx_last_step = 0.3;
  reg.vy_last_step = -0.1;
  reg.yaw_desired = 0.2;
  const FootPlacementDeltas d =
      ComputeFootPlacement(Eigen::Vector2d(0.3, -0.1), 0.2, reg, gains, {0.3, -0.1});
  EXPECT_EQ(d.roll, 0.0);
  EXPECT_EQ(d.yaw, 0.0);
  EXPECT_EQ(d.pitch, 0.0);
}

TEST(FootPlacement, WorkedLongitudinalExample) {
  RegulationGains gains;
  gains.kpx = 0.2;
  gains.kdx = 0.1;
  RegulationState reg = Reg(Side::kRight, 0.5);
  reg.beta_x = 0.02;
  reg.vx_last_step = 0.4;  // v - v_ls = 0.1
  const FootPlacementDeltas d =
      ComputeFootPlacement(Eigen::Vector2d(0.5, 0.0), 0.0, reg, gains, {0.2, 0.0});
  EXPECT_NEAR(d.pitch, -0.055, 1e-12);
}

TEST(FootPlacement, SwingSideFlipNegatesRollOnly) {
  RegulationGains gains;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    RegulationState right = Reg(Side::kRight, 0.5 * (u(rng) + 1.0));
    right.beta_x = 0.05 * u(rng);
    right.beta_y = 0.05 * u(rng);
    right.vx_last_step = u(rng);
    right.vy_last_step = u(rng);
    RegulationState left = right;
    left.stance = Side::kLeft;
    const Eigen::Vector2d v(u(rng), u(rng));
    const Eigen::Vector2d cmd(u(rng), u(rng));
    const double yaw = 0.3 * u(rng);
    const auto a = ComputeFootPlacement(v, yaw, right, gains, cmd);
    const auto b = ComputeFootPlacement(v, yaw, left, gains, cmd);
    EXPECT_EQ(a.roll, -b.roll);
    EXPECT_EQ(a.yaw, b.yaw);
    EXPECT_EQ(a.pitch, b.pitch);
  }
}

TEST(FootPlacement, LinearInPhaseWithBetaHeld) {
  RegulationGains gains;
  RegulationState reg = Reg(Side::kLeft, 0.0);
  reg.beta_x = 0.03;
  reg.beta_y = -0.02;
  const Eigen::Vector2d v(0.6, 0.2);
  const Eigen::Vector2d cmd(0.3, 0.0);
  const auto d0 = ComputeFootPlacement(v, 0.1, reg, gains, cmd);
  // tau = 0 keeps only the integrator terms.
  EXPECT_EQ(d0.pitch, -0.03);
  EXPECT_EQ(d0.roll, SideSign(Side::kRight) * -0.02);
  EXPECT_EQ(d0.yaw, 0.0);
  reg.tau = 1.0;
  const auto d1 = ComputeFootPlacement(v, 0.1, reg, gains, cmd);
  reg.tau = 0.25;
  const auto dq = ComputeFootPlacement(v, 0.1, reg, gains, cmd);
  EXPECT_NEAR(dq.pitch - d0.pitch, 0.25 * (d1.pitch - d0.pitch), 1e-15);
  EXPECT_NEAR(dq.roll - d0.roll, 0.25 * (d1.roll - d0.roll), 1e-15);
  EXPECT_NEAR(dq.yaw, 0.25 * d1.yaw, 1e-15);
}

TEST(FootPlacement, SideSelectorFollowsSwingLeg) {
  RegulationGains gains;
  gains.kdy = 0.0;
  // Right stance means left swing: S_y = +1.
  const auto d = ComputeFootPlacement(Eigen::Vector2d(0.0, 0.1), 0.0, Reg(Side::kRight, 1.0),
                                      gains, {0.0, 0.0});
  EXPECT_NEAR(d.roll, gains.kpy * 0.1, 1e-15);
}

TEST(Beta, ZeroErrorLeavesItUnchanged) {
  RegulationGains gains;
  RegulationState reg;
  reg.beta_x = 0.04;
  reg.beta_y = -0.01;
  const RegulationState out = UpdateBeta(reg, Eigen::Vector2d::Zero(), 1e-3, gains);
  EXPECT_EQ(out.beta_x, 0.04);
  EXPECT_EQ(out.beta_y, -0.01);
}

TEST(Beta, ConstantErrorIntegrates) {
  RegulationGains gains;
  RegulationState reg;
  for (int i = 0; i < 1000; ++i) reg = UpdateBeta(reg, Eigen::Vector2d(0.2, -0.4), 1e-3, gains);
  EXPECT_NEAR(reg.beta_x, gains.ki_beta_x * 0.2 * 1.0, 1e-9);
  EXPECT_NEAR(reg.beta_y, gains.ki_beta_y * -0.4 * 1.0, 1e-9);
}

TEST(Beta, SaturatesExactly) {
  RegulationGains gains;
  RegulationState reg;
  for (int i = 0; i < 100000; ++i) {
    reg = UpdateBeta(reg, Eigen::Vector2d(50.0, -50.0), 1e-3, gains);
    ASSERT_LE(std::abs(reg.beta_x), gains.beta_max);
    ASSERT_LE(std::abs(reg.beta_y), gains.beta_max);
  }
  EXPECT_EQ(reg.beta_x, gains.beta_max);
  EXPECT_EQ(reg.beta_y, -gains.beta_max);
}

TEST(Torso, UprightAtSetpointGivesZero) {
  RegulationGains gains;
  RobotState s;
  const TorsoTorques u = ComputeTorsoCompensation(s, Side::kLeft, gains);
  EXPECT_EQ(u.hip_roll, 0.0);
  EXPECT_EQ(u.hip_pitch, 0.0);
}

TEST(Torso, WorkedRollExample) {
  RegulationGains gains;
  gains.kp_torso_roll = 50.0;
  RobotState s;
  s.base.orientation.x() = 0.1;
  EXPECT_NEAR(ComputeTorsoCompensation(s, Side::kRight, gains).hip_roll, -5.0, 1e-12);
}

TEST(Torso, StanceFlipNegatesPitchOnly) {
  RegulationGains gains;
  RobotState s;
  s.base.orientation = {0.05, -0.08, 0.1};
  s.base.angular_velocity = {0.3, 0.2, -0.1};
  const auto l = ComputeTorsoCompensation(s, Side::kLeft, gains);
  const auto r = ComputeTorsoCompensation(s, Side::kRight, gains);
  EXPECT_EQ(l.hip_roll, r.hip_roll);
  EXPECT_EQ(l.hip_pitch, -r.hip_pitch);
}

TEST(SwingFoot, MechanismOffsets) {
  RobotState s;
  const FootOrientation left = SwingFootOrientation(s, Side::kLeft);
  EXPECT_NEAR(left.pitch, 21.0 * kDeg, 1e-12);
  EXPECT_NEAR(left.roll, 6.0 * kDeg, 1e-12);
  const FootOrientation right = SwingFootOrientation(s, Side::kRight);
  EXPECT_NEAR(right.pitch, -21.0 * kDeg, 1e-12);
  EXPECT_NEAR(right.roll, -6.0 * kDeg, 1e-12);
}

TEST(SwingFoot, WorkedExample) {
  RobotState s;
  s.base.orientation.x() = 0.05;
  s.q(JointIndex(Side::kLeft, kHipRoll)) = 0.1;
  EXPECT_NEAR(SwingFootOrientation(s, Side::kLeft).pitch, 0.15 + 21.0 * kDeg, 1e-12);
}

TEST(SwingFoot, SideFlipNegatesOffsets) {
  RobotState s;
  s.q(JointIndex(Side::kLeft, kHipRoll)) = 0.07;
  s.q(JointIndex(Side::kRight, kHipRoll)) = 0.07;
  const auto l = SwingFootOrientation(s, Side::kLeft);
  const auto r = SwingFootOrientation(s, Side::kRight);
  EXPECT_NEAR(l.pitch - 0.07, -(r.pitch - 0.07), 1e-15);
}

TEST(JointTorques, ZeroErrorGivesZero) {
  RegulationGains gains;
  const KinematicParams params;
  JointVector q = JointVector::Constant(0.2);
  const JointVector tau = ComputeJointTorques(q, q, JointVector::Zero(), gains, Side::kLeft,
                                              {}, params.torque_limit);
  EXPECT_TRUE(tau.isZero(0.0));
}

TEST(JointTorques, WorkedPdExample) {
  RegulationGains gains;
  gains.kp.setConstant(100.0);
  gains.kd.setZero();
  JointVector limit = JointVector::Constant(1e6);
  JointVector ref = JointVector::Zero();
  ref(JointIndex(Side::kLeft, kKnee)) = 0.1;
  const JointVector tau = ComputeJointTorques(ref, JointVector::Zero(), JointVector::Zero(),
                                              gains, Side::kRight, {}, limit);
  EXPECT_NEAR(tau(JointIndex(Side::kLeft, kKnee)), 10.0, 1e-12);
}

TEST(JointTorques, StanceFootPassiveAndLimitsHold) {
  RegulationGains gains;
  const KinematicParams params;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    JointVector ref, q, dq;
    for (int k = 0; k < kNumJoints; ++k) {
      ref(k) = u(rng);
      q(k) = u(rng);
      dq(k) = 20.0 * u(rng);
    }
    const Side stance = i % 2 ? Side::kLeft : Side::kRight;
    const TorsoTorques torso{100.0 * u(rng), 100.0 * u(rng)};
    const JointVector tau =
        ComputeJointTorques(ref, q, dq, gains, stance, torso, params.torque_limit);
    EXPECT_EQ(tau(JointIndex(stance, kFootPitch)), 0.0);
    EXPECT_EQ(tau(JointIndex(stance, kFootRoll)), 0.0);
    EXPECT_TRUE((tau.cwiseAbs().array() <= params.torque_limit.array()).all());
  }
}

TEST(JointTorques, TorsoTermLandsOnStanceHip) {
  RegulationGains gains;
  const JointVector limit = JointVector::Constant(1e6);
  const JointVector z = JointVector::Zero();
  const JointVector tau =
      ComputeJointTorques(z, z, z, gains, Side::kLeft, TorsoTorques{3.0, -4.0}, limit);
  EXPECT_EQ(tau(JointIndex(Side::kLeft, kHipRoll)), 3.0);
  EXPECT_EQ(tau(JointIndex(Side::kLeft, kHipPitch)), -4.0);
  EXPECT_EQ(tau(JointIndex(Side::kRight, kHipRoll)), 0.0);
}

TEST(RegulationGains, ValidateRejectsNegative) {
  RegulationGains gains;
  EXPECT_NO_THROW(gains.Validate());
  gains.kpx = -1.0;
  EXPECT_THROW(gains.Validate(), ConfigError);
  RegulationGains g2;
  g2.beta_max = 0.0;
  EXPECT_THROW(g2.Validate(), ConfigError);
}

TEST(VelocityFilter, ConvergesToConstantInput) {
  VelocityFilter f(20.0, 1e-3);
  f.Reset(Eigen::Vector3d::Zero());
  for (int i = 0; i < 1000; ++i) f.Update(Eigen::Vector3d(1.0, -2.0, 0.5));
  EXPECT_NEAR(f.value().x(), 1.0, 1e-12);
  EXPECT_NEAR(f.value().y(), -2.0, 1e-12);
}

}  // namespace
}  // namespace gaitforge

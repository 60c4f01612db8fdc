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

#include <random>

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include "gaitforge/dynamics.hpp"
#include "gaitforge/errors.hpp"

namespace gaitforge {
namespace {

GeneralizedVector RandomVector(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  GeneralizedVector v;
  for (int i = 0; i < kNumDofs; ++i) v(i) = u(rng);
  return v;
}

TEST(RigidBodyDynamicsTest, MassMatrixSymmetricPositiveDefinite) {
  RigidBodyDynamics rbd(KinematicParams{});
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const MassMatrix M = rbd.MassMatrixCrba(RandomVector(rng, 0.5));
    EXPECT_LT((M - M.transpose()).norm(), 1e-12);
    EXPECT_EQ(Eigen::LLT<MassMatrix>(M).info(), Eigen::Success);
    EXPECT_NEAR(M(0, 0), 48.0, 1e-12);
  }
}

TEST(RigidBodyDynamicsTest, InverseDynamicsConsistentWithCrba) {
  RigidBodyDynamics rbd(KinematicParams{});
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const GeneralizedVector q = RandomVector(rng, 0.5);
    const GeneralizedVector dq = RandomVector(rng, 1.0);
    const GeneralizedVector qdd = RandomVector(rng, 2.0);
    const GeneralizedVector lhs = rbd.InverseDynamics(q, dq, qdd);
    const GeneralizedVector rhs = rbd.MassMatrixCrba(q) * qdd + rbd.BiasForces(q, dq);
    EXPECT_LT((lhs - rhs).norm(), 1e-9);
  }
}

TEST(RigidBodyDynamicsTest, StaticGravityForceIsWeight) {
  RigidBodyDynamics rbd(KinematicParams{});
  const GeneralizedVector g =
      rbd.BiasForces(GeneralizedVector::Zero(), GeneralizedVector::Zero());
  EXPECT_NEAR(g(2), 48.0 * 9.81, 1e-9);
  EXPECT_NEAR(g(0), 0.0, 1e-12);
}

TEST(RigidBodyDynamicsTest, KineticEnergyMatchesFiniteDifferenceMomentum) {
  // Base translation rows of M dq equal the linear momentum.
  RigidBodyDynamics rbd(KinematicParams{});
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const GeneralizedVector q = RandomVector(rng, 0.5);
    const GeneralizedVector dq = RandomVector(rng, 1.0);
    const BodyPoses poses = ComputeBodyPoses(rbd.tree(), q);
    const Eigen::Vector3d p = rbd.LinearMomentum(poses, dq);
    const GeneralizedVector Mdq = rbd.MassMatrixCrba(q) * dq;
    EXPECT_LT((p - Mdq.head<3>()).norm(), 1e-10);
  }
}

TEST(RigidBodyDynamicsTest, PointJacobianMatchesFiniteDifference) {
  RigidBodyDynamics rbd(KinematicParams{});
  std::mt19937_64 rng(6);
  const GeneralizedVector q = RandomVector(rng, 0.5);
  const GeneralizedVector dq = RandomVector(rng, 1.0);
  const int foot = rbd.tree().foot_body[0];
  const Eigen::Vector3d local(0.1, 0.05, -0.08);
  auto point = [&](const GeneralizedVector& qq) {
    const BodyPoses p = ComputeBodyPoses(rbd.tree(), qq);
    return Eigen::Vector3d(p.origin[foot] + p.rotation[foot] * local);
  };
  const double h = 1e-6;
  const Eigen::Vector3d fd = (point(q + h * dq) - point(q - h * dq)) / (2 * h);
  const PointJacobian J =
      rbd.PointJacobianWorld(ComputeBodyPoses(rbd.tree(), q), foot, point(q));
  EXPECT_LT((J * dq - fd).norm(), 1e-8);
}

RobotState Airborne() {
  RobotState s;
  s.base.position = {0.0, 0.0, 3.0};
  s.q(JointIndex(Side::kLeft, kKnee)) = 0.3;
  s.q(JointIndex(Side::kRight, kKnee)) = 0.3;
  return s;
}

TEST(PenaltyContactDynamicsTest, FreeFallLosesExactlyGDt) {
  PenaltyContactDynamics dyn(KinematicParams{}, 9.81, {}, {});
  RobotState s = Airborne();
  s.base.linear_velocity.z() = 0.2;
  const double dt = 1.0 / 2000.0;
  const double before = s.base.linear_velocity.z();
  dyn.Step(&s, JointVector::Zero(), TerrainProfile::Flat(), {}, dt, nullptr);
  EXPECT_NEAR(s.base.linear_velocity.z(), before - 9.81 * dt, 1e-15);
  EXPECT_FALSE(s.contact_left || s.contact_right);
  EXPECT_DOUBLE_EQ(s.sim_time, dt);
}

TEST(PenaltyContactDynamicsTest, MomentumConservedWithoutGravity) {
  PenaltyContactDynamics dyn(KinematicParams{}, 0.0, {}, {});
  RobotState s = Airborne();
  s.base.linear_velocity = {0.3, -0.2, 0.1};
  s.base.angular_velocity = {0.5, -0.3, 0.2};
  s.dq.setConstant(0.4);
  const RigidBodyDynamics& rbd = dyn.rigid_body();
  auto momentum = [&](const RobotState& st) {
    return rbd.LinearMomentum(ComputeBodyPoses(rbd.tree(), ToGeneralizedPositions(st)),
                              ToGeneralizedVelocities(st));
  };
  const Eigen::Vector3d p0 = momentum(s);
  for (int i = 0; i < 1000; ++i) {
    dyn.Step(&s, JointVector::Zero(), TerrainProfile::Flat(), {}, 1.0 / 2000.0, nullptr);
  }
  EXPECT_LT((momentum(s) - p0).norm(), 1e-9);
}

TEST(PenaltyContactDynamicsTest, ExternalForceImpulse) {
  PenaltyContactDynamics dyn(KinematicParams{}, 0.0, {}, {});
  RobotState s = Airborne();
  ExternalForce push;
  push.force = {0.0, 96.0, 0.0};
  const double dt = 1.0 / 2000.0;
  for (int i = 0; i < 200; ++i) dyn.Step(&s, JointVector::Zero(), TerrainProfile::Flat(), push, dt, nullptr);
  const RigidBodyDynamics& rbd = dyn.rigid_body();
  const Eigen::Vector3d p = rbd.LinearMomentum(
      ComputeBodyPoses(rbd.tree(), ToGeneralizedPositions(s)), ToGeneralizedVelocities(s));
  EXPECT_NEAR(p.y(), 96.0 * 200 * dt, 1e-9);
}

RobotState StandingPose(const KinematicParams& kp) {
  RobotState s;
  for (Side side : {Side::kLeft, Side::kRight}) {
    s.q(JointIndex(side, kHipPitch)) = -0.2;
    s.q(JointIndex(side, kKnee)) = 0.4;
    s.q(JointIndex(side, kFootPitch)) = -0.2;
  }
  const double leg = kp.thigh_length * std::cos(0.2) + kp.shank_length * std::cos(0.2);
  s.base.position.z() = -kp.hip_offset_z + leg + kp.foot_height;
  return s;
}

TEST(PenaltyContactDynamicsTest, ContactForcesUnilateralAndInsideFrictionCone) {
  KinematicParams kp;
  PenaltyContactDynamics dyn(kp, 9.81, {}, {});
  RobotState s = StandingPose(kp);
  s.base.position.z() += 0.02;
  s.base.linear_velocity = {0.3, 0.1, -0.5};
  StepReport report;
  for (int i = 0; i < 2000; ++i) {
    dyn.Step(&s, JointVector::Zero(), TerrainProfile::Flat(), {}, 1.0 / 2000.0, &report);
    for (const auto& c : report.corners) {
      EXPECT_GE(c.normal_force, 0.0);
      EXPECT_LE(c.tangential_force.norm(), c.friction_limit + 1e-9);
    }
  }
}

TEST(PenaltyContactDynamicsTest, PassiveEnergyNonIncreasing) {
  KinematicParams kp;
  PenaltyContactDynamics dyn(kp, 9.81, {}, {});
  RobotState s = StandingPose(kp);
  s.base.position.z() += 0.05;
  s.base.linear_velocity.x() = 0.2;
  const TerrainProfile flat = TerrainProfile::Flat();
  double previous = dyn.MechanicalEnergy(s, flat);
  const double initial = previous;
  // A corner that crosses the surface during a step stores spring energy
  // before any force acts on it: 8 corners * k * (v dt)^2 / 2 at ~1 m/s.
  const double entry_tolerance = 8 * 0.5 * 5.0e4 * std::pow(1.0 / 2000.0, 2);
  double worst = -1e9;
  for (int i = 0; i < 4000; ++i) {
    dyn.Step(&s, JointVector::Zero(), flat, {}, 1.0 / 2000.0, nullptr);
    const double e = dyn.MechanicalEnergy(s, flat);
    worst = std::max(worst, e - previous);
    previous = e;
  }
  EXPECT_LE(worst, entry_tolerance);
  EXPECT_LT(previous, initial);
}

TEST(PenaltyContactDynamicsTest, HeldPoseSettlesToStaticEquilibrium) {
  KinematicParams kp;
  PenaltyContactDynamics dyn(kp, 9.81, {}, {});
  RobotState s = StandingPose(kp);
  const JointVector target = s.q;
  const double dt = 1.0 / 2000.0;
  const RigidBodyDynamics& rbd = dyn.rigid_body();
  auto com_velocity = [&](const RobotState& st) {
    return Eigen::Vector3d(
        rbd.LinearMomentum(ComputeBodyPoses(rbd.tree(), ToGeneralizedPositions(st)),
                           ToGeneralizedVelocities(st)) /
        rbd.total_mass());
  };
  for (int i = 0; i < 6000; ++i) {
    const JointVector tau = 3000.0 * (target - s.q) - 60.0 * s.dq;
    dyn.Step(&s, tau, TerrainProfile::Flat(), {}, dt, nullptr);
  }
  const Eigen::Vector3d v0 = com_velocity(s);
  const JointVector tau = 3000.0 * (target - s.q) - 60.0 * s.dq;
  dyn.Step(&s, tau, TerrainProfile::Flat(), {}, dt, nullptr);
  const Eigen::Vector3d acc = (com_velocity(s) - v0) / dt;
  EXPECT_LT(acc.norm(), 1e-3);
  EXPECT_TRUE(s.contact_left && s.contact_right);
}

TEST(PenaltyContactDynamicsTest, NonFiniteStateReportsDivergence) {
  PenaltyContactDynamics dyn(KinematicParams{}, 9.81, {}, {});
  RobotState s = Airborne();
  JointVector tau = JointVector::Zero();
  tau(0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(dyn.Step(&s, tau, TerrainProfile::Flat(), {}, 1e-3, nullptr),
               SimulationDivergedError);
}

}  // namespace
}  // namespace gaitforge

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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "gaitforge/errors.hpp"
#include "gaitforge/standing.hpp"

namespace gaitforge {
namespace {

RobotState NominalStance() {
  RobotState s;
  s.q = NominalCrouch();
  s.base.position.z() = 0.05 + 0.8 * std::cos(0.2) + 0.08;
  s.contact_left = s.contact_right = true;
  return s;
}

TEST(Standing, SymmetricPoseHasNoLateralOffset) {
  const KinematicParams params;
  const StandingCommand cmd = StandingControl(params, NominalStance(), StandingGains());
  EXPECT_FALSE(cmd.airborne);
  EXPECT_NEAR(cmd.knee_offset, 0.0, 1e-15);
}

TEST(Standing, OffsetsAreProportionalToCoMError) {
  const KinematicParams params;
  const RobotState s = NominalStance();
  StandingGains gains;
  const Eigen::Vector3d com = ForwardKinematicsCom(params, s);
  const Eigen::Vector2d center = PolygonCentroid(SupportPolygon(params, s));
  const StandingCommand cmd = StandingControl(params, s, gains);
  EXPECT_NEAR(cmd.foot_pitch_offset, gains.com_x_kp * (com.x() - center.x()), 1e-12);
}

TEST(Standing, ZeroCoMGainsGivePurePosturePd) {
  const KinematicParams params;
  RobotState s = NominalStance();
  s.q(3) += 0.05;
  s.dq(2) = 0.3;
  StandingGains gains;
  gains.com_x_kp = gains.com_x_kd = gains.com_y_kp = gains.com_y_kd = 0.0;
  const StandingCommand cmd = StandingControl(params, s, gains);
  EXPECT_EQ(cmd.foot_pitch_offset, 0.0);
  EXPECT_EQ(cmd.knee_offset, 0.0);
  const JointVector expected =
      gains.posture_kp.cwiseProduct(gains.nominal - s.q) - gains.posture_kd.cwiseProduct(s.dq);
  EXPECT_TRUE(cmd.torques.isApprox(expected.cwiseMax(-params.torque_limit)
                                       .cwiseMin(params.torque_limit)));
}

TEST(Standing, ForwardCoMErrorTiltsToesDown) {
  const KinematicParams params;
  RobotState s = NominalStance();
  s.base.linear_velocity.x() = 0.2;
  StandingGains gains;
  gains.com_x_kp = 0.0;
  EXPECT_GT(StandingControl(params, s, gains).foot_pitch_offset, 0.0);
  s.base.linear_velocity = {0.0, 0.2, 0.0};
  gains.com_y_kp = 0.0;
  EXPECT_GT(StandingControl(params, s, gains).knee_offset, 0.0);
}

TEST(Standing, AirborneFallsBackToPosture) {
  const KinematicParams params;
  RobotState s = NominalStance();
  s.contact_left = s.contact_right = false;
  const StandingCommand cmd = StandingControl(params, s, StandingGains());
  EXPECT_TRUE(cmd.airborne);
  EXPECT_EQ(cmd.reference, NominalCrouch());
}

TEST(Standing, ClosedLoopSettlesOverSupportCenter) {
  const KinematicParams params;
  const SimConfig sim;
  RobotState s = NominalStance();
  s.base.linear_velocity = {0.1, 0.05, 0.0};
  PenaltyContactDynamics dynamics(params, sim.gravity, sim.contact, sim.joint_limits,
                                  sim.joint_damping);
  const StandingController controller(params, StandingGains());
  JointVector tau = JointVector::Zero();
  for (int i = 0; i < 6000; ++i) {
    if (i % 2 == 0) tau = controller.Control(s).torques;
    dynamics.Step(&s, tau, TerrainProfile::Flat(), {}, sim.dynamics_dt, nullptr);
  }
  const Eigen::Vector3d com = ForwardKinematicsCom(params, s);
  const Eigen::Vector2d center = PolygonCentroid(SupportPolygon(params, s));
  EXPECT_LT((com.head<2>() - center).norm(), 0.01);
  EXPECT_LT(s.dq.cwiseAbs().maxCoeff(), 0.05);
}

TEST(Pool, EntriesAreFeasibleAndDeterministic) {
  const KinematicParams params;
  const SimConfig sim;
  const InitialStatePool a = GenerateInitialPool(3, 42, params, sim, StandingGains());
  const InitialStatePool b = GenerateInitialPool(3, 42, params, sim, StandingGains());
  ASSERT_EQ(a.entries.size(), 3u);
  for (size_t i = 0; i < a.entries.size(); ++i) {
    double margin = 0.0;
    EXPECT_TRUE(IsFeasibleInitialState(params, a.entries[i].state, sim.termination, &margin));
    EXPECT_GT(margin, 0.0);
    EXPECT_EQ(a.entries[i].state.q, b.entries[i].state.q);
    EXPECT_EQ(a.entries[i].state.base.position, b.entries[i].state.base.position);
  }
}

TEST(Pool, ZeroPerturbationSettlesNominalStance) {
  const KinematicParams params;
  PoolConfig cfg;
  cfg.joint_perturbation = 0.0;
  cfg.drop_height = 0.0;
  const InitialStatePool pool = GenerateInitialPool(1, 1, params, SimConfig(), StandingGains(), cfg);
  ASSERT_EQ(pool.entries.size(), 1u);
  EXPECT_NEAR(pool.entries[0].state.base.position.y(), 0.0, 1e-9);
  EXPECT_LT((pool.entries[0].state.q - NominalCrouch()).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Pool, RejectsBadArguments) {
  const KinematicParams params;
  EXPECT_THROW(GenerateInitialPool(0, 1, params, SimConfig(), StandingGains()), ConfigError);
  PoolConfig cfg;
  cfg.max_time = 0.1;
  EXPECT_THROW(GenerateInitialPool(1, 1, params, SimConfig(), StandingGains(), cfg), ConfigError);
}

TEST(Pool, ImpossibleSettlingReportsFailure) {
  const KinematicParams params;
  PoolConfig cfg;
  cfg.settle_speed = 1e-12;
  cfg.max_time = 0.6;
  cfg.max_rejections_per_entry = 1;
  EXPECT_THROW(GenerateInitialPool(1, 1, params, SimConfig(), StandingGains(), cfg),
               PoolGenerationError);
}

TEST(Pool, SaveLoadRoundTrip) {
  InitialStatePool pool;
  pool.seed = 0x123456789abcdefULL;
  for (int i = 0; i < 3; ++i) {
    PoolEntry e;
    e.state = NominalStance();
    e.state.q(i) += 0.01 * i;
    e.state.dq(5) = -0.25 * i;
    e.state.contact_left = i != 1;
    e.settle_time = 1.5 + i;
    pool.entries.push_back(e);
  }
  const auto path = std::filesystem::temp_directory_path() / "gaitforge_pool_test.bin";
  SavePool(pool, path);
  EXPECT_EQ(std::filesystem::file_size(path), 16u + 3u * 39u * 8u);
  const InitialStatePool back = LoadPool(path);
  EXPECT_EQ(back.seed, pool.seed);
  ASSERT_EQ(back.entries.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back.entries[i].state.q, pool.entries[i].state.q);
    EXPECT_EQ(back.entries[i].state.dq, pool.entries[i].state.dq);
    EXPECT_EQ(back.entries[i].state.contact_left, pool.entries[i].state.contact_left);
    EXPECT_EQ(back.entries[i].settle_time, pool.entries[i].settle_time);
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "GSP0";
  }
  EXPECT_THROW(LoadPool(path), IoError);
  std::filesystem::remove(path);
}

TEST(Pool, SamplingIsUniformAndSeeded) {
  InitialStatePool pool;
  for (int i = 0; i < 40; ++i) {
    PoolEntry e;
    e.state.base.position.x() = i;
    pool.entries.push_back(e);
  }
  std::mt19937_64 rng(9);
  std::vector<int> counts(40, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    ++counts[static_cast<int>(SampleInitial(pool, rng).base.position.x())];
  }
  const double p = 1.0 / 40.0;
  const double sigma = std::sqrt(draws * p * (1.0 - p));
  for (int c : counts) EXPECT_LT(std::abs(c - draws * p), 3.0 * sigma);

  std::mt19937_64 r1(4), r2(4);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(&SampleInitial(pool, r1), &SampleInitial(pool, r2));
  }
  InitialStatePool single;
  single.entries.resize(1);
  single.entries[0].state.base.position.x() = 3.0;
  EXPECT_EQ(SampleInitial(single, rng).base.position.x(), 3.0);
  EXPECT_THROW(SampleInitial(InitialStatePool(), rng), std::invalid_argument);
}

}  // namespace
}  // namespace gaitforge

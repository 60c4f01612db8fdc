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

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "gaitforge/dynamics.hpp"
#include "gaitforge/model.hpp"
#include "gaitforge/simulator.hpp"

namespace gaitforge {

struct StandingGains {
  // CoM x error (m) to foot pitch offset (rad), both feet.
  double com_x_kp = 1.5;
  double com_x_kd = 0.3;
  // CoM y error (m) to differential knee flexion (rad).
  double com_y_kp = 2.0;
  double com_y_kd = 0.3;
  JointVector posture_kp;
  JointVector posture_kd;
  JointVector nominal;  // crouch the posture PD pulls towards

  StandingGains();
  void Validate() const;
};

// Hip pitch / knee / foot pitch of the nominal crouch; roll and yaw are zero.
JointVector NominalCrouch();

struct StandingCommand {
  JointVector torques = JointVector::Zero();
  JointVector reference = JointVector::Zero();
  double foot_pitch_offset = 0.0;
  double knee_offset = 0.0;  // subtracted from the left knee, added to the right
  bool airborne = false;      // no foot in contact: pure posture PD
};

// Holds the rigid-body model needed for the CoM velocity.
class StandingController {
 public:
  StandingController(const KinematicParams& params, StandingGains gains);
  StandingCommand Control(const RobotState& state) const;
  const StandingGains& gains() const { return gains_; }

 private:
  KinematicParams params_;
  RigidBodyDynamics rbd_;
  StandingGains gains_;
};

StandingCommand StandingControl(const KinematicParams& params, const RobotState& state,
                                const StandingGains& gains);

struct PoolConfig {
  double joint_perturbation = 0.1;   // rad, uniform
  double drop_height = 0.05;         // m, lowest sole corner above ground, uniform
  double settle_speed = 0.02;        // m/s, CoM speed
  double settle_window = 0.5;        // s
  double max_time = 5.0;             // s before rejection
  int max_rejections_per_entry = 10;

  void Validate() const;
};

struct PoolEntry {
  RobotState state;
  double settle_time = 0.0;  // simulated seconds until settled
};

struct InitialStatePool {
  std::uint64_t seed = 0;
  std::vector<PoolEntry> entries;
};

class PoolGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No termination violation, both feet down, CoM strictly inside the support
// polygon.
bool IsFeasibleInitialState(const KinematicParams& params, const RobotState& state,
                            const TerminationParams& termination, double* margin = nullptr);

// Drops randomized crouched poses and stands them up until `n` settle.
// Throws PoolGenerationError after more than 10 n rejections.
InitialStatePool GenerateInitialPool(int n, std::uint64_t seed, const KinematicParams& params,
                                     const SimConfig& sim, const StandingGains& gains,
                                     const PoolConfig& config = {});

// Uniform draw; throws std::invalid_argument on an empty pool.
const RobotState& SampleInitial(const InitialStatePool& pool, std::mt19937_64& rng);

// "GSP1", u32 count, u64 seed, then per entry 39 little-endian f64:
// position, orientation, linear and angular velocity (12), q (12), dq (12),
// contact flags (2), settle time.
void SavePool(const InitialStatePool& pool, const std::filesystem::path& path);
InitialStatePool LoadPool(const std::filesystem::path& path);

}  // namespace gaitforge

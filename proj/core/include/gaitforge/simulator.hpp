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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gaitforge/bezier.hpp"
#include "gaitforge/dynamics.hpp"
#include "gaitforge/model.hpp"
#include "gaitforge/policy.hpp"
#include "gaitforge/regulation.hpp"
#include "gaitforge/reward.hpp"
#include "gaitforge/terrain.hpp"

namespace gaitforge {

enum class TerminationCause : std::uint8_t {
  kCompleted,
  kRoll,
  kPitch,
  kYaw,
  kRollRate,
  kPitchRate,
  kYawRate,
  kHeightLow,
  kHeightHigh,
  kFeetMetric,
  kDiverged,
};

const char* TerminationCauseName(TerminationCause cause);

enum class FeetMetric : std::uint8_t {
  kHeightDifference,  // |z_L - z_R| above the local ground
  kDistance,          // Euclidean distance between sole centers
};

struct TerminationParams {
  double max_angle = 0.5;  // rad, roll / pitch / yaw
  double max_rate = 2.0;   // rad/s
  double min_height = 0.8;
  double max_height = 1.2;
  FeetMetric feet_metric = FeetMetric::kHeightDifference;
  double feet_threshold = 0.05;
};

// Returns the first violated bound, heights measured above the terrain.
std::optional<TerminationCause> CheckTermination(const RobotState& state,
                                                 const FootPose& left,
                                                 const FootPose& right,
                                                 const TerrainProfile& terrain,
                                                 const TerminationParams& params);

struct DisturbanceEvent {
  double start = 0.0;     // s
  double duration = 0.1;  // s
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d pelvis_offset = Eigen::Vector3d::Zero();

  bool Active(double t) const { return t >= start && t < start + duration; }
};

// Sum of the events active at time t, as a force on the pelvis.
ExternalForce ApplyDisturbance(const std::vector<DisturbanceEvent>& events, double t);

// Which layers of the regulation cascade are active.
struct RegulationSwitches {
  bool foot_placement = true;
  bool torso = true;
  bool swing_foot = true;
};

struct SimConfig {
  double dynamics_dt = 1.0 / 2000.0;
  double control_dt = 1.0 / 1000.0;
  double planner_dt = 1.0 / 250.0;
  double gravity = 9.81;
  ContactParams contact;
  JointLimitParams joint_limits;
  double joint_damping = 0.5;  // N*m*s/rad, passive
  int episode_steps = 10000;
  double step_duration = 0.4;  // T_step, s
  double switch_timeout = 1.25;  // multiple of T_step
  Eigen::Vector2d command = Eigen::Vector2d(0.3, 0.0);
  TerminationParams termination;
  RegulationSwitches regulations;
  TorsoSetpoint torso_setpoint;
  double sensor_noise = 0.0;  // std of additive noise on what the controller reads

  // Steps per control / planner tick; both validated to be exact integers.
  int control_decimation() const;
  int planner_decimation() const;
  void Validate() const;
};

struct TelemetryRow {
  double time = 0.0;
  RobotState state;
  double tau = 0.0;
  Side stance = Side::kRight;
  JointVector torques = JointVector::Zero();
  JointVector reference = JointVector::Zero();
  RewardBreakdown reward;
  bool disturbance_active = false;
  bool tau_clamped = false;
};

// Column names of the telemetry CSV, in order.
std::vector<std::string> TelemetryColumns();
void WriteTelemetryCsv(std::ostream& out, const std::vector<TelemetryRow>& rows);

struct StanceSwitch {
  int control_tick = 0;
  double time = 0.0;
  Side new_stance = Side::kRight;
  RobotState state;  // at tau = 0 of the new step
};

struct EpisodeResult {
  double total_reward = 0.0;
  TerminationCause cause = TerminationCause::kCompleted;
  int steps = 0;  // dynamics steps taken
  int control_ticks = 0;
  double forward_distance = 0.0;
  double mean_velocity_error = 0.0;  // per walking step |dx/dt - vx_cmd|, averaged over steps
  RewardVector reward_terms = RewardVector::Zero();
  std::vector<StanceSwitch> switches;
  std::vector<TelemetryRow> telemetry;
  std::vector<CoeffMatrix> step_plans;  // first plan of every step (telemetry only)
  bool tau_clamped = false;
  bool output_clamped = false;
};

// Source of the 32 normalized coefficients; called on every planner tick with
// the observation in the right-stance frame.
class Planner {
 public:
  virtual ~Planner() = default;
  virtual PolicyOutput Plan(const Observation& obs) const = 0;
};

class PolicyPlanner final : public Planner {
 public:
  explicit PolicyPlanner(const Policy& policy) : policy_(policy) {}
  PolicyOutput Plan(const Observation& obs) const override {
    return policy_.Forward(obs);
  }

 private:
  const Policy& policy_;
};

// Observation of a left-stance step expressed in the right-stance frame.
Observation MirrorObservation(const Observation& obs);

struct EpisodeOptions {
  bool record_telemetry = false;
};

// Multi-rate loop: dynamics every step, regulation and PD every
// control_decimation() steps, planner every planner_decimation() steps.
EpisodeResult RunEpisode(const Policy& policy, const RobotState& initial,
                         const KinematicParams& params, const SimConfig& config,
                         const TerrainProfile& terrain,
                         const std::vector<DisturbanceEvent>& disturbances,
                         const RegulationGains& gains, const CoeffBounds& bounds,
                         const RewardParams& reward, std::uint64_t seed,
                         const EpisodeOptions& options = {});
EpisodeResult RunEpisode(const Planner& planner, const RobotState& initial,
                         const KinematicParams& params, const SimConfig& config,
                         const TerrainProfile& terrain,
                         const std::vector<DisturbanceEvent>& disturbances,
                         const RegulationGains& gains, const CoeffBounds& bounds,
                         const RewardParams& reward, std::uint64_t seed,
                         const EpisodeOptions& options = {});

// Joint state mirrored about the sagittal plane (legs swapped, roll and yaw
// joints negated).
JointVector MirrorJoints(const JointVector& q);

struct PoincareResult {
  // [q; dq] at tau = 0 of each step, in the right-stance frame.
  std::vector<Eigen::Matrix<double, 2 * kNumJoints, 1>> samples;
  std::vector<double> distances;  // between consecutive samples
  bool insufficient = false;      // fewer than two switches
};

PoincareResult PoincareSamples(const EpisodeResult& result);
PoincareResult PoincareFromSwitches(const std::vector<StanceSwitch>& switches);

}  // namespace gaitforge

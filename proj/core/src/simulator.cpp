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

#include "gaitforge/simulator.hpp"

#include <cmath>
#include <iomanip>
#include <random>

#include "gaitforge/errors.hpp"

namespace gaitforge {
namespace {

// Maps the regulation outputs onto this model's joint conventions: every leg
// joint uses the same axis on both sides, positive hip pitch swings the leg
// back, positive roll moves the foot towards +y.
constexpr double kApplyYaw = -1.0;
constexpr double kApplyPitch = 1.0;
constexpr double kApplyTorsoRoll = -1.0;

int ExactRatio(double coarse, double fine, const char* what) {
  const double ratio = coarse / fine;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9) {
    throw ConfigError(std::string(what) + " must be an integer multiple of the dynamics step");
  }
  return static_cast<int>(rounded);
}

// Everything the cascade keeps between ticks.
class WalkingController {
 public:
  WalkingController(const Planner& planner, const KinematicParams& params,
                    const SimConfig& config, const RegulationGains& gains,
                    const CoeffBounds& bounds)
      : planner_(planner),
        params_(params),
        config_(config),
        gains_(gains),
        bounds_(bounds),
        map_(SymmetryMap::Default()),
        filter_(gains.velocity_filter_hz, config.control_dt) {
    reg_.yaw_desired = 0.0;
  }

  void Reset(const RobotState& state, double t) {
    reg_.stance = Side::kRight;
    reg_.tau = 0.0;
    reg_.vx_last_step = state.base.linear_velocity.x();
    reg_.vy_last_step = state.base.linear_velocity.y();
    filter_.Reset(state.base.linear_velocity);
    step_start_ = t;
    Latch(state);
    last_output_.setConstant(0.5);
    Rebuild();
  }

  Side stance() const { return reg_.stance; }
  double tau() const { return reg_.tau; }
  const CoeffMatrix& active_plan() const { return active_; }
  const BezierFlags& flags() const { return flags_; }

  void PlannerTick(const RobotState& state) {
    Observation obs = ReducedObservation(state, config_.command);
    if (reg_.stance == Side::kLeft) obs = MirrorObservation(obs);
    last_output_ = planner_.Plan(obs);
    Rebuild();
  }

  // Returns true when a stance switch happened on this tick.
  bool MaybeSwitch(const RobotState& state, double t) {
    const double raw_tau = (t - step_start_) / config_.step_duration;
    const Side swing = Opposite(reg_.stance);
    const bool touchdown = raw_tau >= 1.0 && state.InContact(swing);
    if (!touchdown && raw_tau < config_.switch_timeout) return false;
    const Eigen::Vector3d& v = filter_.value();
    reg_.vx_last_step = v.x();
    reg_.vy_last_step = v.y();
    reg_.stance = swing;
    step_start_ = t;
    Latch(state);
    Rebuild();
    return true;
  }

  JointVector ControlTick(const RobotState& state, double t, JointVector* reference) {
    filter_.Update(state.base.linear_velocity);
    double raw_tau = (t - step_start_) / config_.step_duration;
    if (raw_tau > 1.0) {
      flags_.tau_clamped = true;
      raw_tau = 1.0;
    }
    reg_.tau = raw_tau;

    const PlannedVector planned = EvalAll(active_, reg_.tau);
    JointVector q_ref = JointVector::Zero();
    for (int c = 0; c < kPlannedJoints; ++c) q_ref(PlannedToJointIndex(c)) = planned(c);

    const Side swing = Opposite(reg_.stance);
    const Eigen::Vector2d velocity = filter_.value().head<2>();
    if (config_.regulations.foot_placement) {
      const FootPlacementDeltas d =
          ComputeFootPlacement(velocity, state.base.yaw(), reg_, gains_, config_.command);
      q_ref(JointIndex(swing, kHipRoll)) += SideSign(swing) * d.roll;
      q_ref(JointIndex(swing, kHipYaw)) += kApplyYaw * d.yaw;
      q_ref(JointIndex(swing, kHipPitch)) += kApplyPitch * d.pitch;
      // Integrate actual minus commanded so beta reinforces the proportional term.
      reg_ = UpdateBeta(reg_, velocity - config_.command, config_.control_dt, gains_);
    }

    // Swing foot held parallel to the ground through the leg chain.
    if (config_.regulations.swing_foot) {
      q_ref(JointIndex(swing, kFootPitch)) =
          -(state.base.pitch() + state.q(JointIndex(swing, kHipPitch)) +
            state.q(JointIndex(swing, kKnee)));
      q_ref(JointIndex(swing, kFootRoll)) =
          -(state.base.roll() + state.q(JointIndex(swing, kHipRoll)));
    }

    TorsoTorques torso;
    if (config_.regulations.torso) {
      const TorsoTorques u =
          ComputeTorsoCompensation(state, reg_.stance, gains_, config_.torso_setpoint);
      torso.hip_roll = kApplyTorsoRoll * u.hip_roll;
      torso.hip_pitch = SideSign(reg_.stance) * u.hip_pitch;
    }
    if (reference != nullptr) *reference = q_ref;
    return ComputeJointTorques(q_ref, state.q, state.dq, gains_, reg_.stance, torso,
                               params_.torque_limit);
  }

 private:
  void Latch(const RobotState& state) {
    const PlannedVector q = PlannedFromJoints(state.q);
    latched_ = reg_.stance == Side::kRight ? q : map_.Apply(q);
  }

  void Rebuild() {
    const StepPlan plan = BuildStepPlan(last_output_, latched_, map_, bounds_, &flags_);
    active_ = reg_.stance == Side::kRight ? plan.right_stance : plan.left_stance;
  }

  const Planner& planner_;
  const KinematicParams& params_;
  const SimConfig& config_;
  const RegulationGains& gains_;
  const CoeffBounds& bounds_;
  SymmetryMap map_;
  VelocityFilter filter_;
  RegulationState reg_;
  double step_start_ = 0.0;
  PlannedVector latched_ = PlannedVector::Zero();
  PolicyOutput last_output_ = PolicyOutput::Constant(0.5);
  CoeffMatrix active_ = CoeffMatrix::Zero();
  BezierFlags flags_;
};

RobotState AddSensorNoise(const RobotState& state, double stddev, std::mt19937_64* rng) {
  if (stddev <= 0.0) return state;
  std::normal_distribution<double> noise(0.0, stddev);
  RobotState noisy = state;
  for (int i = 0; i < 3; ++i) {
    noisy.base.orientation(i) += noise(*rng);
    noisy.base.linear_velocity(i) += noise(*rng);
    noisy.base.angular_velocity(i) += noise(*rng);
  }
  for (int i = 0; i < kNumJoints; ++i) {
    noisy.q(i) += noise(*rng);
    noisy.dq(i) += noise(*rng);
  }
  return noisy;
}

}  // namespace

const char* TerminationCauseName(TerminationCause cause) {
  switch (cause) {
    case TerminationCause::kCompleted:
      return "completed";
    case TerminationCause::kRoll:
      return "roll";
    case TerminationCause::kPitch:
      return "pitch";
    case TerminationCause::kYaw:
      return "yaw";
    case TerminationCause::kRollRate:
      return "roll_rate";
    case TerminationCause::kPitchRate:
      return "pitch_rate";
    case TerminationCause::kYawRate:
      return "yaw_rate";
    case TerminationCause::kHeightLow:
      return "height_low";
    case TerminationCause::kHeightHigh:
      return "height_high";
    case TerminationCause::kFeetMetric:
      return "feet_metric";
    case TerminationCause::kDiverged:
      return "diverged";
  }
  return "?";
}

std::optional<TerminationCause> CheckTermination(const RobotState& state,
                                                 const FootPose& left,
                                                 const FootPose& right,
                                                 const TerrainProfile& terrain,
                                                 const TerminationParams& params) {
  const auto& o = state.base.orientation;
  const auto& w = state.base.angular_velocity;
  if (!(std::abs(o.x()) < params.max_angle)) return TerminationCause::kRoll;
  if (!(std::abs(o.y()) < params.max_angle)) return TerminationCause::kPitch;
  if (!(std::abs(o.z()) < params.max_angle)) return TerminationCause::kYaw;
  if (!(std::abs(w.x()) < params.max_rate)) return TerminationCause::kRollRate;
  if (!(std::abs(w.y()) < params.max_rate)) return TerminationCause::kPitchRate;
  if (!(std::abs(w.z()) < params.max_rate)) return TerminationCause::kYawRate;
  const auto& p = state.base.position;
  const double height = p.z() - terrain.Height(p.x(), p.y());
  if (!(height > params.min_height)) return TerminationCause::kHeightLow;
  if (!(height < params.max_height)) return TerminationCause::kHeightHigh;
  double metric = 0.0;
  if (params.feet_metric == FeetMetric::kHeightDifference) {
    const double zl = left.position.z() - terrain.Height(left.position.x(), left.position.y());
    const double zr =
        right.position.z() - terrain.Height(right.position.x(), right.position.y());
    metric = std::abs(zl - zr);
  } else {
    metric = (left.position - right.position).norm();
  }
  if (!(metric < params.feet_threshold)) return TerminationCause::kFeetMetric;
  return std::nullopt;
}

ExternalForce ApplyDisturbance(const std::vector<DisturbanceEvent>& events, double t) {
  ExternalForce total;
  double weight = 0.0;
  for (const auto& e : events) {
    if (!e.Active(t)) continue;
    total.force += e.force;
    total.pelvis_offset += e.force.norm() * e.pelvis_offset;
    weight += e.force.norm();
  }
  // Overlapping events share a force-weighted application point.
  if (weight > 0.0) total.pelvis_offset /= weight;
  return total;
}

int SimConfig::control_decimation() const {
  return ExactRatio(control_dt, dynamics_dt, "control dt");
}

int SimConfig::planner_decimation() const {
  return ExactRatio(planner_dt, dynamics_dt, "planner dt");
}

void SimConfig::Validate() const {
  if (!(dynamics_dt > 0.0)) throw ConfigError("simulator.dynamics_dt must be > 0");
  const int control = control_decimation();
  const int planner = planner_decimation();
  if (planner % control != 0) {
    throw ConfigError("simulator.planner_dt must be an integer multiple of control_dt");
  }
  if (episode_steps < 1) throw ConfigError("simulator.episode_steps must be >= 1");
  if (!(step_duration > 0.0)) throw ConfigError("simulator.step_duration must be > 0");
  if (!(switch_timeout >= 1.0)) throw ConfigError("simulator.switch_timeout must be >= 1");
  if (!(contact.stiffness > 0.0) || !(contact.damping >= 0.0) ||
      !(contact.friction >= 0.0) || !(contact.slip_velocity > 0.0)) {
    throw ConfigError("simulator contact parameters out of range");
  }
  if (!(sensor_noise >= 0.0)) throw ConfigError("simulator.sensor_noise must be >= 0");
  if (!(termination.feet_threshold > 0.0)) {
    throw ConfigError("simulator.feet_threshold must be > 0");
  }
}

Observation MirrorObservation(const Observation& obs) {
  Observation m = obs;
  // roll, lateral velocity, roll rate, yaw rate, lateral command
  for (int i : {0, 3, 5, 7, 9}) m(i) = -m(i);
  return m;
}

JointVector MirrorJoints(const JointVector& q) {
  const double sign[kJointsPerLeg] = {-1, -1, 1, 1, 1, -1};
  JointVector m;
  for (int j = 0; j < kJointsPerLeg; ++j) {
    const auto lj = static_cast<LegJoint>(j);
    m(JointIndex(Side::kLeft, lj)) = sign[j] * q(JointIndex(Side::kRight, lj));
    m(JointIndex(Side::kRight, lj)) = sign[j] * q(JointIndex(Side::kLeft, lj));
  }
  return m;
}

std::vector<std::string> TelemetryColumns() {
  std::vector<std::string> cols = {"time", "x", "y", "z", "roll", "pitch", "yaw",
                                   "vx", "vy", "vz", "droll", "dpitch", "dyaw"};
  for (int i = 0; i < kNumJoints; ++i) cols.push_back("q_" + JointName(i));
  for (int i = 0; i < kNumJoints; ++i) cols.push_back("dq_" + JointName(i));
  cols.push_back("tau");
  cols.push_back("stance");
  for (int i = 0; i < kNumJoints; ++i) cols.push_back("u_" + JointName(i));
  for (int i = 0; i < kNumJoints; ++i) cols.push_back("ref_" + JointName(i));
  for (int i = 0; i < kRewardTerms; ++i) cols.push_back(RewardTermName(i));
  cols.push_back("reward");
  cols.push_back("contact_left");
  cols.push_back("contact_right");
  cols.push_back("disturbance");
  return cols;
}

void WriteTelemetryCsv(std::ostream& out, const std::vector<TelemetryRow>& rows) {
  const std::vector<std::string> cols = TelemetryColumns();
  for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  out << std::setprecision(17);
  for (const auto& r : rows) {
    const auto& b = r.state.base;
    out << r.time;
    for (const auto* v : {&b.position, &b.orientation, &b.linear_velocity,
                          &b.angular_velocity}) {
      for (int i = 0; i < 3; ++i) out << ',' << (*v)(i);
    }
    for (int i = 0; i < kNumJoints; ++i) out << ',' << r.state.q(i);
    for (int i = 0; i < kNumJoints; ++i) out << ',' << r.state.dq(i);
    out << ',' << r.tau << ',' << SideName(r.stance);
    for (int i = 0; i < kNumJoints; ++i) out << ',' << r.torques(i);
    for (int i = 0; i < kNumJoints; ++i) out << ',' << r.reference(i);
    for (int i = 0; i < kRewardTerms; ++i) out << ',' << r.reward.terms(i);
    out << ',' << r.reward.total << ',' << int(r.state.contact_left) << ','
        << int(r.state.contact_right) << ',' << int(r.disturbance_active) << '\n';
  }
}

EpisodeResult RunEpisode(const Policy& policy, const RobotState& initial,
                         const KinematicParams& params, const SimConfig& config,
                         const TerrainProfile& terrain,
                         const std::vector<DisturbanceEvent>& disturbances,
                         const RegulationGains& gains, const CoeffBounds& bounds,
                         const RewardParams& reward, std::uint64_t seed,
                         const EpisodeOptions& options) {
  const PolicyPlanner planner(policy);
  return RunEpisode(planner, initial, params, config, terrain, disturbances, gains, bounds,
                    reward, seed, options);
}

EpisodeResult RunEpisode(const Planner& planner, const RobotState& initial,
                         const KinematicParams& params, const SimConfig& config,
                         const TerrainProfile& terrain,
                         const std::vector<DisturbanceEvent>& disturbances,
                         const RegulationGains& gains, const CoeffBounds& bounds,
                         const RewardParams& reward, std::uint64_t seed,
                         const EpisodeOptions& options) {
  const int control_every = config.control_decimation();
  const int planner_every = config.planner_decimation();
  PenaltyContactDynamics dynamics(params, config.gravity, config.contact,
                                  config.joint_limits, config.joint_damping);
  const KinematicTree& tree = dynamics.rigid_body().tree();
  std::mt19937_64 rng(seed);

  EpisodeResult result;
  RobotState state = initial;
  state.sim_time = 0.0;
  WalkingController controller(planner, params, config, gains, bounds);

  auto termination = [&](const RobotState& s) {
    const BodyPoses poses = ComputeBodyPoses(tree, ToGeneralizedPositions(s));
    return CheckTermination(s, FootPoseFromBodies(params, tree, poses, Side::kLeft),
                            FootPoseFromBodies(params, tree, poses, Side::kRight), terrain,
                            config.termination);
  };

  const double x0 = state.base.position.x();
  double step_x = x0;
  double step_t = 0.0;
  double speed_error_sum = 0.0;
  int speed_error_count = 0;
  JointVector torques = JointVector::Zero();

  if (auto cause = termination(state)) {
    result.cause = *cause;
    return result;
  }
  controller.Reset(state, 0.0);
  result.step_plans.push_back(controller.active_plan());

  bool terminated = false;
  for (int step = 0; step < config.episode_steps; ++step) {
    const double t = step * config.dynamics_dt;
    if (step % control_every == 0) {
      const RobotState measured = AddSensorNoise(state, config.sensor_noise, &rng);
      if (step > 0 && controller.MaybeSwitch(measured, t)) {
        StanceSwitch sw;
        sw.control_tick = result.control_ticks;
        sw.time = t;
        sw.new_stance = controller.stance();
        sw.state = state;
        result.switches.push_back(sw);
        // Per-step average forward speed against the command.
        speed_error_sum += std::abs((state.base.position.x() - step_x) / (t - step_t) -
                                    config.command.x());
        ++speed_error_count;
        step_x = state.base.position.x();
        step_t = t;
        if (options.record_telemetry) result.step_plans.push_back(controller.active_plan());
      }
      if (step % planner_every == 0) controller.PlannerTick(measured);
      JointVector reference;
      torques = controller.ControlTick(measured, t, &reference);

      const BodyPoses poses = ComputeBodyPoses(tree, ToGeneralizedPositions(state));
      RewardInputs inputs;
      inputs.com = CenterOfMassFromBodies(tree, poses);
      inputs.left_foot = FootPoseFromBodies(params, tree, poses, Side::kLeft).position;
      inputs.right_foot = FootPoseFromBodies(params, tree, poses, Side::kRight).position;
      inputs.ground_height = terrain.Height(state.base.position.x(), state.base.position.y());
      const RewardBreakdown r =
          ComputeReward(state, torques, params.torque_limit, config.command, inputs, reward);
      result.total_reward += r.total;
      result.reward_terms += r.terms;
      ++result.control_ticks;
      if (options.record_telemetry) {
        TelemetryRow row;
        row.time = t;
        row.state = state;
        row.tau = controller.tau();
        row.stance = controller.stance();
        row.torques = torques;
        row.reference = reference;
        row.reward = r;
        row.disturbance_active = false;
        for (const auto& e : disturbances) row.disturbance_active |= e.Active(t);
        row.tau_clamped = controller.flags().tau_clamped;
        result.telemetry.push_back(row);
      }
    }

    try {
      dynamics.Step(&state, torques, terrain, ApplyDisturbance(disturbances, t),
                    config.dynamics_dt, nullptr);
    } catch (const SimulationDivergedError&) {
      result.cause = TerminationCause::kDiverged;
      result.steps = step + 1;
      terminated = true;
      break;
    }
    // Integer step count keeps the clock exact.
    state.sim_time = (step + 1) * config.dynamics_dt;
    result.steps = step + 1;
    if (auto cause = termination(state)) {
      result.cause = *cause;
      terminated = true;
      break;
    }
  }
  if (!terminated) result.cause = TerminationCause::kCompleted;
  if (state.IsFinite()) result.forward_distance = state.base.position.x() - x0;
  result.mean_velocity_error =
      speed_error_count > 0 ? speed_error_sum / speed_error_count : config.command.norm();
  result.tau_clamped = controller.flags().tau_clamped;
  result.output_clamped = controller.flags().output_clamped;
  return result;
}

PoincareResult PoincareFromSwitches(const std::vector<StanceSwitch>& switches) {
  PoincareResult out;
  if (switches.size() < 2) {
    out.insufficient = true;
    return out;
  }
  for (const auto& sw : switches) {
    JointVector q = sw.state.q;
    JointVector dq = sw.state.dq;
    if (sw.new_stance == Side::kLeft) {
      q = MirrorJoints(q);
      dq = MirrorJoints(dq);
    }
    Eigen::Matrix<double, 2 * kNumJoints, 1> sample;
    sample << q, dq;
    out.samples.push_back(sample);
  }
  for (size_t i = 1; i < out.samples.size(); ++i) {
    out.distances.push_back((out.samples[i] - out.samples[i - 1]).norm());
  }
  return out;
}

PoincareResult PoincareSamples(const EpisodeResult& result) {
  return PoincareFromSwitches(result.switches);
}

}  // namespace gaitforge

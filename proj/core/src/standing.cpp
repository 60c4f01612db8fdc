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

#include "gaitforge/standing.hpp"

#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "gaitforge/errors.hpp"

namespace gaitforge {
namespace {

constexpr unsigned char kMagic[4] = {'G', 'S', 'P', '1'};
constexpr int kRecordDoubles = 39;

}  // namespace

JointVector NominalCrouch() {
  JointVector q = JointVector::Zero();
  for (Side side : {Side::kLeft, Side::kRight}) {
    q(JointIndex(side, kHipPitch)) = -0.2;
    q(JointIndex(side, kKnee)) = 0.4;
    q(JointIndex(side, kFootPitch)) = -0.2;
  }
  return q;
}

StandingGains::StandingGains() : nominal(NominalCrouch()) {
  const double kp[kJointsPerLeg] = {1500.0, 600.0, 1500.0, 1500.0, 400.0, 200.0};
  const double kd[kJointsPerLeg] = {30.0, 10.0, 30.0, 30.0, 8.0, 4.0};
  for (Side side : {Side::kLeft, Side::kRight}) {
    for (int j = 0; j < kJointsPerLeg; ++j) {
      posture_kp(JointIndex(side, static_cast<LegJoint>(j))) = kp[j];
      posture_kd(JointIndex(side, static_cast<LegJoint>(j))) = kd[j];
    }
  }
}

void StandingGains::Validate() const {
  if (!(com_x_kp >= 0.0 && com_x_kd >= 0.0 && com_y_kp >= 0.0 && com_y_kd >= 0.0)) {
    throw ConfigError("standing CoM gains must be >= 0");
  }
  if (!(posture_kp.minCoeff() >= 0.0) || !(posture_kd.minCoeff() >= 0.0)) {
    throw ConfigError("standing posture gains must be >= 0");
  }
  if (!nominal.allFinite()) throw ConfigError("standing nominal posture must be finite");
}

StandingController::StandingController(const KinematicParams& params, StandingGains gains)
    : params_(params), rbd_(params), gains_(std::move(gains)) {}

StandingCommand StandingController::Control(const RobotState& state) const {
  StandingCommand cmd;
  cmd.reference = gains_.nominal;
  if (!state.contact_left && !state.contact_right) {
    cmd.airborne = true;
  } else {
    const GeneralizedVector q = ToGeneralizedPositions(state);
    const BodyPoses poses = ComputeBodyPoses(rbd_.tree(), q);
    const Eigen::Vector3d com = rbd_.CenterOfMass(poses);
    const Eigen::Vector3d com_velocity =
        rbd_.LinearMomentum(poses, ToGeneralizedVelocities(state)) / rbd_.total_mass();
    const Eigen::Vector2d center = PolygonCentroid(SupportPolygon(params_, state));
    // Errors in the heading frame.
    const double c = std::cos(state.base.yaw());
    const double s = std::sin(state.base.yaw());
    const Eigen::Vector2d d = com.head<2>() - center;
    const double ex = c * d.x() + s * d.y();
    const double ey = -s * d.x() + c * d.y();
    const double vx = c * com_velocity.x() + s * com_velocity.y();
    const double vy = -s * com_velocity.x() + c * com_velocity.y();

    // Toes down pushes the body back.
    cmd.foot_pitch_offset = gains_.com_x_kp * ex + gains_.com_x_kd * vx;
    // CoM towards +y: lengthen the left leg, shorten the right one.
    cmd.knee_offset = gains_.com_y_kp * ey + gains_.com_y_kd * vy;
    for (Side side : {Side::kLeft, Side::kRight}) {
      const double dk = side == Side::kLeft ? -cmd.knee_offset : cmd.knee_offset;
      cmd.reference(JointIndex(side, kKnee)) += dk;
      // Hip and ankle share the knee change so torso and sole stay level.
      cmd.reference(JointIndex(side, kHipPitch)) -= 0.5 * dk;
      cmd.reference(JointIndex(side, kFootPitch)) += cmd.foot_pitch_offset - 0.5 * dk;
    }
  }
  JointVector tau = gains_.posture_kp.cwiseProduct(cmd.reference - state.q) -
                    gains_.posture_kd.cwiseProduct(state.dq);
  cmd.torques = tau.cwiseMax(-params_.torque_limit).cwiseMin(params_.torque_limit);
  return cmd;
}

StandingCommand StandingControl(const KinematicParams& params, const RobotState& state,
                                const StandingGains& gains) {
  return StandingController(params, gains).Control(state);
}

void PoolConfig::Validate() const {
  if (!(joint_perturbation >= 0.0)) throw ConfigError("standing.joint_perturbation must be >= 0");
  if (!(drop_height >= 0.0)) throw ConfigError("standing.drop_height must be >= 0");
  if (!(settle_speed > 0.0)) throw ConfigError("standing.settle_speed must be > 0");
  if (!(settle_window > 0.0)) throw ConfigError("standing.settle_window must be > 0");
  if (!(max_time > settle_window)) {
    throw ConfigError("standing.max_time must exceed settle_window");
  }
  if (max_rejections_per_entry < 1) {
    throw ConfigError("standing.max_rejections_per_entry must be >= 1");
  }
}

bool IsFeasibleInitialState(const KinematicParams& params, const RobotState& state,
                            const TerminationParams& termination, double* margin) {
  if (!state.IsFinite() || !state.contact_left || !state.contact_right) return false;
  const FootPose left = ForwardKinematicsFoot(params, state, Side::kLeft);
  const FootPose right = ForwardKinematicsFoot(params, state, Side::kRight);
  if (CheckTermination(state, left, right, TerrainProfile::Flat(), termination)) return false;
  const Eigen::Vector3d com = ForwardKinematicsCom(params, state);
  const double m = PolygonInteriorMargin(SupportPolygon(params, state), com.head<2>());
  if (margin != nullptr) *margin = m;
  return m > 0.0;
}

namespace {

void Settle(const StandingController& controller, PenaltyContactDynamics& dynamics,
            const TerrainProfile& terrain, const SimConfig& sim, const PoolConfig& config,
            RobotState* state, double* settle_time, bool* settled) {
  const int control_every = sim.control_decimation();
  const int max_steps = static_cast<int>(std::lround(config.max_time / sim.dynamics_dt));
  const RigidBodyDynamics& rbd = dynamics.rigid_body();
  double calm_since = -1.0;
  JointVector torques = JointVector::Zero();
  *settled = false;
  for (int step = 0; step < max_steps; ++step) {
    const double t = step * sim.dynamics_dt;
    if (step % control_every == 0) {
      torques = controller.Control(*state).torques;
      const BodyPoses poses = ComputeBodyPoses(rbd.tree(), ToGeneralizedPositions(*state));
      const double speed =
          rbd.LinearMomentum(poses, ToGeneralizedVelocities(*state)).norm() / rbd.total_mass();
      const bool calm = speed < config.settle_speed && state->contact_left &&
                        state->contact_right;
      if (!calm) {
        calm_since = -1.0;
      } else if (calm_since < 0.0) {
        calm_since = t;
      } else if (t - calm_since >= config.settle_window) {
        *settle_time = t;
        *settled = true;
        return;
      }
    }
    dynamics.Step(state, torques, terrain, {}, sim.dynamics_dt, nullptr);
  }
}

// Resting pose hanging just above the ground.
RobotState SampleDrop(const KinematicParams& params, const PoolConfig& config,
                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> joint(-config.joint_perturbation,
                                               config.joint_perturbation);
  std::uniform_real_distribution<double> drop(0.0, config.drop_height);
  RobotState s;
  s.q = NominalCrouch();
  for (int i = 0; i < kNumJoints; ++i) {
    s.q(i) = std::clamp(s.q(i) + joint(rng), params.joint_lower(i), params.joint_upper(i));
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (Side side : {Side::kLeft, Side::kRight}) {
    for (const auto& c : SoleCorners(params, s, side)) lowest = std::min(lowest, c.z());
  }
  s.base.position.z() = -lowest + drop(rng);
  return s;
}

}  // namespace

InitialStatePool GenerateInitialPool(int n, std::uint64_t seed, const KinematicParams& params,
                                     const SimConfig& sim, const StandingGains& gains,
                                     const PoolConfig& config) {
  if (n < 1) throw ConfigError("pool size must be >= 1");
  config.Validate();
  gains.Validate();
  const StandingController controller(params, gains);
  PenaltyContactDynamics dynamics(params, sim.gravity, sim.contact, sim.joint_limits,
                                  sim.joint_damping);
  const TerrainProfile flat = TerrainProfile::Flat();

  InitialStatePool pool;
  pool.seed = seed;
  std::mt19937_64 rng(seed);
  int rejections = 0;
  std::ostringstream reasons;
  while (static_cast<int>(pool.entries.size()) < n) {
    RobotState s = SampleDrop(params, config, rng);
    double settle_time = 0.0;
    bool settled = false;
    std::string reason;
    try {
      Settle(controller, dynamics, flat, sim, config, &s, &settle_time, &settled);
      if (!settled) reason = "did not settle";
      else if (!IsFeasibleInitialState(params, s, sim.termination)) reason = "infeasible";
    } catch (const SimulationDivergedError&) {
      reason = "diverged";
    }
    if (reason.empty()) {
      s.sim_time = 0.0;
      pool.entries.push_back({s, settle_time});
      continue;
    }
    ++rejections;
    reasons << ' ' << reason;
    if (rejections > config.max_rejections_per_entry * n) {
      throw PoolGenerationError("pool generation failed: " + std::to_string(rejections) +
                                " rejections with " + std::to_string(pool.entries.size()) +
                                " accepted; reasons:" + reasons.str());
    }
  }
  return pool;
}

const RobotState& SampleInitial(const InitialStatePool& pool, std::mt19937_64& rng) {
  if (pool.entries.empty()) throw std::invalid_argument("cannot sample from an empty pool");
  std::uniform_int_distribution<std::size_t> pick(0, pool.entries.size() - 1);
  return pool.entries[pick(rng)].state;
}

void SavePool(const InitialStatePool& pool, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes(kMagic, kMagic + 4);
  detail::PutU32(&bytes, static_cast<std::uint32_t>(pool.entries.size()));
  detail::PutU32(&bytes, static_cast<std::uint32_t>(pool.seed & 0xffffffffu));
  detail::PutU32(&bytes, static_cast<std::uint32_t>(pool.seed >> 32));
  for (const auto& e : pool.entries) {
    const auto& b = e.state.base;
    for (const auto* v : {&b.position, &b.orientation, &b.linear_velocity, &b.angular_velocity}) {
      for (int i = 0; i < 3; ++i) detail::PutF64(&bytes, (*v)(i));
    }
    for (int i = 0; i < kNumJoints; ++i) detail::PutF64(&bytes, e.state.q(i));
    for (int i = 0; i < kNumJoints; ++i) detail::PutF64(&bytes, e.state.dq(i));
    detail::PutF64(&bytes, e.state.contact_left ? 1.0 : 0.0);
    detail::PutF64(&bytes, e.state.contact_right ? 1.0 : 0.0);
    detail::PutF64(&bytes, e.settle_time);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write pool " + path.string());
}

InitialStatePool LoadPool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read pool " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  constexpr size_t kHeader = 16;
  if (bytes.size() < kHeader || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw IoError("bad pool header in " + path.string());
  }
  const std::uint32_t count = detail::GetU32(bytes.data() + 4);
  if (bytes.size() != kHeader + static_cast<size_t>(count) * kRecordDoubles * 8) {
    throw IoError("pool size mismatch in " + path.string());
  }
  InitialStatePool pool;
  pool.seed = detail::GetU32(bytes.data() + 8) |
              (static_cast<std::uint64_t>(detail::GetU32(bytes.data() + 12)) << 32);
  const unsigned char* p = bytes.data() + kHeader;
  const auto next = [&p] {
    const double v = detail::GetF64(p);
    p += 8;
    return v;
  };
  for (std::uint32_t k = 0; k < count; ++k) {
    PoolEntry e;
    auto& b = e.state.base;
    for (auto* v : {&b.position, &b.orientation, &b.linear_velocity, &b.angular_velocity}) {
      for (int i = 0; i < 3; ++i) (*v)(i) = next();
    }
    for (int i = 0; i < kNumJoints; ++i) e.state.q(i) = next();
    for (int i = 0; i < kNumJoints; ++i) e.state.dq(i) = next();
    e.state.contact_left = next() != 0.0;
    e.state.contact_right = next() != 0.0;
    e.settle_time = next();
    if (!e.state.IsFinite()) throw IoError("non-finite pool entry in " + path.string());
    pool.entries.push_back(e);
  }
  return pool;
}

}  // namespace gaitforge

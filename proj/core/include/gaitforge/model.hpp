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
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gaitforge {

enum class Side : std::uint8_t { kLeft = 0, kRight = 1 };

constexpr Side Opposite(Side side) {
  return side == Side::kLeft ? Side::kRight : Side::kLeft;
}

// +1 for the left leg, -1 for the right leg. This is the S_y / S_theta / S_f
// selector used throughout the regulations.
constexpr double SideSign(Side side) {
  return side == Side::kLeft ? 1.0 : -1.0;
}

const char* SideName(Side side);

// Actuated joints of one leg, in the order q1, q2, q3, q4, q7, q8.
enum LegJoint : int {
  kHipRoll = 0,
  kHipYaw = 1,
  kHipPitch = 2,
  kKnee = 3,
  kFootPitch = 4,
  kFootRoll = 5,
};

inline constexpr int kJointsPerLeg = 6;
inline constexpr int kNumJoints = 2 * kJointsPerLeg;
// Floating base (6) + actuated joints (12).
inline constexpr int kNumDofs = 6 + kNumJoints;

// Joint vector layout: left leg q{1,2,3,4,7,8}L, then right leg.
constexpr int JointIndex(Side side, LegJoint joint) {
  return (side == Side::kLeft ? 0 : kJointsPerLeg) + joint;
}

const char* LegJointName(LegJoint joint);
// e.g. "hip_pitch_L".
std::string JointName(int index);

using JointVector = Eigen::Matrix<double, kNumJoints, 1>;
using GeneralizedVector = Eigen::Matrix<double, kNumDofs, 1>;

// Pelvis pose and twist. Orientation is x-y-z Euler angles (roll, pitch, yaw)
// with R = Rz(yaw) * Ry(pitch) * Rx(roll); the angular velocity entries are the
// Euler angle rates.
struct FloatingBase {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d orientation = Eigen::Vector3d::Zero();
  Eigen::Vector3d linear_velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();

  double roll() const { return orientation.x(); }
  double pitch() const { return orientation.y(); }
  double yaw() const { return orientation.z(); }
};

struct RobotState {
  FloatingBase base;
  JointVector q = JointVector::Zero();
  JointVector dq = JointVector::Zero();
  bool contact_left = false;
  bool contact_right = false;
  double sim_time = 0.0;

  bool InContact(Side side) const {
    return side == Side::kLeft ? contact_left : contact_right;
  }
  bool IsFinite() const;
};

// Rotation by `angle` about a unit axis.
Eigen::Matrix3d AxisRotation(const Eigen::Vector3d& axis, double angle);
Eigen::Matrix3d EulerToRotation(const Eigen::Vector3d& roll_pitch_yaw);
Eigen::Vector3d RotationToEuler(const Eigen::Matrix3d& rotation);

// Generalized coordinates in kinematic-chain order:
// [x, y, z, yaw, pitch, roll, joints...]. The floating base is realised as three
// prismatic joints followed by yaw/pitch/roll revolute joints.
GeneralizedVector ToGeneralizedPositions(const RobotState& state);
GeneralizedVector ToGeneralizedVelocities(const RobotState& state);
void FromGeneralized(const GeneralizedVector& q, const GeneralizedVector& dq,
                     RobotState* state);

struct LinkInertia {
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  // Principal moments about the link CoM, link frame axes.
  Eigen::Vector3d inertia = Eigen::Vector3d::Zero();
};

struct KinematicParams {
  // Pelvis and torso form one rigid floating body. Arm mass is lumped into
  // the torso.
  LinkInertia pelvis{10.0, {0.0, 0.0, 0.0}, {0.10, 0.06, 0.10}};
  LinkInertia torso{19.0, {0.0, 0.0, 0.22}, {0.45, 0.40, 0.20}};
  // Per-leg links, shared by both legs (mirrored about the sagittal plane).
  LinkInertia hip_roll_link{1.0, {0.0, 0.0, 0.0}, {0.002, 0.002, 0.002}};
  LinkInertia hip_yaw_link{1.0, {0.0, 0.0, -0.03}, {0.002, 0.002, 0.002}};
  LinkInertia thigh{4.0, {0.0, 0.0, -0.18}, {0.055, 0.055, 0.008}};
  LinkInertia shank{2.5, {0.0, 0.0, -0.16}, {0.035, 0.035, 0.004}};
  LinkInertia ankle_link{0.2, {0.0, 0.0, 0.0}, {0.0005, 0.0005, 0.0005}};
  LinkInertia foot{0.8, {0.02, 0.0, -0.05}, {0.0015, 0.0025, 0.003}};

  // Pelvis origin to hip joint center (left side; right is mirrored in y).
  double hip_offset_y = 0.15;
  double hip_offset_z = -0.05;
  double thigh_length = 0.40;
  double shank_length = 0.40;
  // Ankle joint center to sole plane.
  double foot_height = 0.08;
  // Sole rectangle, centered at (sole_offset_x, 0, -foot_height) in foot frame.
  double sole_length = 0.16;
  double sole_width = 0.10;
  double sole_offset_x = 0.02;

  JointVector joint_lower;
  JointVector joint_upper;
  JointVector torque_limit;

  KinematicParams();

  double TotalMass() const;
  // Throws ConfigError describing the first violated invariant.
  void Validate() const;
};

inline constexpr double kDocumentedTotalMass = 48.0;

// One body of the kinematic tree. Joint frames are placed in the parent body
// frame by a fixed translation (no fixed rotations are needed for this model).
struct TreeBody {
  enum class JointType : std::uint8_t { kPrismatic, kRevolute };
  int parent = -1;
  JointType type = JointType::kRevolute;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotational_inertia = Eigen::Matrix3d::Zero();  // about com
  std::string name;
};

// The floating-base tree in generalized-coordinate order. Bodies 0-4 are the
// massless virtual links of the base joints; body 5 is the pelvis.
struct KinematicTree {
  std::array<TreeBody, kNumDofs> bodies;
  int pelvis_body = 5;
  std::array<int, 2> foot_body{};  // indexed by Side

  static KinematicTree Build(const KinematicParams& params);
};

inline constexpr int GeneralizedJointIndex(int joint) { return 6 + joint; }

// World-frame pose of every body for a given configuration.
struct BodyPoses {
  std::array<Eigen::Matrix3d, kNumDofs> rotation;
  std::array<Eigen::Vector3d, kNumDofs> origin;
  // World-frame joint axis of each body's joint.
  std::array<Eigen::Vector3d, kNumDofs> axis;
};

BodyPoses ComputeBodyPoses(const KinematicTree& tree,
                           const GeneralizedVector& q);

struct FootPose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // sole center, world
  double roll = 0.0;
  double pitch = 0.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

FootPose ForwardKinematicsFoot(const KinematicParams& params,
                               const RobotState& state, Side side);
Eigen::Vector3d ForwardKinematicsCom(const KinematicParams& params,
                                     const RobotState& state);

// Variants reusing an already built tree and its body poses.
FootPose FootPoseFromBodies(const KinematicParams& params, const KinematicTree& tree,
                            const BodyPoses& poses, Side side);
Eigen::Vector3d CenterOfMassFromBodies(const KinematicTree& tree, const BodyPoses& poses);

// Four sole corners in world coordinates: front-left, front-right, back-right,
// back-left (foot frame).
std::array<Eigen::Vector3d, 4> SoleCorners(const KinematicParams& params,
                                           const RobotState& state, Side side);
std::array<Eigen::Vector3d, 4> SoleCornersInFoot(const KinematicParams& params);

using Polygon2d = std::vector<Eigen::Vector2d>;

// Convex hull (counter-clockwise, no repeated vertex) of the ground projection
// of the sole corners of every foot in contact. Throws AirborneError when no
// foot is in contact.
Polygon2d SupportPolygon(const KinematicParams& params, const RobotState& state);

Polygon2d ConvexHull(std::vector<Eigen::Vector2d> points);
double PolygonArea(const Polygon2d& polygon);
Eigen::Vector2d PolygonCentroid(const Polygon2d& polygon);
// Signed distance to the boundary, positive inside.
double PolygonInteriorMargin(const Polygon2d& polygon,
                             const Eigen::Vector2d& point);

inline constexpr int kObservationSize = 10;
using Observation = Eigen::Matrix<double, kObservationSize, 1>;

// [roll, pitch, vx, vy, vz, droll, dpitch, dyaw, vx_cmd, vy_cmd]. Yaw is not
// observed.
Observation ReducedObservation(const RobotState& state,
                               const Eigen::Vector2d& velocity_command);

}  // namespace gaitforge

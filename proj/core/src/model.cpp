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

#include "gaitforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gaitforge/errors.hpp"

namespace gaitforge {

Eigen::Matrix3d AxisRotation(const Eigen::Vector3d& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  // Coordinate axes take the closed form directly.
  if (axis.x() == 1.0) {
    Eigen::Matrix3d r;
    r << 1, 0, 0, 0, c, -s, 0, s, c;
    return r;
  }
  if (axis.y() == 1.0) {
    Eigen::Matrix3d r;
    r << c, 0, s, 0, 1, 0, -s, 0, c;
    return r;
  }
  if (axis.z() == 1.0) {
    Eigen::Matrix3d r;
    r << c, -s, 0, s, c, 0, 0, 0, 1;
    return r;
  }
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

namespace {

Eigen::Matrix3d PrincipalInertia(const LinkInertia& link) {
  return link.inertia.asDiagonal();
}

// |d|^2 I - d d^T
Eigen::Matrix3d ParallelAxisTerm(const Eigen::Vector3d& d) {
  return d.squaredNorm() * Eigen::Matrix3d::Identity() - d * d.transpose();
}

TreeBody MakeBody(int parent, TreeBody::JointType type,
                  const Eigen::Vector3d& axis, const Eigen::Vector3d& offset,
                  const LinkInertia& link, double mirror, std::string name) {
  TreeBody body;
  body.parent = parent;
  body.type = type;
  body.axis = axis;
  body.offset = offset;
  body.mass = link.mass;
  body.com = link.com;
  body.com.y() *= mirror;
  body.rotational_inertia = PrincipalInertia(link);
  body.name = std::move(name);
  return body;
}

}  // namespace

const char* SideName(Side side) { return side == Side::kLeft ? "L" : "R"; }

const char* LegJointName(LegJoint joint) {
  switch (joint) {
    case kHipRoll:
      return "hip_roll";
    case kHipYaw:
      return "hip_yaw";
    case kHipPitch:
      return "hip_pitch";
    case kKnee:
      return "knee";
    case kFootPitch:
      return "foot_pitch";
    case kFootRoll:
      return "foot_roll";
  }
  return "?";
}

std::string JointName(int index) {
  const Side side = index < kJointsPerLeg ? Side::kLeft : Side::kRight;
  return std::string(LegJointName(static_cast<LegJoint>(index % kJointsPerLeg))) +
         "_" + SideName(side);
}

bool RobotState::IsFinite() const {
  return base.position.allFinite() && base.orientation.allFinite() &&
         base.linear_velocity.allFinite() &&
         base.angular_velocity.allFinite() && q.allFinite() &&
         dq.allFinite() && std::isfinite(sim_time);
}

Eigen::Matrix3d EulerToRotation(const Eigen::Vector3d& rpy) {
  return AxisRotation(Eigen::Vector3d::UnitZ(), rpy.z()) *
         AxisRotation(Eigen::Vector3d::UnitY(), rpy.y()) *
         AxisRotation(Eigen::Vector3d::UnitX(), rpy.x());
}

Eigen::Vector3d RotationToEuler(const Eigen::Matrix3d& r) {
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

GeneralizedVector ToGeneralizedPositions(const RobotState& state) {
  GeneralizedVector q;
  q.head<3>() = state.base.position;
  q(3) = state.base.orientation.z();
  q(4) = state.base.orientation.y();
  q(5) = state.base.orientation.x();
  q.tail<kNumJoints>() = state.q;
  return q;
}

GeneralizedVector ToGeneralizedVelocities(const RobotState& state) {
  GeneralizedVector dq;
  dq.head<3>() = state.base.linear_velocity;
  dq(3) = state.base.angular_velocity.z();
  dq(4) = state.base.angular_velocity.y();
  dq(5) = state.base.angular_velocity.x();
  dq.tail<kNumJoints>() = state.dq;
  return dq;
}

void FromGeneralized(const GeneralizedVector& q, const GeneralizedVector& dq,
                     RobotState* state) {
  state->base.position = q.head<3>();
  state->base.orientation = {q(5), q(4), q(3)};
  state->base.linear_velocity = dq.head<3>();
  state->base.angular_velocity = {dq(5), dq(4), dq(3)};
  state->q = q.tail<kNumJoints>();
  state->dq = dq.tail<kNumJoints>();
}

KinematicParams::KinematicParams() {
  // Per leg: hip roll, hip yaw, hip pitch, knee, foot pitch, foot roll.
  // Hip pitch is positive when the leg swings backward; knee positive flexes.
  const double lower[kJointsPerLeg] = {-0.35, -0.35, -1.0, 0.0, -0.9, -0.5};
  const double upper[kJointsPerLeg] = {0.35, 0.35, 0.7, 1.8, 0.9, 0.5};
  const double torque[kJointsPerLeg] = {120.0, 80.0, 200.0, 200.0, 60.0, 40.0};
  for (int j = 0; j < kJointsPerLeg; ++j) {
    for (Side side : {Side::kLeft, Side::kRight}) {
      const int i = JointIndex(side, static_cast<LegJoint>(j));
      joint_lower(i) = lower[j];
      joint_upper(i) = upper[j];
      torque_limit(i) = torque[j];
    }
  }
}

double KinematicParams::TotalMass() const {
  const double leg = hip_roll_link.mass + hip_yaw_link.mass + thigh.mass +
                     shank.mass + ankle_link.mass + foot.mass;
  return pelvis.mass + torso.mass + 2.0 * leg;
}

void KinematicParams::Validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  const LinkInertia* links[] = {&pelvis, &torso,      &hip_roll_link,
                                &hip_yaw_link, &thigh, &shank,
                                &ankle_link,   &foot};
  const char* names[] = {"pelvis", "torso", "hip_roll_link", "hip_yaw_link",
                         "thigh",  "shank", "ankle_link",    "foot"};
  for (int i = 0; i < 8; ++i) {
    if (!(links[i]->mass > 0.0)) fail(std::string(names[i]) + " mass must be > 0");
    if (!(links[i]->inertia.minCoeff() >= 0.0))
      fail(std::string(names[i]) + " inertia must be >= 0");
  }
  if (std::abs(TotalMass() - kDocumentedTotalMass) > 1e-9) {
    std::ostringstream os;
    os << "total mass " << TotalMass() << " kg differs from "
       << kDocumentedTotalMass << " kg";
    fail(os.str());
  }
  const double lengths[] = {hip_offset_y, thigh_length, shank_length,
                            foot_height,  sole_length,  sole_width};
  for (double l : lengths) {
    if (!(l > 0.0)) fail("link lengths must be > 0");
  }
  for (int i = 0; i < kNumJoints; ++i) {
    if (!(joint_lower(i) < joint_upper(i)))
      fail("joint limit lower < upper violated for " + JointName(i));
    if (!(torque_limit(i) > 0.0))
      fail("torque limit must be > 0 for " + JointName(i));
  }
}

KinematicTree KinematicTree::Build(const KinematicParams& p) {
  using JT = TreeBody::JointType;
  KinematicTree tree;
  const Eigen::Vector3d ex = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d ey = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  const LinkInertia massless{};

  tree.bodies[0] = MakeBody(-1, JT::kPrismatic, ex, zero, massless, 1, "base_x");
  tree.bodies[1] = MakeBody(0, JT::kPrismatic, ey, zero, massless, 1, "base_y");
  tree.bodies[2] = MakeBody(1, JT::kPrismatic, ez, zero, massless, 1, "base_z");
  tree.bodies[3] = MakeBody(2, JT::kRevolute, ez, zero, massless, 1, "base_yaw");
  tree.bodies[4] = MakeBody(3, JT::kRevolute, ey, zero, massless, 1, "base_pitch");

  // Pelvis and torso fused into one rigid body.
  TreeBody pelvis = MakeBody(4, JT::kRevolute, ex, zero, massless, 1, "pelvis");
  const double m = p.pelvis.mass + p.torso.mass;
  pelvis.mass = m;
  if (m > 0.0) {
    pelvis.com = (p.pelvis.mass * p.pelvis.com + p.torso.mass * p.torso.com) / m;
    pelvis.rotational_inertia =
        PrincipalInertia(p.pelvis) +
        p.pelvis.mass * ParallelAxisTerm(p.pelvis.com - pelvis.com) +
        PrincipalInertia(p.torso) +
        p.torso.mass * ParallelAxisTerm(p.torso.com - pelvis.com);
  }
  tree.bodies[5] = pelvis;

  for (Side side : {Side::kLeft, Side::kRight}) {
    const double s = SideSign(side);
    const int b = GeneralizedJointIndex(JointIndex(side, kHipRoll));
    const std::string suffix = std::string("_") + SideName(side);
    tree.bodies[b + 0] =
        MakeBody(5, JT::kRevolute, ex, {0.0, s * p.hip_offset_y, p.hip_offset_z},
                 p.hip_roll_link, s, "hip_roll" + suffix);
    tree.bodies[b + 1] =
        MakeBody(b + 0, JT::kRevolute, ez, zero, p.hip_yaw_link, s, "hip_yaw" + suffix);
    tree.bodies[b + 2] =
        MakeBody(b + 1, JT::kRevolute, ey, zero, p.thigh, s, "thigh" + suffix);
    tree.bodies[b + 3] = MakeBody(b + 2, JT::kRevolute, ey,
                                  {0.0, 0.0, -p.thigh_length}, p.shank, s,
                                  "shank" + suffix);
    tree.bodies[b + 4] = MakeBody(b + 3, JT::kRevolute, ey,
                                  {0.0, 0.0, -p.shank_length}, p.ankle_link, s,
                                  "ankle" + suffix);
    tree.bodies[b + 5] =
        MakeBody(b + 4, JT::kRevolute, ex, zero, p.foot, s, "foot" + suffix);
    tree.foot_body[static_cast<int>(side)] = b + 5;
  }
  return tree;
}

BodyPoses ComputeBodyPoses(const KinematicTree& tree, const GeneralizedVector& q) {
  BodyPoses poses;
  for (int i = 0; i < kNumDofs; ++i) {
    const TreeBody& body = tree.bodies[i];
    Eigen::Matrix3d parent_rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d parent_origin = Eigen::Vector3d::Zero();
    if (body.parent >= 0) {
      parent_rotation = poses.rotation[body.parent];
      parent_origin = poses.origin[body.parent];
    }
    const Eigen::Vector3d joint_origin = parent_origin + parent_rotation * body.offset;
    poses.axis[i] = parent_rotation * body.axis;
    if (body.type == TreeBody::JointType::kRevolute) {
      poses.rotation[i] = parent_rotation * AxisRotation(body.axis, q(i));
      poses.origin[i] = joint_origin;
    } else {
      poses.rotation[i] = parent_rotation;
      poses.origin[i] = joint_origin + poses.axis[i] * q(i);
    }
  }
  return poses;
}

std::array<Eigen::Vector3d, 4> SoleCornersInFoot(const KinematicParams& p) {
  const double hx = 0.5 * p.sole_length;
  const double hy = 0.5 * p.sole_width;
  const double z = -p.foot_height;
  const double x0 = p.sole_offset_x;
  return {Eigen::Vector3d(x0 + hx, hy, z), Eigen::Vector3d(x0 + hx, -hy, z),
          Eigen::Vector3d(x0 - hx, -hy, z), Eigen::Vector3d(x0 - hx, hy, z)};
}

FootPose FootPoseFromBodies(const KinematicParams& params, const KinematicTree& tree,
                            const BodyPoses& poses, Side side) {
  const int foot = tree.foot_body[static_cast<int>(side)];
  FootPose pose;
  pose.rotation = poses.rotation[foot];
  pose.position = poses.origin[foot] +
                  pose.rotation * Eigen::Vector3d(params.sole_offset_x, 0.0,
                                                  -params.foot_height);
  const Eigen::Vector3d rpy = RotationToEuler(pose.rotation);
  pose.roll = rpy.x();
  pose.pitch = rpy.y();
  return pose;
}

FootPose ForwardKinematicsFoot(const KinematicParams& params,
                               const RobotState& state, Side side) {
  const KinematicTree tree = KinematicTree::Build(params);
  return FootPoseFromBodies(params, tree,
                            ComputeBodyPoses(tree, ToGeneralizedPositions(state)), side);
}

Eigen::Vector3d CenterOfMassFromBodies(const KinematicTree& tree, const BodyPoses& poses) {
  // Moments are taken about the pelvis origin and summed per leg, so mirrored
  // configurations cancel exactly.
  const Eigen::Vector3d& origin = poses.origin[tree.pelvis_body];
  const int first_right = tree.foot_body[0] + 1;
  std::array<Eigen::Vector3d, 3> moment;
  moment.fill(Eigen::Vector3d::Zero());
  double mass = 0.0;
  for (int i = 0; i < kNumDofs; ++i) {
    const TreeBody& body = tree.bodies[i];
    if (body.mass == 0.0) continue;
    const int group = i <= tree.pelvis_body ? 0 : (i < first_right ? 1 : 2);
    moment[group] += body.mass * (poses.origin[i] - origin + poses.rotation[i] * body.com);
    mass += body.mass;
  }
  return origin + (moment[0] + (moment[1] + moment[2])) / mass;
}

Eigen::Vector3d ForwardKinematicsCom(const KinematicParams& params,
                                     const RobotState& state) {
  const KinematicTree tree = KinematicTree::Build(params);
  return CenterOfMassFromBodies(tree, ComputeBodyPoses(tree, ToGeneralizedPositions(state)));
}

std::array<Eigen::Vector3d, 4> SoleCorners(const KinematicParams& params,
                                           const RobotState& state, Side side) {
  const KinematicTree tree = KinematicTree::Build(params);
  const BodyPoses poses = ComputeBodyPoses(tree, ToGeneralizedPositions(state));
  const int foot = tree.foot_body[static_cast<int>(side)];
  std::array<Eigen::Vector3d, 4> corners = SoleCornersInFoot(params);
  for (auto& c : corners) c = poses.origin[foot] + poses.rotation[foot] * c;
  return corners;
}

Polygon2d ConvexHull(std::vector<Eigen::Vector2d> points) {
  std::sort(points.begin(), points.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  // Andrew's monotone chain.
  Polygon2d hull(2 * points.size());
  size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const size_t lower = k + 1;
  for (size_t i = points.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

double PolygonArea(const Polygon2d& polygon) {
  double twice = 0.0;
  for (size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

Eigen::Vector2d PolygonCentroid(const Polygon2d& polygon) {
  const double area = PolygonArea(polygon);
  if (polygon.size() < 3 || area == 0.0) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : polygon) mean += p;
    return polygon.empty() ? mean : Eigen::Vector2d(mean / polygon.size());
  }
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    const double w = a.x() * b.y() - b.x() * a.y();
    c += (a + b) * w;
  }
  return c / (6.0 * area);
}

double PolygonInteriorMargin(const Polygon2d& polygon,
                             const Eigen::Vector2d& point) {
  if (polygon.size() < 3) return -std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < polygon.size(); ++i) {
    const Eigen::Vector2d a = polygon[i];
    const Eigen::Vector2d edge = polygon[(i + 1) % polygon.size()] - a;
    const Eigen::Vector2d rel = point - a;
    const double d = (edge.x() * rel.y() - edge.y() * rel.x()) / edge.norm();
    margin = std::min(margin, d);
  }
  return margin;
}

Polygon2d SupportPolygon(const KinematicParams& params, const RobotState& state) {
  if (!state.contact_left && !state.contact_right) throw AirborneError();
  std::vector<Eigen::Vector2d> points;
  for (Side side : {Side::kLeft, Side::kRight}) {
    if (!state.InContact(side)) continue;
    for (const auto& c : SoleCorners(params, state, side)) points.push_back(c.head<2>());
  }
  return ConvexHull(std::move(points));
}

Observation ReducedObservation(const RobotState& state,
                               const Eigen::Vector2d& velocity_command) {
  Observation obs;
  obs << state.base.orientation.x(), state.base.orientation.y(),
      state.base.linear_velocity.x(), state.base.linear_velocity.y(),
      state.base.linear_velocity.z(), state.base.angular_velocity.x(),
      state.base.angular_velocity.y(), state.base.angular_velocity.z(),
      velocity_command.x(), velocity_command.y();
  return obs;
}

}  // namespace gaitforge

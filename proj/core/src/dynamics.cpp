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

#include "gaitforge/dynamics.hpp"

#include <Eigen/Cholesky>

#include "gaitforge/errors.hpp"

namespace gaitforge {
namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using JT = TreeBody::JointType;

// Spatial vectors, Featherstone convention: motion [w; v], force [n; f].
struct Motion {
  Vec3 w = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

struct Force {
  Vec3 n = Vec3::Zero();
  Vec3 f = Vec3::Zero();
  Force& operator+=(const Force& o) {
    n += o.n;
    f += o.f;
    return *this;
  }
};

// Plucker transform from parent to child coordinates: E rotates parent
// coordinates into child coordinates, r is the child origin in parent.
struct Xform {
  Mat3 E = Mat3::Identity();
  Vec3 r = Vec3::Zero();

  Motion Apply(const Motion& m) const { return {E * m.w, E * (m.v - r.cross(m.w))}; }
  // Child-to-parent force transform (X^T).
  Force ApplyTranspose(const Force& f) const {
    const Vec3 et_f = E.transpose() * f.f;
    return {E.transpose() * f.n + r.cross(et_f), et_f};
  }
};

// Spatial inertia about the body origin: mass, first moment, rotational.
struct Inertia {
  double m = 0.0;
  Vec3 h = Vec3::Zero();
  Mat3 I = Mat3::Zero();

  Force operator*(const Motion& mo) const {
    return {I * mo.w + h.cross(mo.v), m * mo.v - h.cross(mo.w)};
  }
  Inertia& operator+=(const Inertia& o) {
    m += o.m;
    h += o.h;
    I += o.I;
    return *this;
  }
  // Expresses this (child-frame) inertia in the parent frame.
  Inertia ToParent(const Xform& x) const {
    const Vec3 hp = x.E.transpose() * h;
    const Vec3& r = x.r;
    Inertia out;
    out.m = m;
    out.h = hp + m * r;
    out.I = x.E.transpose() * I * x.E +
            (2.0 * hp.dot(r) + m * r.squaredNorm()) * Mat3::Identity() -
            hp * r.transpose() - r * hp.transpose() - m * r * r.transpose();
    return out;
  }
};

Motion CrossMotion(const Motion& a, const Motion& b) {
  return {a.w.cross(b.w), a.w.cross(b.v) + a.v.cross(b.w)};
}

Force CrossForce(const Motion& a, const Force& f) {
  return {a.w.cross(f.n) + a.v.cross(f.f), a.w.cross(f.f)};
}

Motion Subspace(const TreeBody& body, double rate) {
  if (body.type == JT::kRevolute) return {body.axis * rate, Vec3::Zero()};
  return {Vec3::Zero(), body.axis * rate};
}

double Project(const TreeBody& body, const Force& f) {
  return body.type == JT::kRevolute ? body.axis.dot(f.n) : body.axis.dot(f.f);
}

Xform JointTransform(const TreeBody& body, double q) {
  Xform x;
  if (body.type == JT::kRevolute) {
    x.E = AxisRotation(body.axis, q).transpose();
    x.r = body.offset;
  } else {
    x.r = body.offset + body.axis * q;
  }
  return x;
}

Inertia BodyInertia(const TreeBody& body) {
  Inertia in;
  in.m = body.mass;
  in.h = body.mass * body.com;
  in.I = body.rotational_inertia +
         body.mass * (body.com.squaredNorm() * Mat3::Identity() -
                      body.com * body.com.transpose());
  return in;
}

}  // namespace

RigidBodyDynamics::RigidBodyDynamics(const KinematicParams& params, double gravity)
    : params_(params), tree_(KinematicTree::Build(params)), gravity_(gravity) {
  for (const auto& b : tree_.bodies) total_mass_ += b.mass;
}

GeneralizedVector RigidBodyDynamics::InverseDynamics(
    const GeneralizedVector& q, const GeneralizedVector& dq,
    const GeneralizedVector& qdd) const {
  std::array<Xform, kNumDofs> X;
  std::array<Motion, kNumDofs> v;
  std::array<Motion, kNumDofs> a;
  std::array<Force, kNumDofs> f;
  // Gravity enters as a fictitious upward base acceleration.
  Motion a0;
  a0.v = Vec3(0.0, 0.0, gravity_);
  for (int i = 0; i < kNumDofs; ++i) {
    const TreeBody& body = tree_.bodies[i];
    X[i] = JointTransform(body, q(i));
    const Motion s_dq = Subspace(body, dq(i));
    const Motion s_qdd = Subspace(body, qdd(i));
    if (body.parent >= 0) {
      const Motion vp = X[i].Apply(v[body.parent]);
      v[i] = {vp.w + s_dq.w, vp.v + s_dq.v};
      const Motion ap = X[i].Apply(a[body.parent]);
      const Motion c = CrossMotion(v[i], s_dq);
      a[i] = {ap.w + s_qdd.w + c.w, ap.v + s_qdd.v + c.v};
    } else {
      v[i] = s_dq;
      const Motion ap = X[i].Apply(a0);
      a[i] = {ap.w + s_qdd.w, ap.v + s_qdd.v};
    }
    const Inertia inertia = BodyInertia(body);
    f[i] = inertia * a[i];
    f[i] += CrossForce(v[i], inertia * v[i]);
  }
  GeneralizedVector tau;
  for (int i = kNumDofs - 1; i >= 0; --i) {
    const TreeBody& body = tree_.bodies[i];
    tau(i) = Project(body, f[i]);
    if (body.parent >= 0) f[body.parent] += X[i].ApplyTranspose(f[i]);
  }
  return tau;
}

GeneralizedVector RigidBodyDynamics::BiasForces(const GeneralizedVector& q,
                                                const GeneralizedVector& dq) const {
  return InverseDynamics(q, dq, GeneralizedVector::Zero());
}

MassMatrix RigidBodyDynamics::MassMatrixCrba(const GeneralizedVector& q) const {
  std::array<Xform, kNumDofs> X;
  std::array<Inertia, kNumDofs> composite;
  for (int i = 0; i < kNumDofs; ++i) {
    X[i] = JointTransform(tree_.bodies[i], q(i));
    composite[i] = BodyInertia(tree_.bodies[i]);
  }
  for (int i = kNumDofs - 1; i >= 0; --i) {
    const int p = tree_.bodies[i].parent;
    if (p >= 0) composite[p] += composite[i].ToParent(X[i]);
  }
  MassMatrix M = MassMatrix::Zero();
  for (int i = 0; i < kNumDofs; ++i) {
    Force F = composite[i] * Subspace(tree_.bodies[i], 1.0);
    M(i, i) = Project(tree_.bodies[i], F);
    int j = i;
    while (tree_.bodies[j].parent >= 0) {
      F = X[j].ApplyTranspose(F);
      j = tree_.bodies[j].parent;
      M(i, j) = M(j, i) = Project(tree_.bodies[j], F);
    }
  }
  return M;
}

PointJacobian RigidBodyDynamics::PointJacobianWorld(const BodyPoses& poses, int body,
                                                    const Vec3& point) const {
  PointJacobian J = PointJacobian::Zero();
  for (int j = body; j >= 0; j = tree_.bodies[j].parent) {
    if (tree_.bodies[j].type == JT::kRevolute) {
      J.col(j) = poses.axis[j].cross(point - poses.origin[j]);
    } else {
      J.col(j) = poses.axis[j];
    }
  }
  return J;
}

Vec3 RigidBodyDynamics::CenterOfMass(const BodyPoses& poses) const {
  Vec3 c = Vec3::Zero();
  for (int i = 0; i < kNumDofs; ++i) {
    const TreeBody& b = tree_.bodies[i];
    if (b.mass == 0.0) continue;
    c += b.mass * (poses.origin[i] + poses.rotation[i] * b.com);
  }
  return c / total_mass_;
}

Vec3 RigidBodyDynamics::LinearMomentum(const BodyPoses& poses,
                                       const GeneralizedVector& dq) const {
  std::array<Vec3, kNumDofs> omega;
  std::array<Vec3, kNumDofs> vel;  // velocity of the body origin
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < kNumDofs; ++i) {
    const TreeBody& b = tree_.bodies[i];
    Vec3 w = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    if (b.parent >= 0) {
      w = omega[b.parent];
      v = vel[b.parent] + w.cross(poses.origin[i] - poses.origin[b.parent]);
    }
    if (b.type == JT::kRevolute) {
      w += poses.axis[i] * dq(i);
    } else {
      v += poses.axis[i] * dq(i);
    }
    omega[i] = w;
    vel[i] = v;
    if (b.mass != 0.0) p += b.mass * (v + w.cross(poses.rotation[i] * b.com));
  }
  return p;
}

double RigidBodyDynamics::KineticEnergy(const GeneralizedVector& q,
                                        const GeneralizedVector& dq) const {
  return 0.5 * dq.dot(MassMatrixCrba(q) * dq);
}

PenaltyContactDynamics::PenaltyContactDynamics(const KinematicParams& params,
                                               double gravity, ContactParams contact,
                                               JointLimitParams limits,
                                               double joint_damping)
    : rbd_(params, gravity),
      contact_(contact),
      limits_(limits),
      joint_damping_(joint_damping),
      sole_corners_(SoleCornersInFoot(params)) {}

void PenaltyContactDynamics::Step(RobotState* state, const JointVector& torques,
                                  const TerrainProfile& terrain,
                                  const ExternalForce& external, double dt,
                                  StepReport* report) {
  const KinematicTree& tree = rbd_.tree();
  const KinematicParams& params = rbd_.params();
  const GeneralizedVector q = ToGeneralizedPositions(*state);
  const GeneralizedVector v = ToGeneralizedVelocities(*state);
  const BodyPoses poses = ComputeBodyPoses(tree, q);
  const MassMatrix M = rbd_.MassMatrixCrba(q);

  // Explicit generalized forces.
  GeneralizedVector Q = -rbd_.BiasForces(q, v);
  Q.tail<kNumJoints>() += torques - joint_damping_ * v.tail<kNumJoints>();
  Vec3 external_point = Vec3::Zero();
  if (!external.force.isZero(0.0)) {
    const int pelvis = tree.pelvis_body;
    external_point = poses.origin[pelvis] + poses.rotation[pelvis] * external.pelvis_offset;
    Q += rbd_.PointJacobianWorld(poses, pelvis, external_point).transpose() *
         external.force;
  }

  // Joint limits push with s*k*violation - (dt*k + c)*s*v+ while violated,
  // s = +1 at the lower limit and -1 at the upper limit.
  struct LimitTerm {
    int dof;
    double sign;
    double violation;
    bool active;
  };
  std::array<LimitTerm, kNumJoints> limit_terms;
  int num_limits = 0;
  const double k_lim = limits_.stiffness;
  const double c_lim = limits_.damping;
  for (int j = 0; j < kNumJoints; ++j) {
    const int dof = GeneralizedJointIndex(j);
    if (q(dof) < params.joint_lower(j)) {
      limit_terms[num_limits++] = {dof, 1.0, params.joint_lower(j) - q(dof), true};
    } else if (q(dof) > params.joint_upper(j)) {
      limit_terms[num_limits++] = {dof, -1.0, q(dof) - params.joint_upper(j), true};
    }
  }
  auto limit_push = [&](const LimitTerm& t, const GeneralizedVector& vel) {
    return std::max(0.0, k_lim * t.violation - (dt * k_lim + c_lim) * t.sign * vel(t.dof));
  };

  // Sole corners below the surface at the start of the step.
  struct ContactTerm {
    int corner;
    PointJacobian J;
    Vec3 normal;
    double depth, k, c, mu;
    bool active;
  };
  std::array<ContactTerm, 8> contact_terms;
  int num_contacts = 0;
  if (report != nullptr) *report = StepReport{};
  for (Side side : {Side::kLeft, Side::kRight}) {
    const int foot = tree.foot_body[static_cast<int>(side)];
    for (int c = 0; c < 4; ++c) {
      const int corner = 4 * static_cast<int>(side) + c;
      const Vec3 p = poses.origin[foot] + poses.rotation[foot] * sole_corners_[c];
      const Vec3 n = terrain.Normal(p.x(), p.y());
      const double depth = (terrain.Height(p.x(), p.y()) - p.z()) * n.z();
      if (report != nullptr) {
        report->corners[corner].position = p;
        report->corners[corner].normal = n;
        report->corners[corner].depth = depth;
      }
      if (depth <= 0.0) continue;
      ContactTerm& term = contact_terms[num_contacts++];
      term.corner = corner;
      term.J = rbd_.PointJacobianWorld(poses, foot, p);
      term.normal = n;
      term.depth = depth;
      term.k = contact_.stiffness * terrain.stiffness_scale();
      term.c = contact_.damping * terrain.stiffness_scale();
      term.mu = contact_.friction * terrain.FrictionScale(p.x(), p.y());
      term.active = true;
    }
  }
  auto normal_force = [&](const ContactTerm& t, const Vec3& vel) {
    return std::max(0.0, t.k * t.depth - (dt * t.k + t.c) * t.normal.dot(vel));
  };

  // Implicit Euler on the velocity, iterated a fixed number of times to settle
  // the active constraint set and the friction coefficients.
  const double eps = contact_.slip_velocity;
  const GeneralizedVector base_rhs = M * v + dt * Q;
  GeneralizedVector v_lin = v;
  GeneralizedVector v_pred = v;
  std::array<double, 8> damping{};
  constexpr int kNewtonIterations = 3;
  for (int iter = 0; iter < kNewtonIterations; ++iter) {
    MassMatrix A = M;
    GeneralizedVector rhs = base_rhs;
    for (int i = 0; i < num_limits; ++i) {
      const LimitTerm& t = limit_terms[i];
      if (!t.active) continue;
      A(t.dof, t.dof) += dt * (dt * k_lim + c_lim);
      rhs(t.dof) += dt * t.sign * k_lim * t.violation;
    }
    for (int i = 0; i < num_contacts; ++i) {
      ContactTerm& t = contact_terms[i];
      if (!t.active) continue;
      const Eigen::Matrix<double, 1, kNumDofs> Jn = t.normal.transpose() * t.J;
      A.noalias() += (dt * (dt * t.k + t.c)) * Jn.transpose() * Jn;
      rhs.noalias() += (dt * t.k * t.depth) * Jn.transpose();

      // Friction as viscous damping with the secant coefficient at the
      // previous iterate, which keeps it dissipative.
      const Vec3 vel = t.J * v_lin;
      const Vec3 vt = vel - t.normal.dot(vel) * t.normal;
      const double fn = normal_force(t, vel);
      damping[i] = t.mu * fn / std::sqrt(vt.squaredNorm() + eps * eps);
      if (damping[i] > 0.0) {
        const Mat3 P = Mat3::Identity() - t.normal * t.normal.transpose();
        A.noalias() += (dt * damping[i]) * t.J.transpose() * P * t.J;
      }
    }
    v_pred = Eigen::LLT<MassMatrix>(A).solve(rhs);
    for (int i = 0; i < num_limits; ++i) {
      limit_terms[i].active = limit_push(limit_terms[i], v_pred) > 0.0;
    }
    for (int i = 0; i < num_contacts; ++i) {
      contact_terms[i].active = normal_force(contact_terms[i], contact_terms[i].J * v_pred) > 0.0;
    }
    v_lin = v_pred;
  }

  // Forces from the unilateral normal law and the damped friction projected
  // onto the Coulomb cone, applied explicitly.
  GeneralizedVector Q_final = Q;
  for (int i = 0; i < num_limits; ++i) {
    const LimitTerm& t = limit_terms[i];
    Q_final(t.dof) += t.sign * limit_push(t, v_pred);
  }
  Vec3 contact_force_sum = Vec3::Zero();
  bool in_contact[2] = {false, false};
  for (int i = 0; i < num_contacts; ++i) {
    const ContactTerm& t = contact_terms[i];
    const Vec3 vel = t.J * v_pred;
    const double fn = normal_force(t, vel);
    Vec3 ft = Vec3::Zero();
    if (fn > 0.0) {
      ft = -damping[i] * (vel - t.normal.dot(vel) * t.normal);
      const double limit = t.mu * fn;
      if (ft.norm() > limit) ft *= limit / ft.norm();
    }
    const Vec3 force = fn * t.normal + ft;
    Q_final.noalias() += t.J.transpose() * force;
    contact_force_sum += force;
    if (fn > 0.0) in_contact[t.corner / 4] = true;
    if (report != nullptr) {
      CornerContact& cc = report->corners[t.corner];
      cc.normal_force = fn;
      cc.tangential_force = ft;
      cc.friction_limit = t.mu * fn;
    }
  }

  const Eigen::LLT<MassMatrix> mass_solver(M);
  GeneralizedVector v_next = v + dt * mass_solver.solve(Q_final);
  const GeneralizedVector q_next = q + dt * v_next;

  // Project the base translation rates so that the system's linear momentum
  // changes by exactly the applied external impulse.
  const Vec3 external_sum =
      contact_force_sum + external.force + Vec3(0.0, 0.0, -rbd_.gravity() * rbd_.total_mass());
  const Vec3 target = rbd_.LinearMomentum(poses, v) + dt * external_sum;
  const BodyPoses next_poses = ComputeBodyPoses(tree, q_next);
  const Vec3 actual = rbd_.LinearMomentum(next_poses, v_next);
  v_next.head<3>() += (target - actual) / rbd_.total_mass();

  if (!q_next.allFinite() || !v_next.allFinite()) {
    throw SimulationDivergedError("simulation diverged at t=" +
                                  std::to_string(state->sim_time));
  }
  FromGeneralized(q_next, v_next, state);
  state->sim_time += dt;
  state->contact_left = in_contact[0];
  state->contact_right = in_contact[1];
  if (report != nullptr) report->total_contact_force = contact_force_sum;
}

double PenaltyContactDynamics::MechanicalEnergy(const RobotState& state,
                                                const TerrainProfile& terrain) const {
  const KinematicTree& tree = rbd_.tree();
  const KinematicParams& params = rbd_.params();
  const GeneralizedVector q = ToGeneralizedPositions(state);
  const GeneralizedVector v = ToGeneralizedVelocities(state);
  const BodyPoses poses = ComputeBodyPoses(tree, q);
  double energy = rbd_.KineticEnergy(q, v);
  energy += rbd_.total_mass() * rbd_.gravity() * rbd_.CenterOfMass(poses).z();
  for (Side side : {Side::kLeft, Side::kRight}) {
    const int foot = tree.foot_body[static_cast<int>(side)];
    for (const Vec3& corner : sole_corners_) {
      const Vec3 p = poses.origin[foot] + poses.rotation[foot] * corner;
      const Vec3 n = terrain.Normal(p.x(), p.y());
      const double depth = (terrain.Height(p.x(), p.y()) - p.z()) * n.z();
      if (depth > 0.0) {
        energy += 0.5 * contact_.stiffness * terrain.stiffness_scale() * depth * depth;
      }
    }
  }
  for (int j = 0; j < kNumJoints; ++j) {
    const double qj = state.q(j);
    double violation = 0.0;
    if (qj < params.joint_lower(j)) violation = params.joint_lower(j) - qj;
    if (qj > params.joint_upper(j)) violation = qj - params.joint_upper(j);
    energy += 0.5 * limits_.stiffness * violation * violation;
  }
  return energy;
}

}  // namespace gaitforge

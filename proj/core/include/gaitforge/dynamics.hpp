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
#include <memory>

#include <Eigen/Core>

#include "gaitforge/model.hpp"
#include "gaitforge/terrain.hpp"

namespace gaitforge {

using MassMatrix = Eigen::Matrix<double, kNumDofs, kNumDofs>;
using PointJacobian = Eigen::Matrix<double, 3, kNumDofs>;

struct ContactParams {
  double stiffness = 5.0e4;  // N/m per sole corner
  double damping = 5.0e3;    // N*s/m per sole corner
  double friction = 0.8;
  // Tangential speed below which Coulomb friction is smoothed (m/s).
  double slip_velocity = 1.0e-3;
};

struct JointLimitParams {
  double stiffness = 2.0e3;  // N*m/rad beyond the limit
  double damping = 20.0;     // N*m*s/rad while beyond the limit
};

// Force applied at a point expressed in the pelvis frame.
struct ExternalForce {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d pelvis_offset = Eigen::Vector3d::Zero();
};

struct CornerContact {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double depth = 0.0;         // penetration at the start of the step
  double normal_force = 0.0;  // >= 0
  Eigen::Vector3d tangential_force = Eigen::Vector3d::Zero();
  double friction_limit = 0.0;  // mu * normal_force
};

struct StepReport {
  std::array<CornerContact, 8> corners;  // left foot 0-3, right foot 4-7
  Eigen::Vector3d total_contact_force = Eigen::Vector3d::Zero();
};

// Rigid-body algorithms on the floating-base tree. Gravity acts along -z.
class RigidBodyDynamics {
 public:
  explicit RigidBodyDynamics(const KinematicParams& params, double gravity = 9.81);

  const KinematicTree& tree() const { return tree_; }
  const KinematicParams& params() const { return params_; }
  double gravity() const { return gravity_; }
  double total_mass() const { return total_mass_; }

  // Joint-space inertia via the composite-rigid-body algorithm.
  MassMatrix MassMatrixCrba(const GeneralizedVector& q) const;
  // Recursive Newton-Euler: tau = M qdd + C(q, dq) dq + g(q).
  GeneralizedVector InverseDynamics(const GeneralizedVector& q,
                                    const GeneralizedVector& dq,
                                    const GeneralizedVector& qdd) const;
  GeneralizedVector BiasForces(const GeneralizedVector& q,
                               const GeneralizedVector& dq) const;

  // World-frame Jacobian of a point rigidly attached to `body`.
  PointJacobian PointJacobianWorld(const BodyPoses& poses, int body,
                                   const Eigen::Vector3d& point) const;

  Eigen::Vector3d CenterOfMass(const BodyPoses& poses) const;
  Eigen::Vector3d LinearMomentum(const BodyPoses& poses,
                                 const GeneralizedVector& dq) const;
  double KineticEnergy(const GeneralizedVector& q,
                       const GeneralizedVector& dq) const;

 private:
  KinematicParams params_;
  KinematicTree tree_;
  double gravity_;
  double total_mass_ = 0.0;
};

// Pluggable time-stepping backend.
class DynamicsBackend {
 public:
  virtual ~DynamicsBackend() = default;
  // Advances `state` by dt. Throws SimulationDivergedError if the result is not
  // finite.
  virtual void Step(RobotState* state, const JointVector& torques,
                    const TerrainProfile& terrain, const ExternalForce& external,
                    double dt, StepReport* report) = 0;
  virtual double MechanicalEnergy(const RobotState& state,
                                  const TerrainProfile& terrain) const = 0;
};

// Semi-implicit Euler on the generalized coordinates with per-corner penalty
// contacts. Contact and joint-limit forces are linearised implicitly for the
// velocity solve, then re-evaluated with the exact nonlinear law (unilateral
// normal, friction inside the Coulomb cone) and applied.
class PenaltyContactDynamics final : public DynamicsBackend {
 public:
  PenaltyContactDynamics(const KinematicParams& params, double gravity,
                         ContactParams contact, JointLimitParams limits,
                         double joint_damping = 0.0);

  void Step(RobotState* state, const JointVector& torques,
            const TerrainProfile& terrain, const ExternalForce& external,
            double dt, StepReport* report) override;
  double MechanicalEnergy(const RobotState& state,
                          const TerrainProfile& terrain) const override;

  const RigidBodyDynamics& rigid_body() const { return rbd_; }
  const ContactParams& contact_params() const { return contact_; }

 private:
  RigidBodyDynamics rbd_;
  ContactParams contact_;
  JointLimitParams limits_;
  double joint_damping_;
  std::array<Eigen::Vector3d, 4> sole_corners_;
};

}  // namespace gaitforge

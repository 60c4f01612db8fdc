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
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gaitforge/bezier.hpp"
#include "gaitforge/model.hpp"

namespace gaitforge {

struct MlpArchitecture {
  int input_dim = kObservationSize;
  std::vector<int> hidden = {32, 32, 32, 32};
  int output_dim = kPolicyOutputs;
};

// Sum over layers of (fan_in + 1) * fan_out.
int ParamCount(const MlpArchitecture& arch);

inline constexpr int kDefaultParamCount = 4576;

// Flat layer-major vector [W1, b1, ..., W5, b5]; W is fan_out x fan_in stored
// row-major.
using PolicyParams = Eigen::VectorXd;

// ReLU hidden layers, sigmoid output clamped into the open interval (0, 1).
Eigen::VectorXd MlpForward(const MlpArchitecture& arch, const PolicyParams& params,
                           const Eigen::VectorXd& input);

// Fixed-architecture network used by the planner.
class Policy {
 public:
  // Throws ConfigError when the parameter count does not match the architecture.
  explicit Policy(PolicyParams params, MlpArchitecture arch = {});

  const PolicyParams& params() const { return params_; }
  const MlpArchitecture& architecture() const { return arch_; }

  PolicyOutput Forward(const Observation& obs) const;

 private:
  MlpArchitecture arch_;
  PolicyParams params_;
};

// Zero-mean Gaussian weights with the given std, zero biases.
PolicyParams InitialParams(const MlpArchitecture& arch, std::uint64_t seed,
                           double weight_std = 0.1);

// Coefficient matrices for a step with the right leg in stance and its mirror
// image for the left leg.
struct StepPlan {
  CoeffMatrix right_stance;
  CoeffMatrix left_stance;
};

// scale -> anchor row 0 -> continuity row 5 -> mirror, from a network output.
StepPlan BuildStepPlan(const PolicyOutput& u, const PlannedVector& latched_right_frame,
                       const SymmetryMap& map, const CoeffBounds& bounds,
                       BezierFlags* flags = nullptr);

// forward, then BuildStepPlan.
// `latched_right_frame` is the joint configuration latched at step start,
// expressed in the right-stance frame.
StepPlan PlanStep(const Policy& policy, const Observation& obs,
                  const PlannedVector& latched_right_frame, const SymmetryMap& map,
                  const CoeffBounds& bounds, BezierFlags* flags = nullptr);

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { kIo, kBadMagic, kWrongCount, kNonFinite, kCrcMismatch };
  CheckpointError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// "GFP1", u32 count, count x f64, u32 CRC32 of the f64 payload; little-endian.
void SaveCheckpoint(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams LoadCheckpoint(const std::filesystem::path& path,
                            int expected_count = kDefaultParamCount);

}  // namespace gaitforge

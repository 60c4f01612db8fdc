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

#include "gaitforge/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>

#include "binary_io.hpp"
#include "gaitforge/errors.hpp"

namespace gaitforge {
namespace {

double Sigmoid(double x) {
  const double y = 1.0 / (1.0 + std::exp(-x));
  return std::clamp(y, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

std::vector<int> LayerSizes(const MlpArchitecture& arch) {
  std::vector<int> sizes;
  sizes.push_back(arch.input_dim);
  sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
  sizes.push_back(arch.output_dim);
  return sizes;
}

constexpr char kMagic[4] = {'G', 'F', 'P', '1'};

}  // namespace

int ParamCount(const MlpArchitecture& arch) {
  const std::vector<int> sizes = LayerSizes(arch);
  int count = 0;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) count += (sizes[l] + 1) * sizes[l + 1];
  return count;
}

Eigen::VectorXd MlpForward(const MlpArchitecture& arch, const PolicyParams& params,
                           const Eigen::VectorXd& input) {
  const std::vector<int> sizes = LayerSizes(arch);
  if (params.size() != ParamCount(arch) || input.size() != arch.input_dim) {
    throw ConfigError("policy parameter or input size does not match the architecture");
  }
  Eigen::VectorXd x = input;
  Eigen::Index offset = 0;
  const size_t layers = sizes.size() - 1;
  for (size_t l = 0; l < layers; ++l) {
    const int fan_in = sizes[l];
    const int fan_out = sizes[l + 1];
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>
        W(params.data() + offset, fan_out, fan_in);
    offset += static_cast<Eigen::Index>(fan_in) * fan_out;
    const Eigen::Map<const Eigen::VectorXd> b(params.data() + offset, fan_out);
    offset += fan_out;
    Eigen::VectorXd y = W * x + b;
    if (l + 1 < layers) {
      x = y.cwiseMax(0.0);
    } else {
      x = y.unaryExpr([](double v) { return Sigmoid(v); });
    }
  }
  return x;
}

Policy::Policy(PolicyParams params, MlpArchitecture arch)
    : arch_(std::move(arch)), params_(std::move(params)) {
  if (arch_.input_dim != kObservationSize || arch_.output_dim != kPolicyOutputs) {
    throw ConfigError("policy must map " + std::to_string(kObservationSize) +
                      " inputs to " + std::to_string(kPolicyOutputs) + " outputs");
  }
  if (params_.size() != ParamCount(arch_)) {
    throw ConfigError("policy expects " + std::to_string(ParamCount(arch_)) +
                      " parameters, got " + std::to_string(params_.size()));
  }
}

PolicyOutput Policy::Forward(const Observation& obs) const {
  return MlpForward(arch_, params_, obs);
}

PolicyParams InitialParams(const MlpArchitecture& arch, std::uint64_t seed,
                           double weight_std) {
  const std::vector<int> sizes = LayerSizes(arch);
  PolicyParams params = PolicyParams::Zero(ParamCount(arch));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, weight_std);
  Eigen::Index offset = 0;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const Eigen::Index weights = static_cast<Eigen::Index>(sizes[l]) * sizes[l + 1];
    for (Eigen::Index i = 0; i < weights; ++i) params(offset + i) = normal(rng);
    offset += weights + sizes[l + 1];
  }
  return params;
}

StepPlan BuildStepPlan(const PolicyOutput& u, const PlannedVector& latched_right_frame,
                       const SymmetryMap& map, const CoeffBounds& bounds,
                       BezierFlags* flags) {
  CoeffMatrix alpha = CoeffMatrix::Zero();
  alpha.middleRows<kFreeRows>(1) = ScaleOutputs(u, bounds, flags);
  alpha = AnchorInitial(alpha, latched_right_frame);
  alpha = EnforceTerminalContinuity(alpha, map);
  return {alpha, Mirror(alpha, map)};
}

StepPlan PlanStep(const Policy& policy, const Observation& obs,
                  const PlannedVector& latched_right_frame, const SymmetryMap& map,
                  const CoeffBounds& bounds, BezierFlags* flags) {
  return BuildStepPlan(policy.Forward(obs), latched_right_frame, map, bounds, flags);
}

void SaveCheckpoint(const PolicyParams& params, const std::filesystem::path& path) {
  std::vector<unsigned char> payload;
  payload.reserve(static_cast<size_t>(params.size()) * 8);
  for (Eigen::Index i = 0; i < params.size(); ++i) detail::PutF64(&payload, params(i));
  std::vector<unsigned char> bytes(kMagic, kMagic + 4);
  detail::PutU32(&bytes, static_cast<std::uint32_t>(params.size()));
  bytes.insert(bytes.end(), payload.begin(), payload.end());
  detail::PutU32(&bytes, detail::Crc32(payload.data(), payload.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw CheckpointError(CheckpointError::Kind::kIo,
                          "cannot write checkpoint " + path.string());
  }
}

PolicyParams LoadCheckpoint(const std::filesystem::path& path, int expected_count) {
  using Kind = CheckpointError::Kind;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(Kind::kIo, "cannot read checkpoint " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw CheckpointError(Kind::kBadMagic, "bad magic in " + path.string());
  }
  if (bytes.size() < 8) {
    throw CheckpointError(Kind::kWrongCount, "truncated header in " + path.string());
  }
  const std::uint32_t count = detail::GetU32(bytes.data() + 4);
  const size_t expected_size = 8 + static_cast<size_t>(count) * 8 + 4;
  if (count != static_cast<std::uint32_t>(expected_count) || bytes.size() != expected_size) {
    throw CheckpointError(Kind::kWrongCount,
                          "wrong parameter count in " + path.string() + ": header says " +
                              std::to_string(count) + ", expected " +
                              std::to_string(expected_count) + " (" +
                              std::to_string(bytes.size()) + " bytes on disk)");
  }
  PolicyParams params(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    params(i) = detail::GetF64(bytes.data() + 8 + 8 * static_cast<size_t>(i));
    if (!std::isfinite(params(i))) {
      throw CheckpointError(Kind::kNonFinite, "non-finite entry at index " +
                                                  std::to_string(i) + " in " +
                                                  path.string());
    }
  }
  const std::uint32_t stored = detail::GetU32(bytes.data() + expected_size - 4);
  if (stored != detail::Crc32(bytes.data() + 8, static_cast<size_t>(count) * 8)) {
    throw CheckpointError(Kind::kCrcMismatch, "CRC mismatch in " + path.string());
  }
  return params;
}

}  // namespace gaitforge

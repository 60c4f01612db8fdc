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

#include <filesystem>
#include <fstream>
#include <cstring>
#include <random>

#include <gtest/gtest.h>

#include "../oracles/mlp_oracle.hpp"
#include "gaitforge/errors.hpp"
#include "gaitforge/policy.hpp"

namespace gaitforge {
namespace {

namespace fs = std::filesystem;

fs::path TempPath(const std::string& name) {
  return fs::temp_directory_path() / ("gaitforge_policy_test_" + name);
}

std::vector<unsigned char> ReadBytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteBytes(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

TEST(Architecture, ParameterCount) {
  const MlpArchitecture arch;
  EXPECT_EQ(arch.input_dim, 10);
  EXPECT_EQ(arch.output_dim, 32);
  EXPECT_EQ(ParamCount(arch), 4576);
  EXPECT_EQ(ParamCount(arch), kDefaultParamCount);
  EXPECT_EQ(ParamCount({2, {3}, 1}), (2 + 1) * 3 + (3 + 1) * 1);
}

TEST(Mlp, MatchesNaiveOracle) {
  const MlpArchitecture arch;
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 0.5);
  std::vector<int> widths = {arch.input_dim};
  widths.insert(widths.end(), arch.hidden.begin(), arch.hidden.end());
  widths.push_back(arch.output_dim);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    PolicyParams p(ParamCount(arch));
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = n(rng);
    Eigen::VectorXd x(arch.input_dim);
    for (int k = 0; k < arch.input_dim; ++k) x(k) = 2.0 * n(rng);
    const Eigen::VectorXd y = MlpForward(arch, p, x);
    const std::vector<double> expected = oracle::MlpForward(
        widths, std::vector<double>(p.data(), p.data() + p.size()),
        std::vector<double>(x.data(), x.data() + x.size()));
    for (int k = 0; k < arch.output_dim; ++k) worst = std::max(worst, std::abs(y(k) - expected[k]));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Mlp, OutputsStayInsideOpenUnitInterval) {
  const MlpArchitecture arch;
  PolicyParams p = PolicyParams::Constant(ParamCount(arch), 50.0);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(arch.input_dim, 10.0);
  Eigen::VectorXd y = MlpForward(arch, p, x);
  EXPECT_TRUE((y.array() < 1.0).all());
  p = -p;
  y = MlpForward(arch, p, -x);
  EXPECT_TRUE((y.array() > 0.0).all());
}

TEST(Mlp, ZeroParametersGiveOneHalf) {
  const Policy policy(PolicyParams::Zero(kDefaultParamCount));
  const PolicyOutput u = policy.Forward(Observation::Constant(0.3));
  EXPECT_TRUE((u.array() == 0.5).all());
}

TEST(Policy, RejectsWrongParameterCount) {
  EXPECT_THROW(Policy(PolicyParams::Zero(100)), ConfigError);
}

TEST(InitialParams, SeededGaussianWeightsZeroBiases) {
  const MlpArchitecture arch;
  const PolicyParams a = InitialParams(arch, 7);
  const PolicyParams b = InitialParams(arch, 7);
  const PolicyParams c = InitialParams(arch, 8);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  // First layer biases follow the 32 x 10 weight block.
  EXPECT_TRUE(a.segment(320, 32).isZero(0.0));
  const Eigen::VectorXd w = a.head(320);
  const double mean = w.mean();
  const double std = std::sqrt((w.array() - mean).square().mean());
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(std, 0.1, 0.01);
}

TEST(StepPlan, AnchoredContinuousAndMirrored) {
  const KinematicParams params;
  const CoeffBounds bounds = CoeffBounds::Default(params);
  const SymmetryMap map = SymmetryMap::Default();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  PolicyOutput u;
  for (int k = 0; k < kPolicyOutputs; ++k) u(k) = u01(rng);
  PlannedVector latched;
  for (int k = 0; k < kPlannedJoints; ++k) latched(k) = u01(rng) - 0.5;
  const StepPlan plan = BuildStepPlan(u, latched, map, bounds);
  EXPECT_EQ(plan.right_stance.row(0).transpose(), latched);
  EXPECT_EQ(plan.right_stance.row(5).transpose(), map.Apply(latched));
  EXPECT_EQ(plan.left_stance, Mirror(plan.right_stance, map));
  for (int r = 1; r <= 4; ++r)
    for (int c = 0; c < kPlannedJoints; ++c) {
      EXPECT_GE(plan.right_stance(r, c), bounds.lower(r, c));
      EXPECT_LE(plan.right_stance(r, c), bounds.upper(r, c));
    }
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const PolicyParams p = InitialParams(MlpArchitecture(), 3);
  const fs::path path = TempPath("roundtrip.bin");
  SaveCheckpoint(p, path);
  EXPECT_EQ(fs::file_size(path), 4u + 4u + 8u * 4576u + 4u);
  const PolicyParams q = LoadCheckpoint(path);
  EXPECT_EQ(std::memcmp(p.data(), q.data(), sizeof(double) * 4576), 0);
  fs::remove(path);
}

CheckpointError::Kind LoadKind(const fs::path& path, int expected = kDefaultParamCount) {
  try {
    LoadCheckpoint(path, expected);
  } catch (const CheckpointError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "load succeeded";
  return CheckpointError::Kind::kIo;
}

TEST(Checkpoint, DetectsCorruption) {
  using Kind = CheckpointError::Kind;
  const PolicyParams p = InitialParams(MlpArchitecture(), 4);
  const fs::path path = TempPath("corrupt.bin");
  SaveCheckpoint(p, path);
  const std::vector<unsigned char> good = ReadBytes(path);

  EXPECT_EQ(LoadKind(TempPath("missing.bin")), Kind::kIo);

  std::vector<unsigned char> bad = good;
  bad[0] = 'X';
  WriteBytes(path, bad);
  EXPECT_EQ(LoadKind(path), Kind::kBadMagic);

  bad = good;
  bad.resize(bad.size() - 9);
  WriteBytes(path, bad);
  EXPECT_EQ(LoadKind(path), Kind::kWrongCount);

  WriteBytes(path, good);
  EXPECT_EQ(LoadKind(path, 100), Kind::kWrongCount);

  bad = good;
  bad[8 + 8 * 10] ^= 0x01;
  WriteBytes(path, bad);
  EXPECT_EQ(LoadKind(path), Kind::kCrcMismatch);

  PolicyParams nan = p;
  nan(17) = std::numeric_limits<double>::quiet_NaN();
  SaveCheckpoint(nan, path);
  EXPECT_EQ(LoadKind(path), Kind::kNonFinite);
  fs::remove(path);
}

}  // namespace
}  // namespace gaitforge

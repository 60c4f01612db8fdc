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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "gaitforge/errors.hpp"
#include "gaitforge/training.hpp"

namespace gaitforge {
namespace {

EsConfig SmallEs() {
  EsConfig cfg;
  cfg.population = 32;
  cfg.sigma = 0.05;
  cfg.learning_rate = 0.02;
  cfg.seed = 11;
  return cfg;
}

double Quadratic(const Eigen::VectorXd& x) { return -x.squaredNorm(); }

TEST(Es, DeriveSeedDependsOnEveryPathElement) {
  const std::uint64_t a = DeriveSeed(1, {0, 0});
  EXPECT_EQ(a, DeriveSeed(1, {0, 0}));
  EXPECT_NE(a, DeriveSeed(2, {0, 0}));
  EXPECT_NE(a, DeriveSeed(1, {0, 1}));
  EXPECT_NE(a, DeriveSeed(1, {1, 0}));
  EXPECT_NE(a, DeriveSeed(1, {0}));
}

TEST(Es, AntitheticPairsAreExactNegatives) {
  const EsConfig cfg = SmallEs();
  for (int i = 0; i < cfg.population; i += 2) {
    const Eigen::VectorXd a = EsNoise(cfg, 3, i, 50);
    const Eigen::VectorXd b = EsNoise(cfg, 3, i + 1, 50);
    EXPECT_EQ(a, -b);
  }
  EXPECT_NE(EsNoise(cfg, 3, 0, 50), EsNoise(cfg, 3, 2, 50));
  EXPECT_NE(EsNoise(cfg, 3, 0, 50), EsNoise(cfg, 4, 0, 50));
}

TEST(Es, CenteredRanksRangeAndTies) {
  const std::vector<double> r = CenteredRanks({3.0, 1.0, 2.0, 5.0});
  EXPECT_DOUBLE_EQ(r[1], -0.5);
  EXPECT_DOUBLE_EQ(r[3], 0.5);
  EXPECT_DOUBLE_EQ(r[2], -0.5 + 1.0 / 3.0);
  const std::vector<double> tied = CenteredRanks({1.0, 2.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(tied[1], tied[2]);
  EXPECT_DOUBLE_EQ(tied[1], 0.0);
  for (double v : CenteredRanks(std::vector<double>(8, 4.2))) EXPECT_EQ(v, 0.0);
}

TEST(Es, EqualFitnessLeavesParamsUnchanged) {
  const EsConfig cfg = SmallEs();
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(20, -1.0, 1.0);
  const Eigen::VectorXd y = EsUpdate(x, std::vector<double>(cfg.population, 7.0), cfg, 0);
  EXPECT_EQ(x, y);
}

TEST(Es, ZeroLearningRateLeavesParamsUnchanged) {
  EsConfig cfg = SmallEs();
  cfg.learning_rate = 0.0;
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(10);
  std::vector<double> f(cfg.population);
  for (int i = 0; i < cfg.population; ++i) f[i] = i * 1.5;
  EXPECT_EQ(EsUpdate(x, f, cfg, 2), x);
}

TEST(Es, StepMatchesHandComputedSum) {
  const std::vector<Eigen::VectorXd> noise = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 2.0),
                                              Eigen::Vector2d(-1.0, 1.0)};
  const Eigen::VectorXd step = EsStep(noise, {0.5, -0.5, 0.0}, 0.1, 0.3);
  EXPECT_NEAR(step(0), 0.3 / (3 * 0.1) * 0.5, 1e-15);
  EXPECT_NEAR(step(1), 0.3 / (3 * 0.1) * -1.0, 1e-15);
}

TEST(Es, MissingOrBadFitnessThrows) {
  const EsConfig cfg = SmallEs();
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  EXPECT_THROW(EsUpdate(x, std::vector<double>(cfg.population - 1, 0.0), cfg, 0),
               std::invalid_argument);
  std::vector<double> f(cfg.population, 0.0);
  f[5] = std::nan("");
  EXPECT_THROW(EsUpdate(x, f, cfg, 0), std::invalid_argument);
}

TEST(Es, ConfigValidation) {
  EsConfig cfg = SmallEs();
  cfg.population = 31;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = SmallEs();
  cfg.sigma = 0.0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = SmallEs();
  cfg.workers = 0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  EXPECT_NO_THROW(SmallEs().Validate());
}

TEST(Es, ReducesQuadraticError) {
  const EsConfig cfg = SmallEs();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(10, 0.5);
  const double start = -Quadratic(x);
  for (int gen = 0; gen < 200; ++gen) {
    std::vector<double> f(cfg.population);
    for (int i = 0; i < cfg.population; ++i) {
      f[i] = Quadratic(x + cfg.sigma * EsNoise(cfg, gen, i, x.size()));
    }
    x = EsUpdate(x, f, cfg, gen);
  }
  EXPECT_LT(-Quadratic(x), start / 10.0);
}

TEST(Es, UpdateCorrelatesWithGradient) {
  EsConfig cfg = SmallEs();
  int positive = 0;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(10);
    for (auto& v : x) v = normal(rng);
    std::vector<double> f(cfg.population);
    for (int i = 0; i < cfg.population; ++i) {
      f[i] = Quadratic(x + cfg.sigma * EsNoise(cfg, trial, i, 10));
    }
    positive += (EsUpdate(x, f, cfg, trial) - x).dot(-2.0 * x) > 0.0;
  }
  EXPECT_GE(positive, 190);
}

TEST(Es, ParallelForRunsEachIndexOnce) {
  std::vector<int> hits(97, 0);
  ParallelFor(97, 4, [&](int i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(ParallelFor(10, 3, [](int i) { if (i == 7) throw std::runtime_error("x"); }),
               std::runtime_error);
}

TEST(Scenario, ParsesEachKind) {
  EXPECT_EQ(Scenario::Parse("flat").kind, Scenario::Kind::kFlat);
  const Scenario bumpy = Scenario::Parse("bumpy:0.03");
  EXPECT_EQ(bumpy.kind, Scenario::Kind::kBumpy);
  EXPECT_DOUBLE_EQ(bumpy.bump_amplitude, 0.03);
  EXPECT_DOUBLE_EQ(Scenario::Parse("bumpy").bump_amplitude, 0.02);
  EXPECT_DOUBLE_EQ(Scenario::Parse("incline:5").incline_deg, 5.0);
  const Scenario push = Scenario::Parse("push:120,0.1");
  EXPECT_EQ(push.kind, Scenario::Kind::kPush);
  ASSERT_EQ(push.Disturbances().size(), 1u);
  EXPECT_NEAR(push.Disturbances()[0].force.y(), 120.0, 1e-12);
  EXPECT_NEAR(push.Disturbances()[0].force.x(), 0.0, 1e-12);
  EXPECT_TRUE(Scenario::Parse("flat").Disturbances().empty());
}

TEST(Scenario, RejectsMalformedText) {
  EXPECT_THROW(Scenario::Parse("stairs"), ConfigError);
  EXPECT_THROW(Scenario::Parse("incline"), ConfigError);
  EXPECT_THROW(Scenario::Parse("incline:abc"), ConfigError);
  EXPECT_THROW(Scenario::Parse("push:1,2,3,4"), ConfigError);
  EXPECT_THROW(Scenario::Parse("bumpy:-1"), ConfigError);
}

TEST(Evaluate, ZeroEpisodesIsEmpty) {
  const RolloutSetup setup;
  const EvalMetrics m = Evaluate(PolicyParams::Zero(kDefaultParamCount), 0, Scenario(), setup);
  EXPECT_TRUE(m.empty);
  EXPECT_EQ(m.episodes, 0);
  EXPECT_TRUE(m.results.empty());
}

TEST(Evaluate, MedianHandlesEvenAndOdd) {
  EXPECT_DOUBLE_EQ(Median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(Median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_TRUE(std::isnan(Median({})));
}

RolloutSetup ShortSetup() {
  RolloutSetup setup;
  setup.sim.episode_steps = 200;
  setup.pool = GenerateInitialPool(2, 3, setup.params, setup.sim, StandingGains(), PoolConfig());
  return setup;
}

TEST(Train, OneGenerationIsDeterministic) {
  const RolloutSetup setup = ShortSetup();
  EsConfig cfg;
  cfg.population = 2;
  cfg.generations = 1;
  cfg.rollouts_per_candidate = 1;
  const PolicyParams init = InitialParams(setup.arch, 9);
  const TrainResult a = Train(cfg, setup, init);
  cfg.workers = 2;
  const TrainResult b = Train(cfg, setup, init);
  ASSERT_EQ(a.curve.size(), 1u);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.curve[0].mean_fitness, b.curve[0].mean_fitness);
  EXPECT_EQ(a.curve[0].center_fitness, b.curve[0].center_fitness);
  std::ostringstream csv_a, csv_b;
  WriteLearningCurveCsv(csv_a, a.curve);
  WriteLearningCurveCsv(csv_b, b.curve);
  EXPECT_EQ(csv_a.str(), csv_b.str());
}

TEST(Train, RejectsEmptyPool) {
  RolloutSetup setup;
  EsConfig cfg;
  cfg.population = 2;
  cfg.generations = 1;
  EXPECT_THROW(Train(cfg, setup, InitialParams(setup.arch, 1)), ConfigError);
}

}  // namespace
}  // namespace gaitforge

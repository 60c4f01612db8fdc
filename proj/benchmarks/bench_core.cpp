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

#include <random>

#include <benchmark/benchmark.h>

#include "gaitforge/bezier.hpp"
#include "gaitforge/dynamics.hpp"
#include "gaitforge/policy.hpp"
#include "gaitforge/simulator.hpp"
#include "gaitforge/standing.hpp"
#include "gaitforge/training.hpp"

namespace gaitforge {
namespace {

void BM_BezierEvalAll(benchmark::State& state) {
  const CoeffMatrix alpha = CoeffMatrix::Random();
  double tau = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(EvalAll(alpha, tau));
    tau = tau >= 1.0 ? 0.0 : tau + 1e-3;
  }
}
BENCHMARK(BM_BezierEvalAll);

void BM_PolicyForward(benchmark::State& state) {
  const Policy policy(InitialParams(MlpArchitecture(), 1));
  Observation obs = Observation::Zero();
  obs(0) = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(policy.Forward(obs));
}
BENCHMARK(BM_PolicyForward);

void BM_DynamicsStep(benchmark::State& state) {
  const KinematicParams params;
  const SimConfig sim;
  PenaltyContactDynamics dyn(params, sim.gravity, sim.contact, sim.joint_limits, sim.joint_damping);
  RobotState s;
  s.q = NominalCrouch();
  s.base.position.z() = 0.05 + 0.8 * std::cos(0.2) + 0.08;
  const RobotState start = s;
  const TerrainProfile flat = TerrainProfile::Flat();
  StepReport report;
  int n = 0;
  for (auto _ : state) {
    dyn.Step(&s, JointVector::Zero(), flat, {}, sim.dynamics_dt, &report);
    if (++n == 200) {
      s = start;
      n = 0;
    }
  }
}
BENCHMARK(BM_DynamicsStep);

// One planner-and-regulation episode of 1000 dynamics steps (0.5 s).
void BM_EpisodeHalfSecond(benchmark::State& state) {
  const KinematicParams params;
  SimConfig sim;
  sim.episode_steps = 1000;
  const InitialStatePool pool = GenerateInitialPool(1, 1, params, sim, StandingGains());
  const Policy policy(PolicyParams::Zero(kDefaultParamCount));
  const CoeffBounds bounds = CoeffBounds::Default(params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunEpisode(policy, pool.entries[0].state, params, sim,
                                        TerrainProfile::Flat(), {}, RegulationGains(), bounds,
                                        RewardParams(), 1));
  }
}
BENCHMARK(BM_EpisodeHalfSecond)->Unit(benchmark::kMillisecond);

void BM_EsUpdate(benchmark::State& state) {
  EsConfig cfg;
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(kDefaultParamCount);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<double> fitness(cfg.population);
  for (double& f : fitness) f = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(EsUpdate(x, fitness, cfg, 0));
}
BENCHMARK(BM_EsUpdate)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace gaitforge

BENCHMARK_MAIN();

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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gaitforge/bezier.hpp"
#include "gaitforge/policy.hpp"
#include "gaitforge/regulation.hpp"
#include "gaitforge/reward.hpp"
#include "gaitforge/simulator.hpp"
#include "gaitforge/standing.hpp"
#include "gaitforge/terrain.hpp"

namespace gaitforge {

struct EsConfig {
  int population = 64;  // lambda, even when antithetic
  double sigma = 0.05;
  double learning_rate = 0.02;
  bool antithetic = true;
  bool rank_normalize = true;
  int generations = 300;
  int rollouts_per_candidate = 2;
  std::uint64_t seed = 1;
  int workers = 1;
  int checkpoint_every = 1;  // generations; 0 keeps only the final and best files

  void Validate() const;
};

// Deterministic 64-bit seed from a master seed and a path of indices.
std::uint64_t DeriveSeed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Perturbation i of `generation`. Antithetic pairs share the draw of i / 2 with
// opposite signs.
Eigen::VectorXd EsNoise(const EsConfig& cfg, int generation, int index, Eigen::Index dim);

// Centered ranks in [-0.5, 0.5]; ties share their mean rank, so equal inputs
// map to zeros.
std::vector<double> CenteredRanks(const std::vector<double>& fitness);

// sum_i score_i * noise_i * lr / (lambda sigma), summed in index order.
Eigen::VectorXd EsStep(const std::vector<Eigen::VectorXd>& noise,
                       const std::vector<double>& scores, double sigma, double learning_rate);

// Full update for one generation. `fitness` must hold one finite value per
// candidate; anything else throws std::invalid_argument.
Eigen::VectorXd EsUpdate(const Eigen::VectorXd& params, const std::vector<double>& fitness,
                         const EsConfig& cfg, int generation);

// Runs fn(0..n-1) on up to `workers` threads. Every index runs exactly once;
// the first exception is rethrown after all workers stop.
void ParallelFor(int n, int workers, const std::function<void(int)>& fn);

// Terrain and disturbance schedule of an evaluation.
struct Scenario {
  enum class Kind { kFlat, kBumpy, kIncline, kPush };
  Kind kind = Kind::kFlat;
  double bump_amplitude = 0.02;  // m
  double bump_correlation = 0.3;  // m
  double incline_deg = 0.0;
  double push_force = 0.0;  // N
  double push_duration = 0.1;  // s
  double push_start = 2.0;  // s
  Eigen::Vector2d push_direction = Eigen::Vector2d(0.0, 1.0);

  // "flat", "bumpy[:amp]", "incline:deg", "push:force[,duration[,direction_deg]]".
  // Fields the text does not set are taken from `base`.
  static Scenario Parse(const std::string& text);
  static Scenario Parse(const std::string& text, const Scenario& base);
  std::string Describe() const;
  TerrainProfile Terrain(std::uint64_t seed) const;
  std::vector<DisturbanceEvent> Disturbances() const;
};

// Everything a rollout needs besides the parameters.
struct RolloutSetup {
  KinematicParams params;
  SimConfig sim;
  RegulationGains gains;
  CoeffBounds bounds;
  RewardParams reward;
  InitialStatePool pool;
  MlpArchitecture arch;

  explicit RolloutSetup(const KinematicParams& p = KinematicParams());
  void Validate() const;
};

struct LearningCurveRow {
  int generation = 0;
  double mean_fitness = 0.0;
  double max_fitness = 0.0;
  double best_ever = 0.0;
  double mean_episode_length = 0.0;  // dynamics steps
  double center_fitness = 0.0;
  double center_episode_length = 0.0;
};

struct TrainResult {
  PolicyParams params;       // final search center
  PolicyParams best_params;  // center with the best evaluation so far
  double best_center_fitness = 0.0;
  std::vector<LearningCurveRow> curve;
  std::vector<double> generation_seconds;
};

struct TrainOutput {
  std::filesystem::path directory;  // empty: nothing written
};

// Called after each generation; returning false stops training.
using GenerationCallback = std::function<bool(const LearningCurveRow&)>;

TrainResult Train(const EsConfig& es, const RolloutSetup& setup, const PolicyParams& initial,
                  const TrainOutput& output = {}, const GenerationCallback& on_generation = {});

void WriteLearningCurveCsv(std::ostream& out, const std::vector<LearningCurveRow>& rows);

struct EvalMetrics {
  int episodes = 0;
  bool empty = true;
  double mean_reward = 0.0;
  double survival_rate = 0.0;  // fraction reaching the episode cap
  double mean_velocity_error = 0.0;
  double mean_forward_velocity = 0.0;  // distance over survived time, averaged
  // Median consecutive Poincare distance over the first and last five steps,
  // pooled across surviving episodes.
  double poincare_first_median = 0.0;
  double poincare_last_median = 0.0;
  std::vector<EpisodeResult> results;
};

struct EvalOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  bool record_telemetry = false;
};

EvalMetrics Evaluate(const PolicyParams& params, int episodes, const Scenario& scenario,
                     const RolloutSetup& setup, const EvalOptions& options = {});

void WriteMetricsCsv(std::ostream& out, const EvalMetrics& metrics);

double Median(std::vector<double> values);

}  // namespace gaitforge

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

#include "gaitforge/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "gaitforge/errors.hpp"

namespace gaitforge {
namespace {

// Worker-count-independent rollout: initial state and episode seed both come
// from the seed path.
EpisodeResult Rollout(const Policy& policy, const RolloutSetup& setup,
                      const TerrainProfile& terrain,
                      const std::vector<DisturbanceEvent>& disturbances, std::uint64_t seed,
                      bool telemetry) {
  std::mt19937_64 rng(seed);
  const RobotState& initial = SampleInitial(setup.pool, rng);
  EpisodeOptions options;
  options.record_telemetry = telemetry;
  return RunEpisode(policy, initial, setup.params, setup.sim, terrain, disturbances, setup.gains,
                    setup.bounds, setup.reward, rng(), options);
}

std::string CheckpointName(int generation) {
  std::ostringstream name;
  name << "gen_" << std::setw(4) << std::setfill('0') << generation << ".gfp";
  return name.str();
}

}  // namespace

void EsConfig::Validate() const {
  if (population < 2) throw ConfigError("training.population must be >= 2");
  if (antithetic && population % 2 != 0) {
    throw ConfigError("training.population must be even with antithetic sampling");
  }
  if (!(sigma > 0.0)) throw ConfigError("training.sigma must be > 0");
  if (!(learning_rate >= 0.0)) throw ConfigError("training.learning_rate must be >= 0");
  if (generations < 0) throw ConfigError("training.generations must be >= 0");
  if (rollouts_per_candidate < 1) throw ConfigError("training.rollouts must be >= 1");
  if (workers < 1) throw ConfigError("training.workers must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("training.checkpoint_every must be >= 0");
}

std::uint64_t DeriveSeed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words = {static_cast<std::uint32_t>(master),
                                      static_cast<std::uint32_t>(master >> 32)};
  for (std::uint64_t p : path) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

Eigen::VectorXd EsNoise(const EsConfig& cfg, int generation, int index, Eigen::Index dim) {
  const int draw = cfg.antithetic ? index / 2 : index;
  const double sign = cfg.antithetic && index % 2 == 1 ? -1.0 : 1.0;
  std::mt19937_64 rng(DeriveSeed(cfg.seed, {0x4e4f495345ULL, static_cast<std::uint64_t>(generation),
                                            static_cast<std::uint64_t>(draw)}));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd eps(dim);
  for (Eigen::Index i = 0; i < dim; ++i) eps(i) = sign * normal(rng);
  return eps;
}

std::vector<double> CenteredRanks(const std::vector<double>& fitness) {
  const size_t n = fitness.size();
  std::vector<double> ranks(n, 0.0);
  if (n < 2) return ranks;
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return fitness[a] < fitness[b]; });
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && fitness[order[j + 1]] == fitness[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j);
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank / static_cast<double>(n - 1) - 0.5;
    i = j + 1;
  }
  return ranks;
}

Eigen::VectorXd EsStep(const std::vector<Eigen::VectorXd>& noise,
                       const std::vector<double>& scores, double sigma, double learning_rate) {
  if (noise.empty() || noise.size() != scores.size()) {
    throw std::invalid_argument("ES step needs one score per perturbation");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(noise.front().size());
  for (size_t i = 0; i < noise.size(); ++i) sum += scores[i] * noise[i];
  return learning_rate / (static_cast<double>(noise.size()) * sigma) * sum;
}

Eigen::VectorXd EsUpdate(const Eigen::VectorXd& params, const std::vector<double>& fitness,
                         const EsConfig& cfg, int generation) {
  if (static_cast<int>(fitness.size()) != cfg.population) {
    throw std::invalid_argument("ES update: expected " + std::to_string(cfg.population) +
                                " fitness values, got " + std::to_string(fitness.size()));
  }
  for (double f : fitness) {
    if (!std::isfinite(f)) throw std::invalid_argument("ES update: missing or non-finite fitness");
  }
  std::vector<double> scores = fitness;
  if (cfg.rank_normalize) {
    scores = CenteredRanks(fitness);
  } else {
    const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / scores.size();
    for (double& s : scores) s -= mean;
  }
  std::vector<Eigen::VectorXd> noise;
  noise.reserve(fitness.size());
  for (int i = 0; i < cfg.population; ++i) {
    noise.push_back(EsNoise(cfg, generation, i, params.size()));
  }
  return params + EsStep(noise, scores, cfg.sigma, cfg.learning_rate);
}

void ParallelFor(int n, int workers, const std::function<void(int)>& fn) {
  const int threads = std::max(1, std::min(workers, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Scenario Scenario::Parse(const std::string& text) { return Parse(text, Scenario()); }

Scenario Scenario::Parse(const std::string& text, const Scenario& base) {
  Scenario s = base;
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream in(text.substr(colon + 1));
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("bad scenario argument '" + item + "' in '" + text + "'");
      }
    }
  }
  const auto expect = [&](size_t lo, size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw ConfigError("wrong number of scenario arguments in '" + text + "'");
    }
  };
  if (name == "flat") {
    expect(0, 0);
    s.kind = Kind::kFlat;
  } else if (name == "bumpy") {
    expect(0, 1);
    s.kind = Kind::kBumpy;
    if (!args.empty()) s.bump_amplitude = args[0];
    if (!(s.bump_amplitude >= 0.0)) throw ConfigError("bump amplitude must be >= 0");
  } else if (name == "incline") {
    expect(1, 1);
    s.kind = Kind::kIncline;
    s.incline_deg = args[0];
    if (!(std::abs(s.incline_deg) < 45.0)) throw ConfigError("incline must be within 45 deg");
  } else if (name == "push") {
    expect(1, 3);
    s.kind = Kind::kPush;
    s.push_force = args[0];
    if (args.size() > 1) s.push_duration = args[1];
    if (args.size() > 2) {
      s.push_direction = {std::cos(args[2] * M_PI / 180.0), std::sin(args[2] * M_PI / 180.0)};
    }
    if (!(s.push_duration > 0.0)) throw ConfigError("push duration must be > 0");
  } else {
    throw ConfigError("unknown scenario '" + name + "' (flat | bumpy[:amp] | incline:deg | "
                      "push:force[,duration[,direction_deg]])");
  }
  return s;
}

std::string Scenario::Describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::kFlat:
      out << "flat";
      break;
    case Kind::kBumpy:
      out << "bumpy:" << bump_amplitude;
      break;
    case Kind::kIncline:
      out << "incline:" << incline_deg;
      break;
    case Kind::kPush:
      out << "push:" << push_force << ',' << push_duration << ','
          << std::atan2(push_direction.y(), push_direction.x()) * 180.0 / M_PI;
      break;
  }
  return out.str();
}

TerrainProfile Scenario::Terrain(std::uint64_t seed) const {
  switch (kind) {
    case Kind::kBumpy:
      return TerrainProfile::Bumpy(bump_amplitude, bump_correlation, seed);
    case Kind::kIncline:
      return TerrainProfile::Inclined(incline_deg);
    default:
      return TerrainProfile::Flat();
  }
}

std::vector<DisturbanceEvent> Scenario::Disturbances() const {
  if (kind != Kind::kPush) return {};
  DisturbanceEvent e;
  e.start = push_start;
  e.duration = push_duration;
  e.force = {push_force * push_direction.x(), push_force * push_direction.y(), 0.0};
  return {e};
}

RolloutSetup::RolloutSetup(const KinematicParams& p)
    : params(p), bounds(CoeffBounds::Default(p)) {}

void RolloutSetup::Validate() const {
  params.Validate();
  sim.Validate();
  gains.Validate();
  bounds.Validate();
  reward.Validate();
  if (pool.entries.empty()) throw ConfigError("initial state pool is empty");
}

TrainResult Train(const EsConfig& es, const RolloutSetup& setup, const PolicyParams& initial,
                  const TrainOutput& output, const GenerationCallback& on_generation) {
  es.Validate();
  setup.Validate();
  if (initial.size() != ParamCount(setup.arch)) {
    throw ConfigError("initial parameters do not match the architecture");
  }
  const TerrainProfile flat = TerrainProfile::Flat();
  const int k = es.rollouts_per_candidate;
  const bool write = !output.directory.empty();
  std::ofstream curve_csv, timing_csv;
  if (write) {
    std::filesystem::create_directories(output.directory / "checkpoints");
    curve_csv.open(output.directory / "learning_curve.csv", std::ios::trunc);
    timing_csv.open(output.directory / "timing.csv", std::ios::trunc);
    if (!curve_csv || !timing_csv) {
      throw IoError("cannot write training output in " + output.directory.string());
    }
    WriteLearningCurveCsv(curve_csv, {});
    timing_csv << "generation,wall_seconds\n";
  }

  TrainResult result;
  result.params = initial;
  result.best_params = initial;
  result.best_center_fitness = -std::numeric_limits<double>::infinity();
  double best_ever = -std::numeric_limits<double>::infinity();

  for (int gen = 0; gen < es.generations; ++gen) {
    const auto start = std::chrono::steady_clock::now();
    const int lambda = es.population;
    // Slot lambda holds the unperturbed center.
    std::vector<double> reward((lambda + 1) * k, 0.0);
    std::vector<int> length((lambda + 1) * k, 0);
    ParallelFor((lambda + 1) * k, es.workers, [&](int job) {
      const int candidate = job / k;
      const int rollout = job % k;
      PolicyParams p = result.params;
      if (candidate < lambda) p += es.sigma * EsNoise(es, gen, candidate, p.size());
      const Policy policy(std::move(p), setup.arch);
      const std::uint64_t seed =
          candidate < lambda
              ? DeriveSeed(es.seed, {static_cast<std::uint64_t>(gen),
                                     static_cast<std::uint64_t>(candidate),
                                     static_cast<std::uint64_t>(rollout)})
              : DeriveSeed(es.seed, {0x43454e544552ULL, static_cast<std::uint64_t>(rollout)});
      const EpisodeResult r = Rollout(policy, setup, flat, {}, seed, false);
      reward[job] = r.total_reward;
      length[job] = r.steps;
    });

    std::vector<double> fitness(lambda, 0.0);
    double total_length = 0.0;
    for (int c = 0; c < lambda; ++c) {
      for (int j = 0; j < k; ++j) {
        fitness[c] += reward[c * k + j] / k;
        total_length += length[c * k + j];
      }
    }
    LearningCurveRow row;
    row.generation = gen;
    row.mean_fitness = std::accumulate(fitness.begin(), fitness.end(), 0.0) / lambda;
    row.max_fitness = *std::max_element(fitness.begin(), fitness.end());
    best_ever = std::max(best_ever, row.max_fitness);
    row.best_ever = best_ever;
    row.mean_episode_length = total_length / (lambda * k);
    for (int j = 0; j < k; ++j) {
      row.center_fitness += reward[lambda * k + j] / k;
      row.center_episode_length += static_cast<double>(length[lambda * k + j]) / k;
    }
    if (row.center_fitness > result.best_center_fitness) {
      result.best_center_fitness = row.center_fitness;
      result.best_params = result.params;
    }
    result.params = EsUpdate(result.params, fitness, es, gen);
    result.curve.push_back(row);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.generation_seconds.push_back(seconds);

    if (write) {
      WriteLearningCurveCsv(curve_csv, {row});
      curve_csv.flush();
      timing_csv << gen << ',' << seconds << '\n';
      timing_csv.flush();
      const bool last = gen + 1 == es.generations;
      if (last || (es.checkpoint_every > 0 && (gen + 1) % es.checkpoint_every == 0)) {
        SaveCheckpoint(result.params, output.directory / "checkpoints" / CheckpointName(gen + 1));
      }
      SaveCheckpoint(result.params, output.directory / "final.gfp");
      SaveCheckpoint(result.best_params, output.directory / "best.gfp");
    }
    if (on_generation && !on_generation(row)) break;
  }
  return result;
}

void WriteLearningCurveCsv(std::ostream& out, const std::vector<LearningCurveRow>& rows) {
  if (rows.empty()) {
    out << "generation,mean_fitness,max_fitness,best_ever,mean_episode_length,center_fitness,"
           "center_episode_length\n";
    return;
  }
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.generation << ',' << r.mean_fitness << ',' << r.max_fitness << ',' << r.best_ever
        << ',' << r.mean_episode_length << ',' << r.center_fitness << ','
        << r.center_episode_length << '\n';
  }
}

double Median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

EvalMetrics Evaluate(const PolicyParams& params, int episodes, const Scenario& scenario,
                     const RolloutSetup& setup, const EvalOptions& options) {
  EvalMetrics m;
  m.episodes = std::max(0, episodes);
  if (m.episodes == 0) return m;
  setup.Validate();
  const Policy policy(params, setup.arch);
  const std::vector<DisturbanceEvent> disturbances = scenario.Disturbances();
  m.results.resize(m.episodes);
  ParallelFor(m.episodes, options.workers, [&](int i) {
    const std::uint64_t seed = DeriveSeed(options.seed, {static_cast<std::uint64_t>(i)});
    const TerrainProfile terrain = scenario.Terrain(DeriveSeed(seed, {1}));
    m.results[i] = Rollout(policy, setup, terrain, disturbances, seed, options.record_telemetry);
  });
  m.empty = false;
  std::vector<double> first, last;
  int survived = 0;
  for (const auto& r : m.results) {
    m.mean_reward += r.total_reward / m.episodes;
    m.mean_velocity_error += r.mean_velocity_error / m.episodes;
    if (r.steps > 0) {
      m.mean_forward_velocity += r.forward_distance / (r.steps * setup.sim.dynamics_dt) / m.episodes;
    }
    if (r.cause != TerminationCause::kCompleted) continue;
    ++survived;
    const PoincareResult p = PoincareSamples(r);
    const size_t n = p.distances.size();
    for (size_t i = 0; i < std::min<size_t>(5, n); ++i) first.push_back(p.distances[i]);
    for (size_t i = n > 5 ? n - 5 : 0; i < n; ++i) last.push_back(p.distances[i]);
  }
  m.survival_rate = static_cast<double>(survived) / m.episodes;
  m.poincare_first_median = Median(first);
  m.poincare_last_median = Median(last);
  return m;
}

void WriteMetricsCsv(std::ostream& out, const EvalMetrics& m) {
  out << std::setprecision(17);
  out << "episodes,empty,mean_reward,survival_rate,mean_velocity_error,mean_forward_velocity,"
         "poincare_first_median,poincare_last_median\n";
  out << m.episodes << ',' << int(m.empty) << ',' << m.mean_reward << ',' << m.survival_rate
      << ',' << m.mean_velocity_error << ',' << m.mean_forward_velocity << ','
      << m.poincare_first_median << ',' << m.poincare_last_median << '\n';
}

}  // namespace gaitforge

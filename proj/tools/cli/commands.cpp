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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>

#include "gaitforge/config.hpp"
#include "gaitforge/errors.hpp"
#include "gaitforge/policy.hpp"
#include "gaitforge/standing.hpp"
#include "gaitforge/training.hpp"
#include "svg_plot.hpp"
#include "telemetry_table.hpp"

namespace gaitforge::cli {
namespace fs = std::filesystem;
namespace {

int Guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << '\n';
    return e.kind() == CheckpointError::Kind::kIo ? kExitIo : kExitCheckpoint;
  } catch (const PoolGenerationError& e) {
    err << "pool generation failed: " << e.what() << '\n';
    return kExitPool;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

RunConfig ReadConfig(const fs::path& path) {
  return path.empty() ? RunConfig() : LoadConfig(path);
}

void PrepareDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void EchoConfig(const RunConfig& config, const fs::path& dir) {
  std::ofstream out = OpenOutput(dir / "config.ini");
  WriteConfig(out, config);
}

InitialStatePool ObtainPool(const RunConfig& config, std::ostream& log) {
  if (!config.pool_file.empty()) {
    log << "loading initial-state pool " << config.pool_file << '\n';
    return LoadPool(config.pool_file);
  }
  log << "generating " << config.pool_size << " initial states (seed " << config.pool_seed
      << ")\n";
  return GenerateInitialPool(config.pool_size, config.pool_seed, config.model, config.simulator,
                             config.standing, config.pool);
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::vector<std::string> JointColumns(const std::string& prefix) {
  std::vector<std::string> cols;
  for (int i = 0; i < kNumJoints; ++i) cols.push_back(prefix + JointName(i));
  return cols;
}

int ReportMissing(const TelemetryTable& table, const std::vector<std::string>& required,
                  std::ostream& err) {
  const std::vector<std::string> missing = table.Missing(required);
  if (missing.empty()) return kExitOk;
  err << "telemetry is missing columns:";
  for (const auto& m : missing) err << ' ' << m;
  err << '\n';
  return kExitTelemetry;
}

PoincareResult PoincareFromTable(const TelemetryTable& t) {
  const auto& stance = t.at("stance");
  const auto& time = t.at("time");
  std::vector<StanceSwitch> switches;
  for (size_t r = 1; r < t.rows; ++r) {
    if (stance[r] == stance[r - 1]) continue;
    StanceSwitch sw;
    sw.time = time[r];
    sw.new_stance = stance[r] == 0.0 ? Side::kLeft : Side::kRight;
    for (int j = 0; j < kNumJoints; ++j) {
      sw.state.q(j) = t.at("q_" + JointName(j))[r];
      sw.state.dq(j) = t.at("dq_" + JointName(j))[r];
    }
    switches.push_back(sw);
  }
  return PoincareFromSwitches(switches);
}

}  // namespace

int ResolveWorkers(const std::optional<int>& flag, int config_value) {
  if (flag) return *flag;
  if (const char* env = std::getenv("GAITFORGE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return config_value;
}

int CmdTrain(const TrainArgs& args, std::ostream& log, std::ostream& err) {
  return Guarded(err, [&] {
    RunConfig config = ReadConfig(args.config);
    if (args.seed) config.training.seed = *args.seed;
    config.training.workers = ResolveWorkers(args.workers, config.training.workers);
    config.Validate();
    PrepareDirectory(args.out);
    EchoConfig(config, args.out);

    RolloutSetup setup = config.Setup();
    setup.pool = ObtainPool(config, log);
    SavePool(setup.pool, args.out / "pool.gsp");
    const PolicyParams init =
        args.init.empty() ? InitialParams(config.arch, config.init_seed, config.init_weight_std)
                          : LoadCheckpoint(args.init, ParamCount(config.arch));

    log << "training: population " << config.training.population << ", generations "
        << config.training.generations << ", workers " << config.training.workers << '\n';
    const TrainResult result =
        Train(config.training, setup, init, TrainOutput{args.out}, [&](const LearningCurveRow& r) {
          if (!args.quiet) {
            log << "gen " << r.generation << "  mean " << Fixed(r.mean_fitness, 1) << "  max "
                << Fixed(r.max_fitness, 1) << "  center " << Fixed(r.center_fitness, 1)
                << "  center_len " << Fixed(r.center_episode_length, 0) << '\n';
            log.flush();
          }
          return true;
        });
    log << "done: best center fitness " << Fixed(result.best_center_fitness, 1) << ", outputs in "
        << args.out.string() << '\n';
    return kExitOk;
  });
}

int CmdEval(const EvalArgs& args, std::ostream& log, std::ostream& err) {
  return Guarded(err, [&] {
    RunConfig config = ReadConfig(args.config);
    if (args.scenario) config.scenario = Scenario::Parse(*args.scenario, config.scenario);
    for (const auto& name : args.disable) {
      if (name == "foot_placement") {
        config.simulator.regulations.foot_placement = false;
      } else if (name == "torso") {
        config.simulator.regulations.torso = false;
      } else if (name == "swing_foot") {
        config.simulator.regulations.swing_foot = false;
      } else {
        throw ConfigError("unknown regulation '" + name +
                          "' (foot_placement | torso | swing_foot)");
      }
    }
    if (args.n < 0) throw ConfigError("--n must be >= 0");
    const int workers = ResolveWorkers(args.workers, config.training.workers);
    if (workers < 1) throw ConfigError("--workers must be >= 1");
    config.Validate();
    const PolicyParams params = LoadCheckpoint(args.checkpoint, ParamCount(config.arch));
    PrepareDirectory(args.out);
    EchoConfig(config, args.out);

    RolloutSetup setup = config.Setup();
    setup.pool = ObtainPool(config, log);
    EvalOptions options;
    options.seed = args.seed;
    options.workers = workers;
    options.record_telemetry = args.telemetry;
    log << "evaluating " << args.n << " episodes on " << config.scenario.Describe() << '\n';
    const EvalMetrics m = Evaluate(params, args.n, config.scenario, setup, options);

    {
      std::ofstream out = OpenOutput(args.out / "metrics.csv");
      WriteMetricsCsv(out, m);
    }
    std::ofstream episodes = OpenOutput(args.out / "episodes.csv");
    episodes << std::setprecision(17)
             << "episode,steps,cause,total_reward,forward_distance,mean_velocity_error,"
                "stance_switches\n";
    if (args.telemetry) PrepareDirectory(args.out / "telemetry");
    for (size_t i = 0; i < m.results.size(); ++i) {
      const EpisodeResult& r = m.results[i];
      episodes << i << ',' << r.steps << ',' << TerminationCauseName(r.cause) << ','
               << r.total_reward << ',' << r.forward_distance << ',' << r.mean_velocity_error
               << ',' << r.switches.size() << '\n';
      if (args.telemetry) {
        char name[32];
        std::snprintf(name, sizeof(name), "episode_%03zu.csv", i);
        std::ofstream t = OpenOutput(args.out / "telemetry" / name);
        WriteTelemetryCsv(t, r.telemetry);
      }
    }
    if (m.empty) {
      log << "no episodes requested\n";
    } else {
      log << "survival " << Fixed(m.survival_rate, 2) << "  mean reward " << Fixed(m.mean_reward, 1)
          << "  velocity error " << Fixed(m.mean_velocity_error, 3) << " m/s  forward velocity "
          << Fixed(m.mean_forward_velocity, 3) << " m/s\n";
      log << "poincare median first " << Fixed(m.poincare_first_median, 4) << "  last "
          << Fixed(m.poincare_last_median, 4) << '\n';
    }
    return kExitOk;
  });
}

int CmdStand(const StandArgs& args, std::ostream& log, std::ostream& err) {
  return Guarded(err, [&] {
    RunConfig config = ReadConfig(args.config);
    if (args.n) config.pool_size = *args.n;
    if (args.seed) config.pool_seed = *args.seed;
    config.pool_file.clear();
    config.Validate();
    PrepareDirectory(args.out);
    EchoConfig(config, args.out);
    const InitialStatePool pool = ObtainPool(config, log);
    SavePool(pool, args.out / "pool.gsp");
    std::ofstream summary = OpenOutput(args.out / "pool.csv");
    summary << std::setprecision(17) << "entry,settle_time,com_x,com_y,support_margin\n";
    for (size_t i = 0; i < pool.entries.size(); ++i) {
      const RobotState& s = pool.entries[i].state;
      const Eigen::Vector3d com = ForwardKinematicsCom(config.model, s);
      const double margin =
          PolygonInteriorMargin(SupportPolygon(config.model, s), com.head<2>());
      summary << i << ',' << pool.entries[i].settle_time << ',' << com.x() << ',' << com.y()
              << ',' << margin << '\n';
    }
    log << "wrote " << pool.entries.size() << " initial states to "
        << (args.out / "pool.gsp").string() << '\n';
    return kExitOk;
  });
}

int CmdPlot(const PlotArgs& args, std::ostream& log, std::ostream& err) {
  return Guarded(err, [&] {
    TelemetryTable t;
    try {
      t = ReadTelemetry(args.telemetry);
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const IoError*>(&e)) throw;
      err << "malformed telemetry: " << e.what() << '\n';
      return static_cast<int>(kExitTelemetry);
    }
    PrepareDirectory(args.out);
    std::vector<Panel> panels;
    int columns = 1;
    std::string title;
    if (args.kind == "limit-cycle") {
      std::vector<std::string> required = JointColumns("q_");
      for (const auto& c : JointColumns("dq_")) required.push_back(c);
      if (int rc = ReportMissing(t, required, err)) return rc;
      for (int j = 0; j < kNumJoints; ++j) {
        Panel p;
        p.title = JointName(j);
        p.x_label = "q (rad)";
        p.y_label = "dq (rad/s)";
        p.series.push_back({t.at("q_" + JointName(j)), t.at("dq_" + JointName(j)), "", "#1f77b4"});
        panels.push_back(p);
      }
      columns = 4;
      title = "Joint phase portraits";
    } else if (args.kind == "velocity-profile") {
      if (int rc = ReportMissing(t, {"time", "vx", "vy"}, err)) return rc;
      Panel p;
      p.title = "Pelvis velocity";
      p.x_label = "time (s)";
      p.y_label = "m/s";
      p.series.push_back({t.at("time"), t.at("vx"), "vx", "#1f77b4"});
      p.series.push_back({t.at("time"), t.at("vy"), "vy", "#d62728"});
      panels.push_back(p);
      title = "Velocity profile";
    } else if (args.kind == "poincare") {
      std::vector<std::string> required = {"time", "stance"};
      for (const auto& c : JointColumns("q_")) required.push_back(c);
      for (const auto& c : JointColumns("dq_")) required.push_back(c);
      if (int rc = ReportMissing(t, required, err)) return rc;
      const PoincareResult pr = PoincareFromTable(t);
      std::ofstream csv = OpenOutput(args.out / "poincare.csv");
      csv << std::setprecision(17) << "step,distance\n";
      Series s{{}, {}, "", "#2ca02c", true};
      for (size_t i = 0; i < pr.distances.size(); ++i) {
        csv << i + 1 << ',' << pr.distances[i] << '\n';
        s.x.push_back(static_cast<double>(i + 1));
        s.y.push_back(pr.distances[i]);
      }
      if (pr.insufficient) log << "fewer than two stance switches; empty series\n";
      Panel p;
      p.title = "Consecutive Poincare distance";
      p.x_label = "step";
      p.y_label = "|x(k) - x(k-1)|";
      p.series.push_back(s);
      panels.push_back(p);
      title = "Poincare section";
    } else {
      err << "unknown plot kind '" << args.kind << "' (limit-cycle | velocity-profile | poincare)\n";
      return static_cast<int>(kExitUsage);
    }
    const fs::path file = args.out / (args.kind + ".svg");
    std::ofstream out = OpenOutput(file);
    out << RenderSvg(panels, columns, title);
    log << "wrote " << file.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int CmdReplay(const fs::path& telemetry, std::ostream& log, std::ostream& err) {
  return Guarded(err, [&] {
    TelemetryTable t;
    try {
      t = ReadTelemetry(telemetry);
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const IoError*>(&e)) throw;
      err << "malformed telemetry: " << e.what() << '\n';
      return static_cast<int>(kExitTelemetry);
    }
    if (int rc = ReportMissing(t, {"time", "x", "y", "z", "vx", "vy", "stance", "reward",
                                   "disturbance"},
                               err)) {
      return rc;
    }
    log << "rows: " << t.rows << '\n';
    if (t.rows == 0) return static_cast<int>(kExitOk);
    const auto& time = t.at("time");
    const auto& stance = t.at("stance");
    const auto& dist = t.at("disturbance");
    int switches = 0, pushed = 0;
    for (size_t r = 1; r < t.rows; ++r) switches += stance[r] != stance[r - 1];
    for (double d : dist) pushed += d != 0.0;
    const auto mean = [&](const std::string& c) {
      const auto& v = t.at(c);
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    const auto& z = t.at("z");
    const auto& reward = t.at("reward");
    log << "duration: " << Fixed(time.back() - time.front(), 3) << " s\n";
    log << "stance switches: " << switches << '\n';
    log << "distance: x " << Fixed(t.at("x").back() - t.at("x").front(), 3) << " m, y "
        << Fixed(t.at("y").back() - t.at("y").front(), 3) << " m\n";
    log << "mean velocity: vx " << Fixed(mean("vx"), 3) << " m/s, vy " << Fixed(mean("vy"), 3)
        << " m/s\n";
    log << "pelvis height: min " << Fixed(*std::min_element(z.begin(), z.end()), 3) << " max "
        << Fixed(*std::max_element(z.begin(), z.end()), 3) << " m\n";
    log << "total reward: " << Fixed(std::accumulate(reward.begin(), reward.end(), 0.0), 2)
        << '\n';
    log << "disturbance rows: " << pushed << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace gaitforge::cli

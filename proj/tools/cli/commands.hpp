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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gaitforge::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitCheckpoint = 4,
  kExitPool = 5,
  kExitTelemetry = 6,
};

struct TrainArgs {
  std::filesystem::path config;  // empty: defaults
  std::filesystem::path out = "runs/train";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::filesystem::path init;  // optional starting checkpoint
  bool quiet = false;
};

struct EvalArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path config;
  std::filesystem::path out = "runs/eval";
  std::optional<std::string> scenario;
  int n = 10;
  std::uint64_t seed = 1;
  std::optional<int> workers;
  bool telemetry = true;
  // Regulations switched off for this run: foot_placement, torso, swing_foot.
  std::vector<std::string> disable;
};

struct StandArgs {
  std::filesystem::path config;
  std::filesystem::path out = "runs/stand";
  std::optional<int> n;
  std::optional<std::uint64_t> seed;
};

struct PlotArgs {
  std::filesystem::path telemetry;
  std::string kind;  // limit-cycle | velocity-profile | poincare
  std::filesystem::path out = ".";
};

int CmdTrain(const TrainArgs& args, std::ostream& log, std::ostream& err);
int CmdEval(const EvalArgs& args, std::ostream& log, std::ostream& err);
int CmdStand(const StandArgs& args, std::ostream& log, std::ostream& err);
int CmdPlot(const PlotArgs& args, std::ostream& log, std::ostream& err);
int CmdReplay(const std::filesystem::path& telemetry, std::ostream& log, std::ostream& err);

// --workers, then GAITFORGE_WORKERS, then the config value.
int ResolveWorkers(const std::optional<int>& flag, int config_value);

}  // namespace gaitforge::cli

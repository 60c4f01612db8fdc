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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gaitforge/training.hpp"

namespace gaitforge {

// Everything a run reads from its config file. Missing keys keep the defaults
// below; unknown sections or keys are errors.
struct RunConfig {
  KinematicParams model;
  // Only rows 1-4 are read from the file; rows 0 and 5 follow the joint limits.
  CoeffBounds bounds;
  MlpArchitecture arch;
  RegulationGains regulation;
  SimConfig simulator;
  RewardParams reward;
  StandingGains standing;
  PoolConfig pool;
  int pool_size = 40;
  std::uint64_t pool_seed = 1;
  std::string pool_file;  // empty: generate the pool at startup
  EsConfig training;
  double init_weight_std = 0.1;
  std::uint64_t init_seed = 1;
  Scenario scenario;

  RunConfig();
  void Validate() const;
  RolloutSetup Setup() const;  // without the pool
};

// Grammar, one statement per line:
//   [section]
//   key = value            value: number, true/false, word, or comma list
//   # comment / ; comment
// Errors carry "<source>:<line>: ...".
RunConfig ParseConfig(std::istream& in, const std::string& source = "<config>");
RunConfig LoadConfig(const std::filesystem::path& path);
// Every key with its resolved value; parses back to the same configuration.
void WriteConfig(std::ostream& out, const RunConfig& config);
std::string ConfigToString(const RunConfig& config);

// Section names in file order.
std::vector<std::string> ConfigSections();

}  // namespace gaitforge

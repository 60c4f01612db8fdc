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
#include <map>
#include <string>
#include <vector>

namespace gaitforge::cli {

// Numeric view of a telemetry CSV. The stance column maps L -> 0, R -> 1.
struct TelemetryTable {
  std::vector<std::string> header;
  std::map<std::string, std::vector<double>> columns;
  size_t rows = 0;

  const std::vector<double>& at(const std::string& name) const { return columns.at(name); }
  std::vector<std::string> Missing(const std::vector<std::string>& required) const;
};

// Throws IoError when unreadable and std::runtime_error on malformed rows.
TelemetryTable ReadTelemetry(const std::filesystem::path& path);

}  // namespace gaitforge::cli

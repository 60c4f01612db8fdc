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

#include "telemetry_table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gaitforge/errors.hpp"

namespace gaitforge::cli {
namespace {

std::vector<std::string> Split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double Cell(const std::string& text, size_t line) {
  if (text == "L") return 0.0;
  if (text == "R") return 1.0;
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad value '" + text + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> TelemetryTable::Missing(const std::vector<std::string>& required) const {
  std::vector<std::string> missing;
  for (const auto& name : required) {
    if (!columns.count(name)) missing.push_back(name);
  }
  return missing;
}

TelemetryTable ReadTelemetry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open telemetry " + path.string());
  TelemetryTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  t.header = Split(line);
  std::vector<std::vector<double>*> cols;
  for (const auto& name : t.header) cols.push_back(&t.columns[name]);
  size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const std::vector<std::string> cells = Split(line);
    if (cells.size() != t.header.size()) {
      throw std::runtime_error("line " + std::to_string(number) + ": expected " +
                               std::to_string(t.header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    }
    for (size_t i = 0; i < cells.size(); ++i) cols[i]->push_back(Cell(cells[i], number));
    ++t.rows;
  }
  return t;
}

}  // namespace gaitforge::cli

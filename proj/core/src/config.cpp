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

#include "gaitforge/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gaitforge/errors.hpp"

namespace gaitforge {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double ParseDouble(const std::string& text) {
  const std::string s = Trim(text);
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s[0] == '+') ++begin;
  const auto r = std::from_chars(begin, s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  return v;
}

long long ParseInteger(const std::string& text) {
  const std::string s = Trim(text);
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  return v;
}

std::vector<double> ParseList(const std::string& text, size_t expected) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(ParseDouble(item));
  if (out.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) + " comma-separated values, got " +
                                std::to_string(out.size()));
  }
  return out;
}

template <typename Vec>
std::string FormatList(const Vec& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + FormatDouble(v(i));
  return s;
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

class Fields {
 public:
  explicit Fields(const std::string& section) : section_(section) {}
  void Section(const std::string& s) { section_ = s; }

  void Num(const std::string& key, double& v) {
    Add(key, [&v] { return FormatDouble(v); }, [&v](const std::string& s) { v = ParseDouble(s); });
  }
  void Int(const std::string& key, int& v) {
    Add(key, [&v] { return std::to_string(v); },
        [&v](const std::string& s) {
          const long long x = ParseInteger(s);
          if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
            throw std::invalid_argument("integer out of range");
          }
          v = static_cast<int>(x);
        });
  }
  void Seed(const std::string& key, std::uint64_t& v) {
    Add(key, [&v] { return std::to_string(v); },
        [&v](const std::string& text) {
          const std::string s = Trim(text);
          const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
          if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
            throw std::invalid_argument("expected an unsigned integer, got '" + s + "'");
          }
        });
  }
  void Bool(const std::string& key, bool& v) {
    Add(key, [&v] { return std::string(v ? "true" : "false"); },
        [&v](const std::string& text) {
          const std::string s = Trim(text);
          if (s == "true") {
            v = true;
          } else if (s == "false") {
            v = false;
          } else {
            throw std::invalid_argument("expected true or false, got '" + s + "'");
          }
        });
  }
  void Text(const std::string& key, std::string& v) {
    Add(key, [&v] { return v; }, [&v](const std::string& s) { v = Trim(s); });
  }
  template <typename Vec>
  void List(const std::string& key, Vec& v) {
    Add(key, [&v] { return FormatList(v); },
        [&v](const std::string& s) {
          const std::vector<double> x = ParseList(s, static_cast<size_t>(v.size()));
          for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = x[i];
        });
  }
  void Row(const std::string& key, CoeffMatrix& m, int row) {
    Add(key, [&m, row] { return FormatList(m.row(row)); },
        [&m, row](const std::string& s) {
          const std::vector<double> x = ParseList(s, kPlannedJoints);
          for (int c = 0; c < kPlannedJoints; ++c) m(row, c) = x[c];
        });
  }
  void Link(const std::string& name, LinkInertia& link) {
    Num(name + "_mass", link.mass);
    List(name + "_com", link.com);
    List(name + "_inertia", link.inertia);
  }
  void Add(const std::string& key, std::function<std::string()> get,
           std::function<void(const std::string&)> set) {
    fields_.push_back({section_, key, std::move(get), std::move(set)});
  }

  std::vector<Field>& fields() { return fields_; }

 private:
  std::string section_;
  std::vector<Field> fields_;
};

std::vector<Field> Bind(RunConfig& c) {
  Fields f("model");
  KinematicParams& m = c.model;
  f.Link("pelvis", m.pelvis);
  f.Link("torso", m.torso);
  f.Link("hip_roll_link", m.hip_roll_link);
  f.Link("hip_yaw_link", m.hip_yaw_link);
  f.Link("thigh", m.thigh);
  f.Link("shank", m.shank);
  f.Link("ankle_link", m.ankle_link);
  f.Link("foot", m.foot);
  f.Num("hip_offset_y", m.hip_offset_y);
  f.Num("hip_offset_z", m.hip_offset_z);
  f.Num("thigh_length", m.thigh_length);
  f.Num("shank_length", m.shank_length);
  f.Num("foot_height", m.foot_height);
  f.Num("sole_length", m.sole_length);
  f.Num("sole_width", m.sole_width);
  f.Num("sole_offset_x", m.sole_offset_x);
  f.List("joint_lower", m.joint_lower);
  f.List("joint_upper", m.joint_upper);
  f.List("torque_limit", m.torque_limit);

  f.Section("bezier");
  for (int r = 1; r <= kFreeRows; ++r) f.Row("lower_row" + std::to_string(r), c.bounds.lower, r);
  for (int r = 1; r <= kFreeRows; ++r) f.Row("upper_row" + std::to_string(r), c.bounds.upper, r);
  f.Add("hidden",
        [&c] {
          std::string s;
          for (size_t i = 0; i < c.arch.hidden.size(); ++i) {
            s += (i ? ", " : "") + std::to_string(c.arch.hidden[i]);
          }
          return s;
        },
        [&c](const std::string& text) {
          std::vector<int> widths;
          std::stringstream in(text);
          std::string item;
          while (std::getline(in, item, ',')) {
            const long long w = ParseInteger(item);
            if (w < 1 || w > 4096) throw std::invalid_argument("layer width out of range");
            widths.push_back(static_cast<int>(w));
          }
          if (widths.empty()) throw std::invalid_argument("need at least one hidden layer");
          c.arch.hidden = widths;
        });

  f.Section("regulation");
  RegulationGains& g = c.regulation;
  f.Num("kpx", g.kpx);
  f.Num("kdx", g.kdx);
  f.Num("kpy", g.kpy);
  f.Num("kdy", g.kdy);
  f.Num("ki_beta_x", g.ki_beta_x);
  f.Num("ki_beta_y", g.ki_beta_y);
  f.Num("beta_max", g.beta_max);
  f.Num("kp_torso_roll", g.kp_torso_roll);
  f.Num("kd_torso_roll", g.kd_torso_roll);
  f.Num("kp_torso_pitch", g.kp_torso_pitch);
  f.Num("kd_torso_pitch", g.kd_torso_pitch);
  f.List("kp", g.kp);
  f.List("kd", g.kd);
  f.Num("velocity_filter_hz", g.velocity_filter_hz);
  f.Num("torso_roll_setpoint", c.simulator.torso_setpoint.roll);
  f.Num("torso_pitch_setpoint", c.simulator.torso_setpoint.pitch);
  f.Num("torso_roll_rate_setpoint", c.simulator.torso_setpoint.roll_rate);
  f.Num("torso_pitch_rate_setpoint", c.simulator.torso_setpoint.pitch_rate);
  f.Bool("enable_foot_placement", c.simulator.regulations.foot_placement);
  f.Bool("enable_torso", c.simulator.regulations.torso);
  f.Bool("enable_swing_foot", c.simulator.regulations.swing_foot);

  f.Section("simulator");
  SimConfig& s = c.simulator;
  f.Num("dynamics_dt", s.dynamics_dt);
  f.Num("control_dt", s.control_dt);
  f.Num("planner_dt", s.planner_dt);
  f.Num("gravity", s.gravity);
  f.Num("contact_stiffness", s.contact.stiffness);
  f.Num("contact_damping", s.contact.damping);
  f.Num("friction", s.contact.friction);
  f.Num("slip_velocity", s.contact.slip_velocity);
  f.Num("joint_limit_stiffness", s.joint_limits.stiffness);
  f.Num("joint_limit_damping", s.joint_limits.damping);
  f.Num("joint_damping", s.joint_damping);
  f.Int("episode_steps", s.episode_steps);
  f.Num("step_duration", s.step_duration);
  f.Num("switch_timeout", s.switch_timeout);
  f.Num("command_vx", s.command.x());
  f.Num("command_vy", s.command.y());
  f.Num("max_angle", s.termination.max_angle);
  f.Num("max_rate", s.termination.max_rate);
  f.Num("min_height", s.termination.min_height);
  f.Num("max_height", s.termination.max_height);
  f.Add("feet_metric",
        [&s] {
          return std::string(s.termination.feet_metric == FeetMetric::kDistance ? "distance"
                                                                                : "height_difference");
        },
        [&s](const std::string& text) {
          const std::string v = Trim(text);
          if (v == "distance") {
            s.termination.feet_metric = FeetMetric::kDistance;
          } else if (v == "height_difference") {
            s.termination.feet_metric = FeetMetric::kHeightDifference;
          } else {
            throw std::invalid_argument("expected height_difference or distance, got '" + v + "'");
          }
        });
  f.Num("feet_threshold", s.termination.feet_threshold);
  f.Num("sensor_noise", s.sensor_noise);

  f.Section("reward");
  f.List("weights", c.reward.weights);
  f.List("sharpness", c.reward.sharpness);
  f.Num("nominal_height", c.reward.nominal_height);
  f.Num("nominal_stance_width", c.reward.nominal_stance_width);
  f.Num("yaw_desired", c.reward.yaw_desired);

  f.Section("standing");
  f.Num("com_x_kp", c.standing.com_x_kp);
  f.Num("com_x_kd", c.standing.com_x_kd);
  f.Num("com_y_kp", c.standing.com_y_kp);
  f.Num("com_y_kd", c.standing.com_y_kd);
  f.List("posture_kp", c.standing.posture_kp);
  f.List("posture_kd", c.standing.posture_kd);
  f.List("nominal", c.standing.nominal);
  f.Num("joint_perturbation", c.pool.joint_perturbation);
  f.Num("drop_height", c.pool.drop_height);
  f.Num("settle_speed", c.pool.settle_speed);
  f.Num("settle_window", c.pool.settle_window);
  f.Num("max_time", c.pool.max_time);
  f.Int("max_rejections_per_entry", c.pool.max_rejections_per_entry);
  f.Int("pool_size", c.pool_size);
  f.Seed("pool_seed", c.pool_seed);
  f.Text("pool_file", c.pool_file);

  f.Section("training");
  EsConfig& e = c.training;
  f.Int("population", e.population);
  f.Num("sigma", e.sigma);
  f.Num("learning_rate", e.learning_rate);
  f.Bool("antithetic", e.antithetic);
  f.Bool("rank_normalize", e.rank_normalize);
  f.Int("generations", e.generations);
  f.Int("rollouts_per_candidate", e.rollouts_per_candidate);
  f.Seed("seed", e.seed);
  f.Int("workers", e.workers);
  f.Int("checkpoint_every", e.checkpoint_every);
  f.Num("init_weight_std", c.init_weight_std);
  f.Seed("init_seed", c.init_seed);

  f.Section("scenario");
  Scenario& sc = c.scenario;
  f.Add("kind",
        [&sc] {
          switch (sc.kind) {
            case Scenario::Kind::kBumpy:
              return std::string("bumpy");
            case Scenario::Kind::kIncline:
              return std::string("incline");
            case Scenario::Kind::kPush:
              return std::string("push");
            default:
              return std::string("flat");
          }
        },
        [&sc](const std::string& text) {
          const std::string v = Trim(text);
          if (v == "flat") {
            sc.kind = Scenario::Kind::kFlat;
          } else if (v == "bumpy") {
            sc.kind = Scenario::Kind::kBumpy;
          } else if (v == "incline") {
            sc.kind = Scenario::Kind::kIncline;
          } else if (v == "push") {
            sc.kind = Scenario::Kind::kPush;
          } else {
            throw std::invalid_argument("expected flat, bumpy, incline or push, got '" + v + "'");
          }
        });
  f.Num("bump_amplitude", sc.bump_amplitude);
  f.Num("bump_correlation", sc.bump_correlation);
  f.Num("incline_deg", sc.incline_deg);
  f.Num("push_force", sc.push_force);
  f.Num("push_duration", sc.push_duration);
  f.Num("push_start", sc.push_start);
  f.List("push_direction", sc.push_direction);
  return std::move(f.fields());
}

void ApplyJointLimitRows(RunConfig* c) {
  const CoeffBounds limits = CoeffBounds::FromJointLimits(c->model);
  for (int r : {0, kBezierRows - 1}) {
    c->bounds.lower.row(r) = limits.lower.row(r);
    c->bounds.upper.row(r) = limits.upper.row(r);
  }
}

}  // namespace

RunConfig::RunConfig() : bounds(CoeffBounds::Default(model)) {}

void RunConfig::Validate() const {
  model.Validate();
  bounds.Validate();
  if (ParamCount(arch) <= 0 || arch.input_dim != kObservationSize ||
      arch.output_dim != kPolicyOutputs) {
    throw ConfigError("bezier.hidden: invalid network shape");
  }
  regulation.Validate();
  simulator.Validate();
  reward.Validate();
  standing.Validate();
  pool.Validate();
  if (pool_size < 1) throw ConfigError("standing.pool_size must be >= 1");
  training.Validate();
  if (!(init_weight_std >= 0.0)) throw ConfigError("training.init_weight_std must be >= 0");
  if (!(scenario.bump_amplitude >= 0.0)) throw ConfigError("scenario.bump_amplitude must be >= 0");
  if (!(scenario.bump_correlation > 0.0)) throw ConfigError("scenario.bump_correlation must be > 0");
  if (!(scenario.push_duration > 0.0)) throw ConfigError("scenario.push_duration must be > 0");
}

RolloutSetup RunConfig::Setup() const {
  RolloutSetup setup(model);
  setup.sim = simulator;
  setup.gains = regulation;
  setup.bounds = bounds;
  setup.reward = reward;
  setup.arch = arch;
  return setup;
}

std::vector<std::string> ConfigSections() {
  return {"model", "bezier", "regulation", "simulator", "reward", "standing", "training",
          "scenario"};
}

RunConfig ParseConfig(std::istream& in, const std::string& source) {
  RunConfig config;
  std::vector<Field> fields = Bind(config);
  std::map<std::string, Field*> index;
  for (auto& field : fields) index[field.section + "." + field.key] = &field;
  const std::vector<std::string> sections = ConfigSections();
  std::set<std::string> seen;
  std::string section;
  std::string line;
  int number = 0;
  const auto fail = [&](const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(number) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++number;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail("malformed section header '" + t + "'");
      section = Trim(t.substr(1, t.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + t + "'");
    if (section.empty()) fail("key outside of a section");
    const std::string key = Trim(t.substr(0, eq));
    const std::string name = section + "." + key;
    const auto it = index.find(name);
    if (it == index.end()) fail("unknown key '" + name + "'");
    if (!seen.insert(name).second) fail("duplicate key '" + name + "'");
    try {
      it->second->set(t.substr(eq + 1));
    } catch (const std::exception& e) {
      fail(name + ": " + e.what());
    }
  }
  ApplyJointLimitRows(&config);
  try {
    config.Validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return ParseConfig(in, path.string());
}

void WriteConfig(std::ostream& out, const RunConfig& config) {
  RunConfig copy = config;
  std::string section;
  for (const Field& field : Bind(copy)) {
    if (field.section != section) {
      out << (section.empty() ? "" : "\n") << '[' << field.section << "]\n";
      section = field.section;
    }
    out << field.key << " = " << field.get() << '\n';
  }
}

std::string ConfigToString(const RunConfig& config) {
  std::ostringstream out;
  WriteConfig(out, config);
  return out.str();
}

}  // namespace gaitforge

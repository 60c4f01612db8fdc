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

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace gaitforge::cli;
  CLI::App app{"gaitforge: learned walking-gait planner for a simulated biped"};
  app.require_subcommand(1);

  TrainArgs train;
  std::optional<std::uint64_t> train_seed;
  std::optional<int> train_workers;
  auto* t = app.add_subcommand("train", "Run evolution-strategies training");
  t->add_option("--config", train.config, "Config file")->check(CLI::ExistingFile);
  t->add_option("--out", train.out, "Output directory");
  t->add_option("--seed", train_seed, "Override training.seed");
  t->add_option("--workers", train_workers, "Rollout threads")->check(CLI::Range(1, 1024));
  t->add_option("--init", train.init, "Start from this checkpoint")->check(CLI::ExistingFile);
  t->add_flag("--quiet", train.quiet, "No per-generation progress");

  EvalArgs eval;
  std::optional<std::string> scenario;
  std::optional<int> eval_workers;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint");
  e->add_option("checkpoint", eval.checkpoint, "Checkpoint file")->required();
  e->add_option("--config", eval.config, "Config file")->check(CLI::ExistingFile);
  e->add_option("--out", eval.out, "Output directory");
  e->add_option("--scenario", scenario,
                "flat | bumpy[:amp] | incline:deg | push:force[,duration[,direction_deg]]");
  e->add_option("--n", eval.n, "Episodes");
  e->add_option("--seed", eval.seed, "Evaluation seed");
  e->add_option("--workers", eval_workers, "Rollout threads")->check(CLI::Range(1, 1024));
  e->add_option("--disable", eval.disable, "Regulations to switch off")->delimiter(',');
  bool no_telemetry = false;
  e->add_flag("--no-telemetry", no_telemetry, "Skip per-episode telemetry files");

  StandArgs stand;
  auto* s = app.add_subcommand("stand", "Regenerate the initial-state pool");
  s->add_option("--config", stand.config, "Config file")->check(CLI::ExistingFile);
  s->add_option("--out", stand.out, "Output directory");
  s->add_option("--n", stand.n, "Pool size");
  s->add_option("--seed", stand.seed, "Pool seed");

  PlotArgs plot;
  auto* p = app.add_subcommand("plot", "Render telemetry plots as SVG");
  p->add_option("telemetry", plot.telemetry, "Telemetry CSV")->required();
  p->add_option("--kind", plot.kind, "limit-cycle | velocity-profile | poincare")->required();
  p->add_option("--out", plot.out, "Output directory");

  std::filesystem::path replay_file;
  auto* r = app.add_subcommand("replay", "Summarize a telemetry CSV");
  r->add_option("telemetry", replay_file, "Telemetry CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : kExitUsage;
  }

  if (t->parsed()) {
    train.seed = train_seed;
    train.workers = train_workers;
    return CmdTrain(train, std::cout, std::cerr);
  }
  if (e->parsed()) {
    eval.scenario = scenario;
    eval.workers = eval_workers;
    eval.telemetry = !no_telemetry;
    return CmdEval(eval, std::cout, std::cerr);
  }
  if (s->parsed()) return CmdStand(stand, std::cout, std::cerr);
  if (p->parsed()) return CmdPlot(plot, std::cout, std::cerr);
  return CmdReplay(replay_file, std::cout, std::cerr);
}

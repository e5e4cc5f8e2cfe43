// Copyright 2026 The vmsim Authors
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


#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  simctl::ConfigureLogging();
  CLI::App app{"vmsim simulation control"};
  app.require_subcommand(1);

  simctl::CommonOptions o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON configuration file");
    sub->add_option("--scenario", o.scenario, "scenario name")->capture_default_str();
    sub->add_option("--mode", o.mode, "cooperative or noncooperative")
        ->check(CLI::IsMember({"cooperative", "noncooperative"}))
        ->capture_default_str();
    sub->add_option("--duration", o.duration, "simulated seconds (0: command default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out-dir", o.out_dir, "directory for artifacts");
  };

  CLI::App* run = app.add_subcommand("run", "batch run; writes telemetry and metrics");
  add_common(run);
  o.out_dir = "out";
  CLI::App* serve = app.add_subcommand("serve", "live operator session over WebSocket");
  add_common(serve);
  serve->add_option("--bind", o.bind, "host:port")->capture_default_str();
  CLI::App* replay = app.add_subcommand("replay", "re-score or stream a telemetry CSV");
  add_common(replay);
  replay->add_option("--input", o.input, "telemetry CSV")->required();
  replay->add_option("--bind", o.bind, "host:port; streams the log to one client when given");

  CLI11_PARSE(app, argc, argv);
  if (run->parsed()) return simctl::RunCommand(o);
  if (serve->parsed()) {
    if (serve->count("--out-dir") == 0) o.out_dir.clear();
    return simctl::ServeCommand(o);
  }
  if (replay->count("--out-dir") == 0) o.out_dir.clear();
  if (replay->count("--bind") == 0) o.bind.clear();
  return simctl::ReplayCommand(o);
}

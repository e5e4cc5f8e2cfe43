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


#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <thread>

#include "vmsim/agents.hpp"
#include "vmsim/config.hpp"
#include "vmsim/scenario.hpp"
#include "vmsim/server.hpp"
#include "vmsim/session.hpp"
#include "vmsim/telemetry.hpp"

namespace simctl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_interrupted{false};

void OnSignal(int) { g_interrupted = true; }

int Fail(int status, std::string_view code, std::string_view message) {
  json j;
  j["error"] = {{"code", code}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return status;
}

vmsim::SimConfig LoadOrDefault(const CommonOptions& o) {
  vmsim::SimConfig cfg;
  if (!o.config_path.empty()) cfg = vmsim::LoadConfigFile(o.config_path);
  if (o.scenario != cfg.scenario_name) {
    throw vmsim::ConfigError("unknown scenario \"" + o.scenario + "\" (available: " +
                             cfg.scenario_name + ")");
  }
  return cfg;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

void WriteMetrics(const fs::path& dir, const vmsim::TrackingMetrics& m) {
  WriteText(dir / "metrics.json", vmsim::MetricsToJson(m));
  WriteText(dir / "metrics.csv", vmsim::MetricsToCsv(m));
}

void InstallSignalHandlers() {
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
}

}  // namespace

void ConfigureLogging() {
  auto logger = spdlog::stderr_color_mt("simctl");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("SIMCTL_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept that for "off" itself.
    if (level != spdlog::level::off || std::string_view(env) == "off") {
      spdlog::set_level(level);
    } else {
      spdlog::warn("ignoring SIMCTL_LOG={}", env);
    }
  }
}

int RunCommand(const CommonOptions& o) {
  vmsim::SimConfig cfg;
  vmsim::ControlMode mode;
  try {
    cfg = LoadOrDefault(o);
    mode = vmsim::ParseMode(o.mode);
  } catch (const std::exception& e) {
    return Fail(kExitConfig, "config_error", e.what());
  }

  vmsim::ScenarioRun result;
  try {
    vmsim::RunOptions options;
    options.duration = o.duration;
    options.realtime = cfg.realtime;
    spdlog::info("running {} ({})", cfg.scenario_name, o.mode);
    result = vmsim::RunScenario(cfg, mode, options);
  } catch (const std::exception& e) {
    return Fail(kExitIntegration, "integration_error", e.what());
  }

  try {
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    vmsim::WriteTelemetryCsvFile((dir / "telemetry.csv").string(), result.run.log);
    WriteMetrics(dir, result.metrics);
    spdlog::debug("artifacts written to {}", dir.string());
  } catch (const std::exception& e) {
    return Fail(kExitIo, "io_error", e.what());
  }

  const auto& r = result.run;
  const auto& m = result.metrics;
  std::printf(
      "summary mode=%s steps=%lld sim_time=%.3f wall_time=%.3f rtf=%.2f step_p99_us=%.1f "
      "vehicle_rms=%.4f manipulator_rms=%.4f roll_min=%.4f roll_max=%.4f clamp_events=%d "
      "end_stop_events=%d\n",
      o.mode.c_str(), r.steps, r.sim_time, r.wall_time, r.real_time_factor,
      r.step_time_p99 * 1e6, m.total.vehicle_rms, m.total.manipulator_rms, m.roll_min,
      m.roll_max, r.clamp_events, r.end_stop_events);
  return kExitOk;
}

int ServeCommand(const CommonOptions& o) {
  vmsim::SimConfig cfg;
  vmsim::ControlMode mode;
  vmsim::Endpoint endpoint;
  try {
    cfg = LoadOrDefault(o);
    mode = vmsim::ParseMode(o.mode);
    endpoint = vmsim::ParseEndpoint(o.bind);
  } catch (const std::exception& e) {
    return Fail(kExitConfig, "config_error", e.what());
  }

  vmsim::SessionOptions options;
  options.duration = o.duration;
  options.keep_log = !o.out_dir.empty();
  vmsim::LiveSession session(cfg, mode, options);
  std::unique_ptr<vmsim::SessionServer> server;
  try {
    server = std::make_unique<vmsim::SessionServer>(session, endpoint);
  } catch (const std::exception& e) {
    return Fail(kExitIo, "bind_error", e.what());
  }
  InstallSignalHandlers();
  session.Start();
  server->Start();
  spdlog::info("serving on {}:{}", endpoint.host, server->port());

  while (!g_interrupted && !session.finished()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  // One more flush period so the final frames reach the client.
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  const vmsim::SessionStats stats = session.Stop();
  server->Stop();

  if (!o.out_dir.empty()) {
    try {
      const fs::path dir(o.out_dir);
      fs::create_directories(dir);
      vmsim::WriteTelemetryCsvFile((dir / "telemetry.csv").string(), session.log());
      WriteText(dir / "session.json", vmsim::StatsToJson(stats).dump(2) + "\n");
    } catch (const std::exception& e) {
      return Fail(kExitIo, "io_error", e.what());
    }
  }
  std::printf("summary steps=%lld sim_time=%.3f wall_time=%.3f rtf=%.4f step_p50_us=%.0f "
              "step_p99_us=%.0f overruns=%d dropped_frames=%llu\n",
              stats.steps, stats.sim_time, stats.wall_time, stats.real_time_factor,
              stats.step_time_median * 1e6, stats.step_time_p99 * 1e6, stats.overruns,
              static_cast<unsigned long long>(stats.dropped_frames));
  return kExitOk;
}

int ReplayCommand(const CommonOptions& o) {
  vmsim::SimConfig cfg;
  std::vector<vmsim::TelemetryRecord> records;
  try {
    cfg = LoadOrDefault(o);
  } catch (const std::exception& e) {
    return Fail(kExitConfig, "config_error", e.what());
  }
  try {
    records = vmsim::ReadTelemetryCsvFile(o.input);
  } catch (const std::exception& e) {
    return Fail(kExitIo, "io_error", e.what());
  }
  if (o.duration > 0.0) {
    std::erase_if(records, [&](const vmsim::TelemetryRecord& r) { return r.t > o.duration; });
  }

  vmsim::TrackingMetrics metrics;
  bool scored = false;
  try {
    metrics = vmsim::ComputeTrackingMetrics(records, vmsim::BuildValidationScenario(cfg));
    scored = true;
  } catch (const std::invalid_argument& e) {
    spdlog::warn("log not scored: {}", e.what());
  }
  if (scored && !o.out_dir.empty()) {
    try {
      fs::create_directories(o.out_dir);
      WriteMetrics(o.out_dir, metrics);
    } catch (const std::exception& e) {
      return Fail(kExitIo, "io_error", e.what());
    }
  }

  if (!o.bind.empty()) {
    vmsim::Endpoint endpoint;
    try {
      endpoint = vmsim::ParseEndpoint(o.bind);
    } catch (const std::exception& e) {
      return Fail(kExitConfig, "config_error", e.what());
    }
    vmsim::ReplaySession session(cfg, records);
    std::unique_ptr<vmsim::SessionServer> server;
    try {
      server = std::make_unique<vmsim::SessionServer>(session, endpoint);
    } catch (const std::exception& e) {
      return Fail(kExitIo, "bind_error", e.what());
    }
    InstallSignalHandlers();
    session.Start();
    server->Start();
    spdlog::info("replaying {} records on {}:{}", records.size(), endpoint.host, server->port());
    while (!g_interrupted && !session.finished()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    session.Stop();
    server->Stop();
  }

  if (scored) {
    std::printf("summary records=%zu vehicle_rms=%.4f manipulator_rms=%.4f roll_min=%.4f "
                "roll_max=%.4f\n",
                records.size(), metrics.total.vehicle_rms, metrics.total.manipulator_rms,
                metrics.roll_min, metrics.roll_max);
  } else {
    std::printf("summary records=%zu\n", records.size());
  }
  return kExitOk;
}

}  // namespace simctl

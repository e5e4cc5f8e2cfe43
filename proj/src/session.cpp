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


#include "vmsim/session.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <variant>

#include "vmsim/agents.hpp"
#include "vmsim/engine.hpp"
#include "vmsim/scenario.hpp"

namespace vmsim {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

OutFrame ErrorFrame(const ProtocolError& e, std::optional<std::uint64_t> ref_seq) {
  return OutFrame{MessageKind::kError, ErrorPayload(e, ref_seq), std::nullopt};
}

OutFrame EventFrame(std::string_view name, json details = json::object()) {
  details["name"] = name;
  return OutFrame{MessageKind::kEvent, std::move(details), std::nullopt};
}

// Parses a client frame and enforces strictly increasing sequence numbers.
std::variant<Message, OutFrame> Admit(std::string_view text,
                                      std::optional<std::uint64_t>& last_seq) {
  Message m;
  try {
    m = ParseClientMessage(text);
  } catch (const ProtocolError& e) {
    // Report the sequence number when the envelope got that far.
    std::optional<std::uint64_t> ref;
    const json j = json::parse(text, nullptr, false);
    if (j.is_object() && j.contains("seq") && j["seq"].is_number_unsigned()) {
      ref = j["seq"].get<std::uint64_t>();
    }
    return ErrorFrame(e, ref);
  }
  if (last_seq && m.seq <= *last_seq) {
    return ErrorFrame(ProtocolError("sequence_error", "seq " + std::to_string(m.seq) +
                                                          " does not exceed " +
                                                          std::to_string(*last_seq)),
                      m.seq);
  }
  last_seq = m.seq;
  return m;
}

double Seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

}  // namespace

void StepTimeHistogram::Add(double seconds) {
  const double us = seconds * 1e6;
  const int bin = us >= kBins ? kBins : std::max(0, static_cast<int>(us));
  ++bins_[static_cast<std::size_t>(bin)];
  ++count_;
}

double StepTimeHistogram::Quantile(double q) const {
  if (count_ == 0) return 0.0;
  const auto target = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(count_)));
  std::uint64_t seen = 0;
  for (int b = 0; b <= kBins; ++b) {
    seen += bins_[static_cast<std::size_t>(b)];
    if (seen >= std::max<std::uint64_t>(target, 1)) return (b + 1) * 1e-6;
  }
  return (kBins + 1) * 1e-6;
}

json StatsToJson(const SessionStats& s) {
  json j;
  j["steps"] = s.steps;
  j["sim_time"] = s.sim_time;
  j["wall_time"] = s.wall_time;
  j["real_time_factor"] = s.real_time_factor;
  j["step_time_median"] = s.step_time_median;
  j["step_time_p99"] = s.step_time_p99;
  j["overruns"] = s.overruns;
  j["dropped_frames"] = s.dropped_frames;
  j["clamp_events"] = s.clamp_events;
  j["end_stop_events"] = s.end_stop_events;
  return j;
}

// --- LiveSession ----------------------------------------------------------

LiveSession::LiveSession(const SimConfig& cfg, ControlMode mode, SessionOptions options)
    : cfg_(cfg), options_(options), frames_(options.buffer_capacity) {
  intent_.mode = mode;
  mailbox_.Post(intent_);
}

LiveSession::~LiveSession() { Stop(); }

void LiveSession::Start() {
  if (engine_.joinable()) return;
  engine_ = std::thread([this] { EngineLoop(); });
}

SessionStats LiveSession::Stop() {
  stop_ = true;
  if (engine_.joinable()) engine_.join();
  return stats_;
}

void LiveSession::OnOpen() {
  last_seq_.reset();
  intent_.connected = true;
  intent_.command = LiveCommand{};
  intent_.ack.reset();
  mailbox_.Post(intent_);
}

void LiveSession::OnClose() {
  intent_.connected = false;
  intent_.command = LiveCommand{};
  mailbox_.Post(intent_);
}

std::vector<OutFrame> LiveSession::OnText(std::string_view text) {
  auto admitted = Admit(text, last_seq_);
  if (auto* error = std::get_if<OutFrame>(&admitted)) return {std::move(*error)};
  const Message& m = std::get<Message>(admitted);
  intent_.ack = m.seq;
  std::vector<OutFrame> replies;
  switch (m.kind) {
    case MessageKind::kHello:
      replies.push_back({MessageKind::kHello, HelloPayload(cfg_, intent_.mode), m.seq});
      break;
    case MessageKind::kCommand:
      intent_.command = CommandFromPayload(m.payload);
      break;
    case MessageKind::kModeSet:
      intent_.mode = ModeFromPayload(m.payload);
      break;
    default:
      break;
  }
  mailbox_.Post(intent_);
  return replies;
}

std::vector<OutFrame> LiveSession::Drain() { return frames_.DrainAll(); }

void LiveSession::EngineLoop() {
  const Scenario scenario = BuildValidationScenario(cfg_);
  World w = InitialWorld(cfg_, scenario.params.speed);
  Intent intent;
  intent.mode = intent_.mode;
  AutomationController automation(cfg_, scenario, intent.mode);
  RealtimePacer pacer(cfg_.step_size, cfg_.telemetry_decimation);
  StepTimeHistogram histogram;
  const long long metrics_every =
      std::max(1LL, std::llround(options_.metrics_period / cfg_.step_size));
  const long long step_limit =
      options_.duration > 0.0 ? std::llround(options_.duration / cfg_.step_size) : -1;

  bool running = false;
  Clock::time_point resumed_at{};
  double wall_running = 0.0;

  auto update_stats = [&] {
    stats_.steps = w.steps;
    stats_.sim_time = w.t;
    stats_.wall_time = wall_running;
    stats_.real_time_factor = wall_running > 0.0 ? w.t / wall_running : 0.0;
    stats_.step_time_median = histogram.Quantile(0.5);
    stats_.step_time_p99 = histogram.Quantile(0.99);
    stats_.overruns = pacer.overruns();
    stats_.dropped_frames = frames_.dropped();
  };

  try {
    while (!stop_) {
      if (auto posted = mailbox_.Take()) {
        if (posted->mode != intent.mode) {
          automation.set_mode(posted->mode);
          frames_.Push(EventFrame("mode_changed", {{"mode", ModeName(posted->mode)}}));
        }
        intent = *posted;
      }
      if (!intent.connected) {
        if (running) {
          running = false;
          frames_.Push(EventFrame("paused", {{"t", w.t}}));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
        continue;
      }
      if (!running) {
        running = true;
        frames_.Push(EventFrame("resumed", {{"t", w.t}}));
        pacer.Restart();
        resumed_at = Clock::now();
      }

      OperatorCommand human;
      human.source = CommandSourceKind::kHumanLive;
      human.end_effector =
          ClampCommand(intent.command.end_effector, cfg_.manipulator_params.ee_velocity_limit);
      if (intent.command.steering) {
        human.steering = *intent.command.steering;
        human.steering_override = true;
      }
      const OperatorCommand auto_cmd = automation.Command(w, cfg_.step_size);
      StepResult r = StepWorld(w, human, auto_cmd, cfg_);
      w = std::move(r.world);
      const auto step_end = Clock::now();
      wall_running += Seconds(step_end - resumed_at);
      resumed_at = step_end;
      histogram.Add(r.diagnostics.compute_seconds);
      stats_.clamp_events += r.diagnostics.clamp_events;
      stats_.end_stop_events += r.diagnostics.end_stop_events;

      if (w.steps % cfg_.telemetry_decimation == 0) {
        TelemetryRecord rec = MakeRecord(w, cfg_, ModeName(intent.mode), r.diagnostics);
        frames_.Push({MessageKind::kState, StatePayload(rec, cfg_), intent.ack});
        if (options_.keep_log) log_.push_back(std::move(rec));
      }
      if (w.steps % metrics_every == 0) {
        update_stats();
        frames_.Push({MessageKind::kMetrics, StatsToJson(stats_), intent.ack});
      }
      if (step_limit >= 0 && w.steps >= step_limit) {
        update_stats();
        frames_.Push(EventFrame("finished", StatsToJson(stats_)));
        break;
      }
      // Wall time runs up to the completion of each step; the pacer's idle
      // wait before the next step is charged when that step completes.
      if (options_.realtime) pacer.StepDone();
    }
  } catch (const std::exception& e) {
    frames_.Push({MessageKind::kError,
                  {{"code", "integration_error"}, {"message", e.what()}, {"t", w.t}},
                  std::nullopt});
  }
  update_stats();
  finished_ = true;
}

// --- ReplaySession --------------------------------------------------------

ReplaySession::ReplaySession(const SimConfig& cfg, std::vector<TelemetryRecord> records,
                             std::size_t buffer_capacity)
    : cfg_(cfg), records_(std::move(records)), frames_(buffer_capacity) {}

ReplaySession::~ReplaySession() { Stop(); }

void ReplaySession::Start() {
  if (player_.joinable()) return;
  player_ = std::thread([this] { PlayLoop(); });
}

void ReplaySession::Stop() {
  stop_ = true;
  if (player_.joinable()) player_.join();
}

void ReplaySession::OnOpen() {
  last_seq_.reset();
  intent_ = Intent{true, std::nullopt};
  mailbox_.Post(intent_);
}

void ReplaySession::OnClose() {
  intent_.connected = false;
  mailbox_.Post(intent_);
}

std::vector<OutFrame> ReplaySession::OnText(std::string_view text) {
  auto admitted = Admit(text, last_seq_);
  if (auto* error = std::get_if<OutFrame>(&admitted)) return {std::move(*error)};
  const Message& m = std::get<Message>(admitted);
  intent_.ack = m.seq;
  mailbox_.Post(intent_);
  if (m.kind == MessageKind::kHello) {
    const std::string mode = records_.empty() ? "cooperative" : records_.front().mode;
    json hello = HelloPayload(cfg_, ParseMode(mode));
    hello["replay"] = true;
    hello["records"] = records_.size();
    return {{MessageKind::kHello, std::move(hello), m.seq}};
  }
  return {};
}

std::vector<OutFrame> ReplaySession::Drain() { return frames_.DrainAll(); }

void ReplaySession::PlayLoop() {
  Intent intent;
  std::size_t next = 0;
  bool running = false;
  Clock::time_point origin{};
  double t_origin = 0.0;
  while (!stop_ && next < records_.size()) {
    if (auto posted = mailbox_.Take()) intent = *posted;
    if (!intent.connected) {
      if (running) frames_.Push(EventFrame("paused", {{"t", records_[next].t}}));
      running = false;
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
      continue;
    }
    if (!running) {
      running = true;
      frames_.Push(EventFrame("resumed", {{"t", records_[next].t}}));
      origin = Clock::now();
      t_origin = records_[next].t;
    }
    const TelemetryRecord& rec = records_[next];
    const auto due = origin + std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(rec.t - t_origin));
    if (Clock::now() < due) {
      std::this_thread::sleep_until(std::min(due, Clock::now() + std::chrono::milliseconds(1)));
      continue;
    }
    frames_.Push({MessageKind::kState, StatePayload(rec, cfg_), intent.ack});
    ++next;
  }
  if (next == records_.size()) frames_.Push(EventFrame("finished", {{"records", next}}));
  finished_ = true;
}

}  // namespace vmsim

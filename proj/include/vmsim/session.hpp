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


// Live operator sessions. The engine runs on its own thread; the socket side
// talks to it only through a latest-wins command mailbox and a bounded
// drop-oldest frame buffer.

#ifndef VMSIM_SESSION_HPP_
#define VMSIM_SESSION_HPP_

#include <atomic>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string_view>
#include <thread>
#include <vector>

#include "vmsim/config.hpp"
#include "vmsim/protocol.hpp"
#include "vmsim/telemetry.hpp"
#include "vmsim/world.hpp"

namespace vmsim {

// Single-slot mailbox. Post overwrites an unread value.
template <class T>
class Mailbox {
 public:
  void Post(T value) {
    std::lock_guard lock(mutex_);
    slot_ = std::move(value);
  }
  std::optional<T> Take() {
    std::lock_guard lock(mutex_);
    std::optional<T> out;
    out.swap(slot_);
    return out;
  }

 private:
  std::mutex mutex_;
  std::optional<T> slot_;
};

// Bounded FIFO that discards its oldest entry when full.
template <class T>
class DropOldestBuffer {
 public:
  explicit DropOldestBuffer(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}
  void Push(T value) {
    std::lock_guard lock(mutex_);
    if (items_.size() == capacity_) {
      items_.pop_front();
      ++dropped_;
    }
    items_.push_back(std::move(value));
  }
  std::vector<T> DrainAll() {
    std::lock_guard lock(mutex_);
    std::vector<T> out(std::make_move_iterator(items_.begin()),
                       std::make_move_iterator(items_.end()));
    items_.clear();
    return out;
  }
  std::uint64_t dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
  }
  std::size_t capacity() const { return capacity_; }

 private:
  mutable std::mutex mutex_;
  std::size_t capacity_;
  std::deque<T> items_;
  std::uint64_t dropped_ = 0;
};

// Step compute times in 1 us bins up to 10 ms, for quantiles over sessions of
// any length.
class StepTimeHistogram {
 public:
  void Add(double seconds);
  // Upper edge of the bin holding the q-quantile, s.
  double Quantile(double q) const;
  std::uint64_t count() const { return count_; }

 private:
  static constexpr int kBins = 10000;
  std::vector<std::uint64_t> bins_ = std::vector<std::uint64_t>(kBins + 1, 0);
  std::uint64_t count_ = 0;
};

// A server frame before the transport assigns its sequence number.
struct OutFrame {
  MessageKind kind = MessageKind::kState;
  nlohmann::json payload = nlohmann::json::object();
  std::optional<std::uint64_t> ack;
};

// What the transport drives. All calls come from the transport's I/O thread.
class SessionHandler {
 public:
  virtual ~SessionHandler() = default;
  virtual void OnOpen() = 0;
  virtual void OnClose() = 0;
  // Immediate replies to one client frame.
  virtual std::vector<OutFrame> OnText(std::string_view text) = 0;
  // Frames produced since the last call.
  virtual std::vector<OutFrame> Drain() = 0;
  virtual bool finished() const = 0;
};

struct SessionStats {
  long long steps = 0;
  double sim_time = 0.0;   // s advanced while a client was connected
  double wall_time = 0.0;  // s spent running, up to the last completed step
  double real_time_factor = 0.0;
  double step_time_median = 0.0;
  double step_time_p99 = 0.0;
  int overruns = 0;
  std::uint64_t dropped_frames = 0;
  int clamp_events = 0;
  int end_stop_events = 0;
};

nlohmann::json StatsToJson(const SessionStats& s);

struct SessionOptions {
  double duration = 0.0;  // simulated seconds; 0 runs until Stop()
  bool realtime = true;
  std::size_t buffer_capacity = 512;
  double metrics_period = 1.0;  // simulated seconds between metrics frames
  bool keep_log = false;
};

// Scenario automation plus a live operator on the boom. The simulation only
// advances while a client is connected; a disconnect zeroes the operator
// command and pauses the engine until the next client arrives.
class LiveSession : public SessionHandler {
 public:
  LiveSession(const SimConfig& cfg, ControlMode mode, SessionOptions options = {});
  ~LiveSession() override;
  LiveSession(const LiveSession&) = delete;
  LiveSession& operator=(const LiveSession&) = delete;

  void Start();
  // Joins the engine thread. Safe to call more than once.
  SessionStats Stop();

  void OnOpen() override;
  void OnClose() override;
  std::vector<OutFrame> OnText(std::string_view text) override;
  std::vector<OutFrame> Drain() override;
  bool finished() const override { return finished_.load(); }

  // Valid after Stop() when keep_log is set.
  const std::vector<TelemetryRecord>& log() const { return log_; }

 private:
  struct Intent {
    LiveCommand command;
    ControlMode mode = ControlMode::kCooperative;
    bool connected = false;
    std::optional<std::uint64_t> ack;
  };

  void EngineLoop();

  SimConfig cfg_;
  SessionOptions options_;
  Mailbox<Intent> mailbox_;
  DropOldestBuffer<OutFrame> frames_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> finished_{false};
  std::thread engine_;

  // I/O side.
  Intent intent_;
  std::optional<std::uint64_t> last_seq_;

  // Engine side, read after the join.
  SessionStats stats_;
  std::vector<TelemetryRecord> log_;
};

// Streams a recorded log at its recorded pace while a client is connected.
// Commands are acknowledged but do not alter the recording.
class ReplaySession : public SessionHandler {
 public:
  ReplaySession(const SimConfig& cfg, std::vector<TelemetryRecord> records,
                std::size_t buffer_capacity = 512);
  ~ReplaySession() override;
  ReplaySession(const ReplaySession&) = delete;
  ReplaySession& operator=(const ReplaySession&) = delete;

  void Start();
  void Stop();

  void OnOpen() override;
  void OnClose() override;
  std::vector<OutFrame> OnText(std::string_view text) override;
  std::vector<OutFrame> Drain() override;
  bool finished() const override { return finished_.load(); }

 private:
  struct Intent {
    bool connected = false;
    std::optional<std::uint64_t> ack;
  };

  void PlayLoop();

  SimConfig cfg_;
  std::vector<TelemetryRecord> records_;
  Mailbox<Intent> mailbox_;
  DropOldestBuffer<OutFrame> frames_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> finished_{false};
  std::thread player_;
  Intent intent_;
  std::optional<std::uint64_t> last_seq_;
};

}  // namespace vmsim

#endif  // VMSIM_SESSION_HPP_

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


// Session wire protocol. Every WebSocket text frame carries one JSON object
//   {"kind": ..., "seq": n, "ack": m, "payload": {...}}
// docs/protocol.md is the normative description.

#ifndef VMSIM_PROTOCOL_HPP_
#define VMSIM_PROTOCOL_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vmsim/config.hpp"
#include "vmsim/kinematics.hpp"
#include "vmsim/telemetry.hpp"
#include "vmsim/world.hpp"

namespace vmsim {

inline constexpr int kProtocolVersion = 1;

enum class MessageKind { kHello, kCommand, kModeSet, kState, kEvent, kMetrics, kError };

std::string_view KindName(MessageKind kind);
// Throws ProtocolError("unknown_kind") for names outside the protocol.
MessageKind ParseKind(std::string_view name);

// Rejection of a client frame. `code` is one of parse_error, schema_error,
// unknown_kind, unexpected_kind, sequence_error, invalid_value.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct Message {
  MessageKind kind = MessageKind::kHello;
  std::uint64_t seq = 0;
  std::optional<std::uint64_t> ack;
  nlohmann::json payload = nlohmann::json::object();
};

// Parses one client frame and checks its envelope and payload shape. Only
// hello, command and mode_set are accepted from clients.
Message ParseClientMessage(std::string_view text);

// Parses any frame (used by clients and tests); checks only the envelope.
Message ParseMessage(std::string_view text);

std::string EncodeMessage(const Message& m);

// Operator input carried by a command frame.
struct LiveCommand {
  EndEffectorCommand end_effector;  // arm frame, m/s
  std::optional<double> steering;   // rad; replaces the automation's when set
};

LiveCommand CommandFromPayload(const nlohmann::json& payload);
ControlMode ModeFromPayload(const nlohmann::json& payload);

nlohmann::json HelloPayload(const SimConfig& cfg, ControlMode mode);
// Record columns by name, plus the arm-frame tool position under "ee_arm".
nlohmann::json StatePayload(const TelemetryRecord& r, const SimConfig& cfg);
nlohmann::json ErrorPayload(const ProtocolError& e, std::optional<std::uint64_t> ref_seq);

}  // namespace vmsim

#endif  // VMSIM_PROTOCOL_HPP_

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


#include "vmsim/protocol.hpp"

#include <array>
#include <cmath>

namespace vmsim {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 7> kKindNames{"hello", "command", "mode_set", "state",
                                                     "event", "metrics", "error"};

std::uint64_t ReadCounter(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ProtocolError("schema_error", std::string("missing \"") + key + "\"");
  if (!it->is_number_unsigned()) {
    throw ProtocolError("schema_error",
                        std::string("\"") + key + "\" must be a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

double ReadFinite(const json& j, const char* what) {
  if (!j.is_number()) throw ProtocolError("schema_error", std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ProtocolError("invalid_value", std::string(what) + " is not finite");
  return v;
}

}  // namespace

std::string_view KindName(MessageKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

MessageKind ParseKind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<MessageKind>(i);
  }
  throw ProtocolError("unknown_kind", "unknown message kind \"" + std::string(name) + "\"");
}

Message ParseMessage(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("parse_error", "frame is not valid JSON");
  if (!j.is_object()) throw ProtocolError("schema_error", "frame must be a JSON object");
  const auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) {
    throw ProtocolError("schema_error", "\"kind\" must be a string");
  }
  Message m;
  m.kind = ParseKind(kind->get<std::string>());
  m.seq = ReadCounter(j, "seq");
  if (j.contains("ack") && !j["ack"].is_null()) m.ack = ReadCounter(j, "ack");
  if (const auto p = j.find("payload"); p != j.end()) {
    if (!p->is_object()) throw ProtocolError("schema_error", "\"payload\" must be an object");
    m.payload = std::move(*p);
  }
  return m;
}

Message ParseClientMessage(std::string_view text) {
  Message m = ParseMessage(text);
  switch (m.kind) {
    case MessageKind::kHello:
      break;
    case MessageKind::kCommand:
      CommandFromPayload(m.payload);
      break;
    case MessageKind::kModeSet:
      ModeFromPayload(m.payload);
      break;
    default:
      throw ProtocolError("unexpected_kind",
                          "kind \"" + std::string(KindName(m.kind)) + "\" is sent by the server only");
  }
  return m;
}

std::string EncodeMessage(const Message& m) {
  json j;
  j["kind"] = KindName(m.kind);
  j["seq"] = m.seq;
  if (m.ack) j["ack"] = *m.ack;
  j["payload"] = m.payload;
  return j.dump();
}

LiveCommand CommandFromPayload(const json& payload) {
  const auto v = payload.find("ee_velocity");
  if (v == payload.end() || !v->is_array() || v->size() != 2) {
    throw ProtocolError("schema_error", "command needs \"ee_velocity\": [vx, vy]");
  }
  LiveCommand c;
  c.end_effector.vx = ReadFinite((*v)[0], "ee_velocity[0]");
  c.end_effector.vy = ReadFinite((*v)[1], "ee_velocity[1]");
  if (const auto s = payload.find("steering"); s != payload.end() && !s->is_null()) {
    c.steering = ReadFinite(*s, "steering");
  }
  return c;
}

ControlMode ModeFromPayload(const json& payload) {
  const auto m = payload.find("mode");
  if (m == payload.end() || !m->is_string()) {
    throw ProtocolError("schema_error", "mode_set needs \"mode\": string");
  }
  try {
    return ParseMode(m->get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ProtocolError("invalid_value", e.what());
  }
}

json HelloPayload(const SimConfig& cfg, ControlMode mode) {
  json j;
  j["schema_version"] = kProtocolVersion;
  j["scenario"] = cfg.scenario_name;
  j["mode"] = ModeName(mode);
  j["step_size"] = cfg.step_size;
  j["telemetry_decimation"] = cfg.telemetry_decimation;
  j["frame_rate"] = 1.0 / (cfg.step_size * cfg.telemetry_decimation);
  j["ee_velocity_limit"] = cfg.manipulator_params.ee_velocity_limit;
  j["columns"] = TelemetryColumns();
  return j;
}

json StatePayload(const TelemetryRecord& r, const SimConfig& cfg) {
  json j = json::object();
  VisitTelemetryColumns(r, [&](const char* name, const auto& value) { j[name] = value; });
  const Vec2 tip = ForwardKinematics(ToVec(r.joint_angle), cfg.manipulator_params.link_length);
  j["ee_arm"] = {tip.x(), tip.y()};
  return j;
}

json ErrorPayload(const ProtocolError& e, std::optional<std::uint64_t> ref_seq) {
  json j;
  j["code"] = e.code();
  j["message"] = e.what();
  if (ref_seq) j["ref_seq"] = *ref_seq;
  return j;
}

}  // namespace vmsim

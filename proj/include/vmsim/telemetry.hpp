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

// Telemetry records and their CSV form. The column order is fixed and
// documented in docs/telemetry-schema.md.

#ifndef VMSIM_TELEMETRY_HPP_
#define VMSIM_TELEMETRY_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "vmsim/types.hpp"

namespace vmsim {

struct TelemetryRecord {
  double t = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  double roll = 0.0, pitch = 0.0, yaw = 0.0;
  WheelArray wheel_speed{};
  JointArray joint_angle{};
  JointArray joint_rate{};
  JointArray joint_rate_command{};
  double ee_x = 0.0, ee_y = 0.0, ee_z = 0.0;  // global frame
  JointArray pressure{};
  JointArray flow{};
  double human_vx = 0.0, human_vy = 0.0;      // arm-frame end-effector command
  double steering = 0.0;
  double drive_torque = 0.0;
  double lateral_offset = 0.0;                // cooperative reference shift
  std::string mode;
  int clamp_events = 0;
  int end_stop_events = 0;
  double max_state_delta = 0.0;

  bool operator==(const TelemetryRecord&) const = default;
};

// Calls f(name, field) for every column in schema order. Works on const and
// mutable records.
template <class R, class F>
void VisitTelemetryColumns(R& r, F&& f) {
  f("t", r.t);
  f("x", r.x);
  f("y", r.y);
  f("z", r.z);
  f("roll", r.roll);
  f("pitch", r.pitch);
  f("yaw", r.yaw);
  static const char* kWheel[] = {"wheel_speed_fl", "wheel_speed_fr", "wheel_speed_rl",
                                 "wheel_speed_rr"};
  for (int i = 0; i < kWheels; ++i) f(kWheel[i], r.wheel_speed[i]);
  static const char* kAngle[] = {"q1", "q2", "q3", "q4"};
  static const char* kRate[] = {"qd1", "qd2", "qd3", "qd4"};
  static const char* kRateCmd[] = {"qd1_cmd", "qd2_cmd", "qd3_cmd", "qd4_cmd"};
  static const char* kPressure[] = {"p_oil1", "p_oil2", "p_oil3", "p_oil4"};
  static const char* kFlow[] = {"q_oil1", "q_oil2", "q_oil3", "q_oil4"};
  for (int j = 0; j < kJoints; ++j) f(kAngle[j], r.joint_angle[j]);
  for (int j = 0; j < kJoints; ++j) f(kRate[j], r.joint_rate[j]);
  for (int j = 0; j < kJoints; ++j) f(kRateCmd[j], r.joint_rate_command[j]);
  f("ee_x", r.ee_x);
  f("ee_y", r.ee_y);
  f("ee_z", r.ee_z);
  for (int j = 0; j < kJoints; ++j) f(kPressure[j], r.pressure[j]);
  for (int j = 0; j < kJoints; ++j) f(kFlow[j], r.flow[j]);
  f("human_vx", r.human_vx);
  f("human_vy", r.human_vy);
  f("steering", r.steering);
  f("drive_torque", r.drive_torque);
  f("lateral_offset", r.lateral_offset);
  f("mode", r.mode);
  f("clamp_events", r.clamp_events);
  f("end_stop_events", r.end_stop_events);
  f("max_state_delta", r.max_state_delta);
}

const std::vector<std::string>& TelemetryColumns();

// Header row plus one row per record. Numbers use the shortest decimal form
// that parses back to the identical double.
void WriteTelemetryCsv(std::ostream& out, const std::vector<TelemetryRecord>& records);
void WriteTelemetryCsvFile(const std::string& path, const std::vector<TelemetryRecord>& records);

// Streaming writer used by long runs.
class TelemetryCsvWriter {
 public:
  explicit TelemetryCsvWriter(std::ostream& out);
  void Write(const TelemetryRecord& r);

 private:
  std::ostream& out_;
};

// Parses a file written by WriteTelemetryCsv. Throws std::runtime_error on a
// header mismatch or malformed row.
std::vector<TelemetryRecord> ReadTelemetryCsv(std::istream& in);
std::vector<TelemetryRecord> ReadTelemetryCsvFile(const std::string& path);

}  // namespace vmsim

#endif  // VMSIM_TELEMETRY_HPP_

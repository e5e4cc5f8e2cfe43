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

// Fixed-step coupled integration of vehicle and manipulator.
//
// The vehicle (24 states) and the arm (24 states) form one state vector that
// RK4 advances with every input held over the step. The arm load on the
// chassis depends on the chassis acceleration and vice versa; the derivative
// function closes that loop exactly, since both sides are affine in the mount
// acceleration.

#ifndef VMSIM_ENGINE_HPP_
#define VMSIM_ENGINE_HPP_

#include <chrono>
#include <functional>
#include <span>
#include <vector>

#include "vmsim/config.hpp"
#include "vmsim/telemetry.hpp"
#include "vmsim/world.hpp"

namespace vmsim {

inline constexpr int kVehicleStates = 24;
inline constexpr int kArmStates = 24;
inline constexpr int kSystemStates = kVehicleStates + kArmStates;

using SystemVector = std::array<double, kSystemStates>;

void PackState(const VehicleState& v, const ManipulatorState& a, std::span<double> x);
void UnpackState(std::span<const double> x, VehicleState& v, ManipulatorState& a);

// Inputs seen by the derivative function, constant over one step.
struct SystemInput {
  WheelInput wheels;
  JointCommand joints;
};

// Everything the derivative evaluation computes on the way.
struct SystemEvaluation {
  VehicleState vehicle_rate;
  ManipulatorState arm_rate;
  Wrench mount_wrench;
  MountMotion mount;
};

SystemEvaluation EvaluateSystem(const VehicleState& v, const ManipulatorState& a,
                                const SystemInput& input, const SimConfig& cfg);

void SystemDerivative(std::span<const double> x, const SystemInput& input, const SimConfig& cfg,
                      std::span<double> dxdt);

// Mount motion seen by an arm on a chassis at rest in the given attitude.
MountMotion StaticMount(const Vec3& attitude, double gravity);

struct StepDiagnostics {
  double max_state_delta = 0.0;
  int clamp_events = 0;     // pressure states clamped back into [0, supply]
  int end_stop_events = 0;  // joints outside their limits after the step
  double compute_seconds = 0.0;
};

struct StepResult {
  World world;
  StepDiagnostics diagnostics;
};

// Maps the operator commands onto plant inputs: velocity IK for the arm,
// automation steering (or the human's, when overriding) and an equal torque
// split over the wheels.
SystemInput MergeCommands(const World& w, const OperatorCommand& human,
                          const OperatorCommand& automation, const SimConfig& cfg);

StepResult StepWorld(const World& w, const OperatorCommand& human,
                     const OperatorCommand& automation, const SimConfig& cfg);

// Settled vehicle carrying the arm in its initial pose with holding
// pressures, rolling straight ahead at `speed`.
World InitialWorld(const SimConfig& cfg, double speed);

TelemetryRecord MakeRecord(const World& w, const SimConfig& cfg, std::string_view mode,
                           const StepDiagnostics& diag);

// End-effector position in the global frame.
Vec3 EndEffectorGlobal(const World& w, const SimConfig& cfg);

// Supplies both operators' commands once per step.
class CommandSource {
 public:
  virtual ~CommandSource() = default;
  struct Commands {
    OperatorCommand human;
    OperatorCommand automation;
  };
  virtual Commands Sample(const World& w, double step_size) = 0;
  virtual std::string_view ModeLabel() const = 0;
};

// Sleeps and spins so that step k completes no earlier than start + k h.
class RealtimePacer {
 public:
  RealtimePacer(double step_size, int batch);
  void Restart();
  // Called after each completed step.
  void StepDone();
  int overruns() const { return overruns_; }

 private:
  double step_size_;
  int batch_;
  long long steps_ = 0;
  int overruns_ = 0;
  std::chrono::steady_clock::time_point start_;
};

struct RunOptions {
  double duration = 1.0;
  bool realtime = false;
  bool keep_log = true;
  std::function<void(const TelemetryRecord&)> on_record;
};

struct RunResult {
  std::vector<TelemetryRecord> log;
  long long steps = 0;
  double sim_time = 0.0;
  double wall_time = 0.0;
  double real_time_factor = 0.0;
  double step_time_median = 0.0;
  double step_time_p99 = 0.0;
  int overruns = 0;
  int clamp_events = 0;
  int end_stop_events = 0;
};

// Exactly round(duration / step_size) steps. A telemetry record follows
// every telemetry_decimation-th step.
RunResult Run(World& w, CommandSource& source, const RunOptions& options, const SimConfig& cfg);

// Median and 99th percentile of a sample (copied, then partially sorted).
std::pair<double, double> MedianAndP99(std::vector<double> samples);

}  // namespace vmsim

#endif  // VMSIM_ENGINE_HPP_

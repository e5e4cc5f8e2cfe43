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

// The two operators sharing the machine.
//
// The simulated human steers only the boom: an LQ controller on a reduced
// lateral design model (docs/design-model.md) whose state is
//   x = [e_y, e_psi, e_d, e_h]
// with e_y the vehicle's lateral error, e_psi its heading error, e_d the tool
// offset relative to the vehicle (so e_y + e_d is the tool's lateral error)
// and e_h the tool height error. The human inputs are the lateral and vertical
// tool rates. The automation drives and steers; its published steering law is
// part of A, and its cooperative reference shift enters through Ba.

#ifndef VMSIM_AGENTS_HPP_
#define VMSIM_AGENTS_HPP_

#include <memory>

#include "vmsim/config.hpp"
#include "vmsim/engine.hpp"
#include "vmsim/lq.hpp"
#include "vmsim/scenario.hpp"
#include "vmsim/world.hpp"

namespace vmsim {

LqParams BuildDesignModel(const SimConfig& cfg, double horizon);

struct DesignState {
  double vehicle_lateral = 0.0;  // e_y, m, positive to the left
  double heading = 0.0;          // e_psi, rad
  double tool_relative = 0.0;    // e_d, m
  double tool_height = 0.0;      // e_h, m
  double tool_lateral = 0.0;     // e_y + e_d, m

  Vector AsVector() const;
};

// Errors of the world against the (unshifted) scenario references.
DesignState ExtractDesignState(const World& w, const Scenario& s, const SimConfig& cfg);

// Converts a tool velocity given along the road normal (left positive) and
// vertically into the arm frame, then limits it to ee_velocity_limit.
EndEffectorCommand RoadRateToArm(double lateral_rate, double vertical_rate, double road_heading,
                                 const World& w, const SimConfig& cfg);

class HumanModel {
 public:
  HumanModel(const SimConfig& cfg, const Scenario& scenario);

  // End-effector command at the world's time. `automation_input` is the
  // current shift term k_y * offset the automation applies.
  OperatorCommand Command(const World& w, double automation_input) const;

  const GainSchedule& schedule() const { return schedule_; }
  // True once a query went beyond the horizon (the last gain is then held).
  bool held_last_gain() const { return held_last_gain_; }

 private:
  SimConfig cfg_;
  Scenario scenario_;
  GainSchedule schedule_;
  mutable bool held_last_gain_ = false;
};

// Shift of the vehicle reference that moves the boom toward an unreachable
// tool reference: clamp(-gain * e_m, +-saturation). Zero for zero error.
double CooperativeOffset(double tool_lateral_error, const AutomationParams& p);

class AutomationController {
 public:
  AutomationController(const SimConfig& cfg, const Scenario& scenario, ControlMode mode);

  // Steering, drive torque and the reference shift for this step. Advances
  // the speed integrator by `step_size`.
  OperatorCommand Command(const World& w, double step_size);

  void set_mode(ControlMode mode) { mode_ = mode; }
  ControlMode mode() const { return mode_; }

 private:
  SimConfig cfg_;
  Scenario scenario_;
  ControlMode mode_;
  double speed_integral_ = 0.0;
};

// Simulated human plus automation, as used by batch runs.
class ScenarioCommandSource : public CommandSource {
 public:
  ScenarioCommandSource(const SimConfig& cfg, const Scenario& scenario, ControlMode mode,
                        bool human_enabled = true);
  Commands Sample(const World& w, double step_size) override;
  std::string_view ModeLabel() const override { return ModeName(automation_.mode()); }

  const HumanModel& human() const { return human_; }

 private:
  SimConfig cfg_;
  HumanModel human_;
  AutomationController automation_;
  bool human_enabled_;
};

struct ScenarioRun {
  Scenario scenario;
  RunResult run;
  TrackingMetrics metrics;  // filled when options.keep_log is set
};

// Batch run of the validation scenario from InitialWorld. A non-positive
// options.duration selects the scenario's nominal duration.
ScenarioRun RunScenario(const SimConfig& cfg, ControlMode mode, RunOptions options);

}  // namespace vmsim

#endif  // VMSIM_AGENTS_HPP_

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

// The composite simulation state and the commands that drive it.

#ifndef VMSIM_WORLD_HPP_
#define VMSIM_WORLD_HPP_

#include <string>
#include <string_view>

#include "vmsim/kinematics.hpp"
#include "vmsim/manipulator.hpp"
#include "vmsim/vehicle.hpp"

namespace vmsim {

enum class ControlMode { kCooperative, kNoncooperative };

std::string_view ModeName(ControlMode mode);
// Accepts "cooperative" and "noncooperative"; throws std::invalid_argument.
ControlMode ParseMode(std::string_view name);

enum class CommandSourceKind { kHumanLive, kHumanModel, kAutomation };

struct OperatorCommand {
  EndEffectorCommand end_effector;  // arm frame, m/s
  double steering = 0.0;            // rad
  double drive_torque = 0.0;        // N m, total over the four wheels
  double lateral_offset = 0.0;      // m, cooperative shift of the vehicle reference
  bool steering_override = false;   // human steering replaces the automation's
  CommandSourceKind source = CommandSourceKind::kAutomation;
};

struct World {
  double t = 0.0;
  VehicleState vehicle;
  ManipulatorState arm;
  OperatorCommand human;
  OperatorCommand automation;
  long long steps = 0;  // completed steps; t = steps * step_size
  double cursor = 0.0;  // scenario position (vehicle x), m
};

}  // namespace vmsim

#endif  // VMSIM_WORLD_HPP_

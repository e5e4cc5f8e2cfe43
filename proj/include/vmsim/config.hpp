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

// Parameter sets and the simulation configuration document.
//
// Every number the vehicle, manipulator, agent and scenario code reads comes
// from one of the structs below. The defaults describe a plausible roadside
// maintenance vehicle (about 7.5 t chassis, 4 m hydraulic boom); they are not
// identified from any particular machine. docs/config-schema.md lists every
// key, unit and default.

#ifndef VMSIM_CONFIG_HPP_
#define VMSIM_CONFIG_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "vmsim/types.hpp"

namespace vmsim {

struct VehicleParams {
  double chassis_mass = 7500.0;                          // kg, sprung mass
  std::array<double, 3> chassis_inertia{6000.0, 24000.0, 26000.0};  // kg m^2, body axes
  double wheel_inertia = 20.0;                           // kg m^2
  double wheel_radius = 0.5;                             // m
  WheelArray tire_stiffness{1.0e5, 1.0e5, 1.0e5, 1.0e5};  // N per unit slip
  AxleArray cornering_stiffness{1.5e5, 1.5e5};           // N/rad per wheel
  double slip_threshold = 0.5;                           // m/s, slip denominator floor
  double tire_vertical_stiffness = 8.0e5;                // N/m per wheel
  double tire_vertical_damping = 4.0e3;                  // N s/m per wheel
  AxleArray suspension_stiffness{1.6e5, 1.6e5};          // N/m per spring
  AxleArray suspension_damping{2.0e4, 2.0e4};            // N s/m per damper
  double suspension_free_length = 0.6;                   // m
  AxleArray unsprung_mass{600.0, 600.0};                 // kg per axle
  AxleArray unsprung_roll_inertia{400.0, 400.0};         // kg m^2 per axle
  double cog_to_front_axle = 1.8;                        // m
  double cog_to_rear_axle = 2.2;                         // m
  double track_width = 2.0;                              // m
  double suspension_mount_depth = 0.3;                   // m below the CoG
  std::array<double, 3> manipulator_mount{0.0, -1.0, 0.6};  // m, body frame
  double max_steering_angle = 0.6;                       // rad

  double wheelbase() const { return cog_to_front_axle + cog_to_rear_axle; }
  bool operator==(const VehicleParams&) const = default;
};

struct ManipulatorParams {
  // Geometry and mass of the four links.
  JointArray link_length{1.5, 1.3, 0.9, 0.4};
  JointArray link_mass{700.0, 550.0, 350.0, 250.0};
  JointArray link_com{0.75, 0.65, 0.45, 0.3};  // distance from the proximal joint
  JointArray link_inertia{131.25, 77.46, 23.63, 3.33};  // about the link CoG

  // Cylinder per joint: length^2 = a^2 + b^2 - 2ab cos(q + offset).
  JointArray cylinder_area{0.032, 0.016, 0.006, 0.002};  // m^2
  JointArray anchor_proximal{0.35, 0.30, 0.25, 0.15};   // m
  JointArray anchor_distal{0.45, 0.40, 0.30, 0.18};     // m
  JointArray anchor_angle{1.6, 2.3, 1.57, 1.57};        // rad
  JointArray dead_volume{0.005, 0.003, 0.0012, 0.0005};  // m^3
  JointArray valve_flow_gain{9.0e-7, 3.8e-7, 1.5e-7, 4.0e-8};  // m^3/s per sqrt(Pa)
  double bulk_modulus = 3.0e8;                 // Pa, effective incl. hoses
  double supply_pressure = 2.0e7;              // Pa
  double rod_side_pressure = 1.0e7;            // Pa, held constant
  double orifice_smoothing_pressure = 1.0e5;   // Pa
  double valve_time_constant = 0.08;           // s

  // LuGre friction per joint.
  JointArray bristle_stiffness{2.0e5, 1.5e5, 8.0e4, 3.0e4};   // sigma0, N m/rad
  JointArray bristle_damping{1000.0, 800.0, 400.0, 150.0};    // sigma1, N m s/rad
  JointArray viscous_friction{4.0e4, 1.5e4, 5.0e3, 500.0};   // sigma2, N m s/rad
  JointArray coulomb_friction{1500.0, 1000.0, 400.0, 120.0};  // N m
  JointArray static_friction{2500.0, 1700.0, 700.0, 200.0};   // N m
  JointArray stribeck_velocity{0.05, 0.05, 0.05, 0.05};       // rad/s

  JointArray joint_lower{-1.2, -2.0, -1.2, -1.2};  // rad
  JointArray joint_upper{0.9, 0.4, 1.2, 1.2};      // rad
  JointArray end_stop_stiffness{5.0e6, 3.0e6, 1.0e6, 2.0e5};  // N m/rad
  JointArray end_stop_damping{5.0e4, 3.0e4, 1.0e4, 2.0e3};    // N m s/rad
  double end_stop_band = 0.01;                                // rad

  JointArray joint_rate_limit{0.3, 0.4, 0.5, 0.6};  // rad/s
  double ee_velocity_limit = 0.4;                   // m/s
  double ik_damping = 0.3;                          // m

  // Low-level joint-rate controller (valve command per joint).
  JointArray rate_feedforward{3.2, 3.0, 2.7, 2.4};  // per rad/s
  JointArray rate_kp{1.0, 1.0, 1.0, 1.0};           // per rad/s
  JointArray rate_ki{2.0, 2.0, 2.0, 2.0};           // per rad
  double anti_windup_gain = 2.0;                    // 1/s

  JointArray initial_joint_angles{0.15, -0.45, -0.55, -0.45};  // rad

  bool operator==(const ManipulatorParams&) const = default;
};

// Weights and horizon of the simulated operator's quadratic cost.
struct HumanModelParams {
  double weight_lateral = 1.0;     // on end-effector lateral error, 1/m^2
  double weight_height = 1.0;      // on end-effector height error, 1/m^2
  double weight_input_lateral = 1.0;
  double weight_input_vertical = 1.0;
  double weight_automation = 1.0;  // prices the automation's steering input
  double horizon = 0.0;            // s; 0 selects the scenario duration
  double gain_step = 0.01;         // s, discretization of the gain schedule
  bool operator==(const HumanModelParams&) const = default;
};

struct AutomationParams {
  double lateral_gain = 0.25;   // rad per m
  double heading_gain = 1.6;    // rad per rad
  double speed_kp = 1.0;        // 1/s
  double speed_ki = 0.2;        // 1/s^2
  double cooperative_gain = 1.0;        // m of offset per m of end-effector error
  double cooperative_saturation = 1.5;  // m
  bool operator==(const AutomationParams&) const = default;
};

// Landmarks and magnitudes of the validation drive. Positions are arc length
// along the road in meters.
struct ScenarioParams {
  double length = 160.0;
  double speed = 2.0;                 // m/s reference speed
  double correction_start = 20.0;
  double correction_length = 10.0;
  double correction_offset = 0.5;     // m, to the left
  double step_position = 45.0;
  double step_height = 0.4;           // m, outward (away from the chassis)
  double obstacle_extent = 5.0;       // m
  double return_start = 110.0;
  double return_length = 10.0;
  double curve_start = 60.0;
  double curve_end = 110.0;
  double curve_radius = 200.0;        // m, left-hand curve
  double roadside_offset = 4.6;       // m right of the road center line
  double tool_height = 0.3;           // m above ground
  bool operator==(const ScenarioParams&) const = default;
};

enum class Solver { kRk4 };

struct SimConfig {
  double step_size = 0.0005;  // s (2 kHz)
  Solver solver = Solver::kRk4;
  double gravity = 9.81;
  VehicleParams vehicle_params;
  ManipulatorParams manipulator_params;
  HumanModelParams human_model_params;
  AutomationParams automation_params;
  ScenarioParams scenario_params;
  std::string scenario_name = "validation";
  bool realtime = false;
  int telemetry_decimation = 20;
  bool operator==(const SimConfig&) const = default;
};

// Parses a JSON configuration document. Missing keys keep their defaults;
// unknown keys are rejected. Throws ConfigError on malformed input or on the
// first violated invariant.
SimConfig LoadConfig(std::string_view text);
SimConfig LoadConfigFile(const std::string& path);

// Serializes every field, so LoadConfig(SerializeConfig(c)) == c.
std::string SerializeConfig(const SimConfig& cfg);

// Returns one "path: rule" entry per violated invariant; empty when valid.
std::vector<std::string> ValidateParams(const SimConfig& cfg);

}  // namespace vmsim

#endif  // VMSIM_CONFIG_HPP_

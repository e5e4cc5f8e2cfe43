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

// Nonlinear heavy-vehicle model: a 6-DOF sprung chassis, two axles that each
// heave and roll on their tires, four wheels with spin dynamics and a linear
// tire law. docs/vehicle-model.md has the derivation and frame conventions.
//
// Frames: global x forward, y left, z up. Body frame at the chassis CoG with
// the same orientation at zero attitude. Attitude is roll-pitch-yaw with
// R = Rz(yaw) Ry(pitch) Rx(roll) mapping body to global.

#ifndef VMSIM_VEHICLE_HPP_
#define VMSIM_VEHICLE_HPP_

#include <functional>

#include "vmsim/config.hpp"
#include "vmsim/types.hpp"

namespace vmsim {

struct VehicleState {
  Vec3 position = Vec3::Zero();      // CoG, global frame
  Vec3 attitude = Vec3::Zero();      // roll, pitch, yaw
  Vec3 velocity = Vec3::Zero();      // CoG velocity, body frame
  Vec3 angular_rate = Vec3::Zero();  // body frame
  WheelArray wheel_speed{};          // rad/s
  AxleArray axle_heave{};            // height of the axle center above ground, m
  AxleArray axle_roll{};             // rad
  AxleArray axle_heave_rate{};
  AxleArray axle_roll_rate{};

  double roll() const { return attitude[0]; }
  double pitch() const { return attitude[1]; }
  double yaw() const { return attitude[2]; }
};

struct WheelInput {
  WheelArray drive_torque{};    // N m per wheel
  double steering_angle = 0.0;  // rad, applied to both front wheels
};

// Force and torque in the chassis body frame. When used as the manipulator
// load, the torque is taken about the mount point.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

// Longitudinal slip with the denominator floored at `slip_threshold`:
// (v - w r) / max(v, w r, v_N). Total for every finite input.
double TireSlip(double ground_speed, double wheel_speed, double wheel_radius,
                double slip_threshold);

// Linear longitudinal tire law, F = c s. Positive force opposes forward travel
// of the chassis and spins the wheel up; the chassis receives -F along the
// wheel heading.
double TireForce(double stiffness, double slip);

// Wheel spin acceleration (F r + M) / theta.
double WheelAccel(double tire_force, double wheel_radius, double drive_torque,
                  double wheel_inertia);

Mat3 BodyToGlobal(const Vec3& attitude);

// Net chassis load without the manipulator wrench, plus every other state
// derivative. The engine uses this split to close the chassis/arm coupling.
struct VehicleLoads {
  Vec3 force = Vec3::Zero();   // body frame, at the CoG
  Vec3 moment = Vec3::Zero();  // body frame, about the CoG
  VehicleState derivative;     // chassis velocity/rate entries left zero
};

VehicleLoads ComputeVehicleLoads(const VehicleState& state, const WheelInput& input,
                                 const VehicleParams& params, double gravity);

// Completes `loads.derivative` with the chassis accelerations produced by the
// loads plus the manipulator wrench applied at the mount.
VehicleState FinishVehicleDerivatives(const VehicleState& state, const VehicleLoads& loads,
                                      const Wrench& mount_wrench,
                                      const VehicleParams& params);

// Full time derivative of the vehicle state. Throws DomainError if |roll| or
// |pitch| reaches pi/2.
VehicleState VehicleDerivatives(const VehicleState& state, const WheelInput& input,
                                const Wrench& mount_wrench, const VehicleParams& params,
                                double gravity);

// Linear acceleration of the chassis CoG (body frame) for given loads.
Vec3 ChassisAcceleration(const VehicleLoads& loads, const Wrench& mount_wrench,
                         const VehicleParams& params);

// Solves for the vertical configuration (height, roll, pitch, axle heave and
// roll) at which the vehicle rests under gravity and `static_wrench`.
// Horizontal position, yaw, velocities and wheel speeds are taken from
// `guess`. The wrench callback may depend on the attitude.
VehicleState SettleVehicle(const VehicleParams& params, double gravity,
                           const std::function<Wrench(const VehicleState&)>& static_wrench,
                           VehicleState guess);

// Mean suspension compression over the four springs, m.
double MeanSuspensionCompression(const VehicleState& state, const VehicleParams& params);

}  // namespace vmsim

#endif  // VMSIM_VEHICLE_HPP_

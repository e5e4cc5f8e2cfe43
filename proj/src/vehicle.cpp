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

#include "vmsim/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vmsim {

double TireSlip(double ground_speed, double wheel_speed, double wheel_radius,
                double slip_threshold) {
  const double circumferential = wheel_speed * wheel_radius;
  const double denom = std::max({ground_speed, circumferential, slip_threshold});
  return (ground_speed - circumferential) / denom;
}

double TireForce(double stiffness, double slip) { return stiffness * slip; }

double WheelAccel(double tire_force, double wheel_radius, double drive_torque,
                  double wheel_inertia) {
  return (tire_force * wheel_radius + drive_torque) / wheel_inertia;
}

Mat3 BodyToGlobal(const Vec3& attitude) {
  return (Eigen::AngleAxisd(attitude[2], Vec3::UnitZ()) *
          Eigen::AngleAxisd(attitude[1], Vec3::UnitY()) *
          Eigen::AngleAxisd(attitude[0], Vec3::UnitX()))
      .toRotationMatrix();
}

namespace {

void CheckAttitude(const VehicleState& s) {
  constexpr double kLimit = std::numbers::pi / 2.0;
  if (!(std::abs(s.roll()) < kLimit) || !(std::abs(s.pitch()) < kLimit)) {
    throw DomainError("vehicle roll/pitch left the modeled regime (|angle| >= pi/2)");
  }
}

Vec3 AttachmentPoint(int wheel, const VehicleParams& p) {
  const double x = AxleOf(wheel) == 0 ? p.cog_to_front_axle : -p.cog_to_rear_axle;
  return {x, SideOf(wheel) * 0.5 * p.track_width, -p.suspension_mount_depth};
}

// Suspension length and its rate at one corner.
struct Corner {
  Vec3 attach_global;
  Vec3 attach_velocity;  // global
  double wheel_center_z;
  double wheel_center_rate;
};

Corner EvalCorner(const VehicleState& s, const Mat3& R, int wheel, const VehicleParams& p) {
  const int axle = AxleOf(wheel);
  const double side = SideOf(wheel);
  const double half_track = 0.5 * p.track_width;
  const Vec3 r = AttachmentPoint(wheel, p);
  Corner c;
  c.attach_global = s.position + R * r;
  c.attach_velocity = R * (s.velocity + s.angular_rate.cross(r));
  c.wheel_center_z = s.axle_heave[axle] + side * half_track * std::sin(s.axle_roll[axle]);
  c.wheel_center_rate =
      s.axle_heave_rate[axle] + side * half_track * std::cos(s.axle_roll[axle]) * s.axle_roll_rate[axle];
  return c;
}

}  // namespace

VehicleLoads ComputeVehicleLoads(const VehicleState& s, const WheelInput& input,
                                 const VehicleParams& p, double gravity) {
  CheckAttitude(s);
  const Mat3 R = BodyToGlobal(s.attitude);
  const double half_track = 0.5 * p.track_width;

  Vec3 force_global(0.0, 0.0, -p.chassis_mass * gravity);
  Vec3 moment_global = Vec3::Zero();
  AxleArray axle_force{};
  AxleArray axle_moment{};

  VehicleLoads loads;
  VehicleState& d = loads.derivative;

  for (int w = 0; w < kWheels; ++w) {
    const int axle = AxleOf(w);
    const double side = SideOf(w);
    const Corner c = EvalCorner(s, R, w, p);

    const double length = c.attach_global.z() - c.wheel_center_z;
    const double length_rate = c.attach_velocity.z() - c.wheel_center_rate;
    const double spring = p.suspension_stiffness[axle] * (p.suspension_free_length - length) -
                          p.suspension_damping[axle] * length_rate;

    const double tire_deflection = p.wheel_radius - c.wheel_center_z;
    const double normal = std::max(0.0, p.tire_vertical_stiffness * tire_deflection -
                                            p.tire_vertical_damping * c.wheel_center_rate);

    const double heading = s.yaw() + (axle == 0 ? input.steering_angle : 0.0);
    const Vec3 e_lon(std::cos(heading), std::sin(heading), 0.0);
    const Vec3 e_lat(-std::sin(heading), std::cos(heading), 0.0);
    const double v_lon = c.attach_velocity.dot(e_lon);
    const double v_lat = c.attach_velocity.dot(e_lat);

    const double slip = TireSlip(v_lon, s.wheel_speed[w], p.wheel_radius, p.slip_threshold);
    const double f_long = TireForce(p.tire_stiffness[w], slip);
    const double slip_angle = std::atan(v_lat / std::max(std::abs(v_lon), p.slip_threshold));
    const double f_lat = -p.cornering_stiffness[axle] * slip_angle;

    const Vec3 f_spring(0.0, 0.0, spring);
    const Vec3 f_tire = -f_long * e_lon + f_lat * e_lat;
    const Vec3 contact(c.attach_global.x(), c.attach_global.y(), 0.0);

    force_global += f_spring + f_tire;
    moment_global += (c.attach_global - s.position).cross(f_spring) +
                     (contact - s.position).cross(f_tire);

    d.wheel_speed[w] =
        WheelAccel(f_long, p.wheel_radius, input.drive_torque[w], p.wheel_inertia);
    axle_force[axle] += normal - spring;
    axle_moment[axle] += side * half_track * std::cos(s.axle_roll[axle]) * (normal - spring);
  }

  for (int a = 0; a < kAxles; ++a) {
    d.axle_heave[a] = s.axle_heave_rate[a];
    d.axle_roll[a] = s.axle_roll_rate[a];
    d.axle_heave_rate[a] = axle_force[a] / p.unsprung_mass[a] - gravity;
    d.axle_roll_rate[a] = axle_moment[a] / p.unsprung_roll_inertia[a];
  }

  d.position = R * s.velocity;
  const double sr = std::sin(s.roll()), cr = std::cos(s.roll());
  const double tp = std::tan(s.pitch()), cp = std::cos(s.pitch());
  const Vec3& w = s.angular_rate;
  d.attitude = Vec3(w.x() + (w.y() * sr + w.z() * cr) * tp, w.y() * cr - w.z() * sr,
                    (w.y() * sr + w.z() * cr) / cp);

  loads.force = R.transpose() * force_global;
  loads.moment = R.transpose() * moment_global;
  return loads;
}

Vec3 ChassisAcceleration(const VehicleLoads& loads, const Wrench& mount_wrench,
                         const VehicleParams& p) {
  return (loads.force + mount_wrench.force) / p.chassis_mass;
}

VehicleState FinishVehicleDerivatives(const VehicleState& s, const VehicleLoads& loads,
                                      const Wrench& mount_wrench, const VehicleParams& p) {
  const Vec3 mount(p.manipulator_mount[0], p.manipulator_mount[1], p.manipulator_mount[2]);
  const Vec3 inertia(p.chassis_inertia[0], p.chassis_inertia[1], p.chassis_inertia[2]);
  const Vec3 moment = loads.moment + mount_wrench.torque + mount.cross(mount_wrench.force);
  const Vec3& w = s.angular_rate;

  VehicleState d = loads.derivative;
  d.velocity = ChassisAcceleration(loads, mount_wrench, p) - w.cross(s.velocity);
  d.angular_rate = (moment - w.cross(inertia.cwiseProduct(w))).cwiseQuotient(inertia);
  return d;
}

VehicleState VehicleDerivatives(const VehicleState& state, const WheelInput& input,
                                const Wrench& mount_wrench, const VehicleParams& params,
                                double gravity) {
  return FinishVehicleDerivatives(state, ComputeVehicleLoads(state, input, params, gravity),
                                  mount_wrench, params);
}

double MeanSuspensionCompression(const VehicleState& s, const VehicleParams& p) {
  const Mat3 R = BodyToGlobal(s.attitude);
  double sum = 0.0;
  for (int w = 0; w < kWheels; ++w) {
    const Corner c = EvalCorner(s, R, w, p);
    sum += p.suspension_free_length - (c.attach_global.z() - c.wheel_center_z);
  }
  return sum / kWheels;
}

namespace {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;

VehicleState Unpack(const Vec7& u, VehicleState s) {
  s.position.z() = u[0];
  s.attitude[0] = u[1];
  s.attitude[1] = u[2];
  s.axle_heave = {u[3], u[4]};
  s.axle_roll = {u[5], u[6]};
  return s;
}

Vec7 Residual(const Vec7& u, const VehicleState& guess, const VehicleParams& p, double g,
              const std::function<Wrench(const VehicleState&)>& static_wrench) {
  const VehicleState s = Unpack(u, guess);
  const VehicleLoads loads = ComputeVehicleLoads(s, WheelInput{}, p, g);
  const Wrench wrench = static_wrench(s);
  const Vec3 mount(p.manipulator_mount[0], p.manipulator_mount[1], p.manipulator_mount[2]);
  const Mat3 R = BodyToGlobal(s.attitude);
  const Vec3 force = R * (loads.force + wrench.force);
  const Vec3 moment = R * (loads.moment + wrench.torque + mount.cross(wrench.force));
  Vec7 r;
  // Scaled so that every entry is an acceleration.
  r << force.z() / p.chassis_mass, moment.x() / p.chassis_inertia[0],
      moment.y() / p.chassis_inertia[1], loads.derivative.axle_heave_rate[0],
      loads.derivative.axle_heave_rate[1], loads.derivative.axle_roll_rate[0],
      loads.derivative.axle_roll_rate[1];
  return r;
}

}  // namespace

VehicleState SettleVehicle(const VehicleParams& p, double gravity,
                           const std::function<Wrench(const VehicleState&)>& static_wrench,
                           VehicleState guess) {
  Vec7 u;
  if (guess.position.z() == 0.0 && guess.axle_heave[0] == 0.0) {
    // Cold start: undeflected tires and springs.
    guess.axle_heave = {p.wheel_radius, p.wheel_radius};
    guess.position.z() = p.wheel_radius + p.suspension_free_length + p.suspension_mount_depth;
  }
  u << guess.position.z(), guess.attitude[0], guess.attitude[1], guess.axle_heave[0],
      guess.axle_heave[1], guess.axle_roll[0], guess.axle_roll[1];

  for (int iter = 0; iter < 50; ++iter) {
    const Vec7 r = Residual(u, guess, p, gravity, static_wrench);
    if (r.norm() < 1e-13) break;
    Mat7 J;
    for (int k = 0; k < 7; ++k) {
      const double step = 1e-7;
      Vec7 up = u, um = u;
      up[k] += step;
      um[k] -= step;
      J.col(k) = (Residual(up, guess, p, gravity, static_wrench) -
                  Residual(um, guess, p, gravity, static_wrench)) /
                 (2.0 * step);
    }
    const Vec7 delta = J.fullPivLu().solve(r);
    u -= delta;
    if (delta.norm() < 1e-15) break;
  }
  return Unpack(u, guess);
}

}  // namespace vmsim

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

#include "vmsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "vmsim/integrator.hpp"
#include "vmsim/kinematics.hpp"

namespace vmsim {

std::string_view ModeName(ControlMode mode) {
  return mode == ControlMode::kCooperative ? "cooperative" : "noncooperative";
}

ControlMode ParseMode(std::string_view name) {
  if (name == "cooperative") return ControlMode::kCooperative;
  if (name == "noncooperative") return ControlMode::kNoncooperative;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected cooperative or noncooperative)");
}

namespace {

template <std::size_t N>
void Put(std::span<double> x, std::size_t& i, const std::array<double, N>& a) {
  for (double v : a) x[i++] = v;
}
void Put(std::span<double> x, std::size_t& i, const Vec3& v) {
  for (int k = 0; k < 3; ++k) x[i++] = v[k];
}
template <std::size_t N>
void Get(std::span<const double> x, std::size_t& i, std::array<double, N>& a) {
  for (double& v : a) v = x[i++];
}
void Get(std::span<const double> x, std::size_t& i, Vec3& v) {
  for (int k = 0; k < 3; ++k) v[k] = x[i++];
}

Vec3 MountPoint(const VehicleParams& p) {
  return {p.manipulator_mount[0], p.manipulator_mount[1], p.manipulator_mount[2]};
}

}  // namespace

void PackState(const VehicleState& v, const ManipulatorState& a, std::span<double> x) {
  std::size_t i = 0;
  Put(x, i, v.position);
  Put(x, i, v.attitude);
  Put(x, i, v.velocity);
  Put(x, i, v.angular_rate);
  Put(x, i, v.wheel_speed);
  Put(x, i, v.axle_heave);
  Put(x, i, v.axle_roll);
  Put(x, i, v.axle_heave_rate);
  Put(x, i, v.axle_roll_rate);
  Put(x, i, a.angle);
  Put(x, i, a.rate);
  Put(x, i, a.bristle);
  Put(x, i, a.pressure);
  Put(x, i, a.spool);
  Put(x, i, a.integrator);
}

void UnpackState(std::span<const double> x, VehicleState& v, ManipulatorState& a) {
  std::size_t i = 0;
  Get(x, i, v.position);
  Get(x, i, v.attitude);
  Get(x, i, v.velocity);
  Get(x, i, v.angular_rate);
  Get(x, i, v.wheel_speed);
  Get(x, i, v.axle_heave);
  Get(x, i, v.axle_roll);
  Get(x, i, v.axle_heave_rate);
  Get(x, i, v.axle_roll_rate);
  Get(x, i, a.angle);
  Get(x, i, a.rate);
  Get(x, i, a.bristle);
  Get(x, i, a.pressure);
  Get(x, i, a.spool);
  Get(x, i, a.integrator);
}

MountMotion StaticMount(const Vec3& attitude, double gravity) {
  MountMotion m;
  m.gravity = BodyToGlobal(attitude).transpose() * Vec3(0.0, 0.0, -gravity);
  return m;
}

SystemEvaluation EvaluateSystem(const VehicleState& v, const ManipulatorState& a,
                                const SystemInput& input, const SimConfig& cfg) {
  const auto& vp = cfg.vehicle_params;
  const auto& mp = cfg.manipulator_params;
  const VehicleLoads loads = ComputeVehicleLoads(v, input.wheels, vp, cfg.gravity);
  const ActuationOutput act = ComputeActuation(a, input.joints, mp);

  const Vec4 q = ToVec(a.angle);
  const Vec4 qd = ToVec(a.rate);
  const Vec3& omega = v.angular_rate;
  const Vec3 centripetal = omega.cross(omega.cross(MountPoint(vp)));

  MountMotion mount = StaticMount(v.attitude, cfg.gravity);
  mount.angular_rate = omega;
  struct Response {
    Wrench wrench;
    Vec4 qdd;
  };
  auto respond = [&](const Vec3& mount_acceleration) {
    mount.acceleration = mount_acceleration;
    Response r;
    r.qdd = ArmAccelerations(q, qd, act.torque, mount, mp);
    r.wrench = ChassisReactionWrench(q, qd, r.qdd, mount, mp);
    return r;
  };

  // Arm response at zero CoG acceleration and its sensitivity to each
  // acceleration component; both are exact since the response is affine.
  const Response base = respond(centripetal);
  std::array<Response, 3> unit;
  Mat3 sensitivity;
  for (int k = 0; k < 3; ++k) {
    unit[k] = respond(centripetal + Vec3::Unit(k));
    sensitivity.col(k) = unit[k].wrench.force - base.wrench.force;
  }
  const Mat3 lhs = vp.chassis_mass * Mat3::Identity() - sensitivity;
  const Vec3 accel = lhs.partialPivLu().solve(loads.force + base.wrench.force);

  SystemEvaluation out;
  out.mount_wrench = base.wrench;
  Vec4 qdd = base.qdd;
  for (int k = 0; k < 3; ++k) {
    out.mount_wrench.force += accel[k] * (unit[k].wrench.force - base.wrench.force);
    out.mount_wrench.torque += accel[k] * (unit[k].wrench.torque - base.wrench.torque);
    qdd += accel[k] * (unit[k].qdd - base.qdd);
  }
  mount.acceleration = centripetal + accel;
  out.mount = mount;
  out.vehicle_rate = FinishVehicleDerivatives(v, loads, out.mount_wrench, vp);
  out.arm_rate = act.derivative;
  out.arm_rate.angle = a.rate;
  out.arm_rate.rate = ToArray(qdd);
  out.arm_rate.flow = act.flow;
  return out;
}

void SystemDerivative(std::span<const double> x, const SystemInput& input, const SimConfig& cfg,
                      std::span<double> dxdt) {
  VehicleState v;
  ManipulatorState a;
  UnpackState(x, v, a);
  const SystemEvaluation e = EvaluateSystem(v, a, input, cfg);
  PackState(e.vehicle_rate, e.arm_rate, dxdt);
}

SystemInput MergeCommands(const World& w, const OperatorCommand& human,
                          const OperatorCommand& automation, const SimConfig& cfg) {
  const auto& vp = cfg.vehicle_params;
  SystemInput in;
  const double steering = human.steering_override ? human.steering : automation.steering;
  in.wheels.steering_angle = std::clamp(steering, -vp.max_steering_angle, vp.max_steering_angle);
  in.wheels.drive_torque.fill(automation.drive_torque / kWheels);
  in.joints = VelocityIk(ToVec(w.arm.angle), human.end_effector, cfg.manipulator_params);
  return in;
}

StepResult StepWorld(const World& w, const OperatorCommand& human,
                     const OperatorCommand& automation, const SimConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  const auto& mp = cfg.manipulator_params;
  const SystemInput input = MergeCommands(w, human, automation, cfg);

  thread_local Rk4Workspace workspace;
  SystemVector x0;
  PackState(w.vehicle, w.arm, x0);
  SystemVector x = x0;
  Rk4Step([&](double, std::span<const double> s,
              std::span<double> d) { SystemDerivative(s, input, cfg, d); },
          std::span<double>(x), w.t, cfg.step_size, workspace);

  StepResult r;
  r.world = w;
  r.world.human = human;
  r.world.automation = automation;
  UnpackState(x, r.world.vehicle, r.world.arm);
  auto& arm = r.world.arm;
  StepDiagnostics& diag = r.diagnostics;
  for (int j = 0; j < kJoints; ++j) {
    const double clamped = std::clamp(arm.pressure[j], 0.0, mp.supply_pressure);
    if (clamped != arm.pressure[j]) {
      ++diag.clamp_events;
      arm.pressure[j] = clamped;
    }
    if (arm.angle[j] < mp.joint_lower[j] || arm.angle[j] > mp.joint_upper[j]) {
      ++diag.end_stop_events;
    }
    arm.flow[j] = ValveFlow(arm.pressure[j], arm.spool[j], j, mp);
  }
  for (int i = 0; i < kSystemStates; ++i) {
    if (!std::isfinite(x[i])) {
      throw IntegrationError("non-finite state after step at component " + std::to_string(i), i);
    }
    diag.max_state_delta = std::max(diag.max_state_delta, std::abs(x[i] - x0[i]));
  }
  r.world.steps = w.steps + 1;
  r.world.t = static_cast<double>(r.world.steps) * cfg.step_size;
  r.world.cursor = r.world.vehicle.position.x();
  diag.compute_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

World InitialWorld(const SimConfig& cfg, double speed) {
  const auto& vp = cfg.vehicle_params;
  const auto& mp = cfg.manipulator_params;
  const Vec4 q0 = ToVec(mp.initial_joint_angles);
  auto static_wrench = [&](const VehicleState& s) {
    return ChassisReactionWrench(q0, Vec4::Zero(), Vec4::Zero(),
                                 StaticMount(s.attitude, cfg.gravity), mp);
  };
  World w;
  w.vehicle = SettleVehicle(vp, cfg.gravity, static_wrench, VehicleState{});
  w.arm = HoldingState(mp.initial_joint_angles, StaticMount(w.vehicle.attitude, cfg.gravity), mp);
  const Mat3 R = BodyToGlobal(w.vehicle.attitude);
  w.vehicle.velocity = R.transpose() * Vec3(speed, 0.0, 0.0);
  w.vehicle.wheel_speed.fill(speed / vp.wheel_radius);
  for (int j = 0; j < kJoints; ++j) {
    w.arm.flow[j] = ValveFlow(w.arm.pressure[j], w.arm.spool[j], j, mp);
  }
  w.cursor = w.vehicle.position.x();
  return w;
}

Vec3 EndEffectorGlobal(const World& w, const SimConfig& cfg) {
  const Vec2 tip = ForwardKinematics(ToVec(w.arm.angle), cfg.manipulator_params.link_length);
  const Vec3 body = MountPoint(cfg.vehicle_params) + ArmAxisX() * tip.x() + ArmAxisY() * tip.y();
  return w.vehicle.position + BodyToGlobal(w.vehicle.attitude) * body;
}

TelemetryRecord MakeRecord(const World& w, const SimConfig& cfg, std::string_view mode,
                           const StepDiagnostics& diag) {
  TelemetryRecord r;
  const auto& v = w.vehicle;
  r.t = w.t;
  r.x = v.position.x();
  r.y = v.position.y();
  r.z = v.position.z();
  r.roll = v.roll();
  r.pitch = v.pitch();
  r.yaw = v.yaw();
  r.wheel_speed = v.wheel_speed;
  r.joint_angle = w.arm.angle;
  r.joint_rate = w.arm.rate;
  const SystemInput input = MergeCommands(w, w.human, w.automation, cfg);
  r.joint_rate_command = input.joints.rate;
  const Vec3 ee = EndEffectorGlobal(w, cfg);
  r.ee_x = ee.x();
  r.ee_y = ee.y();
  r.ee_z = ee.z();
  r.pressure = w.arm.pressure;
  r.flow = w.arm.flow;
  r.human_vx = w.human.end_effector.vx;
  r.human_vy = w.human.end_effector.vy;
  r.steering = input.wheels.steering_angle;
  r.drive_torque = w.automation.drive_torque;
  r.lateral_offset = w.automation.lateral_offset;
  r.mode = std::string(mode);
  r.clamp_events = diag.clamp_events;
  r.end_stop_events = diag.end_stop_events;
  r.max_state_delta = diag.max_state_delta;
  return r;
}

RealtimePacer::RealtimePacer(double step_size, int batch)
    : step_size_(step_size), batch_(std::max(batch, 1)) {
  Restart();
}

void RealtimePacer::Restart() {
  steps_ = 0;
  start_ = std::chrono::steady_clock::now();
}

void RealtimePacer::StepDone() {
  ++steps_;
  if (steps_ % batch_ != 0) return;
  using Clock = std::chrono::steady_clock;
  const auto deadline =
      start_ + std::chrono::duration_cast<Clock::duration>(
                   std::chrono::duration<double>(static_cast<double>(steps_) * step_size_));
  const auto now = Clock::now();
  if (now > deadline) {
    ++overruns_;
    return;
  }
  constexpr auto kSpinMargin = std::chrono::microseconds(300);
  if (deadline - now > kSpinMargin) std::this_thread::sleep_until(deadline - kSpinMargin);
  while (Clock::now() < deadline) {
  }
}

std::pair<double, double> MedianAndP99(std::vector<double> samples) {
  if (samples.empty()) return {0.0, 0.0};
  auto at = [&](double fraction) {
    const auto k = static_cast<std::size_t>(fraction * static_cast<double>(samples.size() - 1));
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k),
                     samples.end());
    return samples[k];
  };
  const double median = at(0.5);
  const double p99 = at(0.99);
  return {median, p99};
}

RunResult Run(World& w, CommandSource& source, const RunOptions& options, const SimConfig& cfg) {
  if (!(options.duration > 0.0)) throw std::invalid_argument("run: duration must be > 0");
  const long long steps = std::llround(options.duration / cfg.step_size);
  RunResult result;
  std::vector<double> step_times;
  step_times.reserve(static_cast<std::size_t>(steps));
  if (options.keep_log) {
    result.log.reserve(static_cast<std::size_t>(steps / cfg.telemetry_decimation + 1));
  }
  RealtimePacer pacer(cfg.step_size, cfg.telemetry_decimation);
  const auto wall_start = std::chrono::steady_clock::now();
  auto wall_end = wall_start;
  const double t0 = w.t;

  for (long long k = 0; k < steps; ++k) {
    const auto commands = source.Sample(w, cfg.step_size);
    StepResult r = StepWorld(w, commands.human, commands.automation, cfg);
    w = r.world;
    step_times.push_back(r.diagnostics.compute_seconds);
    result.clamp_events += r.diagnostics.clamp_events;
    result.end_stop_events += r.diagnostics.end_stop_events;
    if ((k + 1) % cfg.telemetry_decimation == 0) {
      TelemetryRecord rec = MakeRecord(w, cfg, source.ModeLabel(), r.diagnostics);
      if (options.on_record) options.on_record(rec);
      if (options.keep_log) result.log.push_back(std::move(rec));
    }
    // Wall time is taken when the last step has been computed, before the
    // pacer idles until its deadline.
    if (k + 1 == steps) wall_end = std::chrono::steady_clock::now();
    if (options.realtime) pacer.StepDone();
  }

  result.steps = steps;
  result.sim_time = w.t - t0;
  result.wall_time = std::chrono::duration<double>(wall_end - wall_start).count();
  result.real_time_factor = result.wall_time > 0.0 ? result.sim_time / result.wall_time : 0.0;
  std::tie(result.step_time_median, result.step_time_p99) = MedianAndP99(std::move(step_times));
  result.overruns = pacer.overruns();
  return result;
}

}  // namespace vmsim

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

#include "vmsim/manipulator.hpp"

#include <algorithm>
#include <cmath>

namespace vmsim {

Vec4 AbsoluteAngles(const Vec4& q) {
  Vec4 theta;
  double sum = 0.0;
  for (int i = 0; i < kJoints; ++i) {
    sum += q[i];
    theta[i] = sum;
  }
  return theta;
}

std::array<Vec2, kJoints> LinkComPositions(const Vec4& q, const ManipulatorParams& p) {
  const Vec4 theta = AbsoluteAngles(q);
  std::array<Vec2, kJoints> out;
  Vec2 joint = Vec2::Zero();
  for (int i = 0; i < kJoints; ++i) {
    const Vec2 dir(std::cos(theta[i]), std::sin(theta[i]));
    out[i] = joint + p.link_com[i] * dir;
    joint += p.link_length[i] * dir;
  }
  return out;
}

Mat24 LinkComJacobian(const Vec4& q, int link, const ManipulatorParams& p) {
  const Vec4 theta = AbsoluteAngles(q);
  Mat24 J = Mat24::Zero();
  // Column j collects the tangential contributions of every segment from
  // joint j up to the CoG of `link`.
  for (int j = 0; j <= link; ++j) {
    Vec2 col = Vec2::Zero();
    for (int k = j; k <= link; ++k) {
      const double len = (k == link) ? p.link_com[k] : p.link_length[k];
      col += len * Vec2(-std::sin(theta[k]), std::cos(theta[k]));
    }
    J.col(j) = col;
  }
  return J;
}

Mat4 MassMatrix(const Vec4& q, const ManipulatorParams& p) {
  Mat4 M = Mat4::Zero();
  for (int i = 0; i < kJoints; ++i) {
    const Mat24 J = LinkComJacobian(q, i, p);
    Vec4 angular = Vec4::Zero();
    angular.head(i + 1).setOnes();
    M += p.link_mass[i] * J.transpose() * J + p.link_inertia[i] * angular * angular.transpose();
  }
  return M;
}

namespace {

// CoG accelerations caused by joint rates alone (qdd = 0), arm plane.
std::array<Vec2, kJoints> CentripetalAccelerations(const Vec4& q, const Vec4& qd,
                                                   const ManipulatorParams& p) {
  const Vec4 theta = AbsoluteAngles(q);
  const Vec4 omega = AbsoluteAngles(qd);
  std::array<Vec2, kJoints> out;
  Vec2 joint = Vec2::Zero();
  for (int i = 0; i < kJoints; ++i) {
    const Vec2 radial(std::cos(theta[i]), std::sin(theta[i]));
    const double w2 = omega[i] * omega[i];
    out[i] = joint - p.link_com[i] * w2 * radial;
    joint -= p.link_length[i] * w2 * radial;
  }
  return out;
}

Vec3 ToBody(const Vec2& v) { return ArmAxisX() * v.x() + ArmAxisY() * v.y(); }
Vec2 ToArmPlane(const Vec3& v) { return {v.dot(ArmAxisX()), v.dot(ArmAxisY())}; }

// Apparent acceleration field acting on a point at `rho` (body frame,
// relative to the mount) in the moving chassis frame.
Vec3 EffectiveField(const Vec3& rho, const MountMotion& m) {
  return m.gravity - m.acceleration - m.angular_rate.cross(m.angular_rate.cross(rho));
}

}  // namespace

Vec4 VelocityProductTorques(const Vec4& q, const Vec4& qd, const ManipulatorParams& p) {
  const auto acc = CentripetalAccelerations(q, qd, p);
  Vec4 tau = Vec4::Zero();
  for (int i = 0; i < kJoints; ++i) {
    tau += p.link_mass[i] * LinkComJacobian(q, i, p).transpose() * acc[i];
  }
  return tau;
}

Vec4 GravityCouplingTorques(const Vec4& q, const MountMotion& mount,
                            const ManipulatorParams& p) {
  const auto com = LinkComPositions(q, p);
  Vec4 tau = Vec4::Zero();
  for (int i = 0; i < kJoints; ++i) {
    const Vec2 field = ToArmPlane(EffectiveField(ToBody(com[i]), mount));
    tau += p.link_mass[i] * LinkComJacobian(q, i, p).transpose() * field;
  }
  return tau;
}

LuGreParams JointFriction(const ManipulatorParams& p, int j) {
  return {p.bristle_stiffness[j], p.bristle_damping[j],  p.viscous_friction[j],
          p.coulomb_friction[j],  p.static_friction[j],  p.stribeck_velocity[j]};
}

double StribeckLevel(double v, const LuGreParams& f) {
  const double r = v / f.stribeck_velocity;
  return f.coulomb + (f.stiction - f.coulomb) * std::exp(-r * r);
}

FrictionOutput LuGreFriction(double v, double z, const LuGreParams& f) {
  FrictionOutput out;
  out.bristle_rate = v - f.sigma0 * std::abs(v) * z / StribeckLevel(v, f);
  out.torque = f.sigma0 * z + f.sigma1 * out.bristle_rate + f.sigma2 * v;
  return out;
}

double SteadyStateFriction(double v, const LuGreParams& f) {
  const double sign = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  return StribeckLevel(v, f) * sign + f.sigma2 * v;
}

CylinderGeometry Cylinder(double q, int j, const ManipulatorParams& p) {
  const double a = p.anchor_proximal[j];
  const double b = p.anchor_distal[j];
  const double angle = q + p.anchor_angle[j];
  CylinderGeometry g;
  g.length = std::sqrt(a * a + b * b - 2.0 * a * b * std::cos(angle));
  g.lever = a * b * std::sin(angle) / g.length;
  return g;
}

double ValveFlow(double pressure, double spool, int j, const ManipulatorParams& p) {
  // Positive spool connects supply to the chamber, negative connects it to tank.
  const double drop = spool >= 0.0 ? p.supply_pressure - pressure : pressure;
  const double eps = p.orifice_smoothing_pressure;
  const double root = drop / std::pow(drop * drop + eps * eps, 0.25);
  return p.valve_flow_gain[j] * spool * root;
}

ActuatorOutput HydraulicActuator(double pressure, double spool, double valve_command,
                                 double q, double qd, int j, const ManipulatorParams& p) {
  const CylinderGeometry cyl = Cylinder(q, j, p);
  const double stroke_origin = Cylinder(p.joint_lower[j], j, p).length;
  const double volume =
      p.dead_volume[j] + p.cylinder_area[j] * std::max(0.0, cyl.length - stroke_origin);

  ActuatorOutput out;
  out.spool_rate = (valve_command - spool) / p.valve_time_constant;
  out.flow = ValveFlow(pressure, spool, j, p);
  const double piston_speed = cyl.lever * qd;
  out.pressure_rate = p.bulk_modulus / volume * (out.flow - p.cylinder_area[j] * piston_speed);
  if ((pressure <= 0.0 && out.pressure_rate < 0.0) ||
      (pressure >= p.supply_pressure && out.pressure_rate > 0.0)) {
    out.pressure_rate = 0.0;
  }
  out.torque = (pressure - p.rod_side_pressure) * p.cylinder_area[j] * cyl.lever;
  return out;
}

double HoldingPressure(double torque, double q, int j, const ManipulatorParams& p) {
  const CylinderGeometry cyl = Cylinder(q, j, p);
  return p.rod_side_pressure + torque / (p.cylinder_area[j] * cyl.lever);
}

ValveCommand RateController(const ManipulatorState& s, const JointCommand& cmd,
                            const ManipulatorParams& p) {
  ValveCommand out;
  for (int j = 0; j < kJoints; ++j) {
    const double error = cmd.rate[j] - s.rate[j];
    const double raw =
        p.rate_feedforward[j] * cmd.rate[j] + p.rate_kp[j] * error + p.rate_ki[j] * s.integrator[j];
    const double sat = std::clamp(raw, -1.0, 1.0);
    out.command[j] = sat;
    const double unwind = p.rate_ki[j] > 0.0 ? p.anti_windup_gain * (sat - raw) / p.rate_ki[j] : 0.0;
    out.integrator_rate[j] = error + unwind;
  }
  return out;
}

double EndStopTorque(double q, double qd, int j, const ManipulatorParams& p) {
  const double over = q - p.joint_upper[j];
  const double under = p.joint_lower[j] - q;
  if (over > 0.0) {
    const double blend = std::min(over / p.end_stop_band, 1.0);
    return -p.end_stop_stiffness[j] * over - p.end_stop_damping[j] * blend * qd;
  }
  if (under > 0.0) {
    const double blend = std::min(under / p.end_stop_band, 1.0);
    return p.end_stop_stiffness[j] * under - p.end_stop_damping[j] * blend * qd;
  }
  return 0.0;
}

double EndStopEnergy(double q, int j, const ManipulatorParams& p) {
  const double pen = std::max({q - p.joint_upper[j], p.joint_lower[j] - q, 0.0});
  return 0.5 * p.end_stop_stiffness[j] * pen * pen;
}

Vec4 ArmAccelerations(const Vec4& q, const Vec4& qd, const Vec4& applied_torque,
                      const MountMotion& mount, const ManipulatorParams& p) {
  const Mat4 M = MassMatrix(q, p);
  const Vec4 rhs = applied_torque + GravityCouplingTorques(q, mount, p) -
                   VelocityProductTorques(q, qd, p);
  return M.llt().solve(rhs);
}

ActuationOutput ComputeActuation(const ManipulatorState& s, const JointCommand& cmd,
                                 const ManipulatorParams& p) {
  ActuationOutput out;
  const ValveCommand valve = RateController(s, cmd, p);
  for (int j = 0; j < kJoints; ++j) {
    const ActuatorOutput act =
        HydraulicActuator(s.pressure[j], s.spool[j], valve.command[j], s.angle[j], s.rate[j], j, p);
    const FrictionOutput fr = LuGreFriction(s.rate[j], s.bristle[j], JointFriction(p, j));
    out.torque[j] = act.torque - fr.torque + EndStopTorque(s.angle[j], s.rate[j], j, p);
    out.derivative.bristle[j] = fr.bristle_rate;
    out.derivative.pressure[j] = act.pressure_rate;
    out.derivative.spool[j] = act.spool_rate;
    out.derivative.integrator[j] = valve.integrator_rate[j];
    out.flow[j] = act.flow;
  }
  return out;
}

ManipulatorState ManipulatorDerivatives(const ManipulatorState& s, const JointCommand& cmd,
                                        const MountMotion& mount, const ManipulatorParams& p) {
  const ActuationOutput act = ComputeActuation(s, cmd, p);
  const Vec4 qdd = ArmAccelerations(ToVec(s.angle), ToVec(s.rate), act.torque, mount, p);
  ManipulatorState d = act.derivative;
  d.angle = s.rate;
  d.rate = ToArray(qdd);
  d.flow = act.flow;
  return d;
}

Wrench ChassisReactionWrench(const Vec4& q, const Vec4& qd, const Vec4& qdd,
                             const MountMotion& mount, const ManipulatorParams& p) {
  const auto com = LinkComPositions(q, p);
  const auto centripetal = CentripetalAccelerations(q, qd, p);
  const Vec4 alpha = AbsoluteAngles(qdd);
  Wrench w;
  for (int i = 0; i < kJoints; ++i) {
    const Vec3 rho = ToBody(com[i]);
    const Vec2 rel = LinkComJacobian(q, i, p) * qdd + centripetal[i];
    const Vec3 f = p.link_mass[i] * (EffectiveField(rho, mount) - ToBody(rel));
    w.force += f;
    w.torque += rho.cross(f) - p.link_inertia[i] * alpha[i] * ArmJointAxis();
  }
  return w;
}

double ArmEnergy(const ManipulatorState& s, const Vec3& gravity, const ManipulatorParams& p) {
  const Vec4 q = ToVec(s.angle);
  const Vec4 qd = ToVec(s.rate);
  double energy = 0.5 * qd.dot(MassMatrix(q, p) * qd);
  const auto com = LinkComPositions(q, p);
  for (int i = 0; i < kJoints; ++i) {
    energy -= p.link_mass[i] * gravity.dot(ToBody(com[i]));
    energy += 0.5 * p.bristle_stiffness[i] * s.bristle[i] * s.bristle[i];
    energy += EndStopEnergy(s.angle[i], i, p);
  }
  return energy;
}

ManipulatorState HoldingState(const JointArray& q, const MountMotion& mount,
                              const ManipulatorParams& p) {
  ManipulatorState s;
  s.angle = q;
  const Vec4 load = GravityCouplingTorques(ToVec(q), mount, p);
  for (int j = 0; j < kJoints; ++j) {
    s.pressure[j] = std::clamp(HoldingPressure(-load[j], q[j], j, p), 0.0, p.supply_pressure);
  }
  return s;
}

}  // namespace vmsim

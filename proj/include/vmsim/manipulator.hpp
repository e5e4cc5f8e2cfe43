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

// Hydraulic 4-joint boom. The links move in the chassis transverse plane. In
// the arm frame x points outward (body -y, the right-hand side) and y points
// up (body +z); joint angles are relative and positive counter-clockwise in
// that plane, so the joint axis is body -x.
//
// Rigid-body balance per joint:
//   M(q) qdd = T_hyd + T_fric + T_mech
// where T_mech collects gravity in the tilted chassis frame, the inertial load
// of the accelerating mount, the velocity-product terms of the chain and the
// virtual end stops.

#ifndef VMSIM_MANIPULATOR_HPP_
#define VMSIM_MANIPULATOR_HPP_

#include "vmsim/config.hpp"
#include "vmsim/types.hpp"
#include "vmsim/vehicle.hpp"

namespace vmsim {

struct ManipulatorState {
  JointArray angle{};       // rad
  JointArray rate{};        // rad/s
  JointArray bristle{};     // LuGre bristle deflection, rad
  JointArray pressure{};    // cap-side chamber pressure, Pa
  JointArray spool{};       // normalized valve spool position, [-1, 1]
  JointArray integrator{};  // low-level rate controller integral, rad
  JointArray flow{};        // oil flow into the chamber, m^3/s (algebraic)
};

// Desired joint rates, the low-level controller set point.
struct JointCommand {
  JointArray rate{};
};

// Motion of the mount as seen by the arm, all in the chassis body frame.
struct MountMotion {
  Vec3 gravity = Vec3::Zero();       // gravity vector, m/s^2
  Vec3 acceleration = Vec3::Zero();  // inertial acceleration of the mount point
  Vec3 angular_rate = Vec3::Zero();
};

// Arm-plane axes expressed in the chassis body frame.
inline Vec3 ArmAxisX() { return {0.0, -1.0, 0.0}; }
inline Vec3 ArmAxisY() { return {0.0, 0.0, 1.0}; }
inline Vec3 ArmJointAxis() { return {-1.0, 0.0, 0.0}; }

// --- rigid chain ---------------------------------------------------------

// Absolute link angles (cumulative sums of joint angles).
Vec4 AbsoluteAngles(const Vec4& q);

// Link CoG positions in the arm plane, relative to joint 1.
std::array<Vec2, kJoints> LinkComPositions(const Vec4& q, const ManipulatorParams& p);

// Jacobian of link `link`'s CoG position with respect to q (2x4).
Mat24 LinkComJacobian(const Vec4& q, int link, const ManipulatorParams& p);

Mat4 MassMatrix(const Vec4& q, const ManipulatorParams& p);

// Velocity-product torques C(q, qd) qd (sign: these appear on the left-hand
// side, M qdd + C qd = ...).
Vec4 VelocityProductTorques(const Vec4& q, const Vec4& qd, const ManipulatorParams& p);

// Joint torques from gravity and the accelerating, rotating mount. Only the
// mount linear acceleration, angular rate and the gravity direction enter;
// chassis angular acceleration is neglected.
Vec4 GravityCouplingTorques(const Vec4& q, const MountMotion& mount,
                            const ManipulatorParams& p);

// --- friction ------------------------------------------------------------

struct LuGreParams {
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double coulomb = 0.0;
  double stiction = 0.0;
  double stribeck_velocity = 1.0;
};

LuGreParams JointFriction(const ManipulatorParams& p, int joint);

// Stribeck curve g(v) = Fc + (Fs - Fc) exp(-(v/vs)^2).
double StribeckLevel(double velocity, const LuGreParams& f);

struct FrictionOutput {
  double torque = 0.0;         // opposes motion; enters the balance with a minus sign
  double bristle_rate = 0.0;
};

// LuGre: zd = v - sigma0 |v| z / g(v); T = sigma0 z + sigma1 zd + sigma2 v.
FrictionOutput LuGreFriction(double velocity, double bristle, const LuGreParams& f);

// Closed-form steady sliding torque g(v) sgn(v) + sigma2 v.
double SteadyStateFriction(double velocity, const LuGreParams& f);

// --- hydraulics ----------------------------------------------------------

struct CylinderGeometry {
  double length = 0.0;  // m
  double lever = 0.0;   // dL/dq, m/rad
};

CylinderGeometry Cylinder(double q, int joint, const ManipulatorParams& p);

struct ActuatorOutput {
  double torque = 0.0;         // N m on the joint
  double flow = 0.0;           // m^3/s into the chamber
  double pressure_rate = 0.0;  // Pa/s
  double spool_rate = 0.0;     // 1/s
};

// Valve motor (first-order lag), orifice flow smoothed near zero pressure drop,
// compressible oil volume, and the resulting joint torque
// (p - p_rod) A dL/dq. Pressure rates that would push the state outside
// [0, supply] are zeroed.
ActuatorOutput HydraulicActuator(double pressure, double spool, double valve_command,
                                 double q, double qd, int joint, const ManipulatorParams& p);

// Smoothed orifice flow for a given spool position and chamber pressure.
double ValveFlow(double pressure, double spool, int joint, const ManipulatorParams& p);

// Chamber pressure that produces `torque` at angle q (not clamped).
double HoldingPressure(double torque, double q, int joint, const ManipulatorParams& p);

// --- controller and end stops --------------------------------------------

// PI rate controller with feed-forward and back-calculation anti-windup.
struct ValveCommand {
  JointArray command{};          // saturated to [-1, 1]
  JointArray integrator_rate{};
};

ValveCommand RateController(const ManipulatorState& s, const JointCommand& cmd,
                            const ManipulatorParams& p);

// Penalty torque that pushes a joint back inside its limits (zero inside).
double EndStopTorque(double q, double qd, int joint, const ManipulatorParams& p);
double EndStopEnergy(double q, int joint, const ManipulatorParams& p);

// --- assembled dynamics --------------------------------------------------

// Joint accelerations for a given actuator-side torque (hydraulic + friction
// + end stops) and mount motion.
Vec4 ArmAccelerations(const Vec4& q, const Vec4& qd, const Vec4& applied_torque,
                      const MountMotion& mount, const ManipulatorParams& p);

// Torque sum T_hyd + T_fric + end stops, and the non-mechanical derivatives.
struct ActuationOutput {
  Vec4 torque = Vec4::Zero();
  ManipulatorState derivative;  // angle/rate entries left zero
  JointArray flow{};
};

ActuationOutput ComputeActuation(const ManipulatorState& s, const JointCommand& cmd,
                                 const ManipulatorParams& p);

// Full derivative for a prescribed mount motion.
ManipulatorState ManipulatorDerivatives(const ManipulatorState& s, const JointCommand& cmd,
                                        const MountMotion& mount, const ManipulatorParams& p);

// Force and torque the arm exerts on the chassis at the mount point (body
// frame, torque about the mount): static weight plus d'Alembert terms of the
// link accelerations.
Wrench ChassisReactionWrench(const Vec4& q, const Vec4& qd, const Vec4& qdd,
                             const MountMotion& mount, const ManipulatorParams& p);

// Kinetic + gravitational + bristle + end-stop energy for a mount at rest with
// the given gravity vector (body frame).
double ArmEnergy(const ManipulatorState& s, const Vec3& gravity, const ManipulatorParams& p);

// Holding state at angles q: rates zero, spool closed, pressures balancing the
// static load. Pressures are clamped to [0, supply].
ManipulatorState HoldingState(const JointArray& q, const MountMotion& mount,
                              const ManipulatorParams& p);

}  // namespace vmsim

#endif  // VMSIM_MANIPULATOR_HPP_

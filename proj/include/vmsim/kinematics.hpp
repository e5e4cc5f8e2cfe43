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

// Planar forward kinematics and velocity-level inverse kinematics of the
// boom. Positions are in the arm frame (origin at joint 1, x outward, y up).

#ifndef VMSIM_KINEMATICS_HPP_
#define VMSIM_KINEMATICS_HPP_

#include "vmsim/config.hpp"
#include "vmsim/manipulator.hpp"
#include "vmsim/types.hpp"

namespace vmsim {

// Desired end-effector velocity in the arm frame, m/s.
struct EndEffectorCommand {
  double vx = 0.0;
  double vy = 0.0;
};

Vec2 ForwardKinematics(const Vec4& q, const JointArray& link_length);

// d(x, y)/dq, 2x4.
Mat24 Jacobian(const Vec4& q, const JointArray& link_length);

// Damped least squares: qd = J^T (J J^T + lambda^2 I)^-1 v, then each joint
// clamped to its rate limit. ||qd|| <= ||v|| / (2 lambda) for every q.
JointCommand VelocityIk(const Vec4& q, const EndEffectorCommand& cmd, double damping,
                        const JointArray& link_length, const JointArray& rate_limit);

// Convenience overload reading lengths, damping and limits from the params.
JointCommand VelocityIk(const Vec4& q, const EndEffectorCommand& cmd,
                        const ManipulatorParams& p);

// Scales `cmd` down so that its magnitude does not exceed `limit`.
EndEffectorCommand ClampCommand(const EndEffectorCommand& cmd, double limit);

}  // namespace vmsim

#endif  // VMSIM_KINEMATICS_HPP_

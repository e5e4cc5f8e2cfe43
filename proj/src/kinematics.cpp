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

#include "vmsim/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace vmsim {

Vec2 ForwardKinematics(const Vec4& q, const JointArray& link_length) {
  Vec2 pos = Vec2::Zero();
  double theta = 0.0;
  for (int i = 0; i < kJoints; ++i) {
    theta += q[i];
    pos += link_length[i] * Vec2(std::cos(theta), std::sin(theta));
  }
  return pos;
}

Mat24 Jacobian(const Vec4& q, const JointArray& link_length) {
  Mat24 J = Mat24::Zero();
  double theta = 0.0;
  for (int i = 0; i < kJoints; ++i) {
    theta += q[i];
    const Vec2 tangent = link_length[i] * Vec2(-std::sin(theta), std::cos(theta));
    // Segment i moves with every joint up to and including i.
    for (int j = 0; j <= i; ++j) J.col(j) += tangent;
  }
  return J;
}

JointCommand VelocityIk(const Vec4& q, const EndEffectorCommand& cmd, double damping,
                        const JointArray& link_length, const JointArray& rate_limit) {
  const Mat24 J = Jacobian(q, link_length);
  const Eigen::Matrix2d A = J * J.transpose() + damping * damping * Eigen::Matrix2d::Identity();
  const Vec4 qd = J.transpose() * A.llt().solve(Vec2(cmd.vx, cmd.vy));
  JointCommand out;
  for (int j = 0; j < kJoints; ++j) out.rate[j] = std::clamp(qd[j], -rate_limit[j], rate_limit[j]);
  return out;
}

JointCommand VelocityIk(const Vec4& q, const EndEffectorCommand& cmd,
                        const ManipulatorParams& p) {
  return VelocityIk(q, ClampCommand(cmd, p.ee_velocity_limit), p.ik_damping, p.link_length,
                    p.joint_rate_limit);
}

EndEffectorCommand ClampCommand(const EndEffectorCommand& cmd, double limit) {
  const double norm = std::hypot(cmd.vx, cmd.vy);
  if (!(norm > limit)) return cmd;
  const double scale = limit / norm;
  return {cmd.vx * scale, cmd.vy * scale};
}

}  // namespace vmsim

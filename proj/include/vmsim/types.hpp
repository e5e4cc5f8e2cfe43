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

// Shared constants, small vector aliases and the exception hierarchy.

#ifndef VMSIM_TYPES_HPP_
#define VMSIM_TYPES_HPP_

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vmsim {

inline constexpr int kWheels = 4;
inline constexpr int kAxles = 2;
inline constexpr int kJoints = 4;

// Wheel order used everywhere: front-left, front-right, rear-left, rear-right.
enum class Wheel : int { kFrontLeft = 0, kFrontRight = 1, kRearLeft = 2, kRearRight = 3 };

inline constexpr int AxleOf(int wheel) { return wheel / 2; }
// +1 for the left side (positive body y), -1 for the right side.
inline constexpr double SideOf(int wheel) { return (wheel % 2 == 0) ? 1.0 : -1.0; }

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat24 = Eigen::Matrix<double, 2, 4>;

using JointArray = std::array<double, kJoints>;
using WheelArray = std::array<double, kWheels>;
using AxleArray = std::array<double, kAxles>;

inline Vec4 ToVec(const JointArray& a) { return Vec4(a[0], a[1], a[2], a[3]); }
inline JointArray ToArray(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

// Malformed or invalid configuration document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite derivative or state produced during integration.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t component)
      : std::runtime_error(what), component_(component) {}
  std::size_t component() const { return component_; }

 private:
  std::size_t component_;
};

// The state left the modeled regime (e.g. roll or pitch beyond +-pi/2).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vmsim

#endif  // VMSIM_TYPES_HPP_

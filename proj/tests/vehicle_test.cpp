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


#include <cmath>
#include <gtest/gtest.h>
#include <numbers>
#include <vector>

#include "vmsim/engine.hpp"
#include "vmsim/integrator.hpp"
#include "vmsim/vehicle.hpp"

namespace vmsim {
namespace {

constexpr double kG = 9.81;

VehicleState Settled(const VehicleParams& p) {
  return SettleVehicle(p, kG, [](const VehicleState&) { return Wrench{}; }, VehicleState{});
}

// Integrates the vehicle alone (no arm load) with inputs held constant.
VehicleState Simulate(VehicleState s, const WheelInput& in, const VehicleParams& p,
                      double duration, double h = 0.0005) {
  std::vector<double> x(kSystemStates, 0.0);
  ManipulatorState unused;
  PackState(s, unused, x);
  x.resize(kVehicleStates);
  auto f = [&](double, std::span<const double> y, std::span<double> dy) {
    std::vector<double> full(y.begin(), y.end());
    full.resize(kSystemStates, 0.0);
    VehicleState v;
    ManipulatorState a;
    UnpackState(full, v, a);
    const VehicleState d = VehicleDerivatives(v, in, Wrench{}, p, kG);
    std::vector<double> packed(kSystemStates, 0.0);
    PackState(d, a, packed);
    std::copy_n(packed.begin(), kVehicleStates, dy.begin());
  };
  Rk4Workspace ws;
  const long long steps = std::llround(duration / h);
  for (long long k = 0; k < steps; ++k) Rk4Step(f, std::span<double>(x), k * h, h, ws);
  x.resize(kSystemStates, 0.0);
  UnpackState(x, s, unused);
  return s;
}

std::vector<double> Flatten(const VehicleState& s) {
  std::vector<double> x(kSystemStates, 0.0);
  PackState(s, ManipulatorState{}, x);
  x.resize(kVehicleStates);
  return x;
}

// --- slip, tire force, wheel spin -------------------------------------------

TEST(TireSlipTest, RollingWithoutSlipIsZero) { EXPECT_EQ(TireSlip(10, 20, 0.5, 0.01), 0.0); }

TEST(TireSlipTest, BrakingWheel) { EXPECT_DOUBLE_EQ(TireSlip(10, 18, 0.5, 0.01), 0.1); }

TEST(TireSlipTest, StandstillIsFinite) { EXPECT_EQ(TireSlip(0, 0, 0.5, 0.5), 0.0); }

TEST(TireSlipTest, TotalAndBoundedOnGrid) {
  const double r = 0.5, vn = 0.01;
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      const double v = -20.0 + 0.1 * i;
      const double w = -40.0 + 0.2 * j;
      const double s = TireSlip(v, w, r, vn);
      ASSERT_TRUE(std::isfinite(s)) << v << " " << w;
      ASSERT_LE(std::abs(s), (std::abs(v) + std::abs(w * r)) / vn + 1e-12);
    }
  }
}

TEST(TireForceTest, LinearAndOdd) {
  EXPECT_EQ(TireForce(1e5, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(TireForce(1e5, 0.1), 1e4);
  EXPECT_DOUBLE_EQ(TireForce(1e5, -0.1), -1e4);
}

TEST(WheelAccelTest, Examples) {
  EXPECT_EQ(WheelAccel(0, 0.5, 0, 20), 0.0);
  EXPECT_DOUBLE_EQ(WheelAccel(100, 0.5, 50, 20), 5.0);
  // Drive torque balanced by the tire force.
  EXPECT_DOUBLE_EQ(WheelAccel(-200, 0.5, 100, 20), 0.0);
}

// --- chassis --------------------------------------------------------------

TEST(VehicleTest, SettledStateIsAnEquilibrium) {
  const VehicleParams p;
  const VehicleState s = Settled(p);
  const VehicleState d = VehicleDerivatives(s, WheelInput{}, Wrench{}, p, kG);
  for (double v : Flatten(d)) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(VehicleTest, DriveTorqueAtRestSpinsWheelsAndPushesForward) {
  const VehicleParams p;
  const VehicleState s = Settled(p);
  WheelInput in;
  in.drive_torque.fill(500.0);
  const VehicleState d = VehicleDerivatives(s, in, Wrench{}, p, kG);
  for (double wd : d.wheel_speed) EXPECT_GT(wd, 0.0);

  const VehicleState later = Simulate(s, in, p, 0.2);
  EXPECT_GT(later.velocity.x(), 0.0);
  const VehicleState dl = VehicleDerivatives(later, in, Wrench{}, p, kG);
  EXPECT_GT(dl.velocity.x(), 0.0);
}

TEST(VehicleTest, OffsetDownwardLoadRollsTowardItsSide) {
  const VehicleParams p;
  const VehicleState s = Settled(p);
  const double force = 5000.0;
  Wrench w;
  w.force = Vec3(0.0, 0.0, -force);
  const VehicleState d0 = VehicleDerivatives(s, WheelInput{}, Wrench{}, p, kG);
  const VehicleState d1 = VehicleDerivatives(s, WheelInput{}, w, p, kG);
  // Moment of F = (0, 0, -f) at the mount r about the CoG: the x component of
  // r x F is r_y F_z - r_z F_y = -r_y f, positive for a right-side mount.
  const double r_y = p.manipulator_mount[1];
  const double expected_roll_accel = -r_y * force / p.chassis_inertia[0];
  EXPECT_GT(expected_roll_accel, 0.0);
  EXPECT_NEAR(d1.angular_rate.x() - d0.angular_rate.x(), expected_roll_accel,
              1e-9 * expected_roll_accel);
  EXPECT_NEAR(d1.velocity.z() - d0.velocity.z(), -force / p.chassis_mass, 1e-12);
}

TEST(VehicleTest, LateralArmWeightGivesSteadyRoll) {
  const VehicleParams p;
  const VehicleState s = SettleVehicle(
      p, kG,
      [](const VehicleState&) {
        Wrench w;
        w.force = Vec3(0.0, 0.0, -1850.0 * kG);
        w.torque = Vec3(1850.0 * kG * 2.0, 0.0, 0.0);
        return w;
      },
      VehicleState{});
  EXPECT_GT(s.roll(), 0.01);
}

TEST(VehicleTest, StaticSettlingMatchesSpringRate) {
  const VehicleParams p;
  VehicleState s = Settled(p);
  s.position.z() += 0.05;
  s.attitude[0] = 0.02;
  s.attitude[1] = -0.01;
  const VehicleState end = Simulate(s, WheelInput{}, p, 10.0);
  const VehicleState d = VehicleDerivatives(end, WheelInput{}, Wrench{}, p, kG);
  EXPECT_LT(std::abs(d.velocity.z()), 1e-4);
  EXPECT_LT(std::abs(d.angular_rate.x()), 1e-4);
  EXPECT_LT(std::abs(end.velocity.z()), 1e-5);
  // Four springs share the sprung weight.
  const double total_stiffness = 2.0 * (p.suspension_stiffness[0] + p.suspension_stiffness[1]);
  const double expected = p.chassis_mass * kG / total_stiffness;
  EXPECT_NEAR(MeanSuspensionCompression(end, p), expected, 0.01 * expected);
}

VehicleState Mirror(const VehicleState& s) {
  VehicleState m = s;
  m.position.y() = -s.position.y();
  m.attitude[0] = -s.attitude[0];
  m.attitude[2] = -s.attitude[2];
  m.velocity.y() = -s.velocity.y();
  m.angular_rate.x() = -s.angular_rate.x();
  m.angular_rate.z() = -s.angular_rate.z();
  m.wheel_speed = {s.wheel_speed[1], s.wheel_speed[0], s.wheel_speed[3], s.wheel_speed[2]};
  for (int a = 0; a < kAxles; ++a) {
    m.axle_roll[a] = -s.axle_roll[a];
    m.axle_roll_rate[a] = -s.axle_roll_rate[a];
  }
  return m;
}

TEST(VehicleTest, MirroredInputsMirrorTheTrajectory) {
  const VehicleParams p;
  VehicleState s = Settled(p);
  s.velocity.x() = 3.0;
  s.wheel_speed.fill(3.0 / p.wheel_radius);
  s.position.y() = 0.3;
  s.attitude[2] = 0.05;
  WheelInput in;
  in.steering_angle = 0.1;
  in.drive_torque = {100.0, 200.0, 50.0, 80.0};
  WheelInput mirrored_in;
  mirrored_in.steering_angle = -0.1;
  mirrored_in.drive_torque = {200.0, 100.0, 80.0, 50.0};

  const auto a = Flatten(Mirror(Simulate(s, in, p, 2.0)));
  const auto b = Flatten(Simulate(Mirror(s), mirrored_in, p, 2.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i], b[i], 1e-9 * std::max(1.0, std::abs(a[i]))) << "component " << i;
  }
}

TEST(VehicleTest, RolloverIsOutsideTheModel) {
  const VehicleParams p;
  VehicleState s = Settled(p);
  s.attitude[0] = std::numbers::pi / 2.0;
  EXPECT_THROW(VehicleDerivatives(s, WheelInput{}, Wrench{}, p, kG), DomainError);
  s.attitude[0] = 0.0;
  s.attitude[1] = -std::numbers::pi / 2.0;
  EXPECT_THROW(VehicleDerivatives(s, WheelInput{}, Wrench{}, p, kG), DomainError);
}

}  // namespace
}  // namespace vmsim

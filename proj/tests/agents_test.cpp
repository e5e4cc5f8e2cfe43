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

#include "vmsim/agents.hpp"

namespace vmsim {
namespace {

TEST(DesignModelTest, DimensionsAndWeights) {
  const SimConfig cfg;
  const LqParams p = BuildDesignModel(cfg, 10.0);
  EXPECT_EQ(p.a.rows(), 4);
  EXPECT_EQ(p.a.cols(), 4);
  EXPECT_EQ(p.b_h.rows(), 4);
  EXPECT_EQ(p.b_h.cols(), 2);
  EXPECT_EQ(p.b_a.cols(), 1);
  EXPECT_NO_THROW(CheckLqParams(p));
  EXPECT_TRUE(IsStabilizable(p.a, p.b_h));
  // The vehicle loop is closed by the automation's steering law: stable on its own.
  Eigen::EigenSolver<Matrix> eig(p.a.topLeftCorner(2, 2));
  for (int i = 0; i < 2; ++i) EXPECT_LT(eig.eigenvalues()[i].real(), 0.0);
}

TEST(HumanModelTest, ZeroErrorGivesZeroCommand) {
  const SimConfig cfg;
  const HumanModel human(cfg, BuildValidationScenario(cfg));
  const Vector u = LqInput(human.schedule(), 0, Vector::Zero(4), Vector::Zero(1), Vector());
  EXPECT_EQ(u, Vector::Zero(2));
}

TEST(HumanModelTest, CommandsOpposeTheToolError) {
  const SimConfig cfg;
  const HumanModel human(cfg, BuildValidationScenario(cfg));
  Vector x = Vector::Zero(4);
  x[2] = 0.1;  // tool left of its reference
  EXPECT_LT(LqInput(human.schedule(), 0, x, Vector::Zero(1), Vector())[0], 0.0);
  x = Vector::Zero(4);
  x[3] = 0.1;  // tool above its reference
  EXPECT_LT(LqInput(human.schedule(), 0, x, Vector::Zero(1), Vector())[1], 0.0);
  // A leftward reference shift of the vehicle drags the tool left too; the
  // operator anticipates it by moving right.
  EXPECT_LT(LqInput(human.schedule(), 0, Vector::Zero(4), Vector::Ones(1), Vector())[0], 0.0);
}

TEST(HumanModelTest, HoldsTheLastGainBeyondTheHorizon) {
  SimConfig cfg;
  cfg.human_model_params.horizon = 1.0;
  const Scenario s = BuildValidationScenario(cfg);
  const HumanModel human(cfg, s);
  World w = InitialWorld(cfg, 0.0);
  w.t = 0.5;
  human.Command(w, 0.0);
  EXPECT_FALSE(human.held_last_gain());
  w.t = 5.0;
  const OperatorCommand cmd = human.Command(w, 0.0);
  EXPECT_TRUE(human.held_last_gain());
  EXPECT_EQ(cmd.source, CommandSourceKind::kHumanModel);
}

TEST(RoadRateToArmTest, LevelVehicleOnStraightRoad) {
  const SimConfig cfg;
  const World w = InitialWorld(cfg, 0.0);
  // The boom points to the right, so moving the tool left pulls it in.
  const EndEffectorCommand left = RoadRateToArm(0.1, 0.0, 0.0, w, cfg);
  EXPECT_NEAR(left.vx, -0.1, 1e-2);
  const EndEffectorCommand up = RoadRateToArm(0.0, 0.1, 0.0, w, cfg);
  EXPECT_NEAR(up.vy, 0.1, 1e-2);
  const EndEffectorCommand fast = RoadRateToArm(5.0, 5.0, 0.0, w, cfg);
  EXPECT_LE(std::hypot(fast.vx, fast.vy),
            cfg.manipulator_params.ee_velocity_limit * (1.0 + 1e-12));
}

TEST(CooperativeOffsetTest, ZeroSignAndSaturation) {
  const AutomationParams p;
  EXPECT_EQ(CooperativeOffset(0.0, p), 0.0);
  // Tool stuck left of its reference: shift the vehicle right, and vice versa.
  EXPECT_LT(CooperativeOffset(0.05, p), 0.0);
  EXPECT_GT(CooperativeOffset(-0.05, p), 0.0);
  EXPECT_NEAR(CooperativeOffset(-0.01, p), p.cooperative_gain * 0.01, 1e-15);
  EXPECT_EQ(CooperativeOffset(-100.0, p), p.cooperative_saturation);
  EXPECT_EQ(CooperativeOffset(100.0, p), -p.cooperative_saturation);
}

TEST(AutomationTest, ModesDifferOnlyByTheShift) {
  const SimConfig cfg;
  const Scenario s = BuildValidationScenario(cfg);
  World w = InitialWorld(cfg, 2.0);
  w.vehicle.position.x() = 47.0;  // tool reference stepped out, tool still inside
  AutomationController coop(cfg, s, ControlMode::kCooperative);
  AutomationController plain(cfg, s, ControlMode::kNoncooperative);
  const OperatorCommand a = coop.Command(w, cfg.step_size);
  const OperatorCommand b = plain.Command(w, cfg.step_size);
  const DesignState d = ExtractDesignState(w, s, cfg);
  EXPECT_EQ(b.lateral_offset, 0.0);
  EXPECT_EQ(a.lateral_offset, CooperativeOffset(d.tool_lateral, cfg.automation_params));
  EXPECT_NE(a.lateral_offset, 0.0);
  EXPECT_NEAR(a.steering - b.steering, cfg.automation_params.lateral_gain * a.lateral_offset,
              1e-12);
  EXPECT_EQ(a.drive_torque, b.drive_torque);
}

TEST(AutomationTest, ModesAgreeWhenTheToolIsOnTrack) {
  const SimConfig cfg;
  const Scenario s = BuildValidationScenario(cfg);
  World w = InitialWorld(cfg, 2.0);
  w.vehicle.position.x() = 5.0;
  // Slide the whole machine sideways until the tool sits on its reference.
  w.vehicle.position.y() -= ExtractDesignState(w, s, cfg).tool_lateral;
  ASSERT_NEAR(ExtractDesignState(w, s, cfg).tool_lateral, 0.0, 1e-12);
  AutomationController coop(cfg, s, ControlMode::kCooperative);
  AutomationController plain(cfg, s, ControlMode::kNoncooperative);
  const OperatorCommand a = coop.Command(w, cfg.step_size);
  const OperatorCommand b = plain.Command(w, cfg.step_size);
  EXPECT_NEAR(a.lateral_offset, 0.0, 1e-10);
  EXPECT_NEAR(a.steering, b.steering, 1e-10);
}

TEST(AutomationTest, RegulatesTheReferenceSpeed) {
  const SimConfig cfg;
  const Scenario s = BuildValidationScenario(cfg);
  World w = InitialWorld(cfg, 0.5);
  ScenarioCommandSource source(cfg, s, ControlMode::kNoncooperative, false);
  RunOptions options;
  options.duration = 22.0;
  options.keep_log = false;
  vmsim::Run(w, source, options, cfg);
  EXPECT_NEAR(w.vehicle.velocity.x(), s.params.speed, 0.05 * s.params.speed);
  EXPECT_NEAR(w.vehicle.position.y(), ReferenceAt(s, w.vehicle.position.x()).vehicle_lateral,
              0.05);
}

TEST(HumanModelTest, ClosedLoopBeatsDoingNothing) {
  const SimConfig cfg;
  const Scenario s = BuildValidationScenario(cfg);
  RunOptions options;
  options.duration = 40.0;
  double rms[2];
  for (bool human : {false, true}) {
    World w = InitialWorld(cfg, s.params.speed);
    ScenarioCommandSource source(cfg, s, ControlMode::kNoncooperative, human);
    const RunResult r = vmsim::Run(w, source, options, cfg);
    rms[human] = ComputeTrackingMetrics(r.log, s).total.manipulator_rms;
  }
  EXPECT_LT(rms[1], rms[0]);
  EXPECT_LT(rms[1], 0.5 * rms[0]);
}

}  // namespace
}  // namespace vmsim

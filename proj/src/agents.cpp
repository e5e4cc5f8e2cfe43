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

#include "vmsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vmsim {
namespace {

double WrapAngle(double a) {
  return std::remainder(a, 2.0 * std::numbers::pi);
}

References ClampedReference(const Scenario& s, double x) {
  return ReferenceAt(s, std::clamp(x, 0.0, s.params.length));
}

// Mass the drive torque accelerates, including the wheels' spin inertia.
double DrivenMass(const SimConfig& cfg) {
  const auto& vp = cfg.vehicle_params;
  double m = vp.chassis_mass + vp.unsprung_mass[0] + vp.unsprung_mass[1];
  for (double link : cfg.manipulator_params.link_mass) m += link;
  return m + kWheels * vp.wheel_inertia / (vp.wheel_radius * vp.wheel_radius);
}

}  // namespace

LqParams BuildDesignModel(const SimConfig& cfg, double horizon) {
  const auto& hp = cfg.human_model_params;
  const auto& ap = cfg.automation_params;
  const double v = cfg.scenario_params.speed;
  const double wheelbase = cfg.vehicle_params.wheelbase();

  LqParams p;
  p.a = Matrix::Zero(4, 4);
  p.a(0, 1) = v;
  p.a(1, 0) = -v / wheelbase * ap.lateral_gain;
  p.a(1, 1) = -v / wheelbase * ap.heading_gain;
  p.b_h = Matrix::Zero(4, 2);
  p.b_h(2, 0) = 1.0;
  p.b_h(3, 1) = 1.0;
  p.b_a = Matrix::Zero(4, 1);
  p.b_a(1, 0) = v / wheelbase;

  Vector lateral = Vector::Zero(4);
  lateral << 1.0, 0.0, 1.0, 0.0;
  p.q = hp.weight_lateral * lateral * lateral.transpose();
  p.q(3, 3) += hp.weight_height;
  p.r_hh = Matrix::Zero(2, 2);
  p.r_hh(0, 0) = hp.weight_input_lateral;
  p.r_hh(1, 1) = hp.weight_input_vertical;
  p.r_ha = Matrix::Constant(1, 1, hp.weight_automation);
  p.horizon = horizon;
  p.time_step = hp.gain_step;
  return p;
}

Vector DesignState::AsVector() const {
  Vector x(4);
  x << vehicle_lateral, heading, tool_relative, tool_height;
  return x;
}

DesignState ExtractDesignState(const World& w, const Scenario& s, const SimConfig& cfg) {
  DesignState d;
  const References ref = ClampedReference(s, w.vehicle.position.x());
  d.vehicle_lateral = (w.vehicle.position.y() - ref.vehicle_lateral) * std::cos(ref.road_heading);
  d.heading = WrapAngle(w.vehicle.yaw() - ref.vehicle_heading);

  const Vec3 tool = EndEffectorGlobal(w, cfg);
  const References tool_ref = ClampedReference(s, tool.x());
  d.tool_lateral = (tool.y() - tool_ref.manipulator_lateral) * std::cos(tool_ref.road_heading);
  d.tool_relative = d.tool_lateral - d.vehicle_lateral;
  d.tool_height = tool.z() - tool_ref.tool_height;
  return d;
}

EndEffectorCommand RoadRateToArm(double lateral_rate, double vertical_rate, double road_heading,
                                 const World& w, const SimConfig& cfg) {
  const Vec3 global(-std::sin(road_heading) * lateral_rate, std::cos(road_heading) * lateral_rate,
                    vertical_rate);
  const Vec3 body = BodyToGlobal(w.vehicle.attitude).transpose() * global;
  const EndEffectorCommand cmd{body.dot(ArmAxisX()), body.dot(ArmAxisY())};
  return ClampCommand(cmd, cfg.manipulator_params.ee_velocity_limit);
}

HumanModel::HumanModel(const SimConfig& cfg, const Scenario& scenario)
    : cfg_(cfg), scenario_(scenario) {
  const double horizon = cfg.human_model_params.horizon > 0.0 ? cfg.human_model_params.horizon
                                                               : scenario.duration;
  schedule_ = SolveLqHuman(BuildDesignModel(cfg, horizon));
}

OperatorCommand HumanModel::Command(const World& w, double automation_input) const {
  if (w.t > schedule_.horizon()) held_last_gain_ = true;
  const DesignState d = ExtractDesignState(w, scenario_, cfg_);
  const Vector u = LqInput(schedule_, schedule_.IndexAt(w.t), d.AsVector(),
                           Vector::Constant(1, automation_input), Vector());
  const Vec3 tool = EndEffectorGlobal(w, cfg_);
  const double heading = ClampedReference(scenario_, tool.x()).road_heading;
  OperatorCommand cmd;
  cmd.source = CommandSourceKind::kHumanModel;
  cmd.end_effector = RoadRateToArm(u[0], u[1], heading, w, cfg_);
  return cmd;
}

double CooperativeOffset(double tool_lateral_error, const AutomationParams& p) {
  const double sat = p.cooperative_saturation;
  return std::clamp(-p.cooperative_gain * tool_lateral_error, -sat, sat);
}

AutomationController::AutomationController(const SimConfig& cfg, const Scenario& scenario,
                                           ControlMode mode)
    : cfg_(cfg), scenario_(scenario), mode_(mode) {}

OperatorCommand AutomationController::Command(const World& w, double step_size) {
  const auto& ap = cfg_.automation_params;
  const auto& vp = cfg_.vehicle_params;
  const References ref = ClampedReference(scenario_, w.vehicle.position.x());
  const DesignState d = ExtractDesignState(w, scenario_, cfg_);

  OperatorCommand cmd;
  cmd.source = CommandSourceKind::kAutomation;
  cmd.lateral_offset =
      mode_ == ControlMode::kCooperative ? CooperativeOffset(d.tool_lateral, ap) : 0.0;
  cmd.steering = vp.wheelbase() * ref.curvature -
                 ap.lateral_gain * (d.vehicle_lateral - cmd.lateral_offset) -
                 ap.heading_gain * d.heading;

  const double speed_error = ref.speed - w.vehicle.velocity.x();
  speed_integral_ += speed_error * step_size;
  cmd.drive_torque = DrivenMass(cfg_) * vp.wheel_radius *
                     (ap.speed_kp * speed_error + ap.speed_ki * speed_integral_);
  return cmd;
}

ScenarioCommandSource::ScenarioCommandSource(const SimConfig& cfg, const Scenario& scenario,
                                             ControlMode mode, bool human_enabled)
    : cfg_(cfg),
      human_(cfg, scenario),
      automation_(cfg, scenario, mode),
      human_enabled_(human_enabled) {}

CommandSource::Commands ScenarioCommandSource::Sample(const World& w, double step_size) {
  Commands c;
  c.automation = automation_.Command(w, step_size);
  if (human_enabled_) {
    c.human = human_.Command(w, cfg_.automation_params.lateral_gain * c.automation.lateral_offset);
  } else {
    c.human.source = CommandSourceKind::kHumanModel;
  }
  return c;
}

ScenarioRun RunScenario(const SimConfig& cfg, ControlMode mode, RunOptions options) {
  ScenarioRun out;
  out.scenario = BuildValidationScenario(cfg);
  if (!(options.duration > 0.0)) options.duration = out.scenario.duration;
  World w = InitialWorld(cfg, out.scenario.params.speed);
  ScenarioCommandSource source(cfg, out.scenario, mode);
  out.run = Run(w, source, options, cfg);
  if (options.keep_log) out.metrics = ComputeTrackingMetrics(out.run.log, out.scenario);
  return out;
}

}  // namespace vmsim

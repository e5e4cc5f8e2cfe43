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

#include "vmsim/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vmsim {
namespace {

using nlohmann::json;

// Each parameter block lists its fields once; the same list drives
// serialization, parsing and unknown-key detection.
template <class F>
void VisitFields(VehicleParams& p, F&& f) {
  f("chassis_mass", p.chassis_mass);
  f("chassis_inertia", p.chassis_inertia);
  f("wheel_inertia", p.wheel_inertia);
  f("wheel_radius", p.wheel_radius);
  f("tire_stiffness", p.tire_stiffness);
  f("cornering_stiffness", p.cornering_stiffness);
  f("slip_threshold", p.slip_threshold);
  f("tire_vertical_stiffness", p.tire_vertical_stiffness);
  f("tire_vertical_damping", p.tire_vertical_damping);
  f("suspension_stiffness", p.suspension_stiffness);
  f("suspension_damping", p.suspension_damping);
  f("suspension_free_length", p.suspension_free_length);
  f("unsprung_mass", p.unsprung_mass);
  f("unsprung_roll_inertia", p.unsprung_roll_inertia);
  f("cog_to_front_axle", p.cog_to_front_axle);
  f("cog_to_rear_axle", p.cog_to_rear_axle);
  f("track_width", p.track_width);
  f("suspension_mount_depth", p.suspension_mount_depth);
  f("manipulator_mount", p.manipulator_mount);
  f("max_steering_angle", p.max_steering_angle);
}

template <class F>
void VisitFields(ManipulatorParams& p, F&& f) {
  f("link_length", p.link_length);
  f("link_mass", p.link_mass);
  f("link_com", p.link_com);
  f("link_inertia", p.link_inertia);
  f("cylinder_area", p.cylinder_area);
  f("anchor_proximal", p.anchor_proximal);
  f("anchor_distal", p.anchor_distal);
  f("anchor_angle", p.anchor_angle);
  f("dead_volume", p.dead_volume);
  f("valve_flow_gain", p.valve_flow_gain);
  f("bulk_modulus", p.bulk_modulus);
  f("supply_pressure", p.supply_pressure);
  f("rod_side_pressure", p.rod_side_pressure);
  f("orifice_smoothing_pressure", p.orifice_smoothing_pressure);
  f("valve_time_constant", p.valve_time_constant);
  f("bristle_stiffness", p.bristle_stiffness);
  f("bristle_damping", p.bristle_damping);
  f("viscous_friction", p.viscous_friction);
  f("coulomb_friction", p.coulomb_friction);
  f("static_friction", p.static_friction);
  f("stribeck_velocity", p.stribeck_velocity);
  f("joint_lower", p.joint_lower);
  f("joint_upper", p.joint_upper);
  f("end_stop_stiffness", p.end_stop_stiffness);
  f("end_stop_damping", p.end_stop_damping);
  f("end_stop_band", p.end_stop_band);
  f("joint_rate_limit", p.joint_rate_limit);
  f("ee_velocity_limit", p.ee_velocity_limit);
  f("ik_damping", p.ik_damping);
  f("rate_feedforward", p.rate_feedforward);
  f("rate_kp", p.rate_kp);
  f("rate_ki", p.rate_ki);
  f("anti_windup_gain", p.anti_windup_gain);
  f("initial_joint_angles", p.initial_joint_angles);
}

template <class F>
void VisitFields(HumanModelParams& p, F&& f) {
  f("weight_lateral", p.weight_lateral);
  f("weight_height", p.weight_height);
  f("weight_input_lateral", p.weight_input_lateral);
  f("weight_input_vertical", p.weight_input_vertical);
  f("weight_automation", p.weight_automation);
  f("horizon", p.horizon);
  f("gain_step", p.gain_step);
}

template <class F>
void VisitFields(AutomationParams& p, F&& f) {
  f("lateral_gain", p.lateral_gain);
  f("heading_gain", p.heading_gain);
  f("speed_kp", p.speed_kp);
  f("speed_ki", p.speed_ki);
  f("cooperative_gain", p.cooperative_gain);
  f("cooperative_saturation", p.cooperative_saturation);
}

template <class F>
void VisitFields(ScenarioParams& p, F&& f) {
  f("length", p.length);
  f("speed", p.speed);
  f("correction_start", p.correction_start);
  f("correction_length", p.correction_length);
  f("correction_offset", p.correction_offset);
  f("step_position", p.step_position);
  f("step_height", p.step_height);
  f("obstacle_extent", p.obstacle_extent);
  f("return_start", p.return_start);
  f("return_length", p.return_length);
  f("curve_start", p.curve_start);
  f("curve_end", p.curve_end);
  f("curve_radius", p.curve_radius);
  f("roadside_offset", p.roadside_offset);
  f("tool_height", p.tool_height);
}

template <class P>
json BlockToJson(const P& params) {
  json out = json::object();
  P copy = params;
  VisitFields(copy, [&](const char* key, auto& value) { out[key] = value; });
  return out;
}

template <class P>
void BlockFromJson(const json& in, const std::string& block, P& params) {
  if (!in.is_object()) throw ConfigError(block + ": expected an object");
  std::set<std::string> known;
  VisitFields(params, [&](const char* key, auto& value) {
    known.insert(key);
    auto it = in.find(key);
    if (it == in.end()) return;
    try {
      it->get_to(value);
    } catch (const json::exception& e) {
      throw ConfigError(block + "." + key + ": " + e.what());
    }
  });
  for (const auto& [key, _] : in.items()) {
    if (!known.count(key)) throw ConfigError(block + "." + key + ": unknown key");
  }
}

void CheckPositive(std::vector<std::string>& out, const std::string& path, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) out.push_back(path + ": must be > 0");
}

void CheckNonNegative(std::vector<std::string>& out, const std::string& path, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) out.push_back(path + ": must be >= 0");
}

template <std::size_t N>
void CheckPositive(std::vector<std::string>& out, const std::string& path,
                   const std::array<double, N>& values) {
  for (std::size_t i = 0; i < N; ++i) {
    CheckPositive(out, path + "[" + std::to_string(i) + "]", values[i]);
  }
}

template <std::size_t N>
void CheckNonNegative(std::vector<std::string>& out, const std::string& path,
                      const std::array<double, N>& values) {
  for (std::size_t i = 0; i < N; ++i) {
    CheckNonNegative(out, path + "[" + std::to_string(i) + "]", values[i]);
  }
}

}  // namespace

std::vector<std::string> ValidateParams(const SimConfig& cfg) {
  std::vector<std::string> out;
  CheckPositive(out, "step_size", cfg.step_size);
  if (cfg.telemetry_decimation < 1) out.push_back("telemetry_decimation: must be >= 1");
  CheckNonNegative(out, "gravity", cfg.gravity);

  const auto& v = cfg.vehicle_params;
  const std::string vp = "vehicle_params.";
  CheckPositive(out, vp + "chassis_mass", v.chassis_mass);
  CheckPositive(out, vp + "chassis_inertia", v.chassis_inertia);
  CheckPositive(out, vp + "wheel_inertia", v.wheel_inertia);
  CheckPositive(out, vp + "wheel_radius", v.wheel_radius);
  CheckPositive(out, vp + "tire_stiffness", v.tire_stiffness);
  CheckPositive(out, vp + "cornering_stiffness", v.cornering_stiffness);
  CheckPositive(out, vp + "slip_threshold", v.slip_threshold);
  CheckPositive(out, vp + "tire_vertical_stiffness", v.tire_vertical_stiffness);
  CheckNonNegative(out, vp + "tire_vertical_damping", v.tire_vertical_damping);
  CheckPositive(out, vp + "suspension_stiffness", v.suspension_stiffness);
  CheckNonNegative(out, vp + "suspension_damping", v.suspension_damping);
  CheckPositive(out, vp + "suspension_free_length", v.suspension_free_length);
  CheckPositive(out, vp + "unsprung_mass", v.unsprung_mass);
  CheckPositive(out, vp + "unsprung_roll_inertia", v.unsprung_roll_inertia);
  CheckPositive(out, vp + "cog_to_front_axle", v.cog_to_front_axle);
  CheckPositive(out, vp + "cog_to_rear_axle", v.cog_to_rear_axle);
  CheckPositive(out, vp + "track_width", v.track_width);
  CheckNonNegative(out, vp + "suspension_mount_depth", v.suspension_mount_depth);
  CheckPositive(out, vp + "max_steering_angle", v.max_steering_angle);

  const auto& m = cfg.manipulator_params;
  const std::string mp = "manipulator_params.";
  CheckPositive(out, mp + "link_length", m.link_length);
  CheckNonNegative(out, mp + "link_mass", m.link_mass);
  CheckNonNegative(out, mp + "link_com", m.link_com);
  CheckNonNegative(out, mp + "link_inertia", m.link_inertia);
  CheckPositive(out, mp + "cylinder_area", m.cylinder_area);
  CheckPositive(out, mp + "anchor_proximal", m.anchor_proximal);
  CheckPositive(out, mp + "anchor_distal", m.anchor_distal);
  CheckPositive(out, mp + "dead_volume", m.dead_volume);
  CheckPositive(out, mp + "valve_flow_gain", m.valve_flow_gain);
  CheckPositive(out, mp + "bulk_modulus", m.bulk_modulus);
  CheckPositive(out, mp + "supply_pressure", m.supply_pressure);
  CheckNonNegative(out, mp + "rod_side_pressure", m.rod_side_pressure);
  if (m.rod_side_pressure > m.supply_pressure) {
    out.push_back(mp + "rod_side_pressure: must be <= supply_pressure");
  }
  CheckPositive(out, mp + "orifice_smoothing_pressure", m.orifice_smoothing_pressure);
  CheckPositive(out, mp + "valve_time_constant", m.valve_time_constant);
  CheckPositive(out, mp + "bristle_stiffness", m.bristle_stiffness);
  CheckNonNegative(out, mp + "bristle_damping", m.bristle_damping);
  CheckPositive(out, mp + "viscous_friction", m.viscous_friction);
  CheckPositive(out, mp + "coulomb_friction", m.coulomb_friction);
  CheckPositive(out, mp + "stribeck_velocity", m.stribeck_velocity);
  for (int j = 0; j < kJoints; ++j) {
    const std::string idx = "[" + std::to_string(j) + "]";
    if (m.static_friction[j] < m.coulomb_friction[j]) {
      out.push_back(mp + "static_friction" + idx + ": must be >= coulomb_friction" + idx);
    }
    if (!(m.joint_lower[j] < m.joint_upper[j])) {
      out.push_back(mp + "joint_lower" + idx + ": must be < joint_upper" + idx);
    }
  }
  CheckPositive(out, mp + "end_stop_stiffness", m.end_stop_stiffness);
  CheckNonNegative(out, mp + "end_stop_damping", m.end_stop_damping);
  CheckPositive(out, mp + "end_stop_band", m.end_stop_band);
  CheckPositive(out, mp + "joint_rate_limit", m.joint_rate_limit);
  CheckPositive(out, mp + "ee_velocity_limit", m.ee_velocity_limit);
  CheckPositive(out, mp + "ik_damping", m.ik_damping);
  CheckNonNegative(out, mp + "rate_feedforward", m.rate_feedforward);
  CheckNonNegative(out, mp + "rate_kp", m.rate_kp);
  CheckNonNegative(out, mp + "rate_ki", m.rate_ki);
  CheckNonNegative(out, mp + "anti_windup_gain", m.anti_windup_gain);

  const auto& h = cfg.human_model_params;
  const std::string hp = "human_model_params.";
  CheckNonNegative(out, hp + "weight_lateral", h.weight_lateral);
  CheckNonNegative(out, hp + "weight_height", h.weight_height);
  CheckPositive(out, hp + "weight_input_lateral", h.weight_input_lateral);
  CheckPositive(out, hp + "weight_input_vertical", h.weight_input_vertical);
  CheckPositive(out, hp + "weight_automation", h.weight_automation);
  CheckNonNegative(out, hp + "horizon", h.horizon);
  CheckPositive(out, hp + "gain_step", h.gain_step);

  const auto& a = cfg.automation_params;
  const std::string ap = "automation_params.";
  CheckNonNegative(out, ap + "lateral_gain", a.lateral_gain);
  CheckNonNegative(out, ap + "heading_gain", a.heading_gain);
  CheckNonNegative(out, ap + "speed_kp", a.speed_kp);
  CheckNonNegative(out, ap + "speed_ki", a.speed_ki);
  CheckNonNegative(out, ap + "cooperative_gain", a.cooperative_gain);
  CheckNonNegative(out, ap + "cooperative_saturation", a.cooperative_saturation);

  const auto& s = cfg.scenario_params;
  const std::string sp = "scenario_params.";
  CheckPositive(out, sp + "length", s.length);
  CheckPositive(out, sp + "speed", s.speed);
  CheckPositive(out, sp + "correction_length", s.correction_length);
  CheckPositive(out, sp + "return_length", s.return_length);
  CheckPositive(out, sp + "curve_radius", s.curve_radius);
  CheckNonNegative(out, sp + "obstacle_extent", s.obstacle_extent);
  if (!(s.correction_start >= 0.0 && s.correction_start < s.step_position &&
        s.step_position <= s.return_start && s.curve_start <= s.curve_end)) {
    out.push_back(sp + "landmarks: must satisfy 0 <= correction_start < step_position <= "
                       "return_start and curve_start <= curve_end");
  }
  if (s.curve_end - s.curve_start >= s.curve_radius) {
    out.push_back(sp + "curve_end: curve must span less than curve_radius");
  }
  if (cfg.scenario_name.empty()) out.push_back("scenario_name: must not be empty");
  return out;
}

SimConfig LoadConfig(std::string_view text) {
  SimConfig cfg;
  json doc;
  bool blank = true;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      blank = false;
      break;
    }
  }
  if (!blank) {
    try {
      doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("parse error: top level must be an object");

    static const std::set<std::string> kTopKeys = {
        "step_size",          "solver",           "gravity",
        "vehicle_params",     "manipulator_params", "human_model_params",
        "automation_params",  "scenario_params",  "scenario_name",
        "realtime",           "telemetry_decimation"};
    for (const auto& [key, _] : doc.items()) {
      if (!kTopKeys.count(key)) throw ConfigError(key + ": unknown key");
    }
    try {
      if (doc.contains("step_size")) doc["step_size"].get_to(cfg.step_size);
      if (doc.contains("gravity")) doc["gravity"].get_to(cfg.gravity);
      if (doc.contains("scenario_name")) doc["scenario_name"].get_to(cfg.scenario_name);
      if (doc.contains("realtime")) doc["realtime"].get_to(cfg.realtime);
      if (doc.contains("telemetry_decimation")) {
        doc["telemetry_decimation"].get_to(cfg.telemetry_decimation);
      }
      if (doc.contains("solver")) {
        const auto name = doc["solver"].get<std::string>();
        if (name != "rk4") throw ConfigError("solver: must be \"rk4\"");
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("type error: ") + e.what());
    }
    if (doc.contains("vehicle_params")) {
      BlockFromJson(doc["vehicle_params"], "vehicle_params", cfg.vehicle_params);
    }
    if (doc.contains("manipulator_params")) {
      BlockFromJson(doc["manipulator_params"], "manipulator_params", cfg.manipulator_params);
    }
    if (doc.contains("human_model_params")) {
      BlockFromJson(doc["human_model_params"], "human_model_params", cfg.human_model_params);
    }
    if (doc.contains("automation_params")) {
      BlockFromJson(doc["automation_params"], "automation_params", cfg.automation_params);
    }
    if (doc.contains("scenario_params")) {
      BlockFromJson(doc["scenario_params"], "scenario_params", cfg.scenario_params);
    }
  }
  const auto violations = ValidateParams(cfg);
  if (!violations.empty()) throw ConfigError("validation error: " + violations.front());
  return cfg;
}

SimConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return LoadConfig(buffer.str());
}

std::string SerializeConfig(const SimConfig& cfg) {
  json doc;
  doc["step_size"] = cfg.step_size;
  doc["solver"] = "rk4";
  doc["gravity"] = cfg.gravity;
  doc["vehicle_params"] = BlockToJson(cfg.vehicle_params);
  doc["manipulator_params"] = BlockToJson(cfg.manipulator_params);
  doc["human_model_params"] = BlockToJson(cfg.human_model_params);
  doc["automation_params"] = BlockToJson(cfg.automation_params);
  doc["scenario_params"] = BlockToJson(cfg.scenario_params);
  doc["scenario_name"] = cfg.scenario_name;
  doc["realtime"] = cfg.realtime;
  doc["telemetry_decimation"] = cfg.telemetry_decimation;
  return doc.dump(2);
}

}  // namespace vmsim

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

#include "vmsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vmsim/telemetry.hpp"

namespace vmsim {
namespace {

// Smooth 0 -> 1 transition over u in [0, 1] with zero slope at both ends.
double CosineRamp(double u) {
  const double c = std::clamp(u, 0.0, 1.0);
  return 0.5 - 0.5 * std::cos(std::numbers::pi * c);
}

double CosineRampSlope(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 0.5 * std::numbers::pi * std::sin(std::numbers::pi * u);
}

struct RoadPoint {
  double y = 0.0;
  double slope = 0.0;      // dy/dx
  double curvature = 0.0;  // d2y/dx2
};

// Center line: straight, then a left-hand circular arc, then its tangent.
RoadPoint Road(const ScenarioParams& p, double x) {
  const double r = p.curve_radius;
  auto arc = [&](double u) {
    const double root = std::sqrt(r * r - u * u);
    return RoadPoint{r - root, u / root, r * r / (root * root * root)};
  };
  if (x <= p.curve_start) return {};
  if (x <= p.curve_end) return arc(x - p.curve_start);
  RoadPoint end = arc(p.curve_end - p.curve_start);
  end.y += end.slope * (x - p.curve_end);
  end.curvature = 0.0;
  return end;
}

double Correction(const ScenarioParams& p, double x) {
  return p.correction_offset * CosineRamp((x - p.correction_start) / p.correction_length);
}

double CorrectionSlope(const ScenarioParams& p, double x) {
  return p.correction_offset / p.correction_length *
         CosineRampSlope((x - p.correction_start) / p.correction_length);
}

// Lateral shift measured along y that places a point `offset` meters from the
// center line along its normal.
double NormalToY(double offset, double slope) { return offset * std::sqrt(1.0 + slope * slope); }

double VehicleSlope(const ScenarioParams& p, double x) {
  const RoadPoint road = Road(p, x);
  const double stretch = std::sqrt(1.0 + road.slope * road.slope);
  return road.slope + CorrectionSlope(p, x) * stretch +
         Correction(p, x) * road.slope * road.curvature / stretch;
}

}  // namespace

Scenario BuildValidationScenario(const SimConfig& cfg) {
  Scenario s;
  s.params = cfg.scenario_params;
  const auto& p = s.params;
  if (!(p.length > 0.0) || !(p.speed > 0.0)) {
    throw ConfigError("scenario_params: length and speed must be > 0");
  }
  s.obstacle.position = p.step_position;
  s.obstacle.extent = p.obstacle_extent;
  s.obstacle.lateral = Road(p, p.step_position).y -
                       NormalToY(p.roadside_offset, Road(p, p.step_position).slope);
  s.duration = p.length / p.speed;
  return s;
}

double ManipulatorStep(const Scenario& s, double x) {
  const auto& p = s.params;
  if (x < p.step_position) return 0.0;
  if (x < p.return_start) return p.step_height;
  return p.step_height * (1.0 - CosineRamp((x - p.return_start) / p.return_length));
}

References ReferenceAt(const Scenario& s, double x) {
  const auto& p = s.params;
  if (!(x >= 0.0 && x <= p.length)) {
    throw std::out_of_range("reference query outside the scenario: x = " + std::to_string(x));
  }
  const RoadPoint road = Road(p, x);
  References r;
  r.x = x;
  r.road_heading = std::atan(road.slope);
  r.vehicle_lateral = road.y + NormalToY(Correction(p, x), road.slope);
  const double slope = VehicleSlope(p, x);
  r.vehicle_heading = std::atan(slope);

  // Curvature of the vehicle path y(x) from a central difference of its slope.
  constexpr double kDx = 1e-4;
  const double lo = std::max(0.0, x - kDx);
  const double hi = std::min(p.length, x + kDx);
  const double second = (VehicleSlope(p, hi) - VehicleSlope(p, lo)) / (hi - lo);
  r.curvature = second / std::pow(1.0 + slope * slope, 1.5);

  r.manipulator_lateral =
      road.y - NormalToY(p.roadside_offset + ManipulatorStep(s, x), road.slope);
  r.tool_height = p.tool_height;
  r.speed = p.speed;
  return r;
}

namespace {

struct Accumulator {
  double begin = 0.0;
  double end = 0.0;
  int n = 0;
  double vehicle_sq = 0.0;
  double vehicle_max = 0.0;
  double manip_sq = 0.0;
  double manip_max = 0.0;

  void Add(double ev, double em) {
    ++n;
    vehicle_sq += ev * ev;
    manip_sq += em * em;
    vehicle_max = std::max(vehicle_max, std::abs(ev));
    manip_max = std::max(manip_max, std::abs(em));
  }

  SegmentMetrics Finish() const {
    SegmentMetrics m;
    m.begin = begin;
    m.end = end;
    m.samples = n;
    if (n > 0) {
      m.vehicle_rms = std::sqrt(vehicle_sq / n);
      m.manipulator_rms = std::sqrt(manip_sq / n);
    }
    m.vehicle_max = vehicle_max;
    m.manipulator_max = manip_max;
    return m;
  }
};

}  // namespace

TrackingMetrics ComputeTrackingMetrics(const std::vector<TelemetryRecord>& log,
                                       const Scenario& s) {
  if (log.empty()) throw std::invalid_argument("tracking metrics: empty telemetry log");
  const auto& p = s.params;
  const std::vector<std::pair<std::string, std::pair<double, double>>> bounds{
      {"straight", {0.0, p.correction_start}},
      {"correction", {p.correction_start, p.step_position}},
      {"obstacle", {p.step_position, p.curve_start}},
      {"curve", {p.curve_start, p.curve_end}},
      {"exit", {p.curve_end, p.length}},
  };
  std::vector<Accumulator> seg(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    seg[i].begin = bounds[i].second.first;
    seg[i].end = bounds[i].second.second;
  }
  Accumulator total;
  total.end = p.length;

  std::map<double, std::pair<double, int>> checkpoint;
  for (double c : Checkpoints()) checkpoint[c] = {0.0, 0};

  TrackingMetrics m;
  m.roll_min = m.pitch_min = std::numeric_limits<double>::infinity();
  m.roll_max = m.pitch_max = -std::numeric_limits<double>::infinity();
  m.extended_roll_min_abs = std::numeric_limits<double>::infinity();
  double curve_flow_sum = 0.0;
  int curve_flow_n = 0;

  for (const auto& rec : log) {
    if (!std::isfinite(rec.x) || !std::isfinite(rec.y) || !std::isfinite(rec.ee_y)) {
      throw std::invalid_argument("tracking metrics: non-finite telemetry");
    }
    if (rec.x < 0.0 || rec.x > p.length) continue;
    const References ref = ReferenceAt(s, rec.x);
    const double cos_h = std::cos(ref.road_heading);
    const double ev = (rec.y - ref.vehicle_lateral) * cos_h;
    const double tool_x = std::clamp(rec.ee_x, 0.0, p.length);
    const References tool_ref = ReferenceAt(s, tool_x);
    const double em = (rec.ee_y - tool_ref.manipulator_lateral) * std::cos(tool_ref.road_heading);

    total.Add(ev, em);
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const bool last = i + 1 == bounds.size();
      if (rec.x >= seg[i].begin && (rec.x < seg[i].end || (last && rec.x <= seg[i].end))) {
        seg[i].Add(ev, em);
      }
    }
    for (auto& [c, acc] : checkpoint) {
      if (std::abs(rec.x - c) <= 5.0) {
        acc.first += std::abs(em);
        ++acc.second;
      }
    }
    m.roll_min = std::min(m.roll_min, rec.roll);
    m.roll_max = std::max(m.roll_max, rec.roll);
    m.pitch_min = std::min(m.pitch_min, rec.pitch);
    m.pitch_max = std::max(m.pitch_max, rec.pitch);
    if (rec.x >= p.step_position && rec.x < p.return_start) {
      m.extended_roll_min_abs = std::min(m.extended_roll_min_abs, std::abs(rec.roll));
    }
    const double flow3 = std::abs(rec.flow[2]);
    if (rec.x >= p.step_position && rec.x < p.curve_start) {
      m.step_flow_peak = std::max(m.step_flow_peak, flow3);
    }
    if (rec.x >= p.curve_start && rec.x < p.curve_end) {
      curve_flow_sum += flow3;
      ++curve_flow_n;
    }
  }
  if (total.n == 0) {
    throw std::invalid_argument("tracking metrics: no telemetry inside the scenario");
  }
  m.total = total.Finish();
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    m.segments.emplace_back(bounds[i].first, seg[i].Finish());
  }
  for (const auto& [c, acc] : checkpoint) {
    m.checkpoint_error[c] = acc.second > 0 ? acc.first / acc.second : 0.0;
  }
  if (!std::isfinite(m.extended_roll_min_abs)) m.extended_roll_min_abs = 0.0;
  m.curve_flow_mean = curve_flow_n > 0 ? curve_flow_sum / curve_flow_n : 0.0;
  return m;
}

namespace {

nlohmann::ordered_json SegmentJson(const SegmentMetrics& s) {
  return {{"begin", s.begin},
          {"end", s.end},
          {"samples", s.samples},
          {"vehicle_rms", s.vehicle_rms},
          {"vehicle_max", s.vehicle_max},
          {"manipulator_rms", s.manipulator_rms},
          {"manipulator_max", s.manipulator_max}};
}

std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string MetricsToJson(const TrackingMetrics& m) {
  nlohmann::ordered_json j;
  j["total"] = SegmentJson(m.total);
  auto& segs = j["segments"];
  segs = nlohmann::ordered_json::object();
  for (const auto& [name, s] : m.segments) segs[name] = SegmentJson(s);
  auto& cps = j["checkpoints"];
  cps = nlohmann::ordered_json::array();
  for (const auto& [x, e] : m.checkpoint_error) {
    cps.push_back({{"x", x}, {"manipulator_mean_abs", e}});
  }
  j["roll"] = {{"min", m.roll_min}, {"max", m.roll_max},
               {"extended_min_abs", m.extended_roll_min_abs}};
  j["pitch"] = {{"min", m.pitch_min}, {"max", m.pitch_max}};
  j["joint3_flow"] = {{"step_peak", m.step_flow_peak}, {"curve_mean", m.curve_flow_mean}};
  return j.dump(2) + "\n";
}

std::string MetricsToCsv(const TrackingMetrics& m) {
  std::ostringstream out;
  out << "segment,begin,end,samples,vehicle_rms,vehicle_max,manipulator_rms,manipulator_max\n";
  auto row = [&](const std::string& name, const SegmentMetrics& s) {
    out << name << ',' << Num(s.begin) << ',' << Num(s.end) << ',' << s.samples << ','
        << Num(s.vehicle_rms) << ',' << Num(s.vehicle_max) << ',' << Num(s.manipulator_rms) << ','
        << Num(s.manipulator_max) << '\n';
  };
  row("total", m.total);
  for (const auto& [name, s] : m.segments) row(name, s);
  return out.str();
}

}  // namespace vmsim

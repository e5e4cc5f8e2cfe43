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

// The validation drive: a straight approach, a small lateral correction of
// the vehicle path, a sudden outward step of the tool path at a hidden
// obstacle, and a gentle left-hand curve. All references are functions of the
// global x coordinate; lateral offsets are measured normal to the road.

#ifndef VMSIM_SCENARIO_HPP_
#define VMSIM_SCENARIO_HPP_

#include <map>
#include <string>
#include <vector>

#include "vmsim/config.hpp"

namespace vmsim {

struct TelemetryRecord;

struct Obstacle {
  double position = 0.0;  // x where the obstacle begins, m
  double extent = 0.0;    // m along x
  double lateral = 0.0;   // y of the nominal tool path at the obstacle, m
};

struct Scenario {
  ScenarioParams params;
  Obstacle obstacle;
  double duration = 0.0;  // nominal, length / speed
};

struct References {
  double x = 0.0;
  double vehicle_lateral = 0.0;      // y of the vehicle reference, m
  double vehicle_heading = 0.0;      // rad
  double curvature = 0.0;            // 1/m of the vehicle reference
  double road_heading = 0.0;         // rad
  double manipulator_lateral = 0.0;  // y of the tool reference, m
  double tool_height = 0.0;          // m above ground
  double speed = 0.0;                // m/s
};

Scenario BuildValidationScenario(const SimConfig& cfg);

// Throws std::out_of_range unless 0 <= x <= length.
References ReferenceAt(const Scenario& s, double x);

// Outward tool-path step at x (the only discontinuous reference component).
double ManipulatorStep(const Scenario& s, double x);

struct SegmentMetrics {
  double begin = 0.0;
  double end = 0.0;
  int samples = 0;
  double vehicle_rms = 0.0;
  double vehicle_max = 0.0;
  double manipulator_rms = 0.0;
  double manipulator_max = 0.0;
};

struct TrackingMetrics {
  SegmentMetrics total;
  std::vector<std::pair<std::string, SegmentMetrics>> segments;
  // Mean |manipulator error| within +-5 m of each checkpoint.
  std::map<double, double> checkpoint_error;
  double roll_min = 0.0;
  double roll_max = 0.0;
  double pitch_min = 0.0;
  double pitch_max = 0.0;
  // Smallest |roll| while the tool path is stepped out.
  double extended_roll_min_abs = 0.0;
  // Joint 3 flow: peak |Q| during the step maneuver, mean |Q| in the curve.
  double step_flow_peak = 0.0;
  double curve_flow_mean = 0.0;
};

// Lateral errors of a logged trajectory against the scenario references.
// Records whose vehicle x lies outside [0, length] are skipped. Throws
// std::invalid_argument if no record remains or a record is non-finite.
TrackingMetrics ComputeTrackingMetrics(const std::vector<TelemetryRecord>& log,
                                       const Scenario& s);

// Checkpoints highlighted by the cooperative-control comparison, m.
inline const std::vector<double>& Checkpoints() {
  static const std::vector<double> kCheckpoints{30.0, 75.0, 100.0};
  return kCheckpoints;
}

std::string MetricsToJson(const TrackingMetrics& m);
std::string MetricsToCsv(const TrackingMetrics& m);

}  // namespace vmsim

#endif  // VMSIM_SCENARIO_HPP_

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


// Python bindings for the simulation core. Configurations cross the boundary
// as JSON text; the pure-Python package wraps them into dicts.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vmsim/agents.hpp"
#include "vmsim/config.hpp"
#include "vmsim/kinematics.hpp"
#include "vmsim/lq.hpp"
#include "vmsim/vehicle.hpp"

namespace py = pybind11;

namespace vmsim {
namespace {

SimConfig ConfigFrom(const std::optional<std::string>& text) {
  return text ? LoadConfig(*text) : SimConfig{};
}

JointArray Joints(const Eigen::Vector4d& v) { return ToArray(v); }

py::dict RunScenarioPy(const std::string& mode, double duration,
                       const std::optional<std::string>& config) {
  const SimConfig cfg = ConfigFrom(config);
  const ControlMode m = ParseMode(mode);
  RunOptions options;
  options.duration = duration;
  ScenarioRun result;
  {
    py::gil_scoped_release release;
    result = RunScenario(cfg, m, options);
  }
  const auto& log = result.run.log;
  py::dict columns;
  for (const auto& name : TelemetryColumns()) {
    if (name == "mode") continue;
    py::array_t<double> column(static_cast<py::ssize_t>(log.size()));
    auto out = column.mutable_unchecked<1>();
    for (std::size_t i = 0; i < log.size(); ++i) {
      VisitTelemetryColumns(log[i], [&](const char* field, const auto& value) {
        using T = std::decay_t<decltype(value)>;
        if constexpr (std::is_arithmetic_v<T>) {
          if (name == field) out(static_cast<py::ssize_t>(i)) = static_cast<double>(value);
        }
      });
    }
    columns[py::str(name)] = column;
  }
  py::dict out;
  out["mode"] = std::string(ModeName(m));
  out["steps"] = result.run.steps;
  out["sim_time"] = result.run.sim_time;
  out["wall_time"] = result.run.wall_time;
  out["step_time_p99"] = result.run.step_time_p99;
  out["metrics"] = MetricsToJson(result.metrics);
  out["columns"] = columns;
  return out;
}

py::dict SolveLqPy(const Matrix& a, const Matrix& b_h, const Matrix& b_a, const Matrix& q,
                   const Matrix& r_hh, const Matrix& r_ha, double horizon, double time_step) {
  LqParams p{a, b_h, b_a, q, r_hh, r_ha, horizon, time_step};
  const GainSchedule g = SolveLqHuman(p);
  py::dict out;
  out["time_step"] = g.time_step;
  out["feedback"] = g.feedback;
  out["exogenous_gain"] = g.exogenous_gain;
  out["cost_to_go"] = g.cost_to_go;
  return out;
}

}  // namespace
}  // namespace vmsim

PYBIND11_MODULE(_vmsim, m) {
  using namespace vmsim;
  m.doc() = "Coupled vehicle and hydraulic manipulator simulation core";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<IntegrationError> integration_error(m, "IntegrationError",
                                                           PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const IntegrationError& e) {
      py::set_error(integration_error, e.what());
    }
  });

  m.def("default_config", [] { return SerializeConfig(SimConfig{}); },
        "Default configuration as JSON text.");
  m.def("normalize_config", [](const std::string& text) { return SerializeConfig(LoadConfig(text)); },
        py::arg("text"), "Validates a JSON configuration and returns it with defaults filled in.");

  m.def("tire_slip", py::vectorize(&TireSlip), py::arg("ground_speed"), py::arg("wheel_speed"),
        py::arg("wheel_radius"), py::arg("slip_threshold"));

  m.def(
      "forward_kinematics",
      [](const Eigen::Vector4d& q, const Eigen::Vector4d& len) {
        return Eigen::Vector2d(ForwardKinematics(q, Joints(len)));
      },
      py::arg("q"), py::arg("link_length"));
  m.def(
      "jacobian",
      [](const Eigen::Vector4d& q, const Eigen::Vector4d& len) {
        return Mat24(Jacobian(q, Joints(len)));
      },
      py::arg("q"), py::arg("link_length"));
  m.def(
      "velocity_ik",
      [](const Eigen::Vector4d& q, const Eigen::Vector2d& v, double damping,
         const Eigen::Vector4d& len, const Eigen::Vector4d& rate_limit) {
        return ToVec(VelocityIk(q, {v.x(), v.y()}, damping, Joints(len), Joints(rate_limit)).rate);
      },
      py::arg("q"), py::arg("ee_velocity"), py::arg("damping"), py::arg("link_length"),
      py::arg("rate_limit"));

  m.def("solve_lq", &SolveLqPy, py::arg("a"), py::arg("b_h"), py::arg("b_a"), py::arg("q"),
        py::arg("r_hh"), py::arg("r_ha"), py::arg("horizon"), py::arg("time_step"));

  m.def("run_scenario", &RunScenarioPy, py::arg("mode") = "cooperative",
        py::arg("duration") = 0.0, py::arg("config") = py::none(),
        "Runs the validation scenario headless; duration 0 means the full drive.");
}

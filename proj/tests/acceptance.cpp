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


// Headless acceptance run: one PASS/FAIL line per criterion, nonzero exit if
// any criterion fails.

#include <Eigen/Geometry>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "vmsim/agents.hpp"
#include "vmsim/integrator.hpp"
#include "vmsim/kinematics.hpp"
#include "vmsim/lq.hpp"
#include "vmsim/server.hpp"
#include "vmsim/session.hpp"
#include "vmsim/vehicle.hpp"

namespace vmsim {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// --- slip -----------------------------------------------------------------

Outcome SlipTotality() {
  const double r = 0.5, v_n = 0.5;
  const int n = 1000;
  const auto start = Clock::now();
  long long mismatches = 0, non_finite = 0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = -5.0 + 25.0 * i / (n - 1.0);
    for (int j = 0; j < n; ++j) {
      const double w = -10.0 + 50.0 * j / (n - 1.0);
      const double s = TireSlip(v, w, r, v_n);
      double denom = v_n;
      if (v > denom) denom = v;
      if (w * r > denom) denom = w * r;
      const double closed = (v - w * r) / denom;
      if (!std::isfinite(s)) ++non_finite;
      if (s != closed) ++mismatches;
      worst = std::max(worst, std::abs(s));
    }
  }
  const bool zero_ok = TireSlip(0.0, 0.0, r, v_n) == 0.0;
  const double seconds = Since(start);
  return {non_finite == 0 && mismatches == 0 && zero_ok && seconds < 1.0,
          Fmt("1e6 points, non-finite %lld, mismatches %lld, max |s| %.3g, %.3f s", non_finite,
              mismatches, worst, seconds)};
}

// --- integrator order -----------------------------------------------------

template <class F>
double IntegrateError(F&& f, std::vector<double> x, double t_end, double h,
                      const std::function<double(const std::vector<double>&)>& error) {
  Rk4Workspace ws;
  const int n = static_cast<int>(std::lround(t_end / h));
  for (int k = 0; k < n; ++k) Rk4Step(f, std::span<double>(x), k * h, h, ws);
  return error(x);
}

Outcome IntegratorOrder() {
  const auto start = Clock::now();
  auto decay = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
  auto oscillator = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  auto decay_error = [](const std::vector<double>& x) { return std::abs(x[0] - std::exp(-2.0)); };
  auto osc_error = [](const std::vector<double>& x) {
    return std::hypot(x[0] - std::cos(2.0), x[1] + std::sin(2.0));
  };
  std::string detail;
  bool pass = true;
  for (const auto& [name, which] : {std::pair{"decay", 0}, std::pair{"oscillator", 1}}) {
    std::vector<double> orders;
    for (double h = 0.1; h > 0.01; h /= 2.0) {
      const double e1 = which == 0 ? IntegrateError(decay, {1.0}, 2.0, h, decay_error)
                                   : IntegrateError(oscillator, {1.0, 0.0}, 2.0, h, osc_error);
      const double e2 = which == 0 ? IntegrateError(decay, {1.0}, 2.0, h / 2, decay_error)
                                   : IntegrateError(oscillator, {1.0, 0.0}, 2.0, h / 2, osc_error);
      orders.push_back(std::log2(e1 / e2));
    }
    detail += Fmt("%s orders", name);
    for (double o : orders) {
      detail += Fmt(" %.3f", o);
      pass = pass && std::abs(o - 4.0) <= 0.2;
    }
    detail += "; ";
  }
  const double seconds = Since(start);
  return {pass && seconds < 5.0, detail + Fmt("%.3f s", seconds)};
}

// --- LQ ---------------------------------------------------------------------

// Optimal open-loop inputs from the stacked prediction equations.
Matrix BatchInputs(const DiscreteLq& d, const Vector& x0) {
  const auto n = d.a.rows(), m = d.b.cols();
  const int N = d.steps;
  Matrix phi = Matrix::Zero(n * N, n), gamma = Matrix::Zero(n * N, m * N);
  Matrix power = Matrix::Identity(n, n);
  for (int k = 0; k < N; ++k) {
    phi.block(k * n, 0, n, n) = power;
    Matrix a_pow = Matrix::Identity(n, n);
    for (int j = k - 1; j >= 0; --j) {
      gamma.block(k * n, j * m, n, m) = a_pow * d.b;
      a_pow = a_pow * d.a;
    }
    power = d.a * power;
  }
  Matrix qb = Matrix::Zero(n * N, n * N), rb = Matrix::Zero(m * N, m * N);
  for (int k = 0; k < N; ++k) {
    qb.block(k * n, k * n, n, n) = d.q;
    rb.block(k * m, k * m, m, m) = d.r;
  }
  const Matrix h = gamma.transpose() * qb * gamma + rb;
  return (-h.ldlt().solve(gamma.transpose() * qb * phi * x0)).reshaped(m, N);
}

Outcome LqCorrectness() {
  const auto start = Clock::now();
  // Two-state plant: damped double integrator.
  LqParams p;
  p.a = Matrix(2, 2);
  p.a << 0.0, 1.0, 0.0, -0.5;
  p.b_h = Matrix(2, 1);
  p.b_h << 0.0, 1.0;
  p.b_a = Matrix::Zero(2, 0);
  p.q = Matrix::Identity(2, 2);
  p.q(0, 0) = 4.0;
  p.r_hh = Matrix::Constant(1, 1, 0.5);
  p.r_ha = Matrix::Zero(0, 0);
  p.time_step = 0.05;
  p.horizon = 2.0;
  const DiscreteLq d = Discretize(p);
  const GainSchedule g = SolveLqHuman(p);
  double dp_error = 0.0;
  for (const Vector& x0 : {Vector(Vector::Unit(2, 0)), Vector(Vector::Unit(2, 1))}) {
    const Matrix oracle = BatchInputs(d, x0);
    Vector x = x0;
    for (int k = 0; k < d.steps; ++k) {
      const Vector u = LqInput(g, k, x, Vector(), Vector());
      dp_error = std::max(dp_error, (u - oracle.col(k)).cwiseAbs().maxCoeff());
      x = d.a * x + d.b * u;
    }
  }

  // Scalar integrator with unit weights: P = 1 in the continuous limit.
  LqParams s;
  s.a = Matrix::Zero(1, 1);
  s.b_h = Matrix::Ones(1, 1);
  s.b_a = Matrix::Zero(1, 0);
  s.q = Matrix::Ones(1, 1);
  s.r_hh = Matrix::Ones(1, 1);
  s.r_ha = Matrix::Zero(0, 0);
  s.time_step = 1e-3;
  s.horizon = 20.0;
  const double p_scalar = SolveLqHuman(s).cost_to_go.front()(0, 0);
  const double dt = s.time_step;
  const double p_discrete = (dt + std::sqrt(dt * dt + 4.0)) / 2.0;

  LqParams scaled = p;
  scaled.q *= 13.0;
  scaled.r_hh *= 13.0;
  const GainSchedule gs = SolveLqHuman(scaled);
  double scale_error = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    scale_error = std::max(scale_error, (g.feedback[k] - gs.feedback[k]).cwiseAbs().maxCoeff());
  }
  const double seconds = Since(start);
  const bool pass = dp_error < 1e-9 && std::abs(p_scalar - p_discrete) < 1e-9 &&
                    std::abs(p_scalar - 1.0) <= dt && scale_error < 1e-10 && seconds < 5.0;
  return {pass, Fmt("DP gap %.2e, scalar P %.6f (discrete fixed point %.6f), scaling gap %.2e, "
                    "%.3f s",
                    dp_error, p_scalar, p_discrete, scale_error, seconds)};
}

// --- kinematics ---------------------------------------------------------------

Vec2 ChainTip(const Vec4& q, const JointArray& len) {
  Eigen::Isometry2d frame = Eigen::Isometry2d::Identity();
  for (int i = 0; i < kJoints; ++i) {
    frame = frame * Eigen::Rotation2Dd(q[i]) * Eigen::Translation2d(len[i], 0.0);
  }
  return frame.translation();
}

Outcome Kinematics() {
  const ManipulatorParams p;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(-3.14, 3.14);
  double worst = 0.0;
  const double h = 1e-6;
  for (int n = 0; n < 1000; ++n) {
    const Vec4 q(angle(rng), angle(rng), angle(rng), angle(rng));
    const Mat24 J = Jacobian(q, p.link_length);
    for (int j = 0; j < kJoints; ++j) {
      const Vec2 fd = (ChainTip(q + h * Vec4::Unit(j), p.link_length) -
                       ChainTip(q - h * Vec4::Unit(j), p.link_length)) /
                      (2.0 * h);
      worst = std::max(worst, (J.col(j) - fd).cwiseAbs().maxCoeff());
    }
  }
  const JointArray no_limit{1e9, 1e9, 1e9, 1e9};
  double ratio = 0.0;
  for (double lambda : {0.05, 0.3}) {
    for (double s = -0.1; s <= 0.1; s += 1e-3) {
      for (const EndEffectorCommand& v : {EndEffectorCommand{0.4, 0.0}, EndEffectorCommand{0.1, 0.3}}) {
        const Vec4 qd = ToVec(VelocityIk(Vec4(0.2, s, -0.5 * s, s), v, lambda, p.link_length,
                                         no_limit).rate);
        ratio = std::max(ratio, qd.norm() / (std::hypot(v.vx, v.vy) / (2.0 * lambda)));
      }
    }
  }
  return {worst < 1e-6 && ratio <= 1.0 + 1e-12,
          Fmt("max Jacobian FD error %.2e over 1000 configs, max |qd|/bound %.4f", worst, ratio)};
}

// --- friction -----------------------------------------------------------------

Outcome Friction() {
  const ManipulatorParams p;
  double worst = 0.0;
  long long sign_violations = 0;
  for (int j = 0; j < kJoints; ++j) {
    const LuGreParams f = JointFriction(p, j);
    for (double v = 1e-3; v <= 1.0; v += 1e-4) {
      for (double vel : {v, -v}) {
        const double ratio = vel / f.stribeck_velocity;
        const double g = f.coulomb + (f.stiction - f.coulomb) * std::exp(-ratio * ratio);
        const double closed = std::copysign(g, vel) + f.sigma2 * vel;
        const double t = SteadyStateFriction(vel, f);
        worst = std::max(worst, std::abs(t - closed) / std::max(1.0, std::abs(closed)));
        if (t * vel < 0.0) ++sign_violations;
      }
    }
    for (double vel : {0.0, 1e-12, -1e-12}) {
      if (SteadyStateFriction(vel, f) * vel < 0.0) ++sign_violations;
    }
  }
  return {worst < 1e-10 && sign_violations == 0,
          Fmt("max deviation from closed form %.2e (relative), T*v < 0 at %lld points", worst,
              sign_violations)};
}

// --- passive energy -------------------------------------------------------------

Outcome PassiveEnergy() {
  const ManipulatorParams p;
  MountMotion mount;
  mount.gravity = Vec3(0.0, 0.0, -9.81);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> rate(0.0, 0.3);
  double worst_growth = -1.0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(12, 0.0);
    for (int j = 0; j < kJoints; ++j) {
      std::uniform_real_distribution<double> q(p.joint_lower[j], p.joint_upper[j]);
      x[j] = q(rng);
      x[4 + j] = rate(rng);
    }
    auto f = [&](double, std::span<const double> y, std::span<double> dy) {
      Vec4 torque;
      for (int j = 0; j < kJoints; ++j) {
        const FrictionOutput fr = LuGreFriction(y[4 + j], y[8 + j], JointFriction(p, j));
        torque[j] = -fr.torque + EndStopTorque(y[j], y[4 + j], j, p);
        dy[j] = y[4 + j];
        dy[8 + j] = fr.bristle_rate;
      }
      const Vec4 qdd = ArmAccelerations(Vec4(y[0], y[1], y[2], y[3]),
                                        Vec4(y[4], y[5], y[6], y[7]), torque, mount, p);
      for (int j = 0; j < kJoints; ++j) dy[4 + j] = qdd[j];
    };
    auto energy = [&](const std::vector<double>& y) {
      ManipulatorState s;
      for (int j = 0; j < kJoints; ++j) {
        s.angle[j] = y[j];
        s.rate[j] = y[4 + j];
        s.bristle[j] = y[8 + j];
      }
      return ArmEnergy(s, mount.gravity, p);
    };
    Rk4Workspace ws;
    const double h = 0.0005;
    double prev = energy(x);
    for (int k = 0; k < 20000; ++k) {
      Rk4Step(f, std::span<double>(x), k * h, h, ws);
      const double e = energy(x);
      worst_growth = std::max(worst_growth, (e - prev) / (std::abs(prev) + 1.0));
      prev = e;
    }
  }
  return {worst_growth < 1e-6,
          Fmt("50 states x 10 s, max per-step relative growth %.2e, %.1f s", worst_growth,
              Since(start))};
}

// --- scenario criteria ------------------------------------------------------------

struct ScenarioResults {
  ScenarioRun coop;
  ScenarioRun plain;
  double coop_seconds = 0.0;
  double plain_seconds = 0.0;
};

const ScenarioResults& Scenarios() {
  static const ScenarioResults results = [] {
    ScenarioResults r;
    const SimConfig cfg;
    RunOptions options;
    options.duration = 0.0;
    auto start = Clock::now();
    r.coop = RunScenario(cfg, ControlMode::kCooperative, options);
    r.coop_seconds = Since(start);
    start = Clock::now();
    r.plain = RunScenario(cfg, ControlMode::kNoncooperative, options);
    r.plain_seconds = Since(start);
    return r;
  }();
  return results;
}

// |roll| extremes while the tool path is stepped out.
std::pair<double, double> ExtendedRollBand(const ScenarioRun& run) {
  double lo = 1e9, hi = 0.0;
  const auto& p = run.scenario.params;
  for (const auto& rec : run.run.log) {
    if (rec.x < p.step_position || rec.x >= p.return_start) continue;
    lo = std::min(lo, std::abs(rec.roll));
    hi = std::max(hi, std::abs(rec.roll));
  }
  return {lo, hi};
}

Outcome RollMagnitude() {
  const auto& s = Scenarios();
  bool pass = true;
  std::string detail;
  for (const auto& [name, run, seconds] :
       {std::tuple{"cooperative", &s.coop, s.coop_seconds},
        std::tuple{"noncooperative", &s.plain, s.plain_seconds}}) {
    const auto [lo, hi] = ExtendedRollBand(*run);
    pass = pass && lo > 0.087 && lo >= 0.05 && hi <= 0.5 && seconds < 60.0;
    detail += Fmt("%s |roll| in [%.4f, %.4f] rad while extended, batch %.1f s; ", name, lo, hi,
                  seconds);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome HydraulicHold() {
  const auto& s = Scenarios();
  bool pass = true;
  std::string detail;
  for (const auto& [name, run] :
       {std::pair{"cooperative", &s.coop}, std::pair{"noncooperative", &s.plain}}) {
    const TrackingMetrics& m = run->metrics;
    const double ratio = m.curve_flow_mean / m.step_flow_peak;
    pass = pass && m.step_flow_peak > 0.0 && ratio < 0.05;
    detail += Fmt("%s joint-3 curve mean |Q| / step peak = %.2e / %.2e = %.4f; ", name,
                  m.curve_flow_mean, m.step_flow_peak, ratio);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome CooperativeBenefit() {
  const auto& s = Scenarios();
  const TrackingMetrics& c = s.coop.metrics;
  const TrackingMetrics& n = s.plain.metrics;
  bool pass = c.total.manipulator_rms < n.total.manipulator_rms;
  std::string detail = Fmt("manipulator RMS %.4f vs %.4f m; checkpoints",
                           c.total.manipulator_rms, n.total.manipulator_rms);
  for (double x : Checkpoints()) {
    const double ce = c.checkpoint_error.at(x), ne = n.checkpoint_error.at(x);
    pass = pass && ce < ne;
    detail += Fmt(" x=%g: %.3f vs %.3f", x, ce, ne);
  }
  return {pass, detail};
}

// --- real time ----------------------------------------------------------------------

Outcome RealTime() {
  const SimConfig cfg;
  SessionOptions options;
  options.duration = 60.0;
  options.realtime = true;
  LiveSession session(cfg, ControlMode::kCooperative, options);
  SessionServer server(session, Endpoint{"127.0.0.1", 0});
  session.Start();
  server.Start();

  SessionClient client("127.0.0.1", server.port());
  client.Send(MessageKind::kHello, json::object());
  const auto start = Clock::now();
  auto next_command = start;
  int sent = 0;
  std::uint64_t frames = 0, last_ack = 0, last_command = 0;
  bool finished = false;
  while (!finished && Since(start) < 90.0) {
    if (Clock::now() >= next_command) {
      // Slow sweeps of the tool, with a mode toggle every ten seconds.
      const double phase = Since(start);
      if (sent % 100 == 99) {
        client.Send(MessageKind::kModeSet,
                    {{"mode", (sent / 100) % 2 ? "cooperative" : "noncooperative"}});
      } else {
        last_command = client.Send(
            MessageKind::kCommand,
            {{"ee_velocity", {0.08 * std::sin(0.5 * phase), 0.05 * std::cos(0.3 * phase)}}});
      }
      ++sent;
      next_command += std::chrono::milliseconds(100);
    }
    const std::string text = client.Receive(std::chrono::milliseconds(20));
    if (text.empty()) continue;
    const json j = json::parse(text);
    ++frames;
    if (j.contains("ack")) last_ack = std::max<std::uint64_t>(last_ack, j["ack"]);
    if (j["kind"] == "event" && j["payload"]["name"] == "finished") finished = true;
  }
  client.Close();
  server.Stop();
  const SessionStats st = session.Stop();
  const double p99_us = st.step_time_p99 * 1e6, median_us = st.step_time_median * 1e6;
  const bool pass = finished && st.sim_time >= 60.0 - 1e-9 && st.real_time_factor >= 1.0 &&
                    st.step_time_p99 < 0.5e-3;
  return {pass, Fmt("sim %.1f s in %.3f s wall, RTF %.4f, step median %.0f us, p99 %.0f us "
                    "(%.1fx median), overruns %d, frames received %llu, last ack %llu of %llu",
                    st.sim_time, st.wall_time, st.real_time_factor, median_us, p99_us,
                    p99_us / std::max(1.0, median_us), st.overruns,
                    static_cast<unsigned long long>(frames),
                    static_cast<unsigned long long>(last_ack),
                    static_cast<unsigned long long>(last_command))};
}

// --- determinism --------------------------------------------------------------------

Outcome Determinism() {
  const SimConfig cfg;
  RunOptions options;
  options.duration = 30.0;
  std::string csv[2];
  for (auto& text : csv) {
    const ScenarioRun run = RunScenario(cfg, ControlMode::kCooperative, options);
    std::ostringstream out;
    WriteTelemetryCsv(out, run.run.log);
    text = out.str();
  }
  return {csv[0] == csv[1] && !csv[0].empty(),
          Fmt("two 30 s cooperative runs, %zu bytes of telemetry each, identical: %s",
              csv[0].size(), csv[0] == csv[1] ? "yes" : "no")};
}

}  // namespace
}  // namespace vmsim

int main() {
  using namespace vmsim;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"slip-totality", SlipTotality},
      {"integrator-order", IntegratorOrder},
      {"lq-correctness", LqCorrectness},
      {"kinematics", Kinematics},
      {"friction", Friction},
      {"passive-energy", PassiveEnergy},
      {"roll-magnitude", RollMagnitude},
      {"hydraulic-hold", HydraulicHold},
      {"cooperative-benefit", CooperativeBenefit},
      {"real-time", RealTime},
      {"determinism", Determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

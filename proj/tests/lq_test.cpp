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
#include <random>

#include "vmsim/lq.hpp"

namespace vmsim {
namespace {

LqParams Integrator(double dt, double horizon) {
  LqParams p;
  p.a = Matrix::Zero(1, 1);
  p.b_h = Matrix::Ones(1, 1);
  p.b_a = Matrix::Zero(1, 0);
  p.q = Matrix::Ones(1, 1);
  p.r_hh = Matrix::Ones(1, 1);
  p.r_ha = Matrix::Zero(0, 0);
  p.time_step = dt;
  p.horizon = horizon;
  return p;
}

// Random controllable three-state problem with two inputs and one exogenous input.
LqParams RandomProblem(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  auto random = [&](int r, int c) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
    return m;
  };
  LqParams p;
  p.a = 0.5 * random(3, 3);
  p.b_h = random(3, 2);
  p.b_a = random(3, 1);
  const Matrix lq = random(3, 3);
  p.q = lq * lq.transpose();
  const Matrix lr = random(2, 2);
  p.r_hh = lr * lr.transpose() + 0.5 * Matrix::Identity(2, 2);
  p.r_ha = Matrix::Identity(1, 1);
  p.time_step = 0.05;
  p.horizon = 1.0;
  return p;
}

struct Rollout {
  Matrix inputs;  // m x N
  double cost = 0.0;
};

// Closed loop under the schedule, with an optional perturbation of the first gain.
Rollout Simulate(const DiscreteLq& d, const GainSchedule& g, const Vector& x0, const Vector& w,
                 const Vector& ref, const Matrix& first_gain_delta = Matrix()) {
  Rollout out;
  out.inputs = Matrix::Zero(d.b.cols(), d.steps);
  Vector x = x0;
  for (int k = 0; k < d.steps; ++k) {
    Vector u = LqInput(g, k, x, w, ref);
    if (k == 0 && first_gain_delta.size() > 0) u -= first_gain_delta * x;
    out.inputs.col(k) = u;
    const Vector e = x - ref;
    out.cost += e.dot(d.q * e) + u.dot(d.r * u);
    x = d.a * x + d.b * u + d.e * w;
  }
  return out;
}

// Open-loop optimum of the same cost from the stacked prediction equations.
Matrix BatchOptimum(const DiscreteLq& d, const Vector& x0, const Vector& w, const Vector& ref) {
  const auto n = d.a.rows(), m = d.b.cols();
  const int N = d.steps;
  Matrix phi = Matrix::Zero(n * N, n);
  Matrix gamma = Matrix::Zero(n * N, m * N);
  Vector drift = Vector::Zero(n * N);
  Matrix power = Matrix::Identity(n, n);
  Vector forced = Vector::Zero(n);
  for (int k = 0; k < N; ++k) {
    phi.block(k * n, 0, n, n) = power;
    drift.segment(k * n, n) = forced;
    for (int j = 0; j < k; ++j) {
      Matrix a_pow = Matrix::Identity(n, n);
      for (int i = 0; i < k - 1 - j; ++i) a_pow = a_pow * d.a;
      gamma.block(k * n, j * m, n, m) = a_pow * d.b;
    }
    forced = d.a * forced + d.e * w;
    power = d.a * power;
  }
  Matrix q_big = Matrix::Zero(n * N, n * N);
  Matrix r_big = Matrix::Zero(m * N, m * N);
  Vector ref_big(n * N);
  for (int k = 0; k < N; ++k) {
    q_big.block(k * n, k * n, n, n) = d.q;
    r_big.block(k * m, k * m, m, m) = d.r;
    ref_big.segment(k * n, n) = ref;
  }
  const Vector free = phi * x0 + drift - ref_big;
  const Matrix h = gamma.transpose() * q_big * gamma + r_big;
  const Vector u = -h.ldlt().solve(gamma.transpose() * q_big * free);
  return u.reshaped(m, N);
}

TEST(DiscretizeTest, DoubleIntegratorClosedForm) {
  LqParams p;
  p.a = Matrix::Zero(2, 2);
  p.a(0, 1) = 1.0;
  p.b_h = Matrix::Zero(2, 1);
  p.b_h(1, 0) = 1.0;
  p.b_a = Matrix::Zero(2, 1);
  p.b_a(0, 0) = 1.0;
  p.q = Matrix::Identity(2, 2);
  p.r_hh = Matrix::Identity(1, 1);
  p.r_ha = Matrix::Identity(1, 1);
  p.time_step = 0.1;
  p.horizon = 1.0;
  const DiscreteLq d = Discretize(p);
  const double h = 0.1;
  EXPECT_NEAR(d.a(0, 1), h, 1e-15);
  EXPECT_NEAR(d.a(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(d.b(0, 0), h * h / 2.0, 1e-15);
  EXPECT_NEAR(d.b(1, 0), h, 1e-15);
  EXPECT_NEAR(d.e(0, 0), h, 1e-15);
  EXPECT_NEAR(d.e(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(d.q(0, 0), h, 1e-15);
  EXPECT_NEAR(d.r(0, 0), h, 1e-15);
  EXPECT_EQ(d.steps, 10);
}

TEST(LqTest, ScalarIntegratorApproachesTheRiccatiSolution) {
  for (double dt : {0.1, 0.01, 0.001}) {
    const GainSchedule g = SolveLqHuman(Integrator(dt, 20.0));
    const double p_inf = (dt + std::sqrt(dt * dt + 4.0)) / 2.0;
    EXPECT_NEAR(g.cost_to_go.front()(0, 0), p_inf, 1e-9);
    EXPECT_NEAR(g.feedback.front()(0, 0), 1.0 / p_inf, 1e-9);
  }
  // Continuous-time limit: P = 1, K = 1.
  const GainSchedule fine = SolveLqHuman(Integrator(1e-4, 12.0));
  EXPECT_NEAR(fine.feedback.front()(0, 0), 1.0, 1e-4);
}

TEST(LqTest, ZeroStateWeightGivesZeroGains) {
  LqParams p = Integrator(0.01, 1.0);
  p.q = Matrix::Zero(1, 1);
  const GainSchedule g = SolveLqHuman(p);
  for (const Matrix& k : g.feedback) EXPECT_EQ(k(0, 0), 0.0);
}

TEST(LqTest, MatchesBatchLeastSquares) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const LqParams p = RandomProblem(rng);
    const DiscreteLq d = Discretize(p);
    const GainSchedule g = SolveDiscreteLq(d);
    Vector x0(3), w(1), ref(3);
    x0 << nd(rng), nd(rng), nd(rng);
    w << nd(rng);
    ref << nd(rng), nd(rng), nd(rng);
    for (bool with_extras : {false, true}) {
      const Vector wk = with_extras ? w : Vector::Zero(1);
      const Vector rk = with_extras ? ref : Vector::Zero(3);
      const Matrix oracle = BatchOptimum(d, x0, wk, rk);
      const Matrix inputs = Simulate(d, g, x0, wk, rk).inputs;
      EXPECT_LT((inputs - oracle).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + oracle.cwiseAbs().maxCoeff()))
          << "trial " << trial;
    }
  }
}

TEST(LqTest, OptimalCostEqualsTheQuadraticForm) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd(0.0, 1.0);
  const LqParams p = RandomProblem(rng);
  const DiscreteLq d = Discretize(p);
  const GainSchedule g = SolveDiscreteLq(d);
  Vector x0(3);
  x0 << nd(rng), nd(rng), nd(rng);
  const double cost = Simulate(d, g, x0, Vector::Zero(1), Vector::Zero(3)).cost;
  EXPECT_NEAR(cost, x0.dot(g.cost_to_go.front() * x0), 1e-10 * cost);
}

TEST(LqTest, PerturbedGainsCostMore) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> nd(0.0, 1.0);
  const LqParams p = RandomProblem(rng);
  const DiscreteLq d = Discretize(p);
  const GainSchedule g = SolveDiscreteLq(d);
  Vector x0(3), w(1);
  x0 << 1.0, -0.5, 0.25;
  w << 0.3;
  const double best = Simulate(d, g, x0, w, Vector::Zero(3)).cost;
  for (int n = 0; n < 50; ++n) {
    Matrix delta(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) delta(i, j) = 0.05 * nd(rng);
    EXPECT_GT(Simulate(d, g, x0, w, Vector::Zero(3), delta).cost, best);
  }
}

TEST(LqTest, InvariantUnderJointWeightScaling) {
  std::mt19937_64 rng(31);
  LqParams p = RandomProblem(rng);
  const GainSchedule g = SolveLqHuman(p);
  p.q *= 7.5;
  p.r_hh *= 7.5;
  const GainSchedule scaled = SolveLqHuman(p);
  ASSERT_EQ(g.size(), scaled.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_LT((g.feedback[k] - scaled.feedback[k]).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((g.exogenous_gain[k] - scaled.exogenous_gain[k]).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(LqTest, AutomationWeightLeavesGainsUnchanged) {
  std::mt19937_64 rng(37);
  LqParams p = RandomProblem(rng);
  const GainSchedule g = SolveLqHuman(p);
  p.r_ha *= 100.0;
  const GainSchedule other = SolveLqHuman(p);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(g.feedback[k], other.feedback[k]);
}

TEST(LqTest, CostToGoIsPsdAndGrowsWithTheHorizon) {
  std::mt19937_64 rng(41);
  const GainSchedule g = SolveLqHuman(RandomProblem(rng));
  for (std::size_t k = 0; k + 1 < g.cost_to_go.size(); ++k) {
    const Matrix& p = g.cost_to_go[k];
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> diff(p - g.cost_to_go[k + 1]);
    EXPECT_GE(diff.eigenvalues().minCoeff(), -1e-12) << k;
  }
}

TEST(LqTest, ScheduleIndexing) {
  const GainSchedule g = SolveLqHuman(Integrator(0.1, 1.0));
  EXPECT_EQ(g.size(), 10u);
  EXPECT_DOUBLE_EQ(g.horizon(), 1.0);
  EXPECT_EQ(g.IndexAt(-1.0), 0u);
  EXPECT_EQ(g.IndexAt(0.26), 3u);
  EXPECT_EQ(g.IndexAt(50.0), 9u);
}

TEST(LqTest, RejectsNonStabilizablePair) {
  LqParams p = Integrator(0.01, 1.0);
  p.a = Matrix::Identity(2, 2);
  p.a(1, 1) = -1.0;
  p.b_h = Matrix::Zero(2, 1);
  p.b_h(1, 0) = 1.0;  // cannot reach the unstable first state
  p.b_a = Matrix::Zero(2, 0);
  p.q = Matrix::Identity(2, 2);
  EXPECT_FALSE(IsStabilizable(p.a, p.b_h));
  EXPECT_THROW(SolveLqHuman(p), std::invalid_argument);
  p.b_h(0, 0) = 1.0;
  EXPECT_TRUE(IsStabilizable(p.a, p.b_h));
  EXPECT_NO_THROW(SolveLqHuman(p));
}

TEST(LqTest, RejectsBadDimensionsAndWeights) {
  LqParams p = Integrator(0.01, 1.0);
  p.b_h = Matrix::Ones(2, 1);
  EXPECT_THROW(SolveLqHuman(p), std::invalid_argument);
  p = Integrator(0.01, 1.0);
  p.r_hh = Matrix::Zero(1, 1);
  EXPECT_THROW(SolveLqHuman(p), std::invalid_argument);
  p = Integrator(0.01, 1.0);
  p.q = -Matrix::Ones(1, 1);
  EXPECT_THROW(SolveLqHuman(p), std::invalid_argument);
  p = Integrator(0.01, 1.0);
  p.horizon = 0.0;
  EXPECT_THROW(SolveLqHuman(p), std::invalid_argument);
}

}  // namespace
}  // namespace vmsim

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

// Finite-horizon linear-quadratic control for the simulated operator.
//
// The operator minimizes
//   J = sum_k (x_k - r)' Q (x_k - r) + u_k' Rhh u_k + ua_k' Rha ua_k
// subject to x' = A x + Bh u + Ba ua, treating the automation input ua as a
// known exogenous signal. Since the operator does not choose ua, Rha changes
// the cost value but never the gains.

#ifndef VMSIM_LQ_HPP_
#define VMSIM_LQ_HPP_

#include <vector>

#include <Eigen/Dense>

namespace vmsim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Continuous-time design model and weights.
struct LqParams {
  Matrix a;     // n x n
  Matrix b_h;   // n x m, operator input
  Matrix b_a;   // n x k, automation input
  Matrix q;     // n x n, PSD
  Matrix r_hh;  // m x m, PD
  Matrix r_ha;  // k x k, PD
  double horizon = 1.0;    // s
  double time_step = 0.01; // s
};

// Discrete-time problem: x_{k+1} = A x_k + B u_k + E w, w held constant.
struct DiscreteLq {
  Matrix a, b, e, q, r;
  int steps = 0;
};

// u_k = -K_k x_k - Kw_k w - Kr_k ref.
struct GainSchedule {
  double time_step = 0.0;
  std::vector<Matrix> feedback;        // K, m x n
  std::vector<Matrix> exogenous_gain;  // Kw, m x k
  std::vector<Matrix> reference_gain;  // Kr, m x n
  std::vector<Matrix> cost_to_go;      // P_k, n x n; one more entry than gains

  std::size_t size() const { return feedback.size(); }
  double horizon() const { return time_step * static_cast<double>(size()); }
  // Nearest grid index for time t; clamps beyond the horizon.
  std::size_t IndexAt(double t) const;
};

// Throws std::invalid_argument on inconsistent dimensions or weights that are
// not symmetric PSD (Q) / PD (R).
void CheckLqParams(const LqParams& p);

// PBH test: rank [A - lambda I, B] = n for every eigenvalue with Re >= 0.
bool IsStabilizable(const Matrix& a, const Matrix& b, double tol = 1e-9);

// Zero-order-hold discretization of (A, [Bh Ba]) through the augmented matrix
// exponential; weights are scaled by the step.
DiscreteLq Discretize(const LqParams& p);

// Backward Riccati recursion from zero terminal cost.
GainSchedule SolveDiscreteLq(const DiscreteLq& d);

// Validates, checks stabilizability of (A, Bh), discretizes and solves.
GainSchedule SolveLqHuman(const LqParams& p);

// Evaluates the schedule at grid index k.
Vector LqInput(const GainSchedule& g, std::size_t k, const Vector& x, const Vector& w,
               const Vector& ref);

}  // namespace vmsim

#endif  // VMSIM_LQ_HPP_

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

#include "vmsim/lq.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace vmsim {
namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("lq: " + what);
}

bool IsSymmetric(const Matrix& m) {
  return m.rows() == m.cols() &&
         (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
}

double MinEigen(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().minCoeff();
}

}  // namespace

std::size_t GainSchedule::IndexAt(double t) const {
  if (feedback.empty()) throw std::logic_error("gain schedule is empty");
  if (!(t > 0.0)) return 0;
  const double k = std::floor(t / time_step + 0.5);
  if (k >= static_cast<double>(feedback.size())) return feedback.size() - 1;
  return static_cast<std::size_t>(k);
}

void CheckLqParams(const LqParams& p) {
  const auto n = p.a.rows();
  Require(n > 0 && p.a.cols() == n, "A must be square");
  Require(p.b_h.rows() == n && p.b_h.cols() > 0, "Bh must have n rows");
  Require(p.b_a.rows() == n, "Ba must have n rows");
  Require(p.q.rows() == n && p.q.cols() == n, "Q must be n x n");
  Require(p.r_hh.rows() == p.b_h.cols() && p.r_hh.cols() == p.b_h.cols(), "Rhh must be m x m");
  Require(p.r_ha.rows() == p.b_a.cols() && p.r_ha.cols() == p.b_a.cols(), "Rha must be k x k");
  Require(IsSymmetric(p.q) && MinEigen(p.q) >= -1e-12, "Q must be symmetric positive semidefinite");
  Require(IsSymmetric(p.r_hh) && MinEigen(p.r_hh) > 0.0, "Rhh must be symmetric positive definite");
  if (p.r_ha.size() > 0) {
    Require(IsSymmetric(p.r_ha) && MinEigen(p.r_ha) > 0.0,
            "Rha must be symmetric positive definite");
  }
  Require(p.horizon > 0.0 && p.time_step > 0.0, "horizon and time step must be > 0");
}

bool IsStabilizable(const Matrix& a, const Matrix& b, double tol) {
  const auto n = a.rows();
  Eigen::ComplexEigenSolver<Matrix> es(a);
  using CMatrix = Eigen::MatrixXcd;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> lambda = es.eigenvalues()[i];
    if (lambda.real() < -tol) continue;
    CMatrix pbh(n, n + b.cols());
    pbh.leftCols(n) = a.cast<std::complex<double>>() - lambda * CMatrix::Identity(n, n);
    pbh.rightCols(b.cols()) = b.cast<std::complex<double>>();
    Eigen::JacobiSVD<CMatrix> svd(pbh);
    const auto& sv = svd.singularValues();
    const double scale = std::max(1.0, sv[0]);
    if (sv[n - 1] <= tol * scale) return false;
  }
  return true;
}

DiscreteLq Discretize(const LqParams& p) {
  const auto n = p.a.rows();
  const auto m = p.b_h.cols();
  const auto k = p.b_a.cols();
  const double h = p.time_step;
  Matrix aug = Matrix::Zero(n + m + k, n + m + k);
  aug.topLeftCorner(n, n) = p.a * h;
  aug.block(0, n, n, m) = p.b_h * h;
  if (k > 0) aug.block(0, n + m, n, k) = p.b_a * h;
  const Matrix phi = aug.exp();
  DiscreteLq d;
  d.a = phi.topLeftCorner(n, n);
  d.b = phi.block(0, n, n, m);
  d.e = k > 0 ? Matrix(phi.block(0, n + m, n, k)) : Matrix::Zero(n, 0);
  d.q = p.q * h;
  d.r = p.r_hh * h;
  d.steps = static_cast<int>(std::ceil(p.horizon / h - 1e-9));
  return d;
}

GainSchedule SolveDiscreteLq(const DiscreteLq& d) {
  const auto n = d.a.rows();
  const auto k = d.e.cols();
  GainSchedule g;
  g.feedback.resize(d.steps);
  g.exogenous_gain.resize(d.steps);
  g.reference_gain.resize(d.steps);
  g.cost_to_go.resize(d.steps + 1);

  Matrix p = Matrix::Zero(n, n);
  Matrix s_w = Matrix::Zero(n, k);  // linear-term sensitivity to the exogenous input
  Matrix s_r = Matrix::Zero(n, n);  // and to the reference
  g.cost_to_go[d.steps] = p;
  for (int step = d.steps - 1; step >= 0; --step) {
    const Matrix bt_p = d.b.transpose() * p;
    const Eigen::LDLT<Matrix> gram(d.r + bt_p * d.b);
    if (gram.info() != Eigen::Success || !gram.isPositive()) {
      throw std::runtime_error("lq: R + B'PB lost positive definiteness");
    }
    const Matrix k_x = gram.solve(bt_p * d.a);
    const Matrix k_w = gram.solve(d.b.transpose() * (p * d.e + s_w));
    const Matrix k_r = gram.solve(d.b.transpose() * s_r);
    const Matrix closed = d.a - d.b * k_x;
    s_w = closed.transpose() * (p * d.e + s_w);
    s_r = -d.q + closed.transpose() * s_r;
    Matrix next = d.q + d.a.transpose() * p * d.a - d.a.transpose() * p * d.b * k_x;
    p = 0.5 * (next + next.transpose());
    g.feedback[step] = k_x;
    g.exogenous_gain[step] = k_w;
    g.reference_gain[step] = k_r;
    g.cost_to_go[step] = p;
  }
  return g;
}

GainSchedule SolveLqHuman(const LqParams& p) {
  CheckLqParams(p);
  if (!IsStabilizable(p.a, p.b_h)) {
    throw std::invalid_argument("lq: (A, Bh) is not stabilizable");
  }
  GainSchedule g = SolveDiscreteLq(Discretize(p));
  g.time_step = p.time_step;
  return g;
}

Vector LqInput(const GainSchedule& g, std::size_t k, const Vector& x, const Vector& w,
               const Vector& ref) {
  Vector u = -g.feedback[k] * x;
  if (w.size() > 0) u -= g.exogenous_gain[k] * w;
  if (ref.size() > 0) u -= g.reference_gain[k] * ref;
  return u;
}

}  // namespace vmsim

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

// Classical fixed-step fourth-order Runge-Kutta.

#ifndef VMSIM_INTEGRATOR_HPP_
#define VMSIM_INTEGRATOR_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "vmsim/types.hpp"

namespace vmsim {

// Scratch buffers reused across steps so the stepping loop does not allocate.
struct Rk4Workspace {
  std::vector<double> k1, k2, k3, k4, tmp;

  void Resize(std::size_t n) {
    if (k1.size() == n) return;
    k1.assign(n, 0.0);
    k2.assign(n, 0.0);
    k3.assign(n, 0.0);
    k4.assign(n, 0.0);
    tmp.assign(n, 0.0);
  }
};

namespace internal {

inline void CheckFinite(std::span<const double> d, const char* stage) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i])) {
      throw IntegrationError(std::string("non-finite derivative in RK4 stage ") + stage +
                                 " at component " + std::to_string(i),
                             i);
    }
  }
}

}  // namespace internal

// Advances `x` in place by one step of size h. `f(t, x, dxdt)` writes the
// derivative; any input it reads is held constant over the four stages.
// Throws IntegrationError naming the first non-finite derivative component.
template <class F>
void Rk4Step(F&& f, std::span<double> x, double t, double h, Rk4Workspace& ws) {
  const std::size_t n = x.size();
  ws.Resize(n);
  auto& k1 = ws.k1;
  auto& k2 = ws.k2;
  auto& k3 = ws.k3;
  auto& k4 = ws.k4;
  auto& tmp = ws.tmp;

  f(t, std::span<const double>(x.data(), n), std::span<double>(k1));
  internal::CheckFinite(k1, "1");
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  f(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k2));
  internal::CheckFinite(k2, "2");
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  f(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k3));
  internal::CheckFinite(k3, "3");
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  f(t + h, std::span<const double>(tmp), std::span<double>(k4));
  internal::CheckFinite(k4, "4");
  for (std::size_t i = 0; i < n; ++i) {
    x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

template <class F>
std::vector<double> Rk4Step(F&& f, std::vector<double> x, double t, double h) {
  Rk4Workspace ws;
  Rk4Step(f, std::span<double>(x), t, h, ws);
  return x;
}

}  // namespace vmsim

#endif  // VMSIM_INTEGRATOR_HPP_

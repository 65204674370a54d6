// Copyright 2026 The rmpflow Authors.
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

#ifndef RMPFLOW_METRIC_HPP_
#define RMPFLOW_METRIC_HPP_

#include <functional>

#include "rmpflow/types.hpp"

namespace rmpflow {

// Velocity-dependent Riemannian metric G(x, xdot) together with the analytic
// partial derivatives needed for the curvature terms. dx(i)/dv(i) return the
// matrix partials dG/dx_i and dG/dxdot_i.
struct MetricSpec {
  int dim = 0;
  std::function<Matrix(const Vector&, const Vector&)> value;
  std::function<Matrix(const Vector&, const Vector&, int)> dx;
  std::function<Matrix(const Vector&, const Vector&, int)> dv;
};

// Velocity-curvature correction to the inertia:
//   XiG = 1/2 * sum_i xdot_i * d(g_i)/d(xdot)
// where g_i is the i-th column of G.
Matrix inertia_correction(const MetricSpec& metric, const Vector& x, const Vector& xdot);

// Curvature force bias:
//   xiG = Gdot_x * xdot - 1/2 * grad_x(xdot' G xdot)
// with Gdot_x = sum_j xdot_j * dG/dx_j.
Vector curvature_force(const MetricSpec& metric, const Vector& x, const Vector& xdot);

// Inertia matrix M = G + XiG.
Matrix inertia(const MetricSpec& metric, const Vector& x, const Vector& xdot);

// Velocity-independent constant metric; the correction terms vanish.
MetricSpec constant_metric(Matrix g);

// Isotropic speed-weighted metric G = (1 + |xdot|^2) * I, useful for
// exercising the velocity-dependent paths.
MetricSpec speed_weighted_identity(int dim);

}  // namespace rmpflow

#endif  // RMPFLOW_METRIC_HPP_

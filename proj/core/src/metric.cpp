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

#include "rmpflow/metric.hpp"

#include <string>
#include <utility>

namespace rmpflow {

namespace {

void check_state(const MetricSpec& metric, const Vector& x, const Vector& xdot,
                 const char* where) {
  if (x.size() != metric.dim || xdot.size() != metric.dim) {
    throw StructuralError(std::string(where) + ": state dimension (" + std::to_string(x.size()) +
                          ", " + std::to_string(xdot.size()) + ") does not match metric dimension " +
                          std::to_string(metric.dim));
  }
}

}  // namespace

Matrix inertia_correction(const MetricSpec& metric, const Vector& x, const Vector& xdot) {
  check_state(metric, x, xdot, "inertia_correction");
  const int n = metric.dim;
  Matrix xi = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    xi.col(j) = 0.5 * (metric.dv(x, xdot, j) * xdot);
  }
  return xi;
}

Vector curvature_force(const MetricSpec& metric, const Vector& x, const Vector& xdot) {
  check_state(metric, x, xdot, "curvature_force");
  const int n = metric.dim;
  Matrix gdot = Matrix::Zero(n, n);
  Vector grad_quad(n);
  for (int j = 0; j < n; ++j) {
    const Matrix dg = metric.dx(x, xdot, j);
    gdot += xdot[j] * dg;
    grad_quad[j] = xdot.dot(dg * xdot);
  }
  return gdot * xdot - 0.5 * grad_quad;
}

Matrix inertia(const MetricSpec& metric, const Vector& x, const Vector& xdot) {
  const Matrix m = metric.value(x, xdot) + inertia_correction(metric, x, xdot);
  if (!all_finite(m)) {
    throw NumericalError("inertia: non-finite entries");
  }
  return m;
}

MetricSpec constant_metric(Matrix g) {
  if (g.rows() != g.cols() || g.rows() < 1) {
    throw StructuralError("constant_metric: matrix must be square and nonempty");
  }
  const int n = static_cast<int>(g.rows());
  MetricSpec m;
  m.dim = n;
  m.value = [g](const Vector&, const Vector&) { return g; };
  m.dx = [n](const Vector&, const Vector&, int) -> Matrix { return Matrix::Zero(n, n); };
  m.dv = [n](const Vector&, const Vector&, int) -> Matrix { return Matrix::Zero(n, n); };
  return m;
}

MetricSpec speed_weighted_identity(int dim) {
  if (dim < 1) {
    throw StructuralError("speed_weighted_identity: dimension must be positive");
  }
  MetricSpec m;
  m.dim = dim;
  m.value = [dim](const Vector&, const Vector& xdot) -> Matrix {
    return (1.0 + xdot.squaredNorm()) * Matrix::Identity(dim, dim);
  };
  m.dx = [dim](const Vector&, const Vector&, int) -> Matrix { return Matrix::Zero(dim, dim); };
  m.dv = [dim](const Vector&, const Vector& xdot, int j) -> Matrix {
    return 2.0 * xdot[j] * Matrix::Identity(dim, dim);
  };
  return m;
}

}  // namespace rmpflow

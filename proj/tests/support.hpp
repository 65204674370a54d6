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

// Independent numerical oracles shared by the unit and acceptance tests:
// finite-difference Jacobians and metric curvature terms, a projected
// gradient solver for the half-space projection, an eigendecomposition
// pseudoinverse, and a handful of geometry helpers for trajectory checks.

#ifndef RMPFLOW_TESTS_SUPPORT_HPP_
#define RMPFLOW_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstring>
#include <initializer_list>
#include <limits>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "rmpflow/leaf_policy.hpp"
#include "rmpflow/metric.hpp"
#include "rmpflow/task_map.hpp"
#include "rmpflow/types.hpp"

namespace rmpflow::testing {

inline Vector vec(std::initializer_list<double> values) {
  Vector out(static_cast<int>(values.size()));
  int i = 0;
  for (double v : values) out[i++] = v;
  return out;
}

inline bool bits_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

// Central-difference Jacobian, step 1e-6 * (1 + |x|).
inline Matrix fd_jacobian(const TaskMap& map, const Vector& x) {
  const double step = 1e-6 * (1.0 + x.norm());
  Matrix J(map.dim_out, map.dim_in);
  for (int j = 0; j < map.dim_in; ++j) {
    Vector hi = x;
    Vector lo = x;
    hi[j] += step;
    lo[j] -= step;
    J.col(j) = (map.value(hi) - map.value(lo)) / (2.0 * step);
  }
  return J;
}

// d/dt[J(x + t xdot)] * xdot at t = 0 by central differences.
inline Vector fd_curvature(const TaskMap& map, const Vector& x, const Vector& xdot) {
  const double step = 1e-6 * (1.0 + x.norm()) / (1.0 + xdot.norm());
  const Matrix hi = map.jacobian(x + step * xdot);
  const Matrix lo = map.jacobian(x - step * xdot);
  return ((hi - lo) / (2.0 * step)) * xdot;
}

// Inertia correction by differencing G in the velocity coordinates.
inline Matrix fd_inertia_correction(const MetricSpec& metric, const Vector& x,
                                    const Vector& xdot) {
  const double step = 1e-6 * (1.0 + xdot.norm());
  Matrix xi = Matrix::Zero(metric.dim, metric.dim);
  for (int j = 0; j < metric.dim; ++j) {
    Vector hi = xdot;
    Vector lo = xdot;
    hi[j] += step;
    lo[j] -= step;
    const Matrix dG = (metric.value(x, hi) - metric.value(x, lo)) / (2.0 * step);
    xi.col(j) = 0.5 * (dG * xdot);
  }
  return xi;
}

// Curvature force by differencing G in the position coordinates.
inline Vector fd_curvature_force(const MetricSpec& metric, const Vector& x, const Vector& xdot) {
  const double step = 1e-6 * (1.0 + x.norm());
  Matrix gdot = Matrix::Zero(metric.dim, metric.dim);
  Vector grad_quad(metric.dim);
  for (int j = 0; j < metric.dim; ++j) {
    Vector hi = x;
    Vector lo = x;
    hi[j] += step;
    lo[j] -= step;
    const Matrix dG = (metric.value(hi, xdot) - metric.value(lo, xdot)) / (2.0 * step);
    gdot += xdot[j] * dG;
    grad_quad[j] = xdot.dot(dG * xdot);
  }
  return gdot * xdot - 0.5 * grad_quad;
}

// min 1/2 (f - f0)' P (f - f0)  s.t.  a'f <= b, by projected gradient with
// Euclidean projection onto the half-space after every step.
inline Vector pgd_qp(const Matrix& P, const Vector& f0, const Vector& a, double b,
                     int max_iters = 500000, double tol = 1e-13) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(P);
  const double step = 1.0 / es.eigenvalues().maxCoeff();
  auto project = [&](Vector f) {
    const double slack = a.dot(f) - b;
    if (slack > 0.0) f -= (slack / a.squaredNorm()) * a;
    return f;
  };
  Vector f = project(f0);
  for (int it = 0; it < max_iters; ++it) {
    const Vector next = project(f - step * (P * (f - f0)));
    const double change = (next - f).norm();
    f = next;
    if (change <= tol * (1.0 + f.norm())) break;
  }
  return f;
}

// Pseudoinverse solve through a symmetric eigendecomposition; a second,
// independent route next to the SVD used by the library.
inline Vector eig_pinv_solve(const Matrix& M, const Vector& f, double cutoff = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  const Vector evals = es.eigenvalues();
  const double floor = cutoff * evals.cwiseAbs().maxCoeff();
  Vector scaled = Vector::Zero(evals.size());
  for (int i = 0; i < evals.size(); ++i) {
    if (evals[i] > floor) scaled[i] = 1.0 / evals[i];
  }
  return es.eigenvectors() * (scaled.asDiagonal() * (es.eigenvectors().transpose() * f));
}

inline Vector random_vector(int dim, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss;
  Vector out(dim);
  for (int i = 0; i < dim; ++i) out[i] = scale * gauss(rng);
  return out;
}

// Symmetric positive definite with eigenvalues in [1, cond].
inline Matrix random_spd(int dim, std::mt19937& rng, double cond = 10.0) {
  std::normal_distribution<double> gauss;
  Matrix A(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) A(i, j) = gauss(rng);
  }
  const Matrix Q = Eigen::HouseholderQR<Matrix>(A).householderQ();
  std::uniform_real_distribution<double> spread(1.0, cond);
  Vector evals(dim);
  for (int i = 0; i < dim; ++i) evals[i] = spread(rng);
  return Q * evals.asDiagonal() * Q.transpose();
}

// Constant-Jacobian linear map y = A x.
inline TaskMap linear_map(Matrix A) {
  TaskMap m;
  m.dim_in = static_cast<int>(A.cols());
  m.dim_out = static_cast<int>(A.rows());
  auto mat = std::make_shared<Matrix>(std::move(A));
  m.value = [mat](const Vector& x) { return Vector(*mat * x); };
  m.jacobian = [mat](const Vector&) { return *mat; };
  m.curvature = [mat](const Vector&, const Vector&) {
    return Vector(Vector::Zero(mat->rows()));
  };
  return m;
}

// GDS leaf emitting the fixed natural form [f, M] at every state.
inline LeafPolicy constant_leaf(Vector f, Matrix M) {
  LeafPolicy leaf;
  leaf.kind = LeafPolicy::Kind::kGds;
  leaf.metric = constant_metric(std::move(M));
  const int dim = static_cast<int>(f.size());
  auto force = std::make_shared<Vector>(std::move(f));
  leaf.potential.value = [force](const Vector& x) { return -force->dot(x); };
  leaf.potential.gradient = [force](const Vector&) { return Vector(-*force); };
  leaf.damping = [dim](const Vector&, const Vector&) {
    return Matrix(Matrix::Zero(dim, dim));
  };
  return leaf;
}

inline double path_length(const std::vector<Vector>& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
  return total;
}

inline bool segments_intersect(const Vector& p1, const Vector& p2, const Vector& p3,
                               const Vector& p4) {
  const double d1x = p2[0] - p1[0], d1y = p2[1] - p1[1];
  const double d2x = p4[0] - p3[0], d2y = p4[1] - p3[1];
  const double den = d1x * d2y - d1y * d2x;
  if (std::abs(den) < 1e-15) return false;
  const double t = ((p3[0] - p1[0]) * d2y - (p3[1] - p1[1]) * d2x) / den;
  const double s = ((p3[0] - p1[0]) * d1y - (p3[1] - p1[1]) * d1x) / den;
  return t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0;
}

// Proper crossings between two planar polylines, ignoring segments within
// `skip_radius` of `shared_start` where both paths coincide by construction.
inline int polyline_crossings(const std::vector<Vector>& a, const std::vector<Vector>& b,
                              const Vector& shared_start, double skip_radius) {
  int count = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if ((a[i] - shared_start).norm() < skip_radius) continue;
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      if ((b[j] - shared_start).norm() < skip_radius) continue;
      if (segments_intersect(a[i], a[i + 1], b[j], b[j + 1])) ++count;
    }
  }
  return count;
}

// Largest distance from a point of `a` to the nearest sample of `b`;
// a separation measure between two sampled paths.
inline double max_min_distance(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double worst = 0.0;
  for (const Vector& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& q : b) best = std::min(best, (p - q).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

// Solution of qddot + 2 qdot + q = 0 from (q0, v0).
inline double critically_damped(double q0, double v0, double t) {
  return (q0 + (v0 + q0) * t) * std::exp(-t);
}

}  // namespace rmpflow::testing

#endif  // RMPFLOW_TESTS_SUPPORT_HPP_

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

#include "rmpflow/leaf_policy.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace rmpflow {

namespace {

// Distances below this are flattened inside the collision barrier weight so
// the weight stays finite through the surface.
constexpr double kBarrierClamp = 1e-6;

Vector solve_spd(const Matrix& M, const Vector& rhs, const char* where) {
  Eigen::LDLT<Matrix> ldlt(M);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError(std::string(where) + ": inertia factorization failed");
  }
  Vector u = ldlt.solve(rhs);
  if (!all_finite(u)) {
    throw NumericalError(std::string(where) + ": non-finite nominal acceleration");
  }
  return u;
}

// v = -R(pi/2) grad with R(pi/2) = [[0,-1],[1,0]].
Vector quarter_turn_descent(const Vector& grad) {
  Vector v(2);
  v[0] = grad[1];
  v[1] = -grad[0];
  return v;
}

void require_planar(const MetricSpec& metric, const char* who) {
  if (metric.dim != 2) {
    throw StructuralError(std::string(who) + ": requires a 2-D space, got dimension " +
                          std::to_string(metric.dim));
  }
}

}  // namespace

ScalarField zero_potential(int dim) {
  ScalarField f;
  f.value = [](const Vector&) { return 0.0; };
  f.gradient = [dim](const Vector&) -> Vector { return Vector::Zero(dim); };
  return f;
}

ScalarField quadratic_potential(Vector center, double gain) {
  ScalarField f;
  f.value = [center, gain](const Vector& x) { return 0.5 * gain * (x - center).squaredNorm(); };
  f.gradient = [center, gain](const Vector& x) -> Vector { return gain * (x - center); };
  return f;
}

ScalarField softnorm_potential(Vector goal, double gain) {
  ScalarField f;
  f.value = [goal, gain](const Vector& x) {
    const double r = (x - goal).norm();
    return gain * (r - std::log1p(r));
  };
  f.gradient = [goal, gain](const Vector& x) -> Vector {
    const Vector d = x - goal;
    return gain * d / (1.0 + d.norm());
  };
  return f;
}

NominalController nominal_potential(const ScalarField& phi, const MetricSpec& metric) {
  NominalController c;
  c.kind = "potential";
  c.accel = [phi, metric](const Vector& x, const Vector& xdot, double) -> Vector {
    const Vector force = -phi.gradient(x);
    return solve_spd(inertia(metric, x, xdot), force, "nominal_potential");
  };
  return c;
}

NominalController nominal_spiral(const ScalarField& phi, const MetricSpec& metric) {
  require_planar(metric, "nominal_spiral");
  NominalController c;
  c.kind = "spiral";
  c.accel = [phi, metric](const Vector& x, const Vector& xdot, double) -> Vector {
    const Vector grad = phi.gradient(x);
    const Vector force = -grad + xdot.norm() * quarter_turn_descent(grad);
    return solve_spd(inertia(metric, x, xdot), force, "nominal_spiral");
  };
  return c;
}

NominalController nominal_sinusoidal(const ScalarField& phi, const MetricSpec& metric) {
  require_planar(metric, "nominal_sinusoidal");
  NominalController c;
  c.kind = "sinusoidal";
  c.time_varying = true;
  c.accel = [phi, metric](const Vector& x, const Vector& xdot, double t) -> Vector {
    const Vector grad = phi.gradient(x);
    const Vector force = -grad + std::sin(t / 4.0) * xdot.norm() * quarter_turn_descent(grad);
    return solve_spd(inertia(metric, x, xdot), force, "nominal_sinusoidal");
  };
  return c;
}

RmpNatural gds_force(const LeafPolicy& leaf, const Vector& x, const Vector& xdot) {
  RmpNatural rmp;
  rmp.M = inertia(leaf.metric, x, xdot);
  rmp.f = -leaf.potential.gradient(x) - leaf.damping(x, xdot) * xdot -
          curvature_force(leaf.metric, x, xdot);
  return rmp;
}

LeafEval clf_force(const LeafPolicy& leaf, const Vector& x, const Vector& xdot, double t) {
  LeafEval eval;
  const Matrix M = inertia(leaf.metric, x, xdot);
  const Vector f0 = M * leaf.clf.nominal.accel(x, xdot, t);
  eval.rmp.M = M;
  eval.rmp.f = f0;

  const double speed = xdot.norm();
  if (speed <= kVelocityDeadband) {
    return eval;
  }

  const Vector bias = leaf.potential.gradient(x) + curvature_force(leaf.metric, x, xdot);
  const double b = -xdot.dot(bias) - leaf.clf.alpha(speed);
  const double violation = xdot.dot(f0) - b;
  if (violation <= 0.0) {
    return eval;
  }

  Vector pa;
  switch (leaf.clf.weight) {
    case WeightKind::kIdentity:
      pa = xdot;
      break;
    case WeightKind::kInverseInertia:
      pa = M * xdot;
      break;
    case WeightKind::kExplicit:
      pa = leaf.clf.weight_inverse * xdot;
      break;
  }
  eval.rmp.f = f0 - (violation / xdot.dot(pa)) * pa;
  eval.constraint_active = true;
  return eval;
}

LeafEval LeafPolicy::evaluate(const Vector& x, const Vector& xdot, double t) const {
  if (x.size() != metric.dim || xdot.size() != metric.dim) {
    throw StructuralError("leaf evaluate: state dimension (" + std::to_string(x.size()) + ", " +
                          std::to_string(xdot.size()) + ") does not match leaf dimension " +
                          std::to_string(metric.dim));
  }
  if (kind == Kind::kClf) {
    return clf_force(*this, x, xdot, t);
  }
  LeafEval eval;
  eval.rmp = gds_force(*this, x, xdot);
  return eval;
}

LeafPolicy make_gds_attractor(Vector goal, double gain, double damping) {
  const int dim = static_cast<int>(goal.size());
  LeafPolicy leaf;
  leaf.kind = LeafPolicy::Kind::kGds;
  leaf.metric = constant_metric(Matrix::Identity(dim, dim));
  leaf.potential = softnorm_potential(std::move(goal), gain);
  leaf.damping = [dim, damping](const Vector&, const Vector&) -> Matrix {
    return damping * Matrix::Identity(dim, dim);
  };
  return leaf;
}

LeafPolicy make_gds_attractor_1d(double gain, double damping) {
  LeafPolicy leaf;
  leaf.kind = LeafPolicy::Kind::kGds;
  leaf.metric = constant_metric(Matrix::Identity(1, 1));
  leaf.potential = quadratic_potential(Vector::Zero(1), gain);
  leaf.damping = [damping](const Vector&, const Vector&) -> Matrix {
    return damping * Matrix::Identity(1, 1);
  };
  return leaf;
}

LeafPolicy make_gds_collision(double damping_gain, double eps_u) {
  auto weight = [](double z) {
    const double zc = std::max(z, kBarrierClamp);
    return 1.0 / (zc * zc * zc * zc);
  };
  auto weight_slope = [](double z) {
    if (z <= kBarrierClamp) return 0.0;
    return -4.0 / (z * z * z * z * z);
  };
  auto gate = [eps_u](double zdot) { return eps_u + std::min(0.0, zdot) * zdot; };
  auto gate_slope = [](double zdot) { return 2.0 * std::min(zdot, 0.0); };

  MetricSpec metric;
  metric.dim = 1;
  metric.value = [weight, gate](const Vector& x, const Vector& xdot) -> Matrix {
    Matrix g(1, 1);
    g(0, 0) = weight(x[0]) * gate(xdot[0]);
    return g;
  };
  metric.dx = [weight_slope, gate](const Vector& x, const Vector& xdot, int) -> Matrix {
    Matrix d(1, 1);
    d(0, 0) = weight_slope(x[0]) * gate(xdot[0]);
    return d;
  };
  metric.dv = [weight, gate_slope](const Vector& x, const Vector& xdot, int) -> Matrix {
    Matrix d(1, 1);
    d(0, 0) = weight(x[0]) * gate_slope(xdot[0]);
    return d;
  };

  LeafPolicy leaf;
  leaf.kind = LeafPolicy::Kind::kGds;
  leaf.metric = std::move(metric);
  leaf.potential = zero_potential(1);
  leaf.damping = [weight, damping_gain](const Vector& x, const Vector&) -> Matrix {
    Matrix b(1, 1);
    b(0, 0) = damping_gain * weight(x[0]);
    return b;
  };
  return leaf;
}

LeafPolicy make_gds_formation(double rest_length, double gain, double damping) {
  LeafPolicy leaf;
  leaf.kind = LeafPolicy::Kind::kGds;
  leaf.metric = constant_metric(Matrix::Identity(1, 1));
  Vector rest(1);
  rest[0] = rest_length;
  leaf.potential = quadratic_potential(std::move(rest), gain);
  leaf.damping = [damping](const Vector&, const Vector&) -> Matrix {
    return damping * Matrix::Identity(1, 1);
  };
  return leaf;
}

LeafPolicy make_gds_damper(int dim, double damping) {
  LeafPolicy leaf;
  leaf.kind = LeafPolicy::Kind::kGds;
  leaf.metric = constant_metric(Matrix::Identity(dim, dim));
  leaf.potential = zero_potential(dim);
  leaf.damping = [dim, damping](const Vector&, const Vector&) -> Matrix {
    return damping * Matrix::Identity(dim, dim);
  };
  return leaf;
}

LeafPolicy make_clf_attractor(Vector goal, double gain, double eta, NominalKind nominal,
                              WeightKind weight, Matrix explicit_weight) {
  const int dim = static_cast<int>(goal.size());
  LeafPolicy leaf;
  leaf.kind = LeafPolicy::Kind::kClf;
  leaf.metric = constant_metric(Matrix::Identity(dim, dim));
  leaf.potential = softnorm_potential(std::move(goal), gain);
  leaf.clf.eta = eta;
  leaf.clf.alpha = [eta](double s) { return eta * s * s; };
  leaf.clf.weight = weight;
  if (weight == WeightKind::kExplicit) {
    if (explicit_weight.rows() != dim || explicit_weight.cols() != dim) {
      throw StructuralError("make_clf_attractor: explicit weight must be " + std::to_string(dim) +
                            "x" + std::to_string(dim));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(explicit_weight);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
      throw StructuralError("make_clf_attractor: explicit weight must be positive definite");
    }
    leaf.clf.weight_inverse = eig.operatorInverseSqrt() * eig.operatorInverseSqrt();
  }
  switch (nominal) {
    case NominalKind::kPotential:
      leaf.clf.nominal = nominal_potential(leaf.potential, leaf.metric);
      break;
    case NominalKind::kSpiral:
      leaf.clf.nominal = nominal_spiral(leaf.potential, leaf.metric);
      break;
    case NominalKind::kSinusoidal:
      leaf.clf.nominal = nominal_sinusoidal(leaf.potential, leaf.metric);
      break;
  }
  return leaf;
}

}  // namespace rmpflow

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

#ifndef RMPFLOW_LEAF_POLICY_HPP_
#define RMPFLOW_LEAF_POLICY_HPP_

#include <functional>
#include <string>

#include "rmpflow/metric.hpp"
#include "rmpflow/types.hpp"

namespace rmpflow {

// Lower-bounded potential with its gradient.
struct ScalarField {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

ScalarField zero_potential(int dim);
// Phi(x) = 1/2 * gain * |x - center|^2.
ScalarField quadratic_potential(Vector center, double gain);
// Phi(x) = gain * (r - log(1 + r)), r = |x - goal|. Smooth everywhere with
// gradient norm bounded by gain.
ScalarField softnorm_potential(Vector goal, double gain);

// Desired acceleration supplied by a subtask designer. Time enters only for
// time-varying heuristics; those are flagged so diagnostics can note that the
// time-invariant convergence analysis does not cover them.
struct NominalController {
  std::function<Vector(const Vector&, const Vector&, double)> accel;
  std::string kind;
  bool time_varying = false;
};

// The stated desired force of all three shipped nominals is mapped to an
// acceleration through the leaf inertia at the same state.
NominalController nominal_potential(const ScalarField& phi, const MetricSpec& metric);
// f_d = -grad(Phi) + |xdot| * v with v the negated quarter-turn rotation of
// grad(Phi); planar only.
NominalController nominal_spiral(const ScalarField& phi, const MetricSpec& metric);
// Spiral term modulated by sin(t/4); planar only, time-varying.
NominalController nominal_sinusoidal(const ScalarField& phi, const MetricSpec& metric);

enum class WeightKind { kIdentity, kInverseInertia, kExplicit };

// Minimally invasive controller setup: class-K decay gain, the weighting
// of the projection objective, and the nominal to stay close to.
struct ClfSpec {
  std::function<double(double)> alpha;  // class-K decay requirement
  double eta = 1.0;                     // gain of the default alpha(s) = eta * s^2
  WeightKind weight = WeightKind::kIdentity;
  Matrix weight_inverse;  // P^{-1}, only for WeightKind::kExplicit
  NominalController nominal;
};

struct LeafEval {
  RmpNatural rmp;
  bool constraint_active = false;
};

// A leaf node policy: either second-order dynamics generated by
// (G, B, Phi), or the constrained projection of a nominal controller.
struct LeafPolicy {
  enum class Kind { kGds, kClf };

  Kind kind = Kind::kGds;
  MetricSpec metric;
  ScalarField potential;
  // Damping matrix B(x, xdot); used by Kind::kGds only.
  std::function<Matrix(const Vector&, const Vector&)> damping;
  // Used by Kind::kClf only.
  ClfSpec clf;

  LeafEval evaluate(const Vector& x, const Vector& xdot, double t) const;
};

// f = -grad(Phi) - B xdot - xiG with M = G + XiG.
RmpNatural gds_force(const LeafPolicy& leaf, const Vector& x, const Vector& xdot);

// Closed-form half-plane projection of the nominal force onto the leaf
// decay constraint
//   xdot' f <= -xdot' (grad(Phi) + xiG) - alpha(|xdot|).
// Inactive constraint (or speeds under the deadband) returns the nominal
// force unchanged.
LeafEval clf_force(const LeafPolicy& leaf, const Vector& x, const Vector& xdot, double t);

// --- shipped leaf families ---------------------------------------------

// Goal attractor on the ambient subtask space: G = I, softnorm potential,
// B = damping * I.
LeafPolicy make_gds_attractor(Vector goal, double gain, double damping);

// Goal attractor on a 1-D distance space: G = 1, Phi = 1/2 * gain * z^2,
// B = damping.
LeafPolicy make_gds_attractor_1d(double gain, double damping);

// Collision avoidance on a 1-D scaled distance space z (zero at the surface):
// barrier metric G = w(z) u(zdot), w = 1/z^4, u = eps_u + min(0, zdot) * zdot,
// Phi = 0, B = damping_gain * w(z). The barrier weight diverges at the
// surface and dominates the combination there.
LeafPolicy make_gds_collision(double damping_gain, double eps_u = 1e-6);

// Distance preservation on a 1-D distance space:
// Phi = 1/2 * gain * (d - rest_length)^2, G = 1, B = damping.
LeafPolicy make_gds_formation(double rest_length, double gain, double damping);

// Pure damper: G = I, Phi = 0, B = damping * I.
LeafPolicy make_gds_damper(int dim, double damping);

enum class NominalKind { kPotential, kSpiral, kSinusoidal };

// Constrained attractor on the ambient subtask space: G = I, softnorm
// potential, alpha(s) = eta * s^2, nominal chosen from the three shipped
// controllers. Spiral and sinusoidal require a planar space. An explicit
// weight must be positive definite; that is checked here, at construction.
LeafPolicy make_clf_attractor(Vector goal, double gain, double eta, NominalKind nominal,
                              WeightKind weight = WeightKind::kIdentity,
                              Matrix explicit_weight = Matrix());

}  // namespace rmpflow

#endif  // RMPFLOW_LEAF_POLICY_HPP_

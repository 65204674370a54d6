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

#ifndef RMPFLOW_TYPES_HPP_
#define RMPFLOW_TYPES_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rmpflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Tree wiring or input shapes are inconsistent (wrong dimensions, bad
// configuration). Raised before any numerics run.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An evaluation produced unusable numbers (non-finite entries, singular
// points). The message carries the node path when one is known.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Relative SVD cutoff used by resolve() and the rank diagnostics. The root
// inertia is assumed nonsingular by the theory but degenerate metrics must
// not crash an exploratory run.
inline constexpr double kSvdCutoff = 1e-8;

// Velocity deadband under which the leaf CLF constraint is skipped; the
// constraint is vacuous at zero velocity and its closed form divides by
// a velocity quadratic.
inline constexpr double kVelocityDeadband = 1e-9;

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

// Position/velocity pair on one manifold. At the root this is (q, qdot).
struct NodeState {
  Vector x;
  Vector xdot;

  int dim() const { return static_cast<int>(x.size()); }

  void check(const std::string& context) const {
    if (x.size() != xdot.size()) {
      throw StructuralError(context + ": state position/velocity lengths differ (" +
                            std::to_string(x.size()) + " vs " +
                            std::to_string(xdot.size()) + ")");
    }
    if (!all_finite(x) || !all_finite(xdot)) {
      throw NumericalError(context + ": non-finite state");
    }
  }
};

// Natural-form policy on a manifold: desired force plus the inertia matrix
// that weighs it against siblings.
struct RmpNatural {
  Vector f;
  Matrix M;

  int dim() const { return static_cast<int>(f.size()); }

  // Invariants: finite entries, M square of matching size and symmetric to
  // 1e-10 relative Frobenius error.
  void check(const std::string& context) const;
};

// Canonical-form policy: desired acceleration plus the same inertia.
struct RmpCanonical {
  Vector a;
  Matrix M;

  int dim() const { return static_cast<int>(a.size()); }
};

}  // namespace rmpflow

#endif  // RMPFLOW_TYPES_HPP_

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

#ifndef RMPFLOW_LYAPUNOV_HPP_
#define RMPFLOW_LYAPUNOV_HPP_

#include <string>
#include <vector>

#include "rmpflow/simulator.hpp"
#include "rmpflow/tree.hpp"
#include "rmpflow/types.hpp"

namespace rmpflow {

// Energy 1/2 xdot' G xdot + Phi of one node. Interior nodes use the metric
// and potential aggregated from their subtree's leaves.
struct NodeEnergy {
  int node = -1;
  std::string path;
  double kinetic = 0.0;
  double potential = 0.0;
  double total() const { return kinetic + potential; }
};

// One entry per node, indexed by node id. Every parent total equals the sum
// of its children's totals up to roundoff.
std::vector<NodeEnergy> node_energies(const RmpTree& tree, const NodeState& root_state);

// Root-level quantities from the leaf-to-root recursion
//   G_r = sum J' G_l J,  B_r = sum J' B_l J,  Phi_r = sum Phi_l o psi.
// Leaves under constrained projection carry no damping term, so they
// contribute to the decay bound instead of to B_r.
struct RootAggregate {
  Matrix G;
  Matrix B;
  double Phi = 0.0;
  Vector grad_Phi;
  double V = 0.0;             // 1/2 qdot' G qdot + Phi
  double leaf_sum = 0.0;      // sum of leaf energies; equals V up to roundoff
  double damping_rate = 0.0;  // qdot' B qdot
  double decay_bound = 0.0;   // sum over constrained leaves of alpha(|J qdot|)
  std::vector<NodeEnergy> leaf_energies;
};

RootAggregate root_aggregate(const RmpTree& tree, const NodeState& root_state);

// --- trajectory-level verification ------------------------------------

struct DecayRecord {
  double t = 0.0;
  double V = 0.0;
  double Vdot_fd = 0.0;     // centered difference
  double Vdot_bound = 0.0;  // -(damping_rate + decay_bound)
  double residual = 0.0;    // Vdot_fd - Vdot_bound, positive means excess
  bool violation = false;
};

struct DecayReport {
  bool passed = false;
  int checked_steps = 0;
  int violations = 0;
  double worst_residual = 0.0;
  double worst_time = 0.0;
  std::vector<DecayRecord> records;
  std::string summary;
};

// Centered-difference dV/dt along a stored trajectory against the decay
// prediction dV/dt <= -qdot' B_r qdot - sum_k alpha_k(|J_k qdot|), within a
// per-step tolerance max(tol_floor, 5 h^2) * (1 + |dV_fd/dt|). Passes when
// at most `violation_fraction` of the steps exceed it. Throws
// StructuralError on trajectories shorter than 3 samples.
DecayReport check_decay(const RmpTree& tree, const Trajectory& traj, double tol_floor = 1e-3,
                        double violation_fraction = 0.01);

// Which limit-set membership to test at the final state: velocity zero with
// the combined leaf force balanced, or velocity zero at a critical point of
// the aggregate potential.
enum class InvariantSetKind { kForceBalance, kPotentialCritical };

struct InvariantSetReport {
  bool passed = false;
  double speed = 0.0;             // |qdot| at the final state
  double residual_force = 0.0;    // |sum_k J_k' f_k|
  double potential_gradient = 0.0;  // |grad Phi_r|
  std::string summary;
};

InvariantSetReport check_invariant_set(const RmpTree& tree, const Trajectory& traj,
                                       InvariantSetKind kind, double vel_tol = 1e-3,
                                       double force_tol = 1e-3, double grad_tol = 1e-3);

struct ImmersionReport {
  bool full_rank = true;
  int required_rank = 0;       // root dimension
  int worst_rank = 0;          // smallest observed stacked-Jacobian rank
  double min_singular_value = 0.0;
  double worst_time = 0.0;
  std::string summary;
};

// Rank of the stacked root-to-leaf Jacobian at states sampled along the
// trajectory. Advisory only: losing rank transiently (a distance map at its
// singular point) does not invalidate a run.
ImmersionReport check_immersion(const RmpTree& tree, const Trajectory& traj,
                                int max_samples = 200);

// Structured text, one record per step: t, V_r, Vdot_fd, Vdot_bound,
// violation flag.
std::string decay_records_text(const DecayReport& report);

// Serialized snapshot of every node's state, natural form, and energy at a
// root state, keyed by node path; for debugging and reports.
std::string dump_state(const RmpTree& tree, const NodeState& root_state, double t);

}  // namespace rmpflow

#endif  // RMPFLOW_LYAPUNOV_HPP_

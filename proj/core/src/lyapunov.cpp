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

#include "rmpflow/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace rmpflow {

namespace {

// Leaf-to-root pullback of the metric, damping, potential, and potential
// gradient at fixed per-node states.
struct Recursion {
  std::vector<Matrix> G;
  std::vector<Matrix> B;
  std::vector<double> Phi;
  std::vector<Vector> grad_Phi;
};

Recursion pull_back_quantities(const RmpTree& tree, const std::vector<NodeState>& states) {
  const int n = tree.size();
  Recursion r;
  r.G.resize(n);
  r.B.resize(n);
  r.Phi.assign(n, 0.0);
  r.grad_Phi.resize(n);
  for (int id = n - 1; id >= 0; --id) {
    const RmpTree::Node& node = tree.node(id);
    if (node.children.empty()) {
      const LeafPolicy& leaf = *node.policy;
      r.G[id] = leaf.metric.value(states[id].x, states[id].xdot);
      r.Phi[id] = leaf.potential.value(states[id].x);
      r.grad_Phi[id] = leaf.potential.gradient(states[id].x);
      r.B[id] = leaf.kind == LeafPolicy::Kind::kGds
                    ? Matrix(leaf.damping(states[id].x, states[id].xdot))
                    : Matrix(Matrix::Zero(node.dim, node.dim));
      continue;
    }
    r.G[id] = Matrix::Zero(node.dim, node.dim);
    r.B[id] = Matrix::Zero(node.dim, node.dim);
    r.grad_Phi[id] = Vector::Zero(node.dim);
    for (int child : node.children) {
      const Matrix J = tree.node(child).edge_from_parent->jacobian(states[id].x);
      r.G[id] += J.transpose() * r.G[child] * J;
      r.B[id] += J.transpose() * r.B[child] * J;
      r.Phi[id] += r.Phi[child];
      r.grad_Phi[id] += J.transpose() * r.grad_Phi[child];
    }
  }
  return r;
}

std::string format_vector(const Vector& v) {
  std::ostringstream out;
  out.precision(12);
  out << "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i > 0) out << ", ";
    out << v[i];
  }
  out << "]";
  return out.str();
}

std::string format_matrix(const Matrix& m) {
  std::ostringstream out;
  out.precision(12);
  out << "[";
  for (int r = 0; r < m.rows(); ++r) {
    if (r > 0) out << "; ";
    for (int c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ", ";
      out << m(r, c);
    }
  }
  out << "]";
  return out.str();
}

}  // namespace

std::vector<NodeEnergy> node_energies(const RmpTree& tree, const NodeState& root_state) {
  tree.validate();
  const std::vector<NodeState> states = tree.pushforward(root_state);
  const Recursion r = pull_back_quantities(tree, states);
  std::vector<NodeEnergy> out(tree.size());
  for (int id = 0; id < tree.size(); ++id) {
    out[id].node = id;
    out[id].path = tree.node_path(id);
    out[id].kinetic = 0.5 * states[id].xdot.dot(r.G[id] * states[id].xdot);
    out[id].potential = r.Phi[id];
  }
  return out;
}

RootAggregate root_aggregate(const RmpTree& tree, const NodeState& root_state) {
  tree.validate();
  const std::vector<NodeState> states = tree.pushforward(root_state);
  const Recursion r = pull_back_quantities(tree, states);
  const int root = tree.root();

  RootAggregate agg;
  agg.G = r.G[root];
  agg.B = r.B[root];
  agg.Phi = r.Phi[root];
  agg.grad_Phi = r.grad_Phi[root];
  agg.V = 0.5 * root_state.xdot.dot(agg.G * root_state.xdot) + agg.Phi;
  agg.damping_rate = root_state.xdot.dot(agg.B * root_state.xdot);
  for (int leaf : tree.leaves()) {
    NodeEnergy e;
    e.node = leaf;
    e.path = tree.node_path(leaf);
    e.kinetic = 0.5 * states[leaf].xdot.dot(r.G[leaf] * states[leaf].xdot);
    e.potential = r.Phi[leaf];
    agg.leaf_sum += e.total();
    agg.leaf_energies.push_back(std::move(e));
    const LeafPolicy& policy = *tree.node(leaf).policy;
    if (policy.kind == LeafPolicy::Kind::kClf) {
      agg.decay_bound += policy.clf.alpha(states[leaf].xdot.norm());
    }
  }
  return agg;
}

DecayReport check_decay(const RmpTree& tree, const Trajectory& traj, double tol_floor,
                        double violation_fraction) {
  const int n = traj.steps();
  if (n < 3) {
    throw StructuralError("check_decay: need at least 3 recorded states for centered "
                          "differences, got " + std::to_string(n));
  }
  std::vector<double> V(n), bound(n);
  for (int i = 0; i < n; ++i) {
    const RootAggregate agg = root_aggregate(tree, NodeState{traj.q[i], traj.qdot[i]});
    V[i] = agg.V;
    bound[i] = -(agg.damping_rate + agg.decay_bound);
  }

  DecayReport report;
  report.checked_steps = n - 2;
  report.worst_residual = -std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < n; ++i) {
    const double span = traj.times[i + 1] - traj.times[i - 1];
    const double h = 0.5 * span;
    DecayRecord rec;
    rec.t = traj.times[i];
    rec.V = V[i];
    rec.Vdot_fd = (V[i + 1] - V[i - 1]) / span;
    rec.Vdot_bound = bound[i];
    rec.residual = rec.Vdot_fd - rec.Vdot_bound;
    const double tol = std::max(tol_floor, 5.0 * h * h) * (1.0 + std::abs(rec.Vdot_fd));
    rec.violation = rec.residual > tol;
    if (rec.violation) report.violations += 1;
    if (rec.residual > report.worst_residual) {
      report.worst_residual = rec.residual;
      report.worst_time = rec.t;
    }
    report.records.push_back(rec);
  }
  report.passed =
      report.violations <= static_cast<int>(violation_fraction * report.checked_steps);
  std::ostringstream s;
  s << "decay check: " << (report.passed ? "PASS" : "FAIL") << " (" << report.violations << "/"
    << report.checked_steps << " violations, worst residual " << report.worst_residual
    << " at t=" << report.worst_time << ")";
  report.summary = s.str();
  return report;
}

InvariantSetReport check_invariant_set(const RmpTree& tree, const Trajectory& traj,
                                       InvariantSetKind kind, double vel_tol, double force_tol,
                                       double grad_tol) {
  if (traj.steps() == 0) {
    throw StructuralError("check_invariant_set: empty trajectory");
  }
  const NodeState final_state{traj.q.back(), traj.qdot.back()};
  const double t = traj.times.back();

  const std::vector<NodeState> states = tree.pushforward(final_state);
  Vector force_sum = Vector::Zero(final_state.dim());
  for (int leaf : tree.leaves()) {
    const LeafEval eval = tree.node(leaf).policy->evaluate(states[leaf].x, states[leaf].xdot, t);
    force_sum += tree.root_jacobian(leaf, final_state.x).transpose() * eval.rmp.f;
  }
  const RootAggregate agg = root_aggregate(tree, final_state);

  InvariantSetReport report;
  report.speed = final_state.xdot.norm();
  report.residual_force = force_sum.norm();
  report.potential_gradient = agg.grad_Phi.norm();
  const bool vel_ok = report.speed <= vel_tol;
  report.passed = kind == InvariantSetKind::kForceBalance
                      ? (vel_ok && report.residual_force <= force_tol)
                      : (vel_ok && report.potential_gradient <= grad_tol);
  std::ostringstream s;
  s << "invariant set ("
    << (kind == InvariantSetKind::kForceBalance ? "force balance" : "potential critical point")
    << "): " << (report.passed ? "PASS" : "FAIL") << " (|qdot|=" << report.speed
    << " |sum J'f|=" << report.residual_force << " |grad Phi|=" << report.potential_gradient
    << ")";
  report.summary = s.str();
  return report;
}

ImmersionReport check_immersion(const RmpTree& tree, const Trajectory& traj, int max_samples) {
  ImmersionReport report;
  report.required_rank = tree.node(tree.root()).dim;
  report.worst_rank = report.required_rank;
  report.min_singular_value = std::numeric_limits<double>::infinity();
  const int n = traj.steps();
  if (n == 0) {
    report.summary = "immersion rank: no states sampled";
    report.min_singular_value = 0.0;
    return report;
  }
  const int stride = std::max(1, n / std::max(1, max_samples));
  const std::vector<int> leaf_ids = tree.leaves();
  int degenerate_samples = 0;
  for (int i = 0; i < n; i += stride) {
    int rows = 0;
    std::vector<Matrix> blocks;
    bool failed = false;
    for (int leaf : leaf_ids) {
      try {
        blocks.push_back(tree.root_jacobian(leaf, traj.q[i]));
      } catch (const std::runtime_error&) {
        failed = true;
        break;
      }
      rows += static_cast<int>(blocks.back().rows());
    }
    if (failed) {
      degenerate_samples += 1;
      report.full_rank = false;
      report.worst_rank = 0;
      report.worst_time = traj.times[i];
      continue;
    }
    Matrix stacked(rows, report.required_rank);
    int row = 0;
    for (const Matrix& b : blocks) {
      stacked.middleRows(row, b.rows()) = b;
      row += static_cast<int>(b.rows());
    }
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const Vector& sv = svd.singularValues();
    const double sigma_max = sv.size() > 0 ? sv[0] : 0.0;
    int rank = 0;
    for (int k = 0; k < sv.size(); ++k) {
      if (sigma_max > 0.0 && sv[k] > kSvdCutoff * sigma_max) rank += 1;
    }
    const double sigma_d = static_cast<int>(sv.size()) >= report.required_rank
                               ? sv[report.required_rank - 1]
                               : 0.0;
    report.min_singular_value = std::min(report.min_singular_value, sigma_d);
    if (rank < report.required_rank) {
      report.full_rank = false;
      if (rank < report.worst_rank) {
        report.worst_rank = rank;
        report.worst_time = traj.times[i];
      }
    }
  }
  std::ostringstream s;
  s << "immersion rank (advisory): " << (report.full_rank ? "full" : "deficient")
    << " (required " << report.required_rank << ", worst " << report.worst_rank
    << ", min singular value " << report.min_singular_value;
  if (degenerate_samples > 0) s << ", " << degenerate_samples << " singular samples";
  s << ")";
  report.summary = s.str();
  return report;
}

std::string decay_records_text(const DecayReport& report) {
  std::ostringstream out;
  out.precision(9);
  for (const DecayRecord& r : report.records) {
    out << "t=" << r.t << " V_r=" << r.V << " Vdot_fd=" << r.Vdot_fd
        << " Vdot_bound=" << r.Vdot_bound << " violation=" << (r.violation ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string dump_state(const RmpTree& tree, const NodeState& root_state, double t) {
  const EvaluationTrace trace = tree.evaluate(root_state, t);
  const std::vector<NodeEnergy> energies = node_energies(tree, root_state);
  std::ostringstream out;
  out.precision(12);
  out << "t=" << t << "\n";
  for (int id = 0; id < tree.size(); ++id) {
    out << "node " << tree.node_path(id) << "\n";
    out << "  x=" << format_vector(trace.states[id].x)
        << " xdot=" << format_vector(trace.states[id].xdot) << "\n";
    out << "  f=" << format_vector(trace.rmps[id].f) << " M=" << format_matrix(trace.rmps[id].M)
        << "\n";
    out << "  V=" << energies[id].total() << " kinetic=" << energies[id].kinetic
        << " potential=" << energies[id].potential << "\n";
    if (trace.leaf_constraint_active[id]) {
      out << "  constraint=active\n";
    }
  }
  out << "root acceleration a=" << format_vector(trace.root.a) << "\n";
  for (const std::string& w : trace.warnings) {
    out << "warning: " << w << "\n";
  }
  return out.str();
}

}  // namespace rmpflow

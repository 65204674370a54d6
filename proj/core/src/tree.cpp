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

#include "rmpflow/tree.hpp"

#include <algorithm>
#include <utility>

namespace rmpflow {

void RmpNatural::check(const std::string& context) const {
  if (M.rows() != M.cols() || M.rows() != f.size()) {
    throw StructuralError(context + ": inertia shape (" + std::to_string(M.rows()) + "x" +
                          std::to_string(M.cols()) + ") does not match force length " +
                          std::to_string(f.size()));
  }
  if (!all_finite(f) || !all_finite(M)) {
    throw NumericalError(context + ": non-finite policy output");
  }
  const double scale = std::max(1.0, M.norm());
  if ((M - M.transpose()).norm() > 1e-10 * scale) {
    throw NumericalError(context + ": inertia is not symmetric");
  }
}

Vector pinv_solve(const Matrix& M, const Vector& f, double cutoff, PinvDiagnostics* diag) {
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv[0] : 0.0;
  const double threshold = cutoff * sigma_max;

  PinvDiagnostics d;
  Vector scaled = svd.matrixU().transpose() * f;
  for (int i = 0; i < sv.size(); ++i) {
    if (sigma_max > 0.0 && sv[i] > threshold) {
      scaled[i] /= sv[i];
      d.rank += 1;
      d.smallest_kept = sv[i];
    } else {
      scaled[i] = 0.0;
      d.truncated = true;
    }
  }
  d.near_singular = d.rank > 0 && d.smallest_kept < 10.0 * threshold;
  if (diag != nullptr) {
    *diag = d;
  }
  return svd.matrixV() * scaled;
}

int RmpTree::add_root(const std::string& name, int dim) {
  if (root_ != -1) {
    throw StructuralError("add_root: tree already has root '" + nodes_[root_].name + "'");
  }
  if (dim < 1) {
    throw StructuralError("add_root: dimension must be positive, got " + std::to_string(dim));
  }
  Node n;
  n.name = name;
  n.dim = dim;
  nodes_.push_back(std::move(n));
  root_ = 0;
  return root_;
}

int RmpTree::add_child(int parent, const std::string& name, TaskMap edge) {
  if (parent < 0 || parent >= size()) {
    throw StructuralError("add_child: unknown parent id " + std::to_string(parent));
  }
  if (!edge.value || !edge.jacobian || !edge.curvature) {
    throw StructuralError("add_child: edge map of '" + name + "' is missing an evaluator");
  }
  if (edge.dim_in != nodes_[parent].dim) {
    throw StructuralError("add_child: edge of '" + name + "' expects input dimension " +
                          std::to_string(edge.dim_in) + " but parent '" + nodes_[parent].name +
                          "' has dimension " + std::to_string(nodes_[parent].dim));
  }
  Node n;
  n.name = name;
  n.dim = edge.dim_out;
  n.parent = parent;
  n.edge_from_parent = std::move(edge);
  const int id = size();
  nodes_.push_back(std::move(n));
  nodes_[parent].children.push_back(id);
  return id;
}

int RmpTree::add_leaf(int parent, const std::string& name, TaskMap edge, LeafPolicy policy) {
  const int id = add_child(parent, name, std::move(edge));
  if (policy.metric.dim != nodes_[id].dim) {
    throw StructuralError("add_leaf: policy of '" + name + "' has dimension " +
                          std::to_string(policy.metric.dim) + " but the node has dimension " +
                          std::to_string(nodes_[id].dim));
  }
  nodes_[id].policy = std::move(policy);
  return id;
}

void RmpTree::set_root_policy(LeafPolicy policy) {
  if (root_ == -1) {
    throw StructuralError("set_root_policy: tree has no root");
  }
  if (policy.metric.dim != nodes_[root_].dim) {
    throw StructuralError("set_root_policy: policy dimension " +
                          std::to_string(policy.metric.dim) + " does not match root dimension " +
                          std::to_string(nodes_[root_].dim));
  }
  nodes_[root_].policy = std::move(policy);
}

void RmpTree::validate() const {
  if (root_ == -1) {
    throw StructuralError("validate: tree has no root");
  }
  for (int id = 0; id < size(); ++id) {
    const Node& n = nodes_[id];
    if ((n.parent == -1) != (id == root_)) {
      throw StructuralError("validate: node '" + n.name + "' breaks the single-root structure");
    }
    const bool is_leaf = n.children.empty();
    if (is_leaf && !n.policy.has_value()) {
      throw StructuralError("validate: leaf '" + node_path(id) + "' has no policy");
    }
    if (!is_leaf && n.policy.has_value()) {
      throw StructuralError("validate: interior node '" + node_path(id) + "' carries a policy");
    }
    if (n.policy.has_value() && n.policy->metric.dim != n.dim) {
      throw StructuralError("validate: policy dimension mismatch at '" + node_path(id) + "'");
    }
    for (int child : n.children) {
      const Node& c = nodes_[child];
      if (!c.edge_from_parent.has_value()) {
        throw StructuralError("validate: edge missing into '" + node_path(child) + "'");
      }
      const TaskMap& e = *c.edge_from_parent;
      if (!e.value || !e.jacobian || !e.curvature) {
        throw StructuralError("validate: edge into '" + node_path(child) +
                              "' is missing an evaluator");
      }
      if (e.dim_in != n.dim || e.dim_out != c.dim) {
        throw StructuralError("validate: edge into '" + node_path(child) + "' maps " +
                              std::to_string(e.dim_in) + "->" + std::to_string(e.dim_out) +
                              " between nodes of dimensions " + std::to_string(n.dim) + " and " +
                              std::to_string(c.dim));
      }
    }
  }
}

std::vector<int> RmpTree::leaves() const {
  std::vector<int> out;
  for (int id = 0; id < size(); ++id) {
    if (nodes_[id].children.empty()) out.push_back(id);
  }
  return out;
}

std::vector<int> RmpTree::path(int id) const {
  std::vector<int> out;
  for (int cur = id; cur != -1; cur = nodes_.at(cur).parent) {
    out.push_back(cur);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string RmpTree::node_path(int id) const {
  std::string out;
  for (int node : path(id)) {
    if (!out.empty()) out += '/';
    out += nodes_[node].name;
  }
  return out;
}

int RmpTree::find(const std::string& name) const {
  for (int id = 0; id < size(); ++id) {
    if (nodes_[id].name == name) return id;
  }
  return -1;
}

Matrix RmpTree::root_jacobian(int id, const Vector& q) const {
  Matrix J = Matrix::Identity(nodes_.at(root_).dim, nodes_.at(root_).dim);
  Vector x = q;
  const std::vector<int> chain = path(id);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const TaskMap& edge = *nodes_[chain[i]].edge_from_parent;
    J = edge.jacobian(x) * J;
    x = edge.value(x);
  }
  return J;
}

std::vector<NodeState> RmpTree::pushforward(const NodeState& root_state) const {
  root_state.check("pushforward at '" + nodes_.at(root_).name + "'");
  if (root_state.dim() != nodes_[root_].dim) {
    throw StructuralError("pushforward: root state dimension " +
                          std::to_string(root_state.dim()) + " does not match root dimension " +
                          std::to_string(nodes_[root_].dim));
  }
  std::vector<NodeState> states(size());
  states[root_] = root_state;
  // Children always carry larger ids than their parent, so one forward scan
  // is a topological order.
  for (int id = 0; id < size(); ++id) {
    if (id == root_) continue;
    const Node& n = nodes_[id];
    const NodeState& up = states[n.parent];
    const TaskMap& edge = *n.edge_from_parent;
    NodeState s;
    s.x = edge.value(up.x);
    s.xdot = edge.jacobian(up.x) * up.xdot;
    if (s.dim() != n.dim) {
      throw StructuralError("pushforward: edge into '" + node_path(id) + "' produced dimension " +
                            std::to_string(s.dim()) + ", expected " + std::to_string(n.dim));
    }
    s.check("pushforward at '" + node_path(id) + "'");
    states[id] = std::move(s);
  }
  return states;
}

void RmpTree::pullback(const std::vector<NodeState>& states, double t,
                       EvaluationTrace* trace) const {
  if (static_cast<int>(states.size()) != size()) {
    throw StructuralError("pullback: expected " + std::to_string(size()) + " node states, got " +
                          std::to_string(states.size()));
  }
  trace->rmps.assign(size(), RmpNatural{});
  trace->leaf_constraint_active.assign(size(), false);
  for (int id = size() - 1; id >= 0; --id) {
    const Node& n = nodes_[id];
    if (n.children.empty()) {
      LeafEval eval = n.policy->evaluate(states[id].x, states[id].xdot, t);
      eval.rmp.check("leaf '" + node_path(id) + "'");
      trace->rmps[id] = std::move(eval.rmp);
      trace->leaf_constraint_active[id] = eval.constraint_active;
      continue;
    }
    RmpNatural sum;
    sum.f = Vector::Zero(n.dim);
    sum.M = Matrix::Zero(n.dim, n.dim);
    for (int child : n.children) {
      const TaskMap& edge = *nodes_[child].edge_from_parent;
      const Matrix J = edge.jacobian(states[id].x);
      const Vector c = edge.curvature(states[id].x, states[id].xdot);
      if (!all_finite(J) || !all_finite(c)) {
        throw NumericalError("pullback: non-finite edge derivatives into '" + node_path(child) +
                             "'");
      }
      const RmpNatural& rmp = trace->rmps[child];
      sum.f += J.transpose() * (rmp.f - rmp.M * c);
      sum.M += J.transpose() * rmp.M * J;
    }
    sum.check("pullback at '" + node_path(id) + "'");
    trace->rmps[id] = std::move(sum);
  }
}

RmpCanonical RmpTree::resolve(const RmpNatural& root_rmp, PinvDiagnostics* diag) const {
  RmpCanonical out;
  out.a = pinv_solve(root_rmp.M, root_rmp.f, kSvdCutoff, diag);
  out.M = root_rmp.M;
  return out;
}

EvaluationTrace RmpTree::evaluate(const NodeState& root_state, double t) const {
  validate();
  EvaluationTrace trace;
  trace.states = pushforward(root_state);
  pullback(trace.states, t, &trace);
  trace.root = resolve(trace.rmps[root_], &trace.pinv);
  if (trace.pinv.truncated) {
    trace.warnings.push_back("root inertia is rank-deficient (rank " +
                             std::to_string(trace.pinv.rank) + " of " +
                             std::to_string(nodes_[root_].dim) + "); pseudoinverse truncated");
  } else if (trace.pinv.near_singular) {
    trace.warnings.push_back("root inertia is poorly conditioned (smallest singular value " +
                             std::to_string(trace.pinv.smallest_kept) + ")");
  }
  return trace;
}

Vector RmpTree::evaluate_policy(const Vector& q, const Vector& qdot, double t) const {
  return evaluate(NodeState{q, qdot}, t).root.a;
}

}  // namespace rmpflow

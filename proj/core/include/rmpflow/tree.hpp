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

#ifndef RMPFLOW_TREE_HPP_
#define RMPFLOW_TREE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "rmpflow/leaf_policy.hpp"
#include "rmpflow/task_map.hpp"
#include "rmpflow/types.hpp"

namespace rmpflow {

struct PinvDiagnostics {
  int rank = 0;
  double smallest_kept = 0.0;  // smallest singular value above the cutoff
  bool truncated = false;      // some singular value fell below the cutoff
  // Smallest retained singular value within 10x of the cutoff; the solve
  // went through but is poorly conditioned.
  bool near_singular = false;
};

// Moore-Penrose pseudoinverse solve a = pinv(M) f via SVD with a relative
// cutoff on the singular values.
Vector pinv_solve(const Matrix& M, const Vector& f, double cutoff = kSvdCutoff,
                  PinvDiagnostics* diag = nullptr);

struct EvaluationTrace {
  std::vector<NodeState> states;      // indexed by node id
  std::vector<RmpNatural> rmps;       // indexed by node id
  RmpCanonical root;
  PinvDiagnostics pinv;
  std::vector<std::string> warnings;
  // Leaf-id keyed flags; false for every non-leaf and every unconstrained leaf.
  std::vector<bool> leaf_constraint_active;
};

// Tree of task spaces. Nodes are added parent-first; ids are dense and
// stable. Edge maps carry motion from parent coordinates to child
// coordinates.
class RmpTree {
 public:
  struct Node {
    std::string name;
    int dim = 0;
    int parent = -1;
    std::vector<int> children;
    std::optional<TaskMap> edge_from_parent;
    std::optional<LeafPolicy> policy;
  };

  int add_root(const std::string& name, int dim);
  int add_child(int parent, const std::string& name, TaskMap edge);
  int add_leaf(int parent, const std::string& name, TaskMap edge, LeafPolicy policy);
  // Attach a policy to the root itself (single-node tree).
  void set_root_policy(LeafPolicy policy);

  // Structural audit: exactly one root, edge dimensions consistent,
  // policies only on leaves, every leaf has a policy. Throws
  // StructuralError with the offending node named.
  void validate() const;

  int size() const { return static_cast<int>(nodes_.size()); }
  int root() const { return root_; }
  const Node& node(int id) const { return nodes_.at(id); }
  std::vector<int> leaves() const;
  // Node ids from the root to `id`, inclusive.
  std::vector<int> path(int id) const;
  // Slash-joined names from the root, e.g. "root/robot0/attractor"; used in
  // diagnostics and dumps.
  std::string node_path(int id) const;
  int find(const std::string& name) const;  // -1 when absent

  // Jacobian of the composed map from the root to `id` at root state q.
  Matrix root_jacobian(int id, const Vector& q) const;

  // --- the three tree operators ---------------------------------------

  // Propagate the root state to every node along edge maps.
  std::vector<NodeState> pushforward(const NodeState& root_state) const;

  // Evaluate leaves and combine children into parents:
  //   f_u = sum_v J_v' (f_v - M_v jdot_v xdot_u),  M_u = sum_v J_v' M_v J_v.
  // `states` must come from pushforward on the same tree.
  void pullback(const std::vector<NodeState>& states, double t, EvaluationTrace* trace) const;

  // Root natural form to canonical form through the pseudoinverse.
  RmpCanonical resolve(const RmpNatural& root_rmp, PinvDiagnostics* diag = nullptr) const;

  // pushforward + pullback + resolve.
  EvaluationTrace evaluate(const NodeState& root_state, double t) const;

  // Root acceleration only.
  Vector evaluate_policy(const Vector& q, const Vector& qdot, double t) const;

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace rmpflow

#endif  // RMPFLOW_TREE_HPP_

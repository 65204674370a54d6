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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "rmpflow/lyapunov.hpp"
#include "rmpflow/simulator.hpp"
#include "rmpflow/task_map.hpp"
#include "rmpflow/tree.hpp"
#include "rmpflow/types.hpp"
#include "support.hpp"

namespace rmpflow {
namespace {

using testing::linear_map;
using testing::random_vector;
using testing::vec;

LeafPolicy constant_potential_leaf(int dim, double phi) {
  LeafPolicy leaf = make_gds_damper(dim, 0.0);
  leaf.potential.value = [phi](const Vector&) { return phi; };
  return leaf;
}

RmpTree attractor_obstacle_tree() {
  RmpTree tree;
  const int root = tree.add_root("root", 2);
  tree.add_leaf(root, "goal_attractor", identity_map(2), make_gds_attractor(vec({2.5, 0.0}), 10.0, 3.0));
  tree.add_leaf(root, "obstacle_avoid", distance_to_sphere(vec({0.0, 0.1}), 0.5), make_gds_collision(2.0));
  return tree;
}

TEST_SUITE("lyapunov") {

TEST_CASE("a single leaf energy is kinetic plus potential") {
  RmpTree tree;
  const int root = tree.add_root("root", 2);
  tree.add_leaf(root, "leaf", identity_map(2), constant_potential_leaf(2, 2.0));
  const std::vector<NodeEnergy> energies = node_energies(tree, {vec({0.3, -0.7}), vec({1.0, 1.0})});
  CHECK(energies[1].kinetic == doctest::Approx(1.0));
  CHECK(energies[1].potential == doctest::Approx(2.0));
  CHECK(energies[1].total() == doctest::Approx(3.0));
  CHECK(energies[root].total() == doctest::Approx(3.0));
  CHECK(energies[root].path == "root");
}

TEST_CASE("the root energy is the sum of its children") {
  RmpTree tree;
  const int root = tree.add_root("root", 2);
  tree.add_leaf(root, "a", identity_map(2), constant_potential_leaf(2, 1.5));
  tree.add_leaf(root, "b", identity_map(2), make_gds_attractor(vec({1.0, 0.0}), 4.0, 1.0));
  const NodeState state{vec({0.2, 0.4}), vec({-0.5, 0.8})};
  const std::vector<NodeEnergy> energies = node_energies(tree, state);
  CHECK(energies[root].total() ==
        doctest::Approx(energies[1].total() + energies[2].total()).epsilon(1e-12));
}

TEST_CASE("interior energies aggregate subtree leaves on a three-level tree") {
  std::mt19937 rng(71);
  RmpTree tree;
  const int root = tree.add_root("root", 3);
  const Matrix A = (Matrix(2, 3) << 1.0, 0.0, 0.4, 0.0, 1.0, -0.2).finished();
  const int mid = tree.add_child(root, "mid", linear_map(A));
  tree.add_leaf(mid, "goal", identity_map(2), make_gds_attractor(vec({1.0, -1.0}), 6.0, 2.0));
  tree.add_leaf(mid, "gap", distance_to_point(vec({3.0, 3.0})), make_gds_attractor_1d(2.0, 1.0));
  tree.add_leaf(root, "damper", identity_map(3), make_gds_damper(3, 0.5));

  for (int i = 0; i < 20; ++i) {
    const Vector q = random_vector(3, rng);
    const Vector qdot = random_vector(3, rng);
    const std::vector<NodeEnergy> energies = node_energies(tree, {q, qdot});
    for (int id = 0; id < tree.size(); ++id) {
      const auto& children = tree.node(id).children;
      if (children.empty()) continue;
      double child_sum = 0.0;
      for (int c : children) child_sum += energies[c].total();
      CHECK(energies[id].total() == doctest::Approx(child_sum).epsilon(1e-12));
    }

    const RootAggregate agg = root_aggregate(tree, {q, qdot});
    const std::vector<NodeState> states = tree.pushforward({q, qdot});
    Matrix G = Matrix::Zero(3, 3);
    Matrix B = Matrix::Zero(3, 3);
    double phi = 0.0;
    for (int leaf : tree.leaves()) {
      const Matrix J = tree.root_jacobian(leaf, q);
      const LeafPolicy& policy = *tree.node(leaf).policy;
      const Matrix G_leaf = policy.metric.value(states[leaf].x, states[leaf].xdot);
      G += J.transpose() * G_leaf * J;
      B += J.transpose() * policy.damping(states[leaf].x, states[leaf].xdot) * J;
      phi += policy.potential.value(states[leaf].x);
    }
    CHECK((agg.G - G).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((agg.B - B).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(agg.Phi == doctest::Approx(phi).epsilon(1e-12));
    CHECK(agg.V == doctest::Approx(0.5 * qdot.dot(G * qdot) + phi).epsilon(1e-12));
    CHECK(agg.V == doctest::Approx(agg.leaf_sum).epsilon(1e-10));
    CHECK(agg.damping_rate == doctest::Approx(qdot.dot(B * qdot)).epsilon(1e-12));
  }
}

TEST_CASE("constrained leaves move damping into the decay bound") {
  RmpTree tree;
  const int root = tree.add_root("root", 2);
  const double eta = 0.7;
  tree.add_leaf(root, "clf", identity_map(2),
                make_clf_attractor(vec({1.0, 0.0}), 5.0, eta, NominalKind::kPotential));
  const Vector qdot = vec({0.6, -0.8});
  const RootAggregate agg = root_aggregate(tree, {vec({0.0, 0.0}), qdot});
  CHECK(agg.B.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(agg.decay_bound == doctest::Approx(eta * qdot.squaredNorm()));
}

TEST_CASE("stored trajectory energy matches the per-leaf decomposition") {
  const RmpTree tree = attractor_obstacle_tree();
  SimConfig config;
  config.step = 0.01;
  config.horizon = 3.0;
  const Trajectory traj = simulate(tree, vec({-2.5, 0.0}), vec({0.0, 0.0}), config, {});
  REQUIRE(traj.steps() > 10);
  for (int i = 0; i < traj.steps(); ++i) {
    double leaf_sum = 0.0;
    for (double v : traj.leaf_V[i]) leaf_sum += v;
    CHECK(std::abs(traj.V[i] - leaf_sum) <= 1e-10 * (1.0 + std::abs(traj.V[i])));
  }
}

TEST_CASE("measured decay tracks the damping rate on a smooth run") {
  RmpTree tree;
  const int root = tree.add_root("root", 2);
  tree.add_leaf(root, "goal_attractor", identity_map(2), make_gds_attractor(vec({1.5, 0.5}), 10.0, 3.0));
  SimConfig config;
  config.step = 0.001;
  config.horizon = 2.0;
  config.conv_vel = 0.0;
  const Trajectory traj = simulate(tree, vec({-1.0, 0.0}), vec({0.0, 0.0}), config, {});
  int checked = 0;
  for (int i = 1; i + 1 < traj.steps(); ++i) {
    const double h = traj.times[i + 1] - traj.times[i];
    const double vdot_fd = (traj.V[i + 1] - traj.V[i - 1]) / (2.0 * h);
    const RootAggregate agg = root_aggregate(tree, {traj.q[i], traj.qdot[i]});
    CHECK(std::abs(vdot_fd + agg.damping_rate) <= 1e-3 * (1.0 + std::abs(vdot_fd)));
    ++checked;
  }
  CHECK(checked > 100);

  const DecayReport report = check_decay(tree, traj);
  CHECK(report.passed);
  CHECK(report.violations == 0);
}

TEST_CASE("a stationary trajectory has zero measured decay") {
  RmpTree tree;
  const int root = tree.add_root("root", 2);
  tree.add_leaf(root, "damper", identity_map(2), make_gds_damper(2, 1.0));
  SimConfig config;
  config.step = 0.01;
  config.horizon = 0.5;
  config.conv_vel = 0.0;
  const Trajectory traj = simulate(tree, vec({0.4, -0.2}), vec({0.0, 0.0}), config, {});
  const DecayReport report = check_decay(tree, traj);
  CHECK(report.passed);
  CHECK(report.violations == 0);
  CHECK(std::abs(report.worst_residual) <= 1e-12);
}

TEST_CASE("decay checking requires at least three samples") {
  RmpTree tree;
  const int root = tree.add_root("root", 1);
  tree.add_leaf(root, "leaf", identity_map(1), make_gds_attractor_1d(1.0, 2.0));
  Trajectory traj;
  traj.times = {0.0, 0.01};
  traj.q = {vec({1.0}), vec({0.99})};
  traj.qdot = {vec({0.0}), vec({-0.01})};
  traj.V = {0.5, 0.49};
  CHECK_THROWS_AS(check_decay(tree, traj), StructuralError);
}

TEST_CASE("a converged run lands in the invariant set") {
  const RmpTree tree = attractor_obstacle_tree();
  SimConfig config;
  const Trajectory traj = simulate(tree, vec({-2.5, 0.0}), vec({0.0, 0.0}), config, {});
  REQUIRE(traj.converged);
  const InvariantSetReport force = check_invariant_set(tree, traj, InvariantSetKind::kForceBalance);
  CHECK(force.passed);
  CHECK(force.speed < 1e-3);
  CHECK(force.residual_force < 1e-3);
  const InvariantSetReport critical =
      check_invariant_set(tree, traj, InvariantSetKind::kPotentialCritical);
  CHECK(critical.passed);
  CHECK(critical.potential_gradient < 1e-3);
}

TEST_CASE("a mid-flight state is rejected as invariant-set membership") {
  const RmpTree tree = attractor_obstacle_tree();
  SimConfig config;
  config.horizon = 0.8;
  config.conv_vel = 0.0;
  const Trajectory traj = simulate(tree, vec({-2.5, 0.0}), vec({0.0, 0.0}), config, {});
  REQUIRE(traj.qdot.back().norm() > 0.1);
  const InvariantSetReport report = check_invariant_set(tree, traj, InvariantSetKind::kForceBalance);
  CHECK(!report.passed);
}

TEST_CASE("immersion rank follows the stacked jacobian") {
  SimConfig config;
  config.horizon = 1.0;

  RmpTree full;
  const int full_root = full.add_root("root", 2);
  full.add_leaf(full_root, "leaf", identity_map(2), make_gds_attractor(vec({1.0, 1.0}), 5.0, 2.0));
  const Trajectory full_traj = simulate(full, vec({0.0, 0.0}), vec({0.0, 0.0}), config, {});
  const ImmersionReport full_report = check_immersion(full, full_traj);
  CHECK(full_report.full_rank);
  CHECK(full_report.worst_rank == 2);

  RmpTree thin;
  const int thin_root = thin.add_root("root", 2);
  thin.add_leaf(thin_root, "gap", distance_to_point(vec({5.0, 5.0})), make_gds_attractor_1d(1.0, 2.0));
  const Trajectory thin_traj = simulate(thin, vec({0.0, 0.0}), vec({0.0, 0.0}), config, {});
  const ImmersionReport thin_report = check_immersion(thin, thin_traj);
  CHECK(!thin_report.full_rank);
  CHECK(thin_report.worst_rank == 1);
  CHECK(thin_report.required_rank == 2);

  const RmpTree both = attractor_obstacle_tree();
  const Trajectory both_traj = simulate(both, vec({-2.5, 0.0}), vec({0.0, 0.0}), config, {});
  CHECK(check_immersion(both, both_traj).full_rank);
}

TEST_CASE("reports render as structured text") {
  const RmpTree tree = attractor_obstacle_tree();
  SimConfig config;
  config.horizon = 1.0;
  const Trajectory traj = simulate(tree, vec({-2.5, 0.0}), vec({0.0, 0.0}), config, {});

  const DecayReport report = check_decay(tree, traj);
  const std::string text = decay_records_text(report);
  CHECK(text.find("V_r=") != std::string::npos);
  CHECK(text.find("Vdot_fd=") != std::string::npos);

  const std::string dump = dump_state(tree, {traj.q[0], traj.qdot[0]}, traj.times[0]);
  CHECK(dump.find("root/goal_attractor") != std::string::npos);
  CHECK(dump.find("root/obstacle_avoid") != std::string::npos);
  CHECK(dump.find("root acceleration") != std::string::npos);
}

}  // TEST_SUITE

}  // namespace
}  // namespace rmpflow

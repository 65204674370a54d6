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

#include "rmpflow/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "rmpflow/lyapunov.hpp"

namespace rmpflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Consecutive slow, near-stationary samples required before declaring
// convergence; a single one can be an oscillation turnaround.
constexpr int kConvergedStreak = 3;

struct Derivative {
  Vector qdot;
  Vector accel;
};

Derivative eval(const RmpTree& tree, const Vector& q, const Vector& qdot, double t) {
  return {qdot, tree.evaluate_policy(q, qdot, t)};
}

void rk4_step(const RmpTree& tree, double t, double h, Vector* q, Vector* qdot) {
  const Derivative k1 = eval(tree, *q, *qdot, t);
  const Derivative k2 = eval(tree, *q + 0.5 * h * k1.qdot, *qdot + 0.5 * h * k1.accel, t + 0.5 * h);
  const Derivative k3 = eval(tree, *q + 0.5 * h * k2.qdot, *qdot + 0.5 * h * k2.accel, t + 0.5 * h);
  const Derivative k4 = eval(tree, *q + h * k3.qdot, *qdot + h * k3.accel, t + h);
  *q += (h / 6.0) * (k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot);
  *qdot += (h / 6.0) * (k1.accel + 2.0 * k2.accel + 2.0 * k3.accel + k4.accel);
}

void semi_implicit_euler_step(const RmpTree& tree, double t, double h, Vector* q, Vector* qdot) {
  *qdot += h * tree.evaluate_policy(*q, *qdot, t);
  *q += h * *qdot;
}

}  // namespace

double clearance_of(const Vector& q, const PlantGeometry& geom) {
  if (geom.obstacles.centers.empty()) return kInf;
  double best = kInf;
  for (int r = 0; r < geom.n_robots; ++r) {
    const Vector pos = q.segment(r * geom.robot_dim, geom.robot_dim);
    for (std::size_t o = 0; o < geom.obstacles.centers.size(); ++o) {
      const double d = (pos - geom.obstacles.centers[o]).norm() - geom.obstacles.radii[o] -
                       geom.robot_radius;
      best = std::min(best, d);
    }
  }
  return best;
}

double min_pair_distance_of(const Vector& q, const PlantGeometry& geom) {
  if (geom.n_robots < 2) return kInf;
  double best = kInf;
  for (int i = 0; i < geom.n_robots; ++i) {
    const Vector pi = q.segment(i * geom.robot_dim, geom.robot_dim);
    for (int j = i + 1; j < geom.n_robots; ++j) {
      const Vector pj = q.segment(j * geom.robot_dim, geom.robot_dim);
      best = std::min(best, (pi - pj).norm());
    }
  }
  return best;
}

double time_to_goals(const Trajectory& traj, const std::vector<Vector>& goals,
                     const PlantGeometry& geom, double tol, double horizon_cap) {
  if (traj.times.empty()) return horizon_cap;
  for (int i = 0; i < traj.steps(); ++i) {
    bool all_there = true;
    for (int r = 0; r < geom.n_robots && all_there; ++r) {
      const Vector pos = traj.q[i].segment(r * geom.robot_dim, geom.robot_dim);
      all_there = (pos - goals.at(r)).norm() <= tol;
    }
    if (all_there) return traj.times[i];
  }
  return std::max(traj.times.back(), horizon_cap);
}

Trajectory simulate(const RmpTree& tree, const Vector& q0, const Vector& qdot0,
                    const SimConfig& config, const PlantGeometry& geom) {
  if (config.step <= 0.0) {
    throw StructuralError("simulate: step must be positive, got " + std::to_string(config.step));
  }
  if (config.horizon < config.step) {
    throw StructuralError("simulate: horizon shorter than one step");
  }
  tree.validate();
  NodeState{q0, qdot0}.check("simulate initial state");

  const double h = config.step;
  const int n_steps = static_cast<int>(std::llround(config.horizon / h));
  const std::vector<int> leaf_ids = tree.leaves();
  const bool conv_enabled = config.conv_vel > 0.0 && config.conv_pos > 0.0;

  Trajectory traj;
  Vector q = q0;
  Vector qdot = qdot0;
  int quiet_streak = 0;

  auto record = [&](double t) -> Vector {
    const EvaluationTrace trace = tree.evaluate(NodeState{q, qdot}, t);
    const RootAggregate agg = root_aggregate(tree, NodeState{q, qdot});
    traj.times.push_back(t);
    traj.q.push_back(q);
    traj.qdot.push_back(qdot);
    traj.u.push_back(trace.root.a);
    traj.V.push_back(agg.V);
    std::vector<double> leaf_v;
    std::vector<bool> active;
    leaf_v.reserve(leaf_ids.size());
    active.reserve(leaf_ids.size());
    for (std::size_t k = 0; k < leaf_ids.size(); ++k) {
      leaf_v.push_back(agg.leaf_energies[k].total());
      active.push_back(trace.leaf_constraint_active[leaf_ids[k]]);
    }
    traj.leaf_V.push_back(std::move(leaf_v));
    traj.leaf_constraint_active.push_back(std::move(active));
    traj.clearance.push_back(clearance_of(q, geom));
    traj.min_pair_dist.push_back(min_pair_distance_of(q, geom));
    return trace.root.a;
  };

  for (int i = 0; i < n_steps; ++i) {
    const double t = i * h;
    Vector q_next = q;
    Vector qdot_next = qdot;
    Vector accel;
    try {
      accel = record(t);
      if (config.integrator == Integrator::kRk4) {
        rk4_step(tree, t, h, &q_next, &qdot_next);
      } else {
        semi_implicit_euler_step(tree, t, h, &q_next, &qdot_next);
      }
    } catch (const std::runtime_error& err) {
      traj.truncated = true;
      traj.events.push_back("truncated at t=" + std::to_string(t) +
                            ": policy failure: " + err.what());
      return traj;
    }
    if (!all_finite(q_next) || !all_finite(qdot_next)) {
      traj.truncated = true;
      traj.events.push_back("truncated at t=" + std::to_string(t) + ": non-finite state");
      return traj;
    }
    if (config.state_bound > 0.0 &&
        (q_next.norm() > config.state_bound || qdot_next.norm() > config.state_bound)) {
      traj.truncated = true;
      traj.events.push_back("truncated at t=" + std::to_string(t) +
                            ": state norm exceeded bound " + std::to_string(config.state_bound));
      return traj;
    }
    const double moved = (q_next - q).norm();
    q = std::move(q_next);
    qdot = std::move(qdot_next);
    // The acceleration gate rejects oscillation turnarounds, where the
    // velocity passes through zero far from equilibrium.
    if (conv_enabled && qdot.norm() < config.conv_vel && moved < config.conv_pos &&
        accel.norm() < config.conv_vel) {
      quiet_streak += 1;
    } else {
      quiet_streak = 0;
    }
    if (quiet_streak >= kConvergedStreak) {
      traj.converged = true;
      try {
        record((i + 1) * h);
      } catch (const std::runtime_error& err) {
        traj.truncated = true;
        traj.events.push_back(std::string("truncated at final record: ") + err.what());
        return traj;
      }
      traj.events.push_back("converged at t=" + std::to_string((i + 1) * h));
      return traj;
    }
  }
  try {
    record(n_steps * h);
  } catch (const std::runtime_error& err) {
    traj.truncated = true;
    traj.events.push_back(std::string("truncated at final record: ") + err.what());
    return traj;
  }
  traj.events.push_back("horizon reached at t=" + std::to_string(n_steps * h));
  return traj;
}

}  // namespace rmpflow

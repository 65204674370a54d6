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

#ifndef RMPFLOW_SIMULATOR_HPP_
#define RMPFLOW_SIMULATOR_HPP_

#include <string>
#include <vector>

#include "rmpflow/tree.hpp"
#include "rmpflow/types.hpp"

namespace rmpflow {

enum class Integrator { kRk4, kSemiImplicitEuler };

struct SimConfig {
  double step = 0.01;
  double horizon = 40.0;
  Integrator integrator = Integrator::kRk4;
  // Early stop once |qdot| and the per-step position change both fall under
  // these thresholds. Disabled when either is <= 0.
  double conv_vel = 2e-4;
  double conv_pos = 5e-5;
  // Truncate the run once |q| or |qdot| exceeds this; a barrier metric that
  // the step size cannot resolve diverges through finite values first.
  double state_bound = 1e6;
};

// Spheres the plant must stay clear of; used only for diagnostics here, the
// repulsion itself lives in the tree.
struct ObstacleSet {
  std::vector<Vector> centers;
  std::vector<double> radii;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> q;
  std::vector<Vector> qdot;
  std::vector<Vector> u;  // root acceleration applied over [t_i, t_{i+1})
  std::vector<double> V;  // total energy at each stored state
  // Per stored state, per leaf (dense leaf order from RmpTree::leaves()).
  std::vector<std::vector<double>> leaf_V;
  std::vector<std::vector<bool>> leaf_constraint_active;
  // Signed distance to the nearest obstacle surface, minus the robot radius;
  // +inf when no obstacles are registered.
  std::vector<double> clearance;
  // Minimum inter-robot center distance; +inf for a single body.
  std::vector<double> min_pair_dist;
  std::vector<std::string> events;
  bool converged = false;
  bool truncated = false;

  int steps() const { return static_cast<int>(times.size()); }
};

// Geometry needed to turn raw states into clearance and pair-distance
// diagnostics.
struct PlantGeometry {
  int n_robots = 1;
  int robot_dim = 2;
  double robot_radius = 0.1;
  ObstacleSet obstacles;
};

double clearance_of(const Vector& q, const PlantGeometry& geom);
double min_pair_distance_of(const Vector& q, const PlantGeometry& geom);

// First time every robot is within `tol` of its goal (goals stacked in
// robot order). A run that never gets there scores the larger of the final
// recorded time and `horizon_cap`, so truncated runs are not rewarded. Used
// to compare nominals on the deadlock scenarios.
double time_to_goals(const Trajectory& traj, const std::vector<Vector>& goals,
                     const PlantGeometry& geom, double tol = 1e-2, double horizon_cap = 0.0);

// Roll out the double integrator qddot = policy(q, qdot, t). The policy is
// re-evaluated at every integrator stage. A policy failure or a non-finite
// state truncates the run with the reason recorded in `events`.
Trajectory simulate(const RmpTree& tree, const Vector& q0, const Vector& qdot0,
                    const SimConfig& config, const PlantGeometry& geom);

}  // namespace rmpflow

#endif  // RMPFLOW_SIMULATOR_HPP_

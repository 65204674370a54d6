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

#ifndef RMPFLOW_TASK_MAP_HPP_
#define RMPFLOW_TASK_MAP_HPP_

#include <functional>
#include <vector>

#include "rmpflow/types.hpp"

namespace rmpflow {

// Smooth map between manifolds with its exact Jacobian and the curvature
// contraction d/dt(J(x(t))) * xdot. Immutable after construction; all three
// evaluators are pure and reentrant.
struct TaskMap {
  int dim_in = 0;
  int dim_out = 0;
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;
  // (x, xdot) -> Jdot(x, xdot) * xdot, a dim_out vector.
  std::function<Vector(const Vector&, const Vector&)> curvature;
};

// y = x.
TaskMap identity_map(int dim);

// Selects the listed coordinates; throws StructuralError on duplicate or
// out-of-range indices.
TaskMap coordinate_projection(int dim_in, std::vector<int> indices);

// z = |x - goal|. Singular within kDistanceSingularity of the goal.
inline constexpr double kDistanceSingularity = 1e-9;
TaskMap distance_to_point(Vector goal);

// z = |x - center| / radius - 1; zero on the sphere surface, singular at the
// center.
TaskMap distance_to_sphere(Vector center, double radius);

// Stacked multi-robot coordinates to the displacement x_i - x_j.
TaskMap pairwise_displacement(int i, int j, int per_robot_dim, int n_robots);

// outer after inner; chain-rule Jacobian and curvature.
TaskMap compose(TaskMap outer, TaskMap inner);

}  // namespace rmpflow

#endif  // RMPFLOW_TASK_MAP_HPP_

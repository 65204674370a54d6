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

#include "rmpflow/task_map.hpp"

#include <memory>
#include <set>
#include <string>
#include <utility>

namespace rmpflow {

TaskMap identity_map(int dim) {
  if (dim < 1) {
    throw StructuralError("identity_map: dimension must be positive, got " + std::to_string(dim));
  }
  TaskMap m;
  m.dim_in = dim;
  m.dim_out = dim;
  m.value = [](const Vector& x) { return x; };
  m.jacobian = [dim](const Vector&) -> Matrix { return Matrix::Identity(dim, dim); };
  m.curvature = [dim](const Vector&, const Vector&) -> Vector { return Vector::Zero(dim); };
  return m;
}

TaskMap coordinate_projection(int dim_in, std::vector<int> indices) {
  if (indices.empty()) {
    throw StructuralError("coordinate_projection: empty index set");
  }
  std::set<int> seen;
  for (int i : indices) {
    if (i < 0 || i >= dim_in) {
      throw StructuralError("coordinate_projection: index " + std::to_string(i) +
                            " out of range for dimension " + std::to_string(dim_in));
    }
    if (!seen.insert(i).second) {
      throw StructuralError("coordinate_projection: duplicate index " + std::to_string(i));
    }
  }
  const int dim_out = static_cast<int>(indices.size());
  Matrix J = Matrix::Zero(dim_out, dim_in);
  for (int r = 0; r < dim_out; ++r) J(r, indices[r]) = 1.0;

  TaskMap m;
  m.dim_in = dim_in;
  m.dim_out = dim_out;
  m.value = [indices, dim_out](const Vector& x) {
    Vector y(dim_out);
    for (int r = 0; r < dim_out; ++r) y[r] = x[indices[r]];
    return y;
  };
  m.jacobian = [J](const Vector&) { return J; };
  m.curvature = [dim_out](const Vector&, const Vector&) -> Vector { return Vector::Zero(dim_out); };
  return m;
}

TaskMap distance_to_point(Vector goal) {
  const int dim = static_cast<int>(goal.size());
  if (dim < 1) {
    throw StructuralError("distance_to_point: empty goal vector");
  }
  TaskMap m;
  m.dim_in = dim;
  m.dim_out = 1;
  m.value = [goal](const Vector& x) {
    Vector z(1);
    z[0] = (x - goal).norm();
    return z;
  };
  m.jacobian = [goal](const Vector& x) -> Matrix {
    const Vector d = x - goal;
    const double z = d.norm();
    if (z < kDistanceSingularity) {
      throw NumericalError("distance_to_point: evaluation within " +
                           std::to_string(kDistanceSingularity) + " of the singular point");
    }
    return d.transpose() / z;
  };
  m.curvature = [goal](const Vector& x, const Vector& xdot) -> Vector {
    const Vector d = x - goal;
    const double z = d.norm();
    if (z < kDistanceSingularity) {
      throw NumericalError("distance_to_point: curvature within " +
                           std::to_string(kDistanceSingularity) + " of the singular point");
    }
    const double radial = d.dot(xdot) / z;
    Vector c(1);
    c[0] = (xdot.squaredNorm() - radial * radial) / z;
    return c;
  };
  return m;
}

TaskMap distance_to_sphere(Vector center, double radius) {
  const int dim = static_cast<int>(center.size());
  if (dim < 1) {
    throw StructuralError("distance_to_sphere: empty center vector");
  }
  if (radius <= 0.0) {
    throw StructuralError("distance_to_sphere: radius must be positive, got " +
                          std::to_string(radius));
  }
  TaskMap m;
  m.dim_in = dim;
  m.dim_out = 1;
  m.value = [center, radius](const Vector& x) {
    Vector z(1);
    z[0] = (x - center).norm() / radius - 1.0;
    return z;
  };
  m.jacobian = [center, radius](const Vector& x) -> Matrix {
    const Vector d = x - center;
    const double n = d.norm();
    if (n < kDistanceSingularity) {
      throw NumericalError("distance_to_sphere: evaluation at the center");
    }
    return d.transpose() / (radius * n);
  };
  m.curvature = [center, radius](const Vector& x, const Vector& xdot) -> Vector {
    const Vector d = x - center;
    const double n = d.norm();
    if (n < kDistanceSingularity) {
      throw NumericalError("distance_to_sphere: curvature at the center");
    }
    const double radial = d.dot(xdot) / n;
    Vector c(1);
    c[0] = (xdot.squaredNorm() - radial * radial) / (radius * n);
    return c;
  };
  return m;
}

TaskMap pairwise_displacement(int i, int j, int per_robot_dim, int n_robots) {
  if (per_robot_dim < 1 || n_robots < 2) {
    throw StructuralError("pairwise_displacement: need at least two robots of positive dimension");
  }
  if (i == j) {
    throw StructuralError("pairwise_displacement: identical robot indices " + std::to_string(i));
  }
  if (i < 0 || i >= n_robots || j < 0 || j >= n_robots) {
    throw StructuralError("pairwise_displacement: robot index out of range (" + std::to_string(i) +
                          ", " + std::to_string(j) + ") for " + std::to_string(n_robots) +
                          " robots");
  }
  const int dim_in = n_robots * per_robot_dim;
  Matrix J = Matrix::Zero(per_robot_dim, dim_in);
  J.block(0, i * per_robot_dim, per_robot_dim, per_robot_dim) =
      Matrix::Identity(per_robot_dim, per_robot_dim);
  J.block(0, j * per_robot_dim, per_robot_dim, per_robot_dim) =
      -Matrix::Identity(per_robot_dim, per_robot_dim);

  TaskMap m;
  m.dim_in = dim_in;
  m.dim_out = per_robot_dim;
  m.value = [i, j, per_robot_dim](const Vector& x) -> Vector {
    return x.segment(i * per_robot_dim, per_robot_dim) -
           x.segment(j * per_robot_dim, per_robot_dim);
  };
  m.jacobian = [J](const Vector&) { return J; };
  m.curvature = [per_robot_dim](const Vector&, const Vector&) -> Vector {
    return Vector::Zero(per_robot_dim);
  };
  return m;
}

TaskMap compose(TaskMap outer, TaskMap inner) {
  if (inner.dim_out != outer.dim_in) {
    throw StructuralError("compose: inner output dimension " + std::to_string(inner.dim_out) +
                          " does not match outer input dimension " + std::to_string(outer.dim_in));
  }
  auto o = std::make_shared<TaskMap>(std::move(outer));
  auto in = std::make_shared<TaskMap>(std::move(inner));

  TaskMap m;
  m.dim_in = in->dim_in;
  m.dim_out = o->dim_out;
  m.value = [o, in](const Vector& x) { return o->value(in->value(x)); };
  m.jacobian = [o, in](const Vector& x) -> Matrix {
    return o->jacobian(in->value(x)) * in->jacobian(x);
  };
  m.curvature = [o, in](const Vector& x, const Vector& xdot) -> Vector {
    const Vector y = in->value(x);
    const Vector ydot = in->jacobian(x) * xdot;
    return o->jacobian(y) * in->curvature(x, xdot) + o->curvature(y, ydot);
  };
  return m;
}

}  // namespace rmpflow

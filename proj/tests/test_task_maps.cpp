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
#include <vector>

#include "doctest.h"
#include "rmpflow/task_map.hpp"
#include "rmpflow/types.hpp"
#include "support.hpp"

namespace rmpflow {
namespace {

using testing::fd_curvature;
using testing::fd_jacobian;
using testing::linear_map;
using testing::random_vector;
using testing::vec;

void check_against_fd(const TaskMap& map, std::mt19937& rng, int n_states, double jac_tol,
                      double curv_tol, double min_norm = 0.0) {
  for (int s = 0; s < n_states; ++s) {
    Vector x = random_vector(map.dim_in, rng, 2.0);
    if (min_norm > 0.0) {
      while (x.norm() < min_norm) x = random_vector(map.dim_in, rng, 2.0);
    }
    const Vector xdot = random_vector(map.dim_in, rng, 2.0);
    const Matrix jac_err = map.jacobian(x) - fd_jacobian(map, x);
    CHECK(jac_err.cwiseAbs().maxCoeff() <= jac_tol);
    const Vector curv_err = map.curvature(x, xdot) - fd_curvature(map, x, xdot);
    CHECK(curv_err.cwiseAbs().maxCoeff() <= curv_tol);
  }
}

TEST_SUITE("task_maps") {

TEST_CASE("identity maps state through unchanged") {
  const TaskMap m = identity_map(2);
  const Vector x = vec({1.0, 2.0});
  CHECK(m.value(x).isApprox(x));
  CHECK(m.jacobian(x).isApprox(Matrix::Identity(2, 2)));
  CHECK(m.curvature(x, vec({3.0, -4.0})).norm() == 0.0);
}

TEST_CASE("coordinate projection selects and has constant jacobian") {
  const TaskMap m = coordinate_projection(4, {0, 1});
  const Vector x = vec({1.0, 2.0, 3.0, 4.0});
  CHECK(m.value(x).isApprox(vec({1.0, 2.0})));
  Matrix expected = Matrix::Zero(2, 4);
  expected(0, 0) = 1.0;
  expected(1, 1) = 1.0;
  CHECK(m.jacobian(x).isApprox(expected));
  CHECK(m.curvature(x, vec({5.0, -6.0, 7.0, -8.0})).norm() == 0.0);
}

TEST_CASE("coordinate projection rejects duplicate and out-of-range indices") {
  CHECK_THROWS_AS(coordinate_projection(4, {0, 0}), StructuralError);
  CHECK_THROWS_AS(coordinate_projection(4, {0, 4}), StructuralError);
}

TEST_CASE("distance to point at (3,4) from origin") {
  const TaskMap m = distance_to_point(vec({0.0, 0.0}));
  const Vector x = vec({3.0, 4.0});
  CHECK(m.value(x)[0] == doctest::Approx(5.0));
  CHECK(m.jacobian(x).isApprox((Matrix(1, 2) << 0.6, 0.8).finished()));
  // Radial motion keeps the direction fixed.
  CHECK(m.curvature(x, vec({0.6, 0.8}))[0] == doctest::Approx(0.0).epsilon(1e-12));
  // Unit tangential motion turns the direction at rate 1/z.
  CHECK(m.curvature(x, vec({-0.8, 0.6}))[0] == doctest::Approx(0.2));
}

TEST_CASE("distance to point is singular at the point") {
  const TaskMap m = distance_to_point(vec({1.0, 1.0}));
  // The distance itself is fine at the point; only its direction blows up.
  CHECK(m.value(vec({1.0, 1.0}))[0] == doctest::Approx(0.0));
  CHECK_THROWS_AS(m.jacobian(vec({1.0, 1.0 + 1e-12})), NumericalError);
  CHECK_THROWS_AS(m.jacobian(vec({1.0, 1.0})), NumericalError);
  CHECK_THROWS_AS(m.curvature(vec({1.0, 1.0}), vec({1.0, 0.0})), NumericalError);
}

TEST_CASE("distance to sphere is zero on the surface") {
  const TaskMap m = distance_to_sphere(vec({0.0, 0.0}), 1.0);
  CHECK(m.value(vec({2.0, 0.0}))[0] == doctest::Approx(1.0));
  CHECK(m.value(vec({0.0, 1.0}))[0] == doctest::Approx(0.0));
  CHECK(m.jacobian(vec({2.0, 0.0})).isApprox((Matrix(1, 2) << 1.0, 0.0).finished()));
}

TEST_CASE("pairwise displacement and its block jacobian") {
  const TaskMap m = pairwise_displacement(0, 1, 2, 2);
  const Vector x = vec({0.0, 0.0, 1.0, 1.0});
  CHECK(m.value(x).isApprox(vec({-1.0, -1.0})));
  Matrix expected = Matrix::Zero(2, 4);
  expected(0, 0) = 1.0;
  expected(1, 1) = 1.0;
  expected(0, 2) = -1.0;
  expected(1, 3) = -1.0;
  CHECK(m.jacobian(x).isApprox(expected));
  CHECK(m.curvature(x, vec({1.0, 2.0, 3.0, 4.0})).norm() == 0.0);
  CHECK_THROWS_AS(pairwise_displacement(1, 1, 2, 2), StructuralError);
  CHECK_THROWS_AS(pairwise_displacement(0, 2, 2, 2), StructuralError);
}

TEST_CASE("compose with identity is behaviorally the inner map") {
  std::mt19937 rng(11);
  const TaskMap inner = distance_to_point(vec({1.0, -1.0}));
  const TaskMap m = compose(identity_map(1), inner);
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_vector(2, rng, 3.0);
    const Vector xdot = random_vector(2, rng);
    if ((x - vec({1.0, -1.0})).norm() < 0.1) continue;
    CHECK(m.value(x).isApprox(inner.value(x)));
    CHECK(m.jacobian(x).isApprox(inner.jacobian(x)));
    CHECK(m.curvature(x, xdot).isApprox(inner.curvature(x, xdot)));
  }
}

TEST_CASE("compose of two linear maps multiplies jacobians") {
  const Matrix A = (Matrix(1, 2) << 2.0, -1.0).finished();
  const Matrix B = (Matrix(2, 3) << 1.0, 0.0, 1.0, 0.0, 1.0, -1.0).finished();
  const TaskMap m = compose(linear_map(A), linear_map(B));
  const Vector x = vec({1.0, 2.0, 3.0});
  CHECK(m.jacobian(x).isApprox(A * B));
  CHECK(m.value(x).isApprox(A * B * x));
  CHECK(m.curvature(x, vec({1.0, 1.0, 1.0})).norm() == 0.0);
}

TEST_CASE("compose curvature matches finite differences") {
  std::mt19937 rng(13);
  const Matrix A = (Matrix(2, 3) << 1.0, 0.5, 0.0, -0.5, 1.0, 2.0).finished();
  const TaskMap m = compose(distance_to_point(vec({0.0, 0.0})), linear_map(A));
  for (int i = 0; i < 100; ++i) {
    Vector x = random_vector(3, rng, 2.0);
    while ((A * x).norm() < 0.2) x = random_vector(3, rng, 2.0);
    const Vector xdot = random_vector(3, rng, 2.0);
    const Vector err = m.curvature(x, xdot) - fd_curvature(m, x, xdot);
    CHECK(err.cwiseAbs().maxCoeff() <= 1e-4);
  }
}

TEST_CASE("compose is associative on evaluations") {
  std::mt19937 rng(17);
  const Matrix A = (Matrix(2, 2) << 1.0, 0.25, -0.5, 1.5).finished();
  TaskMap f = distance_to_sphere(vec({0.0, 0.0}), 0.5);
  TaskMap g = linear_map(A);
  TaskMap h = identity_map(2);
  const TaskMap left = compose(compose(f, g), h);
  const TaskMap right = compose(f, compose(g, h));
  for (int i = 0; i < 50; ++i) {
    Vector x = random_vector(2, rng, 2.0);
    while ((A * x).norm() < 0.2) x = random_vector(2, rng, 2.0);
    const Vector xdot = random_vector(2, rng);
    CHECK((left.value(x) - right.value(x)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((left.jacobian(x) - right.jacobian(x)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((left.curvature(x, xdot) - right.curvature(x, xdot)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("compose rejects dimension mismatch") {
  CHECK_THROWS_AS(compose(identity_map(2), distance_to_point(vec({0.0, 0.0}))),
                  StructuralError);
}

TEST_CASE("every shipped map matches finite differences at random states") {
  std::mt19937 rng(19);
  check_against_fd(identity_map(3), rng, 100, 1e-5, 1e-4);
  check_against_fd(coordinate_projection(5, {1, 3}), rng, 100, 1e-5, 1e-4);
  // Distance maps are kept away from their singular point.
  check_against_fd(distance_to_point(vec({0.0, 0.0})), rng, 100, 1e-5, 1e-4, 0.3);
  check_against_fd(distance_to_sphere(vec({0.0, 0.0}), 0.5), rng, 100, 1e-5, 1e-4, 0.3);
  check_against_fd(pairwise_displacement(0, 1, 2, 3), rng, 100, 1e-5, 1e-4);
}

}  // TEST_SUITE

}  // namespace
}  // namespace rmpflow

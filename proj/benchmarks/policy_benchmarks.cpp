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

#include <benchmark/benchmark.h>

#include "rmpflow/leaf_policy.hpp"
#include "rmpflow/scenario.hpp"
#include "rmpflow/simulator.hpp"
#include "rmpflow/tree.hpp"
#include "rmpflow/types.hpp"

namespace rmpflow {
namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

void BM_EvaluateGoalScenario(benchmark::State& state) {
  const Scenario sc = scenario_goal_reach_2d("gds");
  const RmpTree tree = build_tree(sc);
  const Vector q = vec2(-1.3, 0.4);
  const Vector qdot = vec2(0.8, -0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.evaluate_policy(q, qdot, 0.0));
  }
}
BENCHMARK(BM_EvaluateGoalScenario);

void BM_EvaluateMultiRobot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Scenario sc = scenario_multi_robot("spiral", n);
  const RmpTree tree = build_tree(sc);
  const Vector q = sc.q0;
  const Vector qdot = Vector::Constant(sc.root_dim, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.evaluate_policy(q, qdot, 0.0));
  }
}
BENCHMARK(BM_EvaluateMultiRobot)->Arg(2)->Arg(4)->Arg(8);

void BM_ConstrainedProjection(benchmark::State& state) {
  const LeafPolicy leaf = make_clf_attractor(vec2(2.5, 0.0), 10.0, 1.0, NominalKind::kSpiral);
  const Vector x = vec2(-2.0, 0.3);
  const Vector xdot = vec2(1.0, -0.4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clf_force(leaf, x, xdot, 0.0));
  }
}
BENCHMARK(BM_ConstrainedProjection);

void BM_GdsForce(benchmark::State& state) {
  const LeafPolicy leaf = make_gds_collision(2.0);
  Vector z(1), zdot(1);
  z << 0.4;
  zdot << -0.6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gds_force(leaf, z, zdot));
  }
}
BENCHMARK(BM_GdsForce);

void BM_SimulateGoalScenario(benchmark::State& state) {
  Scenario sc = scenario_goal_reach_2d("gds");
  sc.sim.horizon = 1.0;
  sc.sim.conv_vel = 0.0;
  const RmpTree tree = build_tree(sc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(tree, sc.q0, sc.qdot0, sc.sim, sc.geometry));
  }
}
BENCHMARK(BM_SimulateGoalScenario);

}  // namespace
}  // namespace rmpflow

BENCHMARK_MAIN();

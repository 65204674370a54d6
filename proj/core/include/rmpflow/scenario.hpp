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

#ifndef RMPFLOW_SCENARIO_HPP_
#define RMPFLOW_SCENARIO_HPP_

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "rmpflow/simulator.hpp"
#include "rmpflow/tree.hpp"
#include "rmpflow/types.hpp"

namespace rmpflow {

using ParamValue = std::variant<double, std::vector<double>, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

double param_double(const ParamMap& params, const std::string& key);
double param_double(const ParamMap& params, const std::string& key, double fallback);
std::vector<double> param_vector(const ParamMap& params, const std::string& key);
std::string param_string(const ParamMap& params, const std::string& key,
                         const std::string& fallback = "");

// Declarative node description; kind strings are the factory names
// understood by make_task_map and make_leaf.
struct MapSpec {
  std::string kind;
  ParamMap params;
};

struct LeafSpec {
  std::string kind;
  ParamMap params;
};

struct NodeSpec {
  std::string name;
  MapSpec map;               // edge from the parent; ignored on the root
  std::vector<NodeSpec> children;
  LeafSpec leaf;             // set when children is empty
  bool is_leaf = false;
};

struct Scenario {
  std::string name;
  int root_dim = 2;
  NodeSpec tree;
  Vector q0;
  Vector qdot0;
  std::vector<Vector> goals;
  PlantGeometry geometry;
  double safety_radius = 0.25;
  SimConfig sim;
  unsigned int seed = 0;
};

// kinds: identity, coordinate_projection, distance_to_point,
// distance_to_sphere, pairwise_displacement, pairwise_distance,
// pairwise_clearance.
TaskMap make_task_map(const MapSpec& spec, int dim_in);

// kinds: gds_attractor, gds_attractor_1d, gds_collision, gds_formation,
// gds_damper, clf_attractor.
LeafPolicy make_leaf(const LeafSpec& spec, int dim);

RmpTree build_tree(const Scenario& scenario);

// --- shipped scenarios -------------------------------------------------

// Single planar robot, one goal, one circular obstacle. `nominal` is one of
// potential, spiral, sinusoidal, or gds (the unconstrained baseline).
Scenario scenario_goal_reach_2d(const std::string& nominal);

// n robots on a circle swapping to antipodal goals, pairwise repulsion.
Scenario scenario_multi_robot(const std::string& nominal, int n_robots = 4);

// Pentagon of robots holding pairwise distances while the leader tracks a
// goal. Only the five-robot pentagon is shipped; other counts are rejected.
Scenario scenario_formation(const std::string& nominal, int n_robots = 5);

Scenario builtin_scenario(const std::string& name, const std::string& nominal);
std::vector<std::string> builtin_scenario_names();

// --- JSON round-trip ---------------------------------------------------

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);

}  // namespace rmpflow

#endif  // RMPFLOW_SCENARIO_HPP_

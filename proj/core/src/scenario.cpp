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

#include "rmpflow/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rmpflow {

namespace {

using nlohmann::json;

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

std::vector<double> from_vector(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

int param_int(const ParamMap& params, const std::string& key) {
  return static_cast<int>(param_double(params, key));
}

int param_int(const ParamMap& params, const std::string& key, int fallback) {
  return static_cast<int>(param_double(params, key, static_cast<double>(fallback)));
}

NominalKind parse_nominal(const std::string& name) {
  if (name == "potential") return NominalKind::kPotential;
  if (name == "spiral") return NominalKind::kSpiral;
  if (name == "sinusoidal") return NominalKind::kSinusoidal;
  throw StructuralError("unknown nominal controller '" + name +
                        "' (expected potential, spiral, or sinusoidal)");
}

WeightKind parse_weight(const std::string& name) {
  if (name.empty() || name == "identity") return WeightKind::kIdentity;
  if (name == "inverse_inertia" || name == "inverse-inertia") return WeightKind::kInverseInertia;
  throw StructuralError("unknown projection weight '" + name +
                        "' (expected identity or inverse_inertia)");
}

// --- scenario construction helpers ------------------------------------

ParamMap vec_param(const std::string& key, const Vector& v) {
  return {{key, from_vector(v)}};
}

NodeSpec leaf_node(std::string name, MapSpec map, LeafSpec leaf) {
  NodeSpec n;
  n.name = std::move(name);
  n.map = std::move(map);
  n.leaf = std::move(leaf);
  n.is_leaf = true;
  return n;
}

LeafSpec attractor_leaf(const Vector& goal, const std::string& nominal, double gain, double eta,
                        double damping) {
  if (nominal == "gds") {
    return {"gds_attractor",
            {{"goal", from_vector(goal)}, {"gain", gain}, {"damping", damping}}};
  }
  parse_nominal(nominal);
  return {"clf_attractor",
          {{"goal", from_vector(goal)}, {"gain", gain}, {"eta", eta}, {"nominal", nominal}}};
}

MapSpec robot_projection(int robot, int per_robot_dim) {
  std::vector<double> indices;
  for (int k = 0; k < per_robot_dim; ++k) {
    indices.push_back(static_cast<double>(robot * per_robot_dim + k));
  }
  return {"coordinate_projection", {{"indices", indices}}};
}

MapSpec pair_clearance_map(int i, int j, int per_robot_dim, int n_robots, double surface) {
  return {"pairwise_clearance",
          {{"i", static_cast<double>(i)},
           {"j", static_cast<double>(j)},
           {"per_robot_dim", static_cast<double>(per_robot_dim)},
           {"n_robots", static_cast<double>(n_robots)},
           {"surface", surface}}};
}

// --- JSON conversion ---------------------------------------------------

json params_to_json(const ParamMap& params) {
  json out = json::object();
  for (const auto& [key, value] : params) {
    if (std::holds_alternative<double>(value)) {
      out[key] = std::get<double>(value);
    } else if (std::holds_alternative<std::vector<double>>(value)) {
      out[key] = std::get<std::vector<double>>(value);
    } else {
      out[key] = std::get<std::string>(value);
    }
  }
  return out;
}

ParamMap params_from_json(const json& obj) {
  ParamMap out;
  for (const auto& [key, value] : obj.items()) {
    if (key == "kind") continue;
    if (value.is_number()) {
      out[key] = value.get<double>();
    } else if (value.is_array()) {
      out[key] = value.get<std::vector<double>>();
    } else if (value.is_string()) {
      out[key] = value.get<std::string>();
    } else {
      throw StructuralError("config: parameter '" + key + "' has an unsupported type");
    }
  }
  return out;
}

json node_to_json(const NodeSpec& node, bool is_root) {
  json out;
  out["name"] = node.name;
  if (!is_root) {
    out["map"] = params_to_json(node.map.params);
    out["map"]["kind"] = node.map.kind;
  }
  if (node.is_leaf) {
    out["leaf"] = params_to_json(node.leaf.params);
    out["leaf"]["kind"] = node.leaf.kind;
  } else {
    out["children"] = json::array();
    for (const NodeSpec& child : node.children) {
      out["children"].push_back(node_to_json(child, false));
    }
  }
  return out;
}

NodeSpec node_from_json(const json& obj, bool is_root) {
  NodeSpec node;
  node.name = obj.at("name").get<std::string>();
  if (!is_root) {
    const json& map = obj.at("map");
    node.map.kind = map.at("kind").get<std::string>();
    node.map.params = params_from_json(map);
  }
  if (obj.contains("leaf")) {
    node.is_leaf = true;
    node.leaf.kind = obj.at("leaf").at("kind").get<std::string>();
    node.leaf.params = params_from_json(obj.at("leaf"));
  } else {
    for (const json& child : obj.at("children")) {
      node.children.push_back(node_from_json(child, false));
    }
  }
  return node;
}

void add_subtree(RmpTree* tree, int parent, const NodeSpec& node, int parent_dim) {
  TaskMap map = make_task_map(node.map, parent_dim);
  if (node.is_leaf) {
    LeafPolicy policy = make_leaf(node.leaf, map.dim_out);
    tree->add_leaf(parent, node.name, std::move(map), std::move(policy));
    return;
  }
  const int dim = map.dim_out;
  const int id = tree->add_child(parent, node.name, std::move(map));
  for (const NodeSpec& child : node.children) {
    add_subtree(tree, id, child, dim);
  }
}

}  // namespace

double param_double(const ParamMap& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end() || !std::holds_alternative<double>(it->second)) {
    throw StructuralError("config: missing numeric parameter '" + key + "'");
  }
  return std::get<double>(it->second);
}

double param_double(const ParamMap& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (!std::holds_alternative<double>(it->second)) {
    throw StructuralError("config: parameter '" + key + "' is not numeric");
  }
  return std::get<double>(it->second);
}

std::vector<double> param_vector(const ParamMap& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end() || !std::holds_alternative<std::vector<double>>(it->second)) {
    throw StructuralError("config: missing vector parameter '" + key + "'");
  }
  return std::get<std::vector<double>>(it->second);
}

std::string param_string(const ParamMap& params, const std::string& key,
                         const std::string& fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (!std::holds_alternative<std::string>(it->second)) {
    throw StructuralError("config: parameter '" + key + "' is not a string");
  }
  return std::get<std::string>(it->second);
}

TaskMap make_task_map(const MapSpec& spec, int dim_in) {
  auto check_dim = [&](int expected, const char* what) {
    if (expected != dim_in) {
      throw StructuralError("config: map '" + spec.kind + "' " + what + " implies dimension " +
                            std::to_string(expected) + " but the parent has dimension " +
                            std::to_string(dim_in));
    }
  };
  if (spec.kind == "identity") {
    return identity_map(dim_in);
  }
  if (spec.kind == "coordinate_projection") {
    const std::vector<double> raw = param_vector(spec.params, "indices");
    std::vector<int> indices;
    for (double v : raw) indices.push_back(static_cast<int>(v));
    return coordinate_projection(dim_in, std::move(indices));
  }
  if (spec.kind == "distance_to_point") {
    Vector goal = to_vector(param_vector(spec.params, "goal"));
    check_dim(static_cast<int>(goal.size()), "goal length");
    return distance_to_point(std::move(goal));
  }
  if (spec.kind == "distance_to_sphere") {
    Vector center = to_vector(param_vector(spec.params, "center"));
    check_dim(static_cast<int>(center.size()), "center length");
    return distance_to_sphere(std::move(center), param_double(spec.params, "radius"));
  }
  if (spec.kind == "pairwise_displacement") {
    const int per = param_int(spec.params, "per_robot_dim", 2);
    const int n = param_int(spec.params, "n_robots");
    check_dim(per * n, "robot layout");
    return pairwise_displacement(param_int(spec.params, "i"), param_int(spec.params, "j"), per, n);
  }
  if (spec.kind == "pairwise_distance" || spec.kind == "pairwise_clearance") {
    const int per = param_int(spec.params, "per_robot_dim", 2);
    const int n = param_int(spec.params, "n_robots");
    check_dim(per * n, "robot layout");
    TaskMap disp =
        pairwise_displacement(param_int(spec.params, "i"), param_int(spec.params, "j"), per, n);
    TaskMap outer = spec.kind == "pairwise_distance"
                        ? distance_to_point(Vector::Zero(per))
                        : distance_to_sphere(Vector::Zero(per),
                                             param_double(spec.params, "surface"));
    return compose(std::move(outer), std::move(disp));
  }
  throw StructuralError("config: unknown task map kind '" + spec.kind + "'");
}

LeafPolicy make_leaf(const LeafSpec& spec, int dim) {
  auto check_1d = [&] {
    if (dim != 1) {
      throw StructuralError("config: leaf '" + spec.kind + "' lives on a 1-D space but the node "
                            "has dimension " + std::to_string(dim));
    }
  };
  if (spec.kind == "gds_attractor") {
    Vector goal = to_vector(param_vector(spec.params, "goal"));
    if (goal.size() != dim) {
      throw StructuralError("config: gds_attractor goal length " + std::to_string(goal.size()) +
                            " does not match node dimension " + std::to_string(dim));
    }
    return make_gds_attractor(std::move(goal), param_double(spec.params, "gain", 10.0),
                              param_double(spec.params, "damping", 3.0));
  }
  if (spec.kind == "gds_attractor_1d") {
    check_1d();
    return make_gds_attractor_1d(param_double(spec.params, "gain", 10.0),
                                 param_double(spec.params, "damping", 3.0));
  }
  if (spec.kind == "gds_collision") {
    check_1d();
    return make_gds_collision(param_double(spec.params, "damping_gain", 2.0),
                              param_double(spec.params, "eps_u", 1e-6));
  }
  if (spec.kind == "gds_formation") {
    check_1d();
    return make_gds_formation(param_double(spec.params, "rest_length"),
                              param_double(spec.params, "gain", 100.0),
                              param_double(spec.params, "damping", 20.0));
  }
  if (spec.kind == "gds_damper") {
    return make_gds_damper(dim, param_double(spec.params, "damping", 3.0));
  }
  if (spec.kind == "clf_attractor") {
    Vector goal = to_vector(param_vector(spec.params, "goal"));
    if (goal.size() != dim) {
      throw StructuralError("config: clf_attractor goal length " + std::to_string(goal.size()) +
                            " does not match node dimension " + std::to_string(dim));
    }
    return make_clf_attractor(std::move(goal), param_double(spec.params, "gain", 10.0),
                              param_double(spec.params, "eta", 1.0),
                              parse_nominal(param_string(spec.params, "nominal", "potential")),
                              parse_weight(param_string(spec.params, "P", "identity")));
  }
  throw StructuralError("config: unknown leaf kind '" + spec.kind + "'");
}

RmpTree build_tree(const Scenario& scenario) {
  RmpTree tree;
  const int root = tree.add_root(scenario.tree.name.empty() ? "root" : scenario.tree.name,
                                 scenario.root_dim);
  for (const NodeSpec& child : scenario.tree.children) {
    add_subtree(&tree, root, child, scenario.root_dim);
  }
  tree.validate();
  return tree;
}

Scenario scenario_goal_reach_2d(const std::string& nominal) {
  const Vector goal = to_vector({2.5, 0.0});
  const Vector obstacle_center = to_vector({0.0, 0.1});
  const double obstacle_radius = 0.5;

  Scenario s;
  s.name = "goal2d";
  s.root_dim = 2;
  s.q0 = to_vector({-2.5, 0.0});
  s.qdot0 = Vector::Zero(2);
  s.goals = {goal};
  s.geometry.n_robots = 1;
  s.geometry.robot_dim = 2;
  s.geometry.robot_radius = 0.1;
  s.geometry.obstacles.centers = {obstacle_center};
  s.geometry.obstacles.radii = {obstacle_radius};
  s.sim.horizon = 40.0;

  s.tree.name = "root";
  s.tree.children.push_back(leaf_node("goal_attractor", {"identity", {}},
                                      attractor_leaf(goal, nominal, 10.0, 1.0, 3.0)));
  s.tree.children.push_back(leaf_node(
      "obstacle_avoid",
      {"distance_to_sphere",
       {{"center", from_vector(obstacle_center)}, {"radius", obstacle_radius}}},
      {"gds_collision", {{"damping_gain", 2.0}}}));
  return s;
}

Scenario scenario_multi_robot(const std::string& nominal, int n_robots) {
  if (n_robots < 2) {
    throw StructuralError("scenario_multi_robot: need at least 2 robots, got " +
                          std::to_string(n_robots));
  }
  const double circle_radius = 2.0;
  const double pair_surface = 0.3;
  constexpr double pi = std::numbers::pi_v<double>;

  Scenario s;
  s.name = "multi_robot";
  s.root_dim = 2 * n_robots;
  s.q0 = Vector::Zero(s.root_dim);
  s.qdot0 = Vector::Zero(s.root_dim);
  s.geometry.n_robots = n_robots;
  s.geometry.robot_dim = 2;
  s.geometry.robot_radius = 0.1;
  s.sim.horizon = 60.0;
  s.tree.name = "root";

  for (int r = 0; r < n_robots; ++r) {
    const double angle = 2.0 * pi * r / n_robots;
    Vector start(2), goal(2);
    start << circle_radius * std::cos(angle), circle_radius * std::sin(angle);
    goal = -start;
    s.q0.segment(2 * r, 2) = start;
    s.goals.push_back(goal);

    NodeSpec robot;
    robot.name = "robot" + std::to_string(r);
    robot.map = robot_projection(r, 2);
    robot.children.push_back(
        leaf_node("goal", {"identity", {}}, attractor_leaf(goal, nominal, 10.0, 1.0, 3.0)));
    s.tree.children.push_back(std::move(robot));
  }
  for (int i = 0; i < n_robots; ++i) {
    for (int j = i + 1; j < n_robots; ++j) {
      s.tree.children.push_back(
          leaf_node("pair" + std::to_string(i) + "_" + std::to_string(j),
                    pair_clearance_map(i, j, 2, n_robots, pair_surface),
                    {"gds_collision", {{"damping_gain", 2.0}}}));
    }
  }
  return s;
}

Scenario scenario_formation(const std::string& nominal, int n_robots) {
  if (n_robots != 5) {
    throw StructuralError("scenario_formation: only the 5-robot pentagon is shipped, got " +
                          std::to_string(n_robots));
  }
  const double circumradius = 1.0;
  const double pair_surface = 0.3;
  constexpr double pi = std::numbers::pi_v<double>;

  Scenario s;
  s.name = "formation";
  s.root_dim = 2 * n_robots;
  s.q0 = Vector::Zero(s.root_dim);
  s.qdot0 = Vector::Zero(s.root_dim);
  s.geometry.n_robots = n_robots;
  s.geometry.robot_dim = 2;
  s.geometry.robot_radius = 0.1;
  s.sim.horizon = 60.0;
  s.tree.name = "root";

  std::vector<Vector> vertices;
  for (int r = 0; r < n_robots; ++r) {
    const double angle = 0.5 * pi + 2.0 * pi * r / n_robots;
    Vector v(2);
    v << circumradius * std::cos(angle), circumradius * std::sin(angle);
    vertices.push_back(v);
    s.q0.segment(2 * r, 2) = v;
  }
  Vector leader_goal(2);
  leader_goal << vertices[0][0], vertices[0][1] + 3.0;
  for (int r = 0; r < n_robots; ++r) {
    s.goals.push_back(r == 0 ? leader_goal : Vector(vertices[r]));
  }

  for (int r = 0; r < n_robots; ++r) {
    NodeSpec robot;
    robot.name = "robot" + std::to_string(r);
    robot.map = robot_projection(r, 2);
    if (r == 0) {
      robot.children.push_back(leaf_node("goal", {"identity", {}},
                                         attractor_leaf(leader_goal, nominal, 10.0, 1.0, 3.0)));
    }
    robot.children.push_back(
        leaf_node("damper", {"identity", {}}, {"gds_damper", {{"damping", 1.5}}}));
    s.tree.children.push_back(std::move(robot));
  }

  // Ring plus two diagonals from the leader: rigid in the plane.
  const std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4},
                                                  {4, 0}, {0, 2}, {0, 3}};
  for (const auto& [i, j] : edges) {
    const double rest = (vertices[i] - vertices[j]).norm();
    ParamMap map_params = {{"i", static_cast<double>(i)},
                           {"j", static_cast<double>(j)},
                           {"per_robot_dim", 2.0},
                           {"n_robots", static_cast<double>(n_robots)}};
    s.tree.children.push_back(
        leaf_node("edge" + std::to_string(i) + "_" + std::to_string(j),
                  {"pairwise_distance", std::move(map_params)},
                  {"gds_formation",
                   {{"rest_length", rest}, {"gain", 100.0}, {"damping", 20.0}}}));
  }
  for (int i = 0; i < n_robots; ++i) {
    for (int j = i + 1; j < n_robots; ++j) {
      s.tree.children.push_back(
          leaf_node("pair" + std::to_string(i) + "_" + std::to_string(j),
                    pair_clearance_map(i, j, 2, n_robots, pair_surface),
                    {"gds_collision", {{"damping_gain", 2.0}}}));
    }
  }
  return s;
}

Scenario builtin_scenario(const std::string& name, const std::string& nominal) {
  if (name == "goal2d") return scenario_goal_reach_2d(nominal);
  if (name == "multi_robot") return scenario_multi_robot(nominal);
  if (name == "formation") return scenario_formation(nominal);
  throw StructuralError("unknown scenario '" + name + "' (shipped: goal2d, multi_robot, "
                        "formation)");
}

std::vector<std::string> builtin_scenario_names() {
  return {"goal2d", "multi_robot", "formation"};
}

std::string scenario_to_json(const Scenario& scenario) {
  json out;
  out["name"] = scenario.name;
  out["root_dim"] = scenario.root_dim;
  out["seed"] = scenario.seed;
  out["q0"] = from_vector(scenario.q0);
  out["qdot0"] = from_vector(scenario.qdot0);
  out["goals"] = json::array();
  for (const Vector& g : scenario.goals) out["goals"].push_back(from_vector(g));
  out["safety_radius"] = scenario.safety_radius;
  out["geometry"] = {{"n_robots", scenario.geometry.n_robots},
                     {"robot_dim", scenario.geometry.robot_dim},
                     {"robot_radius", scenario.geometry.robot_radius}};
  out["geometry"]["obstacles"] = json::array();
  for (std::size_t i = 0; i < scenario.geometry.obstacles.centers.size(); ++i) {
    out["geometry"]["obstacles"].push_back(
        {{"center", from_vector(scenario.geometry.obstacles.centers[i])},
         {"radius", scenario.geometry.obstacles.radii[i]}});
  }
  out["sim"] = {{"step", scenario.sim.step},
                {"horizon", scenario.sim.horizon},
                {"integrator",
                 scenario.sim.integrator == Integrator::kRk4 ? "rk4" : "semi_implicit_euler"},
                {"conv_vel", scenario.sim.conv_vel},
                {"conv_pos", scenario.sim.conv_pos},
                {"state_bound", scenario.sim.state_bound}};
  out["tree"] = node_to_json(scenario.tree, true);
  return out.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::exception& err) {
    throw StructuralError(std::string("config: JSON parse failure: ") + err.what());
  }
  try {
    Scenario s;
    s.name = obj.at("name").get<std::string>();
    s.root_dim = obj.at("root_dim").get<int>();
    s.seed = obj.value("seed", 0u);
    s.q0 = to_vector(obj.at("q0").get<std::vector<double>>());
    s.qdot0 = to_vector(obj.at("qdot0").get<std::vector<double>>());
    for (const json& g : obj.at("goals")) {
      s.goals.push_back(to_vector(g.get<std::vector<double>>()));
    }
    s.safety_radius = obj.value("safety_radius", 0.25);
    const json& geom = obj.at("geometry");
    s.geometry.n_robots = geom.at("n_robots").get<int>();
    s.geometry.robot_dim = geom.at("robot_dim").get<int>();
    s.geometry.robot_radius = geom.at("robot_radius").get<double>();
    for (const json& o : geom.value("obstacles", json::array())) {
      s.geometry.obstacles.centers.push_back(to_vector(o.at("center").get<std::vector<double>>()));
      s.geometry.obstacles.radii.push_back(o.at("radius").get<double>());
    }
    const json& sim = obj.at("sim");
    s.sim.step = sim.at("step").get<double>();
    s.sim.horizon = sim.at("horizon").get<double>();
    const std::string integrator = sim.value("integrator", "rk4");
    if (integrator == "rk4") {
      s.sim.integrator = Integrator::kRk4;
    } else if (integrator == "semi_implicit_euler") {
      s.sim.integrator = Integrator::kSemiImplicitEuler;
    } else {
      throw StructuralError("config: unknown integrator '" + integrator + "'");
    }
    s.sim.conv_vel = sim.value("conv_vel", 2e-4);
    s.sim.conv_pos = sim.value("conv_pos", 5e-5);
    s.sim.state_bound = sim.value("state_bound", 1e6);
    s.tree = node_from_json(obj.at("tree"), true);
    if (s.q0.size() != s.root_dim || s.qdot0.size() != s.root_dim) {
      throw StructuralError("config: initial state length does not match root_dim");
    }
    return s;
  } catch (const json::exception& err) {
    throw StructuralError(std::string("config: missing or mistyped field: ") + err.what());
  }
}

}  // namespace rmpflow

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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "rmpflow/lyapunov.hpp"
#include "rmpflow/scenario.hpp"
#include "rmpflow/simulator.hpp"
#include "rmpflow/tree.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rmpflow;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

struct Toggles {
  bool decay = false;
  bool invariant_set = false;
  bool immersion = false;
};

struct Overrides {
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<std::string> integrator;
  std::optional<unsigned int> seed;
};

void apply_overrides(Scenario* scenario, const Overrides& ov) {
  if (ov.step) scenario->sim.step = *ov.step;
  if (ov.horizon) scenario->sim.horizon = *ov.horizon;
  if (ov.integrator) {
    if (*ov.integrator == "rk4") {
      scenario->sim.integrator = Integrator::kRk4;
    } else if (*ov.integrator == "semi_implicit_euler") {
      scenario->sim.integrator = Integrator::kSemiImplicitEuler;
    } else {
      throw StructuralError("unknown integrator '" + *ov.integrator +
                            "' (expected rk4 or semi_implicit_euler)");
    }
  }
  if (ov.seed) scenario->seed = *ov.seed;
  if (scenario->sim.step <= 0.0) {
    throw StructuralError("step must be positive");
  }
  if (scenario->sim.horizon < scenario->sim.step) {
    throw StructuralError("horizon must cover at least one step");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> vdot_fd_series(const Trajectory& traj) {
  const int n = traj.steps();
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 1);
    const int hi = std::min(n - 1, i + 1);
    if (hi > lo) {
      out[i] = (traj.V[hi] - traj.V[lo]) / (traj.times[hi] - traj.times[lo]);
    }
  }
  return out;
}

void write_trajectory_csv(const fs::path& file, const Scenario& scenario,
                          const Trajectory& traj) {
  std::ofstream out(file);
  const int d = scenario.root_dim;
  out << "t";
  for (int i = 0; i < d; ++i) out << ",q" << i;
  for (int i = 0; i < d; ++i) out << ",qdot" << i;
  for (int i = 0; i < d; ++i) out << ",u" << i;
  out << ",V_r,Vdot_fd,clearance,min_pair_dist\n";
  const std::vector<double> vdot = vdot_fd_series(traj);
  for (int s = 0; s < traj.steps(); ++s) {
    out << fmt(traj.times[s]);
    for (int i = 0; i < d; ++i) out << "," << fmt(traj.q[s][i]);
    for (int i = 0; i < d; ++i) out << "," << fmt(traj.qdot[s][i]);
    for (int i = 0; i < d; ++i) out << "," << fmt(traj.u[s][i]);
    out << "," << fmt(traj.V[s]) << "," << fmt(vdot[s]) << "," << fmt(traj.clearance[s]) << ","
        << fmt(traj.min_pair_dist[s]) << "\n";
  }
}

void write_plot_data(const fs::path& dir, const Scenario& scenario, const Trajectory& traj) {
  const std::vector<double> vdot = vdot_fd_series(traj);
  {
    std::ofstream path_out(dir / "path.dat");
    path_out << "# t";
    for (int r = 0; r < scenario.geometry.n_robots; ++r) {
      for (int k = 0; k < scenario.geometry.robot_dim; ++k) {
        path_out << " robot" << r << "_x" << k;
      }
    }
    path_out << "\n";
    for (int s = 0; s < traj.steps(); ++s) {
      path_out << fmt(traj.times[s]);
      for (int i = 0; i < scenario.root_dim; ++i) path_out << " " << fmt(traj.q[s][i]);
      path_out << "\n";
    }
  }
  {
    std::ofstream energy_out(dir / "energy.dat");
    energy_out << "# t V_r Vdot_fd\n";
    for (int s = 0; s < traj.steps(); ++s) {
      energy_out << fmt(traj.times[s]) << " " << fmt(traj.V[s]) << " " << fmt(vdot[s]) << "\n";
    }
  }
  {
    std::ofstream clr_out(dir / "clearance.dat");
    clr_out << "# t clearance min_pair_dist\n";
    for (int s = 0; s < traj.steps(); ++s) {
      clr_out << fmt(traj.times[s]) << " " << fmt(traj.clearance[s]) << " "
              << fmt(traj.min_pair_dist[s]) << "\n";
    }
  }
}

struct CheckOutcome {
  std::vector<std::string> lines;
  bool all_passed = true;
};

CheckOutcome run_checks(const RmpTree& tree, const Trajectory& traj, const Toggles& toggles,
                        const fs::path& dir) {
  CheckOutcome outcome;
  if (toggles.decay) {
    const DecayReport report = check_decay(tree, traj);
    outcome.lines.push_back(report.summary);
    outcome.all_passed = outcome.all_passed && report.passed;
    std::ofstream(dir / "decay.dat") << decay_records_text(report);
  }
  if (toggles.invariant_set) {
    const InvariantSetReport force =
        check_invariant_set(tree, traj, InvariantSetKind::kForceBalance);
    const InvariantSetReport critical =
        check_invariant_set(tree, traj, InvariantSetKind::kPotentialCritical);
    outcome.lines.push_back(force.summary);
    outcome.lines.push_back(critical.summary);
    outcome.all_passed = outcome.all_passed && force.passed && critical.passed;
  }
  if (toggles.immersion) {
    const ImmersionReport report = check_immersion(tree, traj);
    outcome.lines.push_back(report.summary);
  }
  return outcome;
}

struct RunResult {
  int exit_code = kExitPass;
  std::vector<std::string> lines;
};

RunResult run_one(Scenario scenario, const std::string& label, const Toggles& toggles,
                  const fs::path& dir) {
  RunResult result;
  try {
    fs::create_directories(dir);
    const RmpTree tree = build_tree(scenario);
    const Trajectory traj =
        simulate(tree, scenario.q0, scenario.qdot0, scenario.sim, scenario.geometry);

    write_trajectory_csv(dir / "trajectory.csv", scenario, traj);
    write_plot_data(dir, scenario, traj);
    std::ofstream(dir / "config.json") << scenario_to_json(scenario);

    CheckOutcome checks = run_checks(tree, traj, toggles, dir);
    const bool any_check = toggles.decay || toggles.invariant_set;
    if (any_check && traj.truncated) {
      checks.all_passed = false;
      checks.lines.push_back("verification: FAIL (trajectory truncated before the horizon)");
    }

    std::ostringstream report;
    report << "run " << label << "\n";
    report << "scenario=" << scenario.name << " steps=" << traj.steps()
           << " final_t=" << (traj.times.empty() ? 0.0 : traj.times.back())
           << " converged=" << (traj.converged ? "yes" : "no")
           << " truncated=" << (traj.truncated ? "yes" : "no") << "\n";
    for (const std::string& e : traj.events) report << "event: " << e << "\n";
    for (const std::string& line : checks.lines) report << line << "\n";
    std::ofstream(dir / "report.txt") << report.str();

    result.lines.push_back(label + ": " + std::to_string(traj.steps()) + " states, " +
                           (traj.converged ? "converged" : traj.truncated ? "truncated"
                                                                          : "horizon reached"));
    for (const std::string& line : checks.lines) result.lines.push_back("  " + line);
    if (!checks.all_passed) {
      result.exit_code = kExitCheckFailure;
      result.lines.push_back("  report: " + (dir / "report.txt").string());
    }
  } catch (const StructuralError& err) {
    result.exit_code = kExitUsage;
    result.lines.push_back(label + ": configuration error: " + err.what());
  } catch (const std::exception& err) {
    result.exit_code = kExitCheckFailure;
    result.lines.push_back(label + ": failed: " + err.what());
  }
  return result;
}

fs::path output_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("RMPFLOW_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "out";
}

Scenario load_scenario_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw StructuralError("cannot open config file '" + file.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return scenario_from_json(text.str());
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t comma = line.find(',', pos);
    const std::string cell =
        line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    out.push_back(std::stod(cell));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// Rebuild the state portion of a trajectory from a previous run directory.
Trajectory load_trajectory(const fs::path& dir, const Scenario& scenario) {
  std::ifstream in(dir / "trajectory.csv");
  if (!in) {
    throw StructuralError("missing trajectory file '" + (dir / "trajectory.csv").string() + "'");
  }
  const int d = scenario.root_dim;
  Trajectory traj;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> row = parse_csv_row(line);
    if (static_cast<int>(row.size()) != 1 + 3 * d + 4) {
      throw StructuralError("trajectory row has " + std::to_string(row.size()) +
                            " columns, expected " + std::to_string(1 + 3 * d + 4));
    }
    traj.times.push_back(row[0]);
    Vector q(d), qdot(d), u(d);
    for (int i = 0; i < d; ++i) q[i] = row[1 + i];
    for (int i = 0; i < d; ++i) qdot[i] = row[1 + d + i];
    for (int i = 0; i < d; ++i) u[i] = row[1 + 2 * d + i];
    traj.q.push_back(std::move(q));
    traj.qdot.push_back(std::move(qdot));
    traj.u.push_back(std::move(u));
    traj.V.push_back(row[1 + 3 * d]);
    traj.clearance.push_back(row[2 + 3 * d + 1]);
    traj.min_pair_dist.push_back(row[2 + 3 * d + 2]);
  }
  return traj;
}

int merge_exit(int a, int b) { return std::max(a, b); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree-composed motion policy simulator and verifier"};
  app.set_help_flag("--help", "Print help and exit");
  app.require_subcommand(1);

  std::vector<std::string> scenarios;
  std::string config_file;
  std::string nominal = "potential";
  std::string out_flag;
  Overrides overrides;
  Toggles toggles;

  auto add_common = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "Print help and exit");
    cmd->add_option("--scenario", scenarios, "Shipped scenario names (goal2d, multi_robot, formation)");
    cmd->add_option("--config", config_file, "Scenario config file (JSON)");
    cmd->add_option("--nominal", nominal, "Nominal controller for attractor leaves")
        ->check(CLI::IsMember({"potential", "spiral", "sinusoidal", "gds"}));
    cmd->add_option("--h", overrides.step, "Integration step (seconds)");
    cmd->add_option("--horizon", overrides.horizon, "Simulation horizon (seconds)");
    cmd->add_option("--integrator", overrides.integrator, "Integrator")
        ->check(CLI::IsMember({"rk4", "semi_implicit_euler"}));
    cmd->add_option("--out", out_flag, "Output root directory (default $RMPFLOW_OUT or ./out)");
    cmd->add_option("--seed", overrides.seed, "Seed recorded in the resolved config");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Simulate scenarios and export results");
  run_cmd->add_option("names", scenarios, "Shipped scenario names");
  add_common(run_cmd);
  run_cmd->add_flag("--check-decay", toggles.decay, "Verify the energy decay rate");
  run_cmd->add_flag("--check-invariant-set", toggles.invariant_set,
                    "Verify final-state limit-set membership");
  run_cmd->add_flag("--check-immersion", toggles.immersion,
                    "Report the stacked Jacobian rank (advisory)");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the full verification suite on runs or scenarios");
  verify_cmd->add_option("names", scenarios, "Shipped scenario names");
  add_common(verify_cmd);
  std::string from_dir;
  verify_cmd->add_option("--from", from_dir, "Re-check a previous run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  const bool verifying = verify_cmd->parsed();
  if (verifying) {
    toggles = Toggles{true, true, true};
  }

  try {
    const fs::path out_root = output_root(out_flag);

    if (verifying && !from_dir.empty()) {
      const Scenario scenario = load_scenario_file(fs::path(from_dir) / "config.json");
      const RmpTree tree = build_tree(scenario);
      const Trajectory traj = load_trajectory(from_dir, scenario);
      const CheckOutcome checks = run_checks(tree, traj, toggles, from_dir);
      for (const std::string& line : checks.lines) std::cout << line << "\n";
      return checks.all_passed ? kExitPass : kExitCheckFailure;
    }

    struct Job {
      Scenario scenario;
      std::string label;
      fs::path dir;
    };
    std::vector<Job> jobs;
    if (!config_file.empty()) {
      Scenario s = load_scenario_file(config_file);
      apply_overrides(&s, overrides);
      jobs.push_back({s, s.name, fs::path()});
    }
    for (const std::string& name : scenarios) {
      Scenario s = builtin_scenario(name, nominal);
      apply_overrides(&s, overrides);
      jobs.push_back({s, name + " (" + nominal + ")", fs::path()});
    }
    if (jobs.empty()) {
      std::cerr << "no scenario given; use a positional name, --scenario, or --config\n";
      return kExitUsage;
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      jobs[i].dir = jobs.size() == 1 ? out_root : out_root / jobs[i].scenario.name;
    }

    std::vector<RunResult> results(jobs.size());
    if (jobs.size() == 1) {
      results[0] = run_one(jobs[0].scenario, jobs[0].label, toggles, jobs[0].dir);
    } else {
      std::vector<std::thread> workers;
      workers.reserve(jobs.size());
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        workers.emplace_back([&, i] {
          results[i] = run_one(jobs[i].scenario, jobs[i].label, toggles, jobs[i].dir);
        });
      }
      for (std::thread& w : workers) w.join();
    }

    int exit_code = kExitPass;
    for (const RunResult& r : results) {
      for (const std::string& line : r.lines) std::cout << line << "\n";
      exit_code = merge_exit(exit_code, r.exit_code);
    }
    return exit_code;
  } catch (const StructuralError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitCheckFailure;
  }
}

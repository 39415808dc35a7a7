// Command-line front end: plan global paths, run single trials, batch-compare
// the two planners, and export end-effector trajectories for plotting.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "hybridplan/io.hpp"
#include "hybridplan/simulator.hpp"

namespace fs = std::filesystem;
using namespace hybridplan;

namespace
{

struct CommonOpts
{
  std::string scenario;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string planner;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool need_scenario = true)
{
  auto* s = cmd->add_option("--scenario", opts.scenario, "Scenario JSON file");
  if (need_scenario) {
    s->required();
  }
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--override", opts.overrides, "Dotted-key override, e.g. vpf.K_att=1.5");
  cmd->add_option("--seed", opts.seed, "Trial seed")->each([&](const std::string&) {
    opts.seed_set = true;
  });
  cmd->add_option("--planner", opts.planner, "Planner kind: hybrid | vpf")
      ->check(CLI::IsMember({"hybrid", "vpf"}));
}

Scenario load(const CommonOpts& opts)
{
  Scenario sc = load_scenario(opts.scenario, opts.overrides);
  if (opts.seed_set) {
    sc.seed = opts.seed;
  }
  if (opts.planner == "hybrid") {
    sc.planner = PlannerKind::kHybrid;
  } else if (opts.planner == "vpf") {
    sc.planner = PlannerKind::kVpf;
  }
  return sc;
}

void echo_config(const CommonOpts& opts)
{
  fs::create_directories(opts.out_dir);
  std::ofstream out(fs::path(opts.out_dir) / "effective_config.json");
  out << effective_scenario_json(opts.scenario, opts.overrides);
}

int cmd_plan(const CommonOpts& opts)
{
  const Scenario sc = load(opts);
  echo_config(opts);

  const WorldState snapshot = make_world(sc.obstacles, 0.0);
  PlannerParams rrt = sc.rrt;
  rrt.seed = sc.seed;
  const PlanResult plan = plan_rrt_star(*sc.model, snapshot, sc.q_start, sc.q_goal, rrt);
  if (!plan.ok()) {
    std::cerr << "planning failed: "
              << (plan.status == PlanStatus::kInfeasibleStart  ? "start in collision"
                  : plan.status == PlanStatus::kInfeasibleGoal ? "goal in collision"
                                                               : "no path found")
              << "\n";
    return 2;
  }
  std::vector<JointConfig> geometric;
  if (plan.waypoints.size() < 2) {
    geometric = {plan.waypoints.front(), plan.waypoints.front()};
  } else {
    const double resolution = rrt.step_size / 4.0;
    std::vector<JointConfig> shaped =
        push_clearance(*sc.model, snapshot, plan.waypoints, sc.command.d_max + 0.05, resolution);
    shaped = shortcut_path(*sc.model, snapshot, shaped, resolution, rrt.weights);
    shaped = push_clearance(*sc.model, snapshot, resample_polyline(shaped, 0.3),
                            sc.command.d_max + 0.05, resolution);
    geometric = smooth_bspline(*sc.model, snapshot, shaped, sc.spline_samples_per_segment);
  }
  const TimedPath timed = time_parameterize(*sc.model, geometric, sc.dt());
  write_timed_path_csv((fs::path(opts.out_dir) / "path.csv").string(), timed);

  // Cost terms of the planner objective evaluated on the emitted trajectory.
  double length = 0.0;
  for (std::size_t k = 0; k + 1 < timed.configs.size(); ++k) {
    length += (timed.configs[k + 1] - timed.configs[k]).norm();
  }
  double manip = 0.0;
  for (const auto& q : timed.configs) {
    manip += yoshikawa(*sc.model, q);
  }
  manip /= static_cast<double>(timed.configs.size());
  double clearance = std::numeric_limits<double>::infinity();
  for (const auto& q : timed.configs) {
    clearance = std::min(clearance, min_clearance(min_distance(*sc.model, q, snapshot)));
  }

  nlohmann::json summary;
  summary["waypoints_raw"] = plan.waypoints.size();
  summary["iterations"] = plan.iterations;
  summary["tree_cost"] = plan.cost;
  summary["N"] = timed.size();
  summary["duration_s"] = timed.duration();
  summary["L"] = length;
  summary["M"] = manip;
  summary["D"] = std::isfinite(clearance) ? clearance : std::numeric_limits<double>::max();
  summary["cost"] = path_cost(*sc.model, timed.configs, snapshot, sc.rrt.weights);
  std::ofstream out(fs::path(opts.out_dir) / "plan_summary.json");
  out << summary.dump(2) << "\n";
  return 0;
}

int cmd_run(const CommonOpts& opts)
{
  const Scenario sc = load(opts);
  echo_config(opts);

  StepCsvWriter sink((fs::path(opts.out_dir) / "steps.csv").string(), sc.model->joint_count());
  const TrialMetrics m = run_trial(sc, sink);

  std::ofstream metrics(fs::path(opts.out_dir) / "metrics.csv");
  metrics << metrics_csv_header() << "\n"
          << metrics_csv_row(sc.seed, sc.planner, m) << "\n";

  if (m.outcome == TrialOutcome::kReachedGoal) {
    return 0;
  }
  std::cerr << "trial did not reach the goal: " << m.failure_reason << "\n";
  return m.outcome == TrialOutcome::kPlanningFailed ? 2 : 3;
}

int cmd_compare(const CommonOpts& opts, int runs, int workers)
{
  const Scenario sc = load(opts);
  echo_config(opts);

  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(runs));
  for (int i = 0; i < runs; ++i) {
    seeds.push_back(sc.seed + static_cast<std::uint64_t>(i));
  }
  const ComparisonReport report = compare(sc, seeds, workers);

  write_metrics_csv((fs::path(opts.out_dir) / "metrics.csv").string(), report);
  write_comparison_json((fs::path(opts.out_dir) / "comparison.json").string(), report);
  write_histograms_csv((fs::path(opts.out_dir) / "histograms.csv").string(), report);

  int completed = 0;
  for (const auto& row : report.rows) {
    if (row.metrics.reached_goal) {
      ++completed;
    }
  }
  const double rate = static_cast<double>(completed) / static_cast<double>(report.rows.size());
  if (rate < 0.9) {
    std::cerr << "only " << completed << "/" << report.rows.size() << " trials completed\n";
    return 4;
  }
  return 0;
}

int cmd_export(const CommonOpts& opts, const std::string& log_file)
{
  const Scenario sc = load(opts);
  const fs::path log_path =
      log_file.empty() ? fs::path(opts.out_dir) / "steps.csv" : fs::path(log_file);
  if (!fs::exists(log_path)) {
    std::cerr << "missing step log: " << log_path << "\n";
    return 1;
  }

  std::ifstream in(log_path);
  std::string line;
  std::getline(in, line);  // header
  std::ofstream out(fs::path(opts.out_dir) / "ee_path.csv");
  out << "t,x,y,z\n";
  const int n = sc.model->joint_count();
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    if (static_cast<int>(fields.size()) < 1 + n) {
      std::cerr << "malformed log row\n";
      return 1;
    }
    JointConfig q(n);
    for (int j = 0; j < n; ++j) {
      q(j) = std::stod(fields[static_cast<std::size_t>(1 + j)]);
    }
    const Pose ee = forward_kinematics(*sc.model, q, n);
    out << fields[0] << "," << format_double(ee.translation.x()) << ","
        << format_double(ee.translation.y()) << "," << format_double(ee.translation.z()) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Hybrid manipulator motion planning and headless simulation"};
  app.require_subcommand(1);

  CommonOpts plan_opts, run_opts, compare_opts, export_opts;
  int runs = 2;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  std::string export_log;

  auto* plan = app.add_subcommand("plan", "Plan a global path and write it as CSV");
  add_common(plan, plan_opts);
  auto* run = app.add_subcommand("run", "Run a single closed-loop trial");
  add_common(run, run_opts);
  auto* comp = app.add_subcommand("compare", "Paired batch comparison of both planners");
  add_common(comp, compare_opts);
  comp->add_option("--runs", runs, "Number of paired runs")->check(CLI::Range(2, 1000000));
  comp->add_option("--workers", workers, "Worker threads");
  auto* exp = app.add_subcommand("export", "Convert a step log into an end-effector path");
  add_common(exp, export_opts);
  exp->add_option("--log", export_log, "Step log CSV (defaults to <out>/steps.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      return cmd_plan(plan_opts);
    }
    if (run->parsed()) {
      return cmd_run(run_opts);
    }
    if (comp->parsed()) {
      return cmd_compare(compare_opts, runs, workers);
    }
    if (exp->parsed()) {
      return cmd_export(export_opts, export_log);
    }
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

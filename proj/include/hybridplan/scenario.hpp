#ifndef HYBRIDPLAN_SCENARIO_HPP_
#define HYBRIDPLAN_SCENARIO_HPP_

#include <memory>
#include <string>
#include <vector>

#include "hybridplan/command.hpp"
#include "hybridplan/field.hpp"
#include "hybridplan/planner.hpp"
#include "hybridplan/tracker.hpp"

namespace hybridplan
{

enum class PlannerKind
{
  kHybrid,
  kVpf
};

/// Complete description of one simulated trial setup.
struct Scenario
{
  std::shared_ptr<const RobotModel> model;
  std::vector<Obstacle> obstacles;
  JointConfig q_start;
  JointConfig q_goal;
  double control_rate = 100.0;  // Hz
  double max_duration = 60.0;   // s
  double goal_tolerance_translation = 0.005;            // m
  double goal_tolerance_rotation = 2.0 * M_PI / 180.0;  // rad
  PlannerKind planner = PlannerKind::kHybrid;
  double start_delay_min = 0.0;  // s
  double start_delay_max = 2.0;  // s
  std::uint64_t seed = 1;
  int spline_samples_per_segment = 8;

  PlannerParams rrt;
  TrackerParams tracker;
  FieldParams vpf;
  CommandParams command;

  double dt() const { return 1.0 / control_rate; }
};

/// Raised on malformed scenario/model documents; carries a line/column
/// diagnostic for parse failures.
struct ScenarioError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Loads a scenario document, resolving a relative model path against the
/// scenario file location. `overrides` are dotted-key assignments
/// ("vpf.K_att=1.5") applied onto the document before parsing, last wins.
Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides = {});

/// The merged document (file + overrides) as pretty JSON, for echoing the
/// effective configuration next to run outputs.
std::string effective_scenario_json(const std::string& path,
                                    const std::vector<std::string>& overrides = {});

}  // namespace hybridplan

#endif  // HYBRIDPLAN_SCENARIO_HPP_

#ifndef HYBRIDPLAN_SIMULATOR_HPP_
#define HYBRIDPLAN_SIMULATOR_HPP_

#include <functional>
#include <string>
#include <vector>

#include "hybridplan/scenario.hpp"
#include "hybridplan/stats.hpp"

namespace hybridplan
{

/// One control-loop step as logged to the per-trial CSV.
struct StepRecord
{
  double t = 0.0;  // seconds since the manipulator started
  JointConfig q;
  Eigen::VectorXd qd;
  ControlMode mode = ControlMode::kTracking;
  double lambda = 0.0;
  double min_dist = 0.0;
};

enum class TrialOutcome
{
  kReachedGoal,
  kCollided,
  kTimeout,
  kPlanningFailed
};

struct TrialMetrics
{
  TrialOutcome outcome = TrialOutcome::kTimeout;
  bool reached_goal = false;
  bool collided = false;
  double min_obstacle_distance = 0.0;  // +inf sentinel for empty worlds
  double completion_time = 0.0;        // seconds, excludes the start delay
  double avg_manipulability = 0.0;
  int dls_count = 0;
  double avg_mobility_ratio = 1.0;
  int trap_events = 0;
  /// Worst |cos| between issued escape and attraction directions (0 when no
  /// escape fired); escapes are perpendicular by construction.
  double worst_escape_alignment = 0.0;
  double start_delay = 0.0;
  std::string failure_reason;
};

using StepSink = std::function<void(const StepRecord&)>;

/// Runs one closed-loop trial of the scenario's planner at the scenario's
/// seed. Deterministic: identical (scenario, seed) yields identical metrics
/// and step streams. Per-step records go to `sink` when provided.
TrialMetrics run_trial(const Scenario& scenario, const StepSink& sink = nullptr);

/// Mobility ratio mu_v / |e_max| in (0, 1].
double mobility_ratio(const EllipsoidBasis& basis, const SpatialVelocity& v);

struct MetricComparison
{
  std::string name;
  double mean_hybrid = 0.0;
  double mean_vpf = 0.0;
  double t = 0.0;
  double p = 1.0;
  bool significant = false;
};

struct TrialRow
{
  std::uint64_t seed = 0;
  PlannerKind planner = PlannerKind::kHybrid;
  TrialMetrics metrics;
};

struct ComparisonReport
{
  std::vector<TrialRow> rows;  // ordered by seed, hybrid before vpf
  std::vector<MetricComparison> metrics;
  int pairs_total = 0;
  int pairs_excluded = 0;
};

/// Runs both planners on identical world realizations for every seed
/// (paired design) and aggregates per-metric paired t-tests. Pairs where
/// either trial failed to reach the goal are excluded from the tests.
/// Trials run on `workers` threads; results do not depend on the count.
ComparisonReport compare(const Scenario& scenario_template, const std::vector<std::uint64_t>& seeds,
                         int workers = 1);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_SIMULATOR_HPP_

#ifndef HYBRIDPLAN_PLANNER_HPP_
#define HYBRIDPLAN_PLANNER_HPP_

#include <cstdint>
#include <vector>

#include "hybridplan/robot_model.hpp"
#include "hybridplan/world.hpp"

namespace hybridplan
{

/// Time-parameterized joint-space trajectory at fixed step dt.
struct TimedPath
{
  std::vector<JointConfig> configs;
  double dt = 0.01;

  int size() const { return static_cast<int>(configs.size()); }
  double duration() const { return dt * static_cast<double>(size() - 1); }

  /// Derived per-step joint velocities (q_{k+1} - q_k) / dt.
  std::vector<Eigen::VectorXd> velocities() const;

  /// Verifies the trajectory invariants against the model limits.
  /// Returns the empty string when valid, else a description of the breach.
  std::string check_invariants(const RobotModel& model) const;
};

struct CostWeights
{
  double path = 1.0;
  double manipulability = 0.1;
  double obstacle = 0.0;
  // Sigmoid normalizer scales per term.
  double length_scale = 1.0;
  double manip_scale = 0.1;
  double dist_scale = 0.1;
};

struct PlannerParams
{
  int max_iterations = 4000;
  double step_size = 0.2;        // rad
  double rewire_gamma = 2.0;     // neighbor radius = gamma (log k / k)^{1/n}
  double goal_bias = 0.05;
  double goal_tolerance = 0.05;  // rad
  CostWeights weights;
  std::uint64_t seed = 0;
};

enum class PlanStatus
{
  kSuccess,
  kInfeasibleStart,
  kInfeasibleGoal,
  kNoPath
};

struct PlanResult
{
  PlanStatus status = PlanStatus::kNoPath;
  std::vector<JointConfig> waypoints;
  double cost = 0.0;  // accumulated edge cost of the returned path
  int iterations = 0;

  bool ok() const { return status == PlanStatus::kSuccess; }
};

/// True when any link capsule touches or penetrates an obstacle.
bool config_collides(const RobotModel& model, const JointConfig& q, const WorldState& world);

/// Densified straight-edge validity at resolution step (both endpoints included).
bool edge_collision_free(const RobotModel& model, const JointConfig& a, const JointConfig& b,
                         const WorldState& world, double resolution);

/// Cost of a waypoint path: weighted sum of sigmoid-normalized path length,
/// inverse mean manipulability, and inverse min obstacle clearance.
double path_cost(const RobotModel& model, const std::vector<JointConfig>& path,
                 const WorldState& world, const CostWeights& weights);

/// Joint-space RRT* against a static world snapshot.
PlanResult plan_rrt_star(const RobotModel& model, const WorldState& world_snapshot,
                         const JointConfig& q_start, const JointConfig& q_goal,
                         const PlannerParams& params);

/// Greedy shortcut pass: replaces waypoint subchains by direct edges
/// whenever the densified edge stays collision-free. Deterministic; a free
/// world collapses the path to its endpoints.
std::vector<JointConfig> shortcut_path(const RobotModel& model, const WorldState& world,
                                       const std::vector<JointConfig>& waypoints,
                                       double resolution,
                                       const CostWeights& weights = CostWeights{});

/// Elastic clearance pass: nudges interior waypoints along the numerical
/// clearance gradient until each clears `target` meters (or no valid nudge
/// remains). Edges stay collision-checked at `resolution`.
std::vector<JointConfig> push_clearance(const RobotModel& model, const WorldState& world,
                                        std::vector<JointConfig> waypoints, double target,
                                        double resolution, int sweeps = 30);

/// Splits polyline legs longer than `max_leg` (radians) with evenly spaced
/// intermediate waypoints.
std::vector<JointConfig> resample_polyline(const std::vector<JointConfig>& waypoints,
                                           double max_leg);

/// Clamped cubic B-spline through the waypoints (exact at the endpoints),
/// densified uniformly in parameter. Samples that collide fall back to the
/// raw polyline locally.
std::vector<JointConfig> smooth_bspline(const RobotModel& model, const WorldState& world,
                                        const std::vector<JointConfig>& raw,
                                        int samples_per_segment);

/// Trapezoidal speed profile along joint-space arc length, resampled at dt.
/// The returned trajectory satisfies the per-joint velocity and acceleration
/// limits at every step.
TimedPath time_parameterize(const RobotModel& model, const std::vector<JointConfig>& path,
                            double dt);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_PLANNER_HPP_

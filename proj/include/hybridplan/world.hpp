#ifndef HYBRIDPLAN_WORLD_HPP_
#define HYBRIDPLAN_WORLD_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "hybridplan/robot_model.hpp"

namespace hybridplan
{

enum class ShapeType
{
  kSphere,
  kBox
};

enum class MotionStyle
{
  kStatic,
  kSinusoid,
  kBounce,
  kRandomWaypoint
};

/// Precomputed constant-speed trajectory through seeded random waypoints.
struct WaypointSchedule
{
  std::vector<Eigen::Vector3d> points;  // starts at the initial position
  std::vector<double> times;            // arrival time at each point
};

struct MotionProfile
{
  MotionStyle style = MotionStyle::kStatic;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  double amplitude = 0.0;  // meters
  double speed = 0.0;      // m/s
  double phase = 0.0;      // radians (sinusoid) / seconds offset (bounce)
  std::uint64_t seed = 0;  // random-waypoint stream
  std::shared_ptr<const WaypointSchedule> schedule;  // built at load for random-waypoint
};

struct Obstacle
{
  int id = 0;
  ShapeType shape = ShapeType::kSphere;
  double radius = 0.0;                                  // sphere
  Eigen::Vector3d half_extents = Eigen::Vector3d::Zero();  // box
  Pose initial_pose;
  Pose pose;
  MotionProfile motion;
};

/// Closest-point pair between a robot link and an obstacle. `d` points from
/// the link towards the obstacle; it is the zero vector under penetration
/// (distance clamps to zero and both witness points collapse to the midpoint
/// of the deepest pair).
struct DistanceWitness
{
  int link_index = -1;
  int obstacle_id = -1;
  Eigen::Vector3d point_on_link = Eigen::Vector3d::Zero();
  Eigen::Vector3d point_on_obstacle = Eigen::Vector3d::Zero();
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  double distance = 0.0;
};

/// Capsule expressed in the world frame.
struct WorldCapsule
{
  Eigen::Vector3d a;
  Eigen::Vector3d b;
  double radius;
};

/// Immutable snapshot of the moving-obstacle world. step_world returns a new
/// state; queries are pure, so snapshots are freely shareable across threads.
struct WorldState
{
  std::vector<Obstacle> obstacles;  // sorted by id
  double time = 0.0;
  std::vector<Pose> previous_poses;  // aligned with obstacles, at time - dt

  bool empty() const { return obstacles.empty(); }
};

WorldState make_world(std::vector<Obstacle> obstacles, double time = 0.0);

/// Closed-form obstacle displacement at absolute time t (relative to the
/// initial pose).
Eigen::Vector3d profile_displacement(const MotionProfile& profile, double t);

/// Builds the waypoint schedule for a random-waypoint profile covering
/// [0, horizon] seconds.
std::shared_ptr<const WaypointSchedule> build_waypoint_schedule(
    const Eigen::Vector3d& origin, const MotionProfile& profile, double horizon);

WorldState step_world(const WorldState& world, double dt);

/// Backward finite-difference translational velocity of the obstacle.
Eigen::Vector3d obstacle_velocity(const WorldState& world, int id, double dt);

DistanceWitness capsule_distance(const WorldCapsule& capsule, const Obstacle& obstacle);

/// One witness per link against its nearest obstacle; ties break to the
/// lowest obstacle id. Empty world yields an empty list.
std::vector<DistanceWitness> min_distance(const RobotModel& model, const JointConfig& q,
                                          const WorldState& world);

/// Link capsules placed in the world frame for configuration q.
std::vector<WorldCapsule> world_capsules(const RobotModel& model, const JointConfig& q);
std::vector<WorldCapsule> world_capsules(const RobotModel& model, const std::vector<Pose>& poses);

/// Smallest witness distance across links, +inf for an empty world.
double min_clearance(const std::vector<DistanceWitness>& witnesses);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_WORLD_HPP_

#include "hybridplan/world.hpp"

#include "hybridplan/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hybridplan/rng.hpp"

namespace hybridplan
{

namespace
{

Eigen::Vector3d closest_point_on_segment(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                         const Eigen::Vector3d& p, double* t_out = nullptr)
{
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  }
  if (t_out != nullptr) {
    *t_out = t;
  }
  return a + t * ab;
}

Eigen::Vector3d clamp_to_box(const Eigen::Vector3d& p, const Eigen::Vector3d& h)
{
  return {std::clamp(p.x(), -h.x(), h.x()), std::clamp(p.y(), -h.y(), h.y()),
          std::clamp(p.z(), -h.z(), h.z())};
}

/// Minimizes the (convex) point-to-box outside distance along the segment.
double min_box_parameter(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                         const Eigen::Vector3d& h)
{
  const auto f = [&](double s) {
    const Eigen::Vector3d p = a + s * (b - a);
    return (p - clamp_to_box(p, h)).norm();
  };
  constexpr double invphi = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 100 && (hi - lo) > 1e-12; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

DistanceWitness sphere_witness(const WorldCapsule& cap, const Eigen::Vector3d& center,
                               double sphere_radius)
{
  DistanceWitness w;
  const Eigen::Vector3d p = closest_point_on_segment(cap.a, cap.b, center);
  const Eigen::Vector3d to_center = center - p;
  const double core = to_center.norm();
  const double sep = core - cap.radius - sphere_radius;
  if (core <= 1e-12) {
    // Center on the capsule axis; fully degenerate overlap.
    w.point_on_link = p;
    w.point_on_obstacle = p;
    w.distance = 0.0;
    return w;
  }
  const Eigen::Vector3d dir = to_center / core;
  const Eigen::Vector3d on_link = p + cap.radius * dir;
  const Eigen::Vector3d on_obstacle = center - sphere_radius * dir;
  if (sep > 0.0) {
    w.point_on_link = on_link;
    w.point_on_obstacle = on_obstacle;
    w.d = on_obstacle - on_link;
    w.distance = sep;
  } else {
    const Eigen::Vector3d mid = 0.5 * (on_link + on_obstacle);
    w.point_on_link = mid;
    w.point_on_obstacle = mid;
    w.distance = 0.0;
  }
  return w;
}

DistanceWitness box_witness(const WorldCapsule& cap, const Pose& pose,
                            const Eigen::Vector3d& half_extents)
{
  // Work in the box frame.
  const Eigen::Vector3d a = pose.rotation.transpose() * (cap.a - pose.translation);
  const Eigen::Vector3d b = pose.rotation.transpose() * (cap.b - pose.translation);
  const double s = min_box_parameter(a, b, half_extents);
  const Eigen::Vector3d p = a + s * (b - a);
  const Eigen::Vector3d q = clamp_to_box(p, half_extents);
  const Eigen::Vector3d diff = q - p;
  const double core = diff.norm();

  DistanceWitness w;
  if (core <= 1e-12) {
    // Segment reaches the box interior.
    const Eigen::Vector3d mid = pose.apply(p);
    w.point_on_link = mid;
    w.point_on_obstacle = mid;
    w.distance = 0.0;
    return w;
  }
  const Eigen::Vector3d dir = diff / core;
  const Eigen::Vector3d on_link = p + cap.radius * dir;
  const double sep = core - cap.radius;
  if (sep > 0.0) {
    w.point_on_link = pose.apply(on_link);
    w.point_on_obstacle = pose.apply(q);
    w.d = w.point_on_obstacle - w.point_on_link;
    w.distance = sep;
  } else {
    const Eigen::Vector3d mid = pose.apply(0.5 * (on_link + q));
    w.point_on_link = mid;
    w.point_on_obstacle = mid;
    w.distance = 0.0;
  }
  return w;
}

double bounce_offset(double amplitude, double speed, double t)
{
  if (amplitude <= 0.0 || speed <= 0.0) {
    return 0.0;
  }
  const double period = 4.0 * amplitude / speed;
  double tau = std::fmod(t, period);
  if (tau < 0.0) {
    tau += period;
  }
  if (tau < amplitude / speed) {
    return speed * tau;
  }
  if (tau < 3.0 * amplitude / speed) {
    return amplitude - speed * (tau - amplitude / speed);
  }
  return -amplitude + speed * (tau - 3.0 * amplitude / speed);
}

}  // namespace

Eigen::Vector3d profile_displacement(const MotionProfile& profile, double t)
{
  switch (profile.style) {
    case MotionStyle::kStatic:
      return Eigen::Vector3d::Zero();
    case MotionStyle::kSinusoid: {
      if (profile.amplitude <= 0.0) {
        return Eigen::Vector3d::Zero();
      }
      // Argument rate speed/amplitude makes the analytic peak speed equal the
      // profile speed.
      const double arg = profile.speed / profile.amplitude * t + profile.phase;
      return profile.axis * (profile.amplitude * std::sin(arg));
    }
    case MotionStyle::kBounce:
      return profile.axis * bounce_offset(profile.amplitude, profile.speed, t + profile.phase);
    case MotionStyle::kRandomWaypoint: {
      const auto& sched = profile.schedule;
      if (!sched || sched->points.empty()) {
        return Eigen::Vector3d::Zero();
      }
      const auto& times = sched->times;
      const auto& pts = sched->points;
      if (t <= times.front()) {
        return Eigen::Vector3d::Zero();
      }
      const auto it = std::upper_bound(times.begin(), times.end(), t);
      if (it == times.end()) {
        return pts.back() - pts.front();
      }
      const std::size_t j = static_cast<std::size_t>(it - times.begin());
      const double t0 = times[j - 1], t1 = times[j];
      const double u = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
      return pts[j - 1] + u * (pts[j] - pts[j - 1]) - pts.front();
    }
  }
  return Eigen::Vector3d::Zero();
}

std::shared_ptr<const WaypointSchedule> build_waypoint_schedule(const Eigen::Vector3d& origin,
                                                                const MotionProfile& profile,
                                                                double horizon)
{
  auto sched = std::make_shared<WaypointSchedule>();
  sched->points.push_back(origin);
  sched->times.push_back(0.0);
  if (profile.speed <= 0.0 || profile.amplitude <= 0.0) {
    return sched;
  }
  SplitMix64 rng(profile.seed);
  while (sched->times.back() < horizon) {
    Eigen::Vector3d next = origin + profile.amplitude * Eigen::Vector3d(rng.uniform(-1.0, 1.0),
                                                                        rng.uniform(-1.0, 1.0),
                                                                        rng.uniform(-1.0, 1.0));
    const double dist = (next - sched->points.back()).norm();
    sched->times.push_back(sched->times.back() + dist / profile.speed);
    sched->points.push_back(next);
  }
  return sched;
}

WorldState make_world(std::vector<Obstacle> obstacles, double time)
{
  std::stable_sort(obstacles.begin(), obstacles.end(),
                   [](const Obstacle& a, const Obstacle& b) { return a.id < b.id; });
  for (auto& obs : obstacles) {
    if (obs.shape == ShapeType::kSphere && !(obs.radius > 0.0)) {
      throw std::invalid_argument("sphere radius must be positive");
    }
    if (obs.shape == ShapeType::kBox && !(obs.half_extents.array() > 0.0).all()) {
      throw std::invalid_argument("box half-extents must be positive");
    }
    if (obs.motion.speed < 0.0) {
      throw std::invalid_argument("motion speed must be nonnegative");
    }
    if (obs.motion.style != MotionStyle::kStatic) {
      const double an = obs.motion.axis.norm();
      if (an < 1e-12) {
        throw std::invalid_argument("motion axis must be nonzero");
      }
      obs.motion.axis /= an;
    }
    obs.pose = obs.initial_pose;
    obs.pose.translation = obs.initial_pose.translation + profile_displacement(obs.motion, time);
  }
  WorldState world;
  world.time = time;
  world.obstacles = std::move(obstacles);
  world.previous_poses.reserve(world.obstacles.size());
  for (const auto& obs : world.obstacles) {
    world.previous_poses.push_back(obs.pose);
  }
  return world;
}

WorldState step_world(const WorldState& world, double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  WorldState next = world;
  next.time = world.time + dt;
  for (std::size_t i = 0; i < next.obstacles.size(); ++i) {
    next.previous_poses[i] = world.obstacles[i].pose;
    Obstacle& obs = next.obstacles[i];
    obs.pose.translation =
        obs.initial_pose.translation + profile_displacement(obs.motion, next.time);
  }
  return next;
}

Eigen::Vector3d obstacle_velocity(const WorldState& world, int id, double dt)
{
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
    if (world.obstacles[i].id == id) {
      return (world.obstacles[i].pose.translation - world.previous_poses[i].translation) / dt;
    }
  }
  throw std::invalid_argument("unknown obstacle id");
}

DistanceWitness capsule_distance(const WorldCapsule& capsule, const Obstacle& obstacle)
{
  DistanceWitness w = obstacle.shape == ShapeType::kSphere
                          ? sphere_witness(capsule, obstacle.pose.translation, obstacle.radius)
                          : box_witness(capsule, obstacle.pose, obstacle.half_extents);
  w.obstacle_id = obstacle.id;
  return w;
}

std::vector<WorldCapsule> world_capsules(const RobotModel& model, const std::vector<Pose>& poses)
{
  const int n = model.joint_count();
  std::vector<WorldCapsule> caps;
  caps.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Capsule& c = model.link_geometry()[static_cast<std::size_t>(i)];
    const Pose& frame = poses[static_cast<std::size_t>(i + 1)];
    caps.push_back(WorldCapsule{frame.apply(c.a), frame.apply(c.b), c.radius});
  }
  return caps;
}

std::vector<WorldCapsule> world_capsules(const RobotModel& model, const JointConfig& q)
{
  return world_capsules(model, link_poses(model, q));
}

std::vector<DistanceWitness> min_distance(const RobotModel& model, const JointConfig& q,
                                          const WorldState& world)
{
  std::vector<DistanceWitness> result;
  if (world.empty()) {
    return result;
  }
  const auto caps = world_capsules(model, q);
  result.reserve(caps.size());
  for (std::size_t link = 0; link < caps.size(); ++link) {
    DistanceWitness best;
    bool have = false;
    for (const auto& obs : world.obstacles) {
      DistanceWitness w = capsule_distance(caps[link], obs);
      if (!have || w.distance < best.distance) {
        best = w;
        have = true;
      }
    }
    best.link_index = static_cast<int>(link) + 1;
    result.push_back(best);
  }
  return result;
}

double min_clearance(const std::vector<DistanceWitness>& witnesses)
{
  double d = std::numeric_limits<double>::infinity();
  for (const auto& w : witnesses) {
    d = std::min(d, w.distance);
  }
  return d;
}

}  // namespace hybridplan

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hybridplan/world.hpp"
#include "test_util.hpp"

using namespace hybridplan;

namespace
{
Obstacle make_sphere(int id, const Eigen::Vector3d& center, double radius)
{
  Obstacle obs;
  obs.id = id;
  obs.shape = ShapeType::kSphere;
  obs.radius = radius;
  obs.initial_pose.translation = center;
  obs.pose = obs.initial_pose;
  return obs;
}

Obstacle make_box(int id, const Eigen::Vector3d& center, const Eigen::Vector3d& half)
{
  Obstacle obs;
  obs.id = id;
  obs.shape = ShapeType::kBox;
  obs.half_extents = half;
  obs.initial_pose.translation = center;
  obs.pose = obs.initial_pose;
  return obs;
}
}  // namespace

TEST_CASE("motion profiles")
{
  SUBCASE("static pose never moves")
  {
    WorldState world = make_world({make_sphere(0, {1, 2, 3}, 0.1)});
    for (int i = 0; i < 7; ++i) {
      world = step_world(world, 0.37);
      CHECK(world.obstacles[0].pose.translation == Eigen::Vector3d(1, 2, 3));
    }
  }

  SUBCASE("sinusoid peaks at the amplitude")
  {
    MotionProfile p;
    p.style = MotionStyle::kSinusoid;
    p.axis = Eigen::Vector3d::UnitY();
    p.amplitude = 0.2;
    p.speed = 0.3;
    // argument = speed/amplitude * t = pi/2  =>  displacement = amplitude
    const double t = (M_PI / 2.0) * p.amplitude / p.speed;
    const Eigen::Vector3d d = profile_displacement(p, t);
    CHECK(d.y() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d.x() == 0.0);
  }

  SUBCASE("bounce returns home after one period")
  {
    MotionProfile p;
    p.style = MotionStyle::kBounce;
    p.axis = Eigen::Vector3d::UnitX();
    p.amplitude = 0.15;
    p.speed = 0.4;
    const double period = 4.0 * p.amplitude / p.speed;
    CHECK(profile_displacement(p, period).norm() < 1e-9);
    // Numerically integrate the implied velocity over one period.
    const int steps = 20000;
    Eigen::Vector3d integral = Eigen::Vector3d::Zero();
    Eigen::Vector3d prev = profile_displacement(p, 0.0);
    for (int k = 1; k <= steps; ++k) {
      const Eigen::Vector3d cur = profile_displacement(p, period * k / steps);
      integral += cur - prev;
      prev = cur;
    }
    CHECK(integral.norm() < 1e-9);
    CHECK(profile_displacement(p, p.amplitude / p.speed).x() ==
          doctest::Approx(p.amplitude).epsilon(1e-12));
  }

  SUBCASE("random waypoint schedule is deterministic and bounded")
  {
    MotionProfile p;
    p.style = MotionStyle::kRandomWaypoint;
    p.amplitude = 0.3;
    p.speed = 0.5;
    p.seed = 99;
    const Eigen::Vector3d origin(1, 0, 0);
    p.schedule = build_waypoint_schedule(origin, p, 30.0);
    const auto again = build_waypoint_schedule(origin, p, 30.0);
    REQUIRE(p.schedule->points.size() == again->points.size());
    for (std::size_t i = 0; i < p.schedule->points.size(); ++i) {
      CHECK(p.schedule->points[i] == again->points[i]);
    }
    for (double t : {0.0, 1.7, 5.3, 29.0}) {
      CHECK(profile_displacement(p, t).lpNorm<Eigen::Infinity>() <= p.amplitude + 1e-12);
    }
  }
}

TEST_CASE("obstacle velocity estimation")
{
  SUBCASE("static obstacle reports zero")
  {
    WorldState world = make_world({make_sphere(0, {1, 0, 0}, 0.1)});
    world = step_world(world, 0.01);
    CHECK(obstacle_velocity(world, 0, 0.01).norm() == 0.0);
  }

  SUBCASE("difference quotient")
  {
    WorldState world = make_world({make_sphere(2, {0, 0, 0}, 0.1)});
    world.obstacles[0].pose.translation = Eigen::Vector3d(0.003, 0, 0);
    CHECK((obstacle_velocity(world, 2, 0.01) - Eigen::Vector3d(0.3, 0, 0)).norm() < 1e-12);
    CHECK_THROWS_AS(obstacle_velocity(world, 5, 0.01), std::invalid_argument);
  }

  SUBCASE("sinusoid estimate tracks the analytic derivative")
  {
    Obstacle obs = make_sphere(0, {0, 0, 0}, 0.1);
    obs.motion.style = MotionStyle::kSinusoid;
    obs.motion.axis = Eigen::Vector3d::UnitZ();
    obs.motion.amplitude = 0.2;
    obs.motion.speed = 0.3;
    WorldState world = make_world({obs});
    const double dt = 0.001;
    for (int k = 0; k < 3000; ++k) {
      world = step_world(world, dt);
      const Eigen::Vector3d v = obstacle_velocity(world, 0, dt);
      const double arg = obs.motion.speed / obs.motion.amplitude * world.time;
      const double analytic = obs.motion.speed * std::cos(arg);
      CHECK(std::abs(v.z() - analytic) < 0.005);
      CHECK(v.norm() <= obs.motion.speed + 0.005);
    }
  }
}

TEST_CASE("capsule-sphere distance")
{
  const WorldCapsule cap{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 0.3), 0.05};

  SUBCASE("axial separation")
  {
    const Obstacle s = make_sphere(0, {0, 0, 0.5}, 0.1);
    const DistanceWitness w = capsule_distance(cap, s);
    CHECK(w.distance == doctest::Approx(0.05).epsilon(1e-12));
    CHECK((w.point_on_link - Eigen::Vector3d(0, 0, 0.35)).norm() < 1e-12);
    CHECK((w.point_on_obstacle - Eigen::Vector3d(0, 0, 0.4)).norm() < 1e-12);
    CHECK(w.d.norm() == doctest::Approx(w.distance).epsilon(1e-9));
  }

  SUBCASE("penetration clamps to zero with a degenerate witness")
  {
    const Obstacle s = make_sphere(0, {0, 0, 0.15}, 0.1);
    const DistanceWitness w = capsule_distance(cap, s);
    CHECK(w.distance == 0.0);
    CHECK(w.d.norm() == 0.0);
  }

  SUBCASE("symmetry and translation invariance")
  {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const auto rv = [&] {
        return Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      };
      const WorldCapsule c{rv(), rv(), 0.02 + 0.1 * rng.uniform()};
      const Eigen::Vector3d center = 2.0 * rv();
      const double radius = 0.02 + 0.2 * rng.uniform();
      const Obstacle s = make_sphere(0, center, radius);
      const DistanceWitness w = capsule_distance(c, s);

      // Swapped roles: treat the capsule surface point as a sphere query.
      // Exact symmetry check via the analytic segment-sphere form.
      const Obstacle s2 = make_sphere(0, center, c.radius);
      const WorldCapsule c2{c.a, c.b, radius};
      const DistanceWitness w2 = capsule_distance(c2, s2);
      CHECK(w.distance == doctest::Approx(w2.distance).epsilon(1e-9));

      const Eigen::Vector3d shift = rv();
      const WorldCapsule cs{c.a + shift, c.b + shift, c.radius};
      const Obstacle ss = make_sphere(0, center + shift, radius);
      CHECK(capsule_distance(cs, ss).distance == doctest::Approx(w.distance).epsilon(1e-9));

      if (w.distance > 0.0) {
        CHECK((w.point_on_link - w.point_on_obstacle).norm() ==
              doctest::Approx(w.distance).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("capsule-box distance")
{
  SUBCASE("face separation against a brute-force surface sampling oracle")
  {
    const WorldCapsule cap{Eigen::Vector3d(0.3, -0.1, 0.25), Eigen::Vector3d(0.55, 0.2, 0.4),
                           0.03};
    const Obstacle box = make_box(0, {0, 0, 0}, {0.2, 0.15, 0.1});
    const DistanceWitness w = capsule_distance(cap, box);

    // Dense sampling of segment points against box surface points gives an
    // upper bound converging to the true distance.
    double best = std::numeric_limits<double>::infinity();
    const int seg_n = 1000;
    for (int i = 0; i <= seg_n; ++i) {
      const Eigen::Vector3d p =
          cap.a + (cap.b - cap.a) * (static_cast<double>(i) / seg_n);
      const Eigen::Vector3d q = p.cwiseMax(-box.half_extents).cwiseMin(box.half_extents);
      best = std::min(best, (p - q).norm() - cap.radius);
    }
    CHECK(w.distance <= best + 1e-12);
    CHECK(std::abs(w.distance - best) < 1e-4);
    CHECK(w.d.norm() == doctest::Approx(w.distance).epsilon(1e-9));
  }

  SUBCASE("segment inside the box clamps to zero")
  {
    const WorldCapsule cap{Eigen::Vector3d(-0.05, 0, 0), Eigen::Vector3d(0.05, 0, 0), 0.02};
    const Obstacle box = make_box(0, {0, 0, 0}, {0.2, 0.15, 0.1});
    const DistanceWitness w = capsule_distance(cap, box);
    CHECK(w.distance == 0.0);
    CHECK(w.d.norm() == 0.0);
  }

  SUBCASE("rotated box")
  {
    Obstacle box = make_box(0, {1, 0, 0}, {0.1, 0.1, 0.1});
    box.initial_pose.rotation = rotation_xyz(0, 0, M_PI / 4.0);
    box.pose = box.initial_pose;
    // Point capsule on the x axis; the rotated cube's corner edge points at it.
    const WorldCapsule cap{Eigen::Vector3d(0.5, 0, 0), Eigen::Vector3d(0.5, 0, 0), 0.01};
    const DistanceWitness w = capsule_distance(cap, box);
    const double expected = (1.0 - 0.1 * std::sqrt(2.0)) - 0.5 - 0.01;
    CHECK(w.distance == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("min_distance per link")
{
  const RobotModel arm = test::planar_2r();
  JointConfig q(2);
  q << 0.0, 0.0;  // stretched along +x, links [0,1] and [1,2]

  SUBCASE("empty world gives an empty list")
  {
    const WorldState world = make_world({});
    CHECK(min_distance(arm, q, world).empty());
    CHECK(min_clearance({}) == std::numeric_limits<double>::infinity());
  }

  SUBCASE("far sphere reported for every link")
  {
    const WorldState world = make_world({make_sphere(4, {0, 20, 0}, 0.1)});
    const auto witnesses = min_distance(arm, q, world);
    REQUIRE(witnesses.size() == 2);
    for (const auto& w : witnesses) {
      CHECK(w.obstacle_id == 4);
      CHECK(w.distance > 10.0);
    }
    CHECK(witnesses[0].link_index == 1);
    CHECK(witnesses[1].link_index == 2);
  }

  SUBCASE("coincident spheres tie-break to the lower id")
  {
    const WorldState world =
        make_world({make_sphere(7, {1, 1, 0}, 0.2), make_sphere(3, {1, 1, 0}, 0.2)});
    const auto witnesses = min_distance(arm, q, world);
    for (const auto& w : witnesses) {
      CHECK(w.obstacle_id == 3);
    }
  }

  SUBCASE("matches exhaustive pairwise minimization")
  {
    const WorldState world = make_world({make_sphere(0, {0.5, 0.4, 0.1}, 0.1),
                                         make_sphere(1, {1.5, -0.3, 0}, 0.15),
                                         make_box(2, {2.2, 0.5, 0}, {0.2, 0.2, 0.2})});
    const auto witnesses = min_distance(arm, q, world);
    const auto caps = world_capsules(arm, q);
    REQUIRE(witnesses.size() == caps.size());
    for (std::size_t link = 0; link < caps.size(); ++link) {
      double best = std::numeric_limits<double>::infinity();
      int best_id = -1;
      for (const auto& obs : world.obstacles) {
        const double d = capsule_distance(caps[link], obs).distance;
        if (d < best) {
          best = d;
          best_id = obs.id;
        }
      }
      CHECK(witnesses[link].distance == doctest::Approx(best).epsilon(1e-12));
      CHECK(witnesses[link].obstacle_id == best_id);
    }
  }
}

TEST_CASE("world stepping determinism")
{
  Obstacle obs = make_sphere(0, {1, 1, 1}, 0.1);
  obs.motion.style = MotionStyle::kSinusoid;
  obs.motion.axis = Eigen::Vector3d(0, 0, 1);
  obs.motion.amplitude = 0.2;
  obs.motion.speed = 0.3;

  WorldState w1 = make_world({obs});
  WorldState w2 = make_world({obs});
  for (int i = 0; i < 500; ++i) {
    w1 = step_world(w1, 0.01);
    w2 = step_world(w2, 0.01);
    CHECK(w1.obstacles[0].pose.translation == w2.obstacles[0].pose.translation);
  }
  CHECK(w1.time == doctest::Approx(5.0));
}

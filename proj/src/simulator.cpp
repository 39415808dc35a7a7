#include "hybridplan/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <thread>

#include "hybridplan/rng.hpp"

namespace hybridplan
{

namespace
{

bool goal_reached(const Pose& ee, const Pose& goal, const Scenario& sc)
{
  if ((ee.translation - goal.translation).norm() > sc.goal_tolerance_translation) {
    return false;
  }
  const double c = ((ee.rotation.transpose() * goal.rotation).trace() - 1.0) / 2.0;
  const double angle = std::acos(std::clamp(c, -1.0, 1.0));
  return angle <= sc.goal_tolerance_rotation;
}

struct TrialStreams
{
  std::uint64_t world = 0;
  std::uint64_t delay = 0;
  std::uint64_t planner = 0;
};

TrialStreams split_seed(std::uint64_t seed)
{
  SplitMix64 rng(seed);
  TrialStreams s;
  s.world = rng.next();
  s.delay = rng.next();
  s.planner = rng.next();
  return s;
}

std::vector<Obstacle> seeded_obstacles(const Scenario& sc, std::uint64_t world_seed)
{
  std::vector<Obstacle> obstacles = sc.obstacles;
  for (auto& obs : obstacles) {
    if (obs.motion.style == MotionStyle::kRandomWaypoint) {
      obs.motion.seed ^= world_seed;
      const double horizon = sc.max_duration + sc.start_delay_max + 10.0;
      obs.motion.schedule =
          build_waypoint_schedule(obs.initial_pose.translation, obs.motion, horizon);
    }
  }
  return obstacles;
}

}  // namespace

double mobility_ratio(const EllipsoidBasis& basis, const SpatialVelocity& v)
{
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(basis.translational_block);
  const double e_max = svd.singularValues()(0);
  if (e_max <= 0.0) {
    throw std::domain_error("degenerate translational ellipsoid");
  }
  return mobility(basis, v) / e_max;
}

TrialMetrics run_trial(const Scenario& sc, const StepSink& sink)
{
  const RobotModel& model = *sc.model;
  const int n = model.joint_count();
  const double dt = sc.dt();

  TrialMetrics metrics;
  const TrialStreams streams = split_seed(sc.seed);
  SplitMix64 delay_rng(streams.delay);
  const double delay =
      sc.start_delay_min + (sc.start_delay_max - sc.start_delay_min) * delay_rng.uniform();
  metrics.start_delay = delay;

  // Obstacles move first; the manipulator (and, for the hybrid planner, the
  // planning snapshot) starts after the random delay.
  WorldState world = make_world(seeded_obstacles(sc, streams.world), delay);

  const Pose goal_pose = forward_kinematics(model, sc.q_goal, n);

  // Global path for the hybrid planner, planned once on the snapshot.
  TimedPath path;
  std::unique_ptr<PathIndex> path_index;
  if (sc.planner == PlannerKind::kHybrid) {
    PlannerParams rrt = sc.rrt;
    rrt.seed = streams.planner;
    const PlanResult plan = plan_rrt_star(model, world, sc.q_start, sc.q_goal, rrt);
    if (!plan.ok()) {
      metrics.outcome = TrialOutcome::kPlanningFailed;
      metrics.failure_reason = plan.status == PlanStatus::kInfeasibleStart ? "infeasible start"
                               : plan.status == PlanStatus::kInfeasibleGoal
                                   ? "infeasible goal"
                                   : "no path within the iteration budget";
      metrics.min_obstacle_distance = std::numeric_limits<double>::infinity();
      return metrics;
    }
    std::vector<JointConfig> geometric;
    if (plan.waypoints.size() < 2) {
      geometric = {plan.waypoints.front(), plan.waypoints.front()};
    } else {
      const double resolution = rrt.step_size / 4.0;
      std::vector<JointConfig> shaped =
          push_clearance(model, world, plan.waypoints, sc.command.d_max + 0.05, resolution);
      shaped = shortcut_path(model, world, shaped, resolution, rrt.weights);
      shaped = push_clearance(model, world, resample_polyline(shaped, 0.3),
                              sc.command.d_max + 0.05, resolution);
      geometric = smooth_bspline(model, world, shaped, sc.spline_samples_per_segment);
    }
    path = time_parameterize(model, geometric, dt);
    path_index = std::make_unique<PathIndex>(path);
  }

  JointConfig q = sc.q_start;
  Eigen::VectorXd qd = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd prev_track_error = Eigen::VectorXd::Zero(n);
  bool have_track_error = false;
  std::vector<std::optional<Eigen::Vector3d>> last_push_dir(static_cast<std::size_t>(n));

  double min_dist_seen = std::numeric_limits<double>::infinity();
  double manip_sum = 0.0;
  long manip_steps = 0;
  double mobility_sum = 0.0;
  long mobility_steps = 0;
  bool trapped_prev = false;
  int prev_nu = 0;

  const int max_steps = static_cast<int>(std::ceil(sc.max_duration / dt));
  const bool vpf_baseline = sc.planner == PlannerKind::kVpf;

  for (int step = 0;; ++step) {
    const double t = static_cast<double>(step) * dt;

    const auto witnesses = min_distance(model, q, world);
    const double dmin = min_clearance(witnesses);
    min_dist_seen = std::min(min_dist_seen, dmin);

    if (dmin <= 0.0) {
      metrics.collided = true;
      metrics.outcome = TrialOutcome::kCollided;
      metrics.completion_time = t;
      metrics.failure_reason = "collision";
      if (sink) {
        sink(StepRecord{t, q, Eigen::VectorXd::Zero(n), ControlMode::kAvoidance, 0.0, 0.0});
      }
      break;
    }

    const std::vector<Pose> poses = link_poses(model, q);
    const Pose& ee = poses.back();
    if (goal_reached(ee, goal_pose, sc)) {
      metrics.reached_goal = true;
      metrics.outcome = TrialOutcome::kReachedGoal;
      metrics.completion_time = t;
      break;
    }
    if (step >= max_steps) {
      metrics.outcome = TrialOutcome::kTimeout;
      metrics.completion_time = sc.max_duration;
      metrics.failure_reason = "timeout";
      break;
    }

    int nu = std::isfinite(dmin) ? select_mode(dmin, sc.command.d_max) : 0;
    if (sc.command.hysteresis && prev_nu == 1 && std::isfinite(dmin)) {
      nu = dmin < 1.1 * sc.command.d_max ? 1 : 0;
    }
    prev_nu = nu;

    const Eigen::MatrixXd J = jacobian(model, q);
    const double mu = yoshikawa(J);
    manip_sum += mu;
    ++manip_steps;

    CommandResult cmd;
    if (!vpf_baseline && nu == 0) {
      // Path tracking: PD towards the look-ahead configuration, clamped to
      // the box constraints through the same solver with an identity task.
      const JointConfig q_next = lookahead(path, *path_index, q, qd, sc.tracker);
      const Eigen::VectorXd err = q_next - q;
      const Eigen::VectorXd qd_e =
          have_track_error ? Eigen::VectorXd((err - prev_track_error) / dt)
                           : Eigen::VectorXd(Eigen::VectorXd::Zero(n));
      prev_track_error = err;
      have_track_error = true;
      const Eigen::VectorXd pd = pd_velocity(q_next, q, qd_e, sc.tracker);
      cmd = qp_velocity(Eigen::MatrixXd::Identity(n, n), pd, q, qd, model, sc.command, mu,
                        Eigen::VectorXd());
      cmd.mode = ControlMode::kTracking;
      const Eigen::VectorXd qd_local = Eigen::VectorXd::Zero(n);
      cmd.qd = compose_command(nu, cmd.qd, qd_local);
    } else {
      // Local velocity field. The hybrid planner attracts towards the pose
      // of the look-ahead configuration; the baseline towards the goal pose.
      Pose target_pose = goal_pose;
      JointConfig q_next = sc.q_goal;
      if (!vpf_baseline) {
        q_next = lookahead(path, *path_index, q, qd, sc.tracker);
        target_pose = forward_kinematics(model, q_next, n);
        have_track_error = false;
      }
      const auto e = pose_error(ee, target_pose);
      const SpatialVelocity v_att = attractive_velocity(e, sc.vpf.k_att);

      SpatialVelocity v_rep;
      DistanceWitness closest;
      bool have_witness = false;
      if (nu == 1 && !witnesses.empty()) {
        std::vector<Eigen::Vector3d> link_velocities;
        link_velocities.reserve(witnesses.size());
        for (std::size_t i = 0; i < witnesses.size(); ++i) {
          const DistanceWitness& w = witnesses[i];
          // The baseline field reacts to distance only; the modified field
          // modulates with the measured obstacle velocity.
          const Eigen::Vector3d v_obs =
              vpf_baseline ? Eigen::Vector3d::Zero()
                           : obstacle_velocity(world, w.obstacle_id, dt);
          link_velocities.push_back(
              repulsive_link_velocity(w, v_obs, sc.vpf, last_push_dir[i]));
          if (w.d.norm() > 1e-12) {
            last_push_dir[i] = Eigen::Vector3d(-w.d.normalized());
          }
          if (!have_witness || w.distance < closest.distance) {
            closest = w;
            have_witness = true;
          }
        }
        v_rep = aggregate_repulsive(link_velocities, ee, sc.vpf.link_weights);
      }

      SpatialVelocity v = v_att + v_rep;
      bool trapped = false;
      EllipsoidBasis basis = ellipsoid(model, q);
      if (!vpf_baseline) {
        trapped = detect_trap(v_att, v_rep, sc.vpf);
        if (trapped) {
          const EscapeResult esc =
              escape_velocity(basis, v_att, q, q_next, model, sc.vpf.v_def, dt);
          if (esc.resolved) {
            v = esc.velocity;
            const double align = std::abs(esc.velocity.translational.normalized().dot(
                v_att.translational.normalized()));
            metrics.worst_escape_alignment = std::max(metrics.worst_escape_alignment, align);
          }
        } else if (v.translational.norm() > 1e-12) {
          // Obstacle direction for the alignment penalty, in the EE frame.
          Eigen::Vector3d d_ee = Eigen::Vector3d::Zero();
          if (have_witness) {
            d_ee = ee.rotation.transpose() * closest.d;
          }
          v = adjust_toward_mobility(basis, v, d_ee, sc.vpf);
        }
      }
      if (trapped && !trapped_prev) {
        ++metrics.trap_events;
      }
      trapped_prev = trapped;

      if (v.translational.norm() > 1e-12) {
        mobility_sum += mobility_ratio(basis, v);
        ++mobility_steps;
      }

      Eigen::VectorXd qd0;
      if (sc.command.alpha_null > 0.0 && mu > 0.0) {
        qd0 = sc.command.k_m * manipulability_gradient(model, q);
      }
      cmd = qp_velocity(J, v.vector(), q, qd, model, sc.command, mu, qd0);
      cmd.mode = ControlMode::kAvoidance;
      if (!vpf_baseline) {
        const Eigen::VectorXd qd_global = Eigen::VectorXd::Zero(n);
        cmd.qd = compose_command(nu == 0 ? 1 : nu, qd_global, cmd.qd);
      }
    }

    if (cmd.dls_active) {
      ++metrics.dls_count;
    }
    if (sink) {
      sink(StepRecord{t, q, cmd.qd, cmd.mode, cmd.lambda_used, dmin});
    }

    qd = cmd.qd;
    q += dt * qd;
    world = step_world(world, dt);
  }

  metrics.min_obstacle_distance = min_dist_seen;
  metrics.avg_manipulability =
      manip_steps > 0 ? manip_sum / static_cast<double>(manip_steps) : yoshikawa(model, q);
  metrics.avg_mobility_ratio =
      mobility_steps > 0 ? mobility_sum / static_cast<double>(mobility_steps) : 1.0;
  return metrics;
}

namespace
{
std::vector<double> metric_column(const std::vector<TrialMetrics>& ms,
                                  double (*get)(const TrialMetrics&))
{
  std::vector<double> out;
  out.reserve(ms.size());
  for (const auto& m : ms) {
    out.push_back(get(m));
  }
  return out;
}
}  // namespace

ComparisonReport compare(const Scenario& scenario_template,
                         const std::vector<std::uint64_t>& seeds, int workers)
{
  if (seeds.size() < 2) {
    throw std::invalid_argument("compare needs at least 2 seeds");
  }
  const int total = static_cast<int>(seeds.size()) * 2;
  std::vector<TrialMetrics> results(static_cast<std::size_t>(total));

  const auto run_one = [&](int index) {
    Scenario sc = scenario_template;
    sc.seed = seeds[static_cast<std::size_t>(index / 2)];
    sc.planner = index % 2 == 0 ? PlannerKind::kHybrid : PlannerKind::kVpf;
    results[static_cast<std::size_t>(index)] = run_trial(sc);
  };

  workers = std::max(1, workers);
  if (workers == 1) {
    for (int i = 0; i < total; ++i) {
      run_one(i);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const int i = next.fetch_add(1);
          if (i >= total) {
            return;
          }
          run_one(i);
        }
      });
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  ComparisonReport report;
  report.pairs_total = static_cast<int>(seeds.size());
  std::vector<TrialMetrics> hybrid_ok, vpf_ok;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const TrialMetrics& h = results[2 * i];
    const TrialMetrics& v = results[2 * i + 1];
    report.rows.push_back(TrialRow{seeds[i], PlannerKind::kHybrid, h});
    report.rows.push_back(TrialRow{seeds[i], PlannerKind::kVpf, v});
    if (h.reached_goal && v.reached_goal) {
      hybrid_ok.push_back(h);
      vpf_ok.push_back(v);
    } else {
      ++report.pairs_excluded;
    }
  }

  struct Spec
  {
    const char* name;
    double (*get)(const TrialMetrics&);
  };
  const Spec specs[] = {
      {"min_obstacle_distance", [](const TrialMetrics& m) { return m.min_obstacle_distance; }},
      {"completion_time", [](const TrialMetrics& m) { return m.completion_time; }},
      {"avg_manipulability", [](const TrialMetrics& m) { return m.avg_manipulability; }},
      {"dls_count", [](const TrialMetrics& m) { return static_cast<double>(m.dls_count); }},
      {"avg_mobility_ratio", [](const TrialMetrics& m) { return m.avg_mobility_ratio; }},
  };
  for (const auto& spec : specs) {
    MetricComparison mc;
    mc.name = spec.name;
    if (hybrid_ok.size() >= 2) {
      const auto a = metric_column(hybrid_ok, spec.get);
      const auto b = metric_column(vpf_ok, spec.get);
      const TTestResult tt = paired_t_test(a, b);
      mc.mean_hybrid = mean(a);
      mc.mean_vpf = mean(b);
      mc.t = tt.t;
      mc.p = tt.p;
      mc.significant = tt.p < 0.05;
    }
    report.metrics.push_back(mc);
  }
  return report;
}

}  // namespace hybridplan

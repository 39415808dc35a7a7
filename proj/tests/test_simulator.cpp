#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hybridplan/io.hpp"
#include "hybridplan/simulator.hpp"
#include "test_util.hpp"

using namespace hybridplan;

namespace
{
Scenario empty_scenario()
{
  return load_scenario(test::data_file("empty_world.json"));
}
}  // namespace

TEST_CASE("mobility ratio")
{
  EllipsoidBasis basis;
  basis.translational_block = Eigen::Vector3d(2, 1, 1).asDiagonal();

  SpatialVelocity v;
  v.translational = Eigen::Vector3d::UnitX();
  CHECK(mobility_ratio(basis, v) == doctest::Approx(1.0).epsilon(1e-12));

  v.translational = Eigen::Vector3d::UnitY();
  CHECK(mobility_ratio(basis, v) == doctest::Approx(0.5).epsilon(1e-12));

  SplitMix64 rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    basis.translational_block =
        Eigen::Vector3d(0.1 + rng.uniform(), 0.1 + rng.uniform(), 0.1 + rng.uniform())
            .asDiagonal();
    v.translational =
        Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (v.translational.norm() < 1e-9) {
      continue;
    }
    const double r = mobility_ratio(basis, v);
    CHECK(r > 0.0);
    CHECK(r <= 1.0 + 1e-12);
  }
}

TEST_CASE("trivial trials")
{
  SUBCASE("start at the goal")
  {
    Scenario sc = empty_scenario();
    sc.q_goal = sc.q_start;
    const TrialMetrics m = run_trial(sc);
    CHECK(m.reached_goal);
    CHECK(m.completion_time == 0.0);
    CHECK(m.dls_count == 0);
    CHECK_FALSE(m.collided);
    CHECK(std::isinf(m.min_obstacle_distance));
  }

  SUBCASE("timeout on a tiny duration budget")
  {
    Scenario sc = empty_scenario();
    sc.max_duration = 0.01;
    const TrialMetrics m = run_trial(sc);
    CHECK_FALSE(m.reached_goal);
    CHECK(m.outcome == TrialOutcome::kTimeout);
    CHECK(m.failure_reason == "timeout");
    CHECK(m.completion_time == doctest::Approx(0.01));
  }

  SUBCASE("immediate collision is logged with distance zero")
  {
    Scenario sc = empty_scenario();
    sc.planner = PlannerKind::kVpf;  // no planning pre-check of the start
    Obstacle obs;
    obs.id = 0;
    obs.shape = ShapeType::kSphere;
    obs.radius = 0.3;
    // Park the sphere on the start end-effector position.
    obs.initial_pose.translation =
        forward_kinematics(*sc.model, sc.q_start, sc.model->joint_count()).translation;
    obs.pose = obs.initial_pose;
    sc.obstacles = {obs};
    std::vector<StepRecord> log;
    const TrialMetrics m = run_trial(sc, [&](const StepRecord& r) { log.push_back(r); });
    CHECK(m.collided);
    CHECK(m.outcome == TrialOutcome::kCollided);
    CHECK(m.min_obstacle_distance == 0.0);
    REQUIRE_FALSE(log.empty());
    CHECK(log.back().min_dist == 0.0);
  }
}

TEST_CASE("hybrid trial reaches the goal in an empty world")
{
  Scenario sc = empty_scenario();
  sc.max_duration = 40.0;
  std::vector<StepRecord> log;
  const TrialMetrics m = run_trial(sc, [&](const StepRecord& r) { log.push_back(r); });
  REQUIRE(m.reached_goal);
  CHECK_FALSE(m.collided);
  CHECK(std::isinf(m.min_obstacle_distance));
  CHECK(m.completion_time > 1.0);
  CHECK(m.avg_mobility_ratio == 1.0);  // never in avoidance mode

  // Limits hold at every logged step.
  const double dt = sc.dt();
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(7);
  for (const auto& r : log) {
    for (int j = 0; j < 7; ++j) {
      CHECK(std::abs(r.qd(j)) <= sc.model->velocity_limits()(j));
      CHECK(std::abs(r.qd(j) - prev(j)) <= sc.model->acceleration_limits()(j) * dt);
    }
    CHECK(r.mode == ControlMode::kTracking);
    prev = r.qd;
  }
}

TEST_CASE("vpf trial reaches the goal in an empty world")
{
  Scenario sc = empty_scenario();
  sc.planner = PlannerKind::kVpf;
  sc.max_duration = 40.0;
  const TrialMetrics m = run_trial(sc);
  CHECK(m.reached_goal);
  CHECK_FALSE(m.collided);
}

TEST_CASE("determinism of repeated trials")
{
  Scenario sc = empty_scenario();
  sc.max_duration = 20.0;
  std::vector<StepRecord> log_a, log_b;
  const TrialMetrics a = run_trial(sc, [&](const StepRecord& r) { log_a.push_back(r); });
  const TrialMetrics b = run_trial(sc, [&](const StepRecord& r) { log_b.push_back(r); });
  CHECK(a.completion_time == b.completion_time);
  CHECK(a.avg_manipulability == b.avg_manipulability);
  CHECK(a.dls_count == b.dls_count);
  REQUIRE(log_a.size() == log_b.size());
  for (std::size_t i = 0; i < log_a.size(); ++i) {
    CHECK(log_a[i].q == log_b[i].q);
    CHECK(log_a[i].qd == log_b[i].qd);
    CHECK(log_a[i].lambda == log_b[i].lambda);
  }
}

TEST_CASE("compare pairs trials and reports degenerate statistics sanely")
{
  Scenario sc = empty_scenario();
  sc.max_duration = 25.0;
  const ComparisonReport report = compare(sc, {11, 12}, 1);
  CHECK(report.pairs_total == 2);
  CHECK(report.rows.size() == 4);
  CHECK(report.metrics.size() == 5);
  // Rows come sorted: seed-major, hybrid before vpf.
  CHECK(report.rows[0].seed == 11);
  CHECK(report.rows[0].planner == PlannerKind::kHybrid);
  CHECK(report.rows[1].seed == 11);
  CHECK(report.rows[1].planner == PlannerKind::kVpf);

  // Identical planners on identical seeds: all differences zero, p = 1.
  // Emulated by pairing a planner against itself through run_trial.
  std::vector<double> ta, tb;
  for (std::uint64_t seed : {21, 22, 23}) {
    Scenario s = sc;
    s.seed = seed;
    ta.push_back(run_trial(s).completion_time);
    tb.push_back(run_trial(s).completion_time);
  }
  const TTestResult tt = paired_t_test(ta, tb);
  CHECK(tt.t == 0.0);
  CHECK(tt.p == 1.0);
}

TEST_CASE("worker count does not change compare results")
{
  Scenario sc = empty_scenario();
  sc.max_duration = 25.0;
  const ComparisonReport a = compare(sc, {5, 6, 7}, 1);
  const ComparisonReport b = compare(sc, {5, 6, 7}, 3);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].metrics.completion_time == b.rows[i].metrics.completion_time);
    CHECK(a.rows[i].metrics.avg_manipulability == b.rows[i].metrics.avg_manipulability);
    CHECK(a.rows[i].metrics.dls_count == b.rows[i].metrics.dls_count);
    CHECK(metrics_csv_row(a.rows[i].seed, a.rows[i].planner, a.rows[i].metrics) ==
          metrics_csv_row(b.rows[i].seed, b.rows[i].planner, b.rows[i].metrics));
  }
}

TEST_CASE("timed path csv round-trip")
{
  TimedPath path;
  path.dt = 0.01;
  SplitMix64 rng(3);
  for (int k = 0; k < 25; ++k) {
    Eigen::VectorXd q(7);
    for (int j = 0; j < 7; ++j) {
      q(j) = rng.uniform(-3, 3);
    }
    path.configs.push_back(q);
  }
  const std::string file = "/tmp/hybridplan_test_path.csv";
  write_timed_path_csv(file, path);
  const TimedPath back = read_timed_path_csv(file);
  REQUIRE(back.size() == path.size());
  CHECK(back.dt == doctest::Approx(path.dt).epsilon(1e-15));
  for (int k = 0; k < path.size(); ++k) {
    CHECK(back.configs[static_cast<std::size_t>(k)] ==
          path.configs[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("scenario loading and overrides")
{
  SUBCASE("defaults follow the experiment table")
  {
    const Scenario sc = load_scenario(test::data_file("table2.json"));
    CHECK(sc.vpf.k_att == 1.5);
    CHECK(sc.vpf.k_rep0 == 0.5);
    CHECK(sc.vpf.k_rep1 == 0.2);
    CHECK(sc.vpf.k_rep2 == 0.1);
    CHECK(sc.vpf.d_min == 0.01);
    CHECK(sc.vpf.d_max == 0.2);
    CHECK(sc.vpf.alpha == 200.0);
    CHECK(sc.vpf.beta == 12.5);
    CHECK(sc.vpf.zeta == 0.7);
    CHECK(sc.tracker.k_v == 5.0);
    CHECK(sc.tracker.s_base == 5);
    CHECK(sc.tracker.s_min == 1);
    CHECK(sc.tracker.s_max == 10);
    CHECK(sc.tracker.k_p == 200.0);
    CHECK(sc.tracker.k_d == 100.0);
    CHECK(sc.tracker.k_c == doctest::Approx(-5.0 / M_PI));
    CHECK(sc.command.epsilon == 0.01);
    CHECK(sc.command.lambda_max == 0.5);
    CHECK(sc.command.d_max == 0.2);
    CHECK(sc.vpf.link_weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    // Ratios preserved from [0, .1, .2, .4, .6, .8, 1].
    CHECK(sc.vpf.link_weights(0) == 0.0);
    CHECK(sc.vpf.link_weights(6) / sc.vpf.link_weights(1) == doctest::Approx(10.0));
    CHECK(sc.obstacles.size() == 3);
    CHECK(sc.model->joint_count() == 7);
    const double d2r = M_PI / 180.0;
    CHECK(sc.model->velocity_limits()(0) == doctest::Approx(35.0 * d2r));
    CHECK(sc.model->acceleration_limits()(0) == doctest::Approx(70.0 * d2r));
    CHECK(sc.model->q_max()(6) == doctest::Approx(175.0 * d2r));
  }

  SUBCASE("overrides apply dotted keys, last wins")
  {
    const Scenario sc = load_scenario(test::data_file("table2.json"),
                                      {"vpf.K_att=2.5", "seed=9", "vpf.K_att=3.0"});
    CHECK(sc.vpf.k_att == 3.0);
    CHECK(sc.seed == 9);
  }

  SUBCASE("parse errors carry line/column")
  {
    const std::string bad = "/tmp/hybridplan_bad.json";
    {
      std::ofstream out(bad);
      out << "{\n  \"model\": ,\n}\n";
    }
    try {
      load_scenario(bad);
      FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 2") != std::string::npos);
    }
  }

  SUBCASE("limit violations name the offending joint")
  {
    try {
      load_scenario(test::data_file("table2.json"), {"q_start_deg=[500,0,0,0,0,0,0]"});
      FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(std::string(e.what()).find("q_start joint 1") != std::string::npos);
    }
  }
}

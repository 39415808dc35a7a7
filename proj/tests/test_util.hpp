#ifndef HYBRIDPLAN_TESTS_TEST_UTIL_HPP_
#define HYBRIDPLAN_TESTS_TEST_UTIL_HPP_

#include <string>

#include "hybridplan/kinematics.hpp"
#include "hybridplan/rng.hpp"

namespace hybridplan::test
{

inline std::string data_file(const std::string& name)
{
  return std::string(HYBRIDPLAN_DATA_DIR) + "/" + name;
}

/// Unit-link planar 2R arm (both axes z, links along x).
inline RobotModel planar_2r(double l1 = 1.0, double l2 = 1.0, Pose base = Pose::identity())
{
  std::vector<JointDescriptor> joints(2);
  joints[0].origin = Pose::identity();
  joints[0].axis = Eigen::Vector3d::UnitZ();
  joints[1].origin.translation = Eigen::Vector3d(l1, 0, 0);
  joints[1].axis = Eigen::Vector3d::UnitZ();
  Pose tool;
  tool.translation = Eigen::Vector3d(l2, 0, 0);

  std::vector<Capsule> caps(2);
  caps[0] = Capsule{Eigen::Vector3d::Zero(), Eigen::Vector3d(l1, 0, 0), 0.05};
  caps[1] = Capsule{Eigen::Vector3d(-l2, 0, 0), Eigen::Vector3d::Zero(), 0.05};

  const Eigen::VectorXd lim = Eigen::VectorXd::Constant(2, 3.1);
  const Eigen::VectorXd vel = Eigen::VectorXd::Constant(2, 1.0);
  const Eigen::VectorXd acc = Eigen::VectorXd::Constant(2, 2.0);
  return RobotModel(joints, caps, -lim, lim, vel, acc, base, tool);
}

/// Uniform random configuration strictly inside the limits.
inline JointConfig random_config(const RobotModel& model, SplitMix64& rng, double margin = 0.9)
{
  JointConfig q(model.joint_count());
  for (int i = 0; i < model.joint_count(); ++i) {
    q(i) = margin * rng.uniform(model.q_min()(i), model.q_max()(i));
  }
  return q;
}

}  // namespace hybridplan::test

#endif  // HYBRIDPLAN_TESTS_TEST_UTIL_HPP_

#ifndef HYBRIDPLAN_ROBOT_MODEL_HPP_
#define HYBRIDPLAN_ROBOT_MODEL_HPP_

#include <string>
#include <vector>

#include "hybridplan/pose.hpp"

namespace hybridplan
{

/// Revolute joint: fixed parent-to-joint transform followed by a rotation
/// about `axis` (unit vector in the joint frame).
struct JointDescriptor
{
  Pose origin;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
};

/// Collision capsule: segment endpoints in the owning link's frame, radius in meters.
struct Capsule
{
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

/// Serial-chain robot description. Immutable after construction and safe to
/// share across threads; all kinematics functions are pure.
class RobotModel
{
public:
  RobotModel(std::vector<JointDescriptor> joints, std::vector<Capsule> link_geometry,
             Eigen::VectorXd q_min, Eigen::VectorXd q_max, Eigen::VectorXd qd_max,
             Eigen::VectorXd qdd_max, Pose base = Pose::identity(),
             Pose tool = Pose::identity());

  int joint_count() const { return static_cast<int>(joints_.size()); }
  const std::vector<JointDescriptor>& joints() const { return joints_; }
  const std::vector<Capsule>& link_geometry() const { return link_geometry_; }
  const Pose& base() const { return base_; }
  const Pose& tool() const { return tool_; }

  const Eigen::VectorXd& q_min() const { return q_min_; }
  const Eigen::VectorXd& q_max() const { return q_max_; }
  const Eigen::VectorXd& velocity_limits() const { return qd_max_; }
  const Eigen::VectorXd& acceleration_limits() const { return qdd_max_; }

  bool within_limits(const JointConfig& q) const;
  /// Index of the first joint violating its position limits, or -1.
  int limit_violation(const JointConfig& q) const;

private:
  std::vector<JointDescriptor> joints_;
  std::vector<Capsule> link_geometry_;
  Eigen::VectorXd q_min_, q_max_, qd_max_, qdd_max_;
  Pose base_;
  Pose tool_;
};

/// Parses the structured-text robot description. Angles in the file are
/// degrees and are converted to radians here.
RobotModel load_robot_model(const std::string& path);
RobotModel parse_robot_model(const std::string& json_text);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_ROBOT_MODEL_HPP_

#ifndef HYBRIDPLAN_KINEMATICS_HPP_
#define HYBRIDPLAN_KINEMATICS_HPP_

#include <vector>

#include "hybridplan/robot_model.hpp"

namespace hybridplan
{

/// Manipulability ellipsoid basis from the SVD of the spatial Jacobian.
/// Axis columns carry a fixed sign convention (largest-magnitude entry
/// nonnegative) so the decomposition is deterministic.
struct EllipsoidBasis
{
  Eigen::Matrix<double, 6, 6> axes;        // U, orthonormal columns
  Eigen::VectorXd magnitudes;              // singular values, descending
  Eigen::Matrix3d translational_block;     // E_t = U_t * diag(sigma_t) of the translational rows
};

/// Pose of a link frame in the base frame. link_index 0 is the base offset;
/// link_index in [1, n-1] is the frame after that joint; link_index n is the
/// end effector (tool frame).
Pose forward_kinematics(const RobotModel& model, const JointConfig& q, int link_index);

/// Poses of frames 0..n in one pass.
std::vector<Pose> link_poses(const RobotModel& model, const JointConfig& q);

/// Spatial Jacobian of the end effector, expressed in the end-effector frame.
/// Rows 0-2 translational, rows 3-5 angular.
Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian(const RobotModel& model, const JointConfig& q);

/// Yoshikawa manipulability: the product of the Jacobian's singular values
/// (sqrt of the Gram determinant on the smaller side). Zero at singularities;
/// round-off negatives clamp to zero.
double yoshikawa(const RobotModel& model, const JointConfig& q);
double yoshikawa(const Eigen::MatrixXd& J);

EllipsoidBasis ellipsoid(const RobotModel& model, const JointConfig& q);

/// Left singular basis and singular values (descending) with the
/// deterministic sign convention used by EllipsoidBasis: each axis column's
/// largest-magnitude entry is nonnegative, ties resolved to the lowest row.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> svd_basis(const Eigen::MatrixXd& J);

/// Central finite-difference gradient of yoshikawa, step 1e-6 rad per joint.
/// Throws std::domain_error at singular configurations (mu = 0).
Eigen::VectorXd manipulability_gradient(const RobotModel& model, const JointConfig& q);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_KINEMATICS_HPP_

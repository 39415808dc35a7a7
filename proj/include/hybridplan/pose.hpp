#ifndef HYBRIDPLAN_POSE_HPP_
#define HYBRIDPLAN_POSE_HPP_

#include <Eigen/Dense>

namespace hybridplan
{

using JointConfig = Eigen::VectorXd;

/// Rigid transform in SE(3): orthonormal rotation plus translation, meters.
struct Pose
{
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return Pose{}; }

  Pose operator*(const Pose& other) const
  {
    return Pose{rotation * other.rotation, rotation * other.translation + translation};
  }

  Pose inverse() const
  {
    return Pose{rotation.transpose(), -(rotation.transpose() * translation)};
  }

  /// Maps a point given in this frame into the parent frame.
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

  bool isApprox(const Pose& other, double tol = 1e-9) const
  {
    return rotation.isApprox(other.rotation, tol) &&
           (translation - other.translation).norm() <= tol;
  }
};

/// Rotation about x, then y, then z (Cardan XYZ order): R = Rx(a) Ry(b) Rz(c).
Eigen::Matrix3d rotation_xyz(double a, double b, double c);

/// Extract Cardan XYZ angles from an orthonormal rotation.
/// Near |pitch| = pi/2 the decomposition degenerates; the roll angle is set
/// to zero and the residual rotation folds into the yaw angle.
Eigen::Vector3d cardan_xyz(const Eigen::Matrix3d& R);

/// Rotation about an arbitrary unit axis (Rodrigues).
Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle);

/// Task-space velocity: translational m/s followed by angular rad/s.
struct SpatialVelocity
{
  Eigen::Vector3d translational = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular = Eigen::Vector3d::Zero();

  Eigen::Matrix<double, 6, 1> vector() const
  {
    Eigen::Matrix<double, 6, 1> v;
    v << translational, angular;
    return v;
  }

  static SpatialVelocity from_vector(const Eigen::Matrix<double, 6, 1>& v)
  {
    return SpatialVelocity{v.head<3>(), v.tail<3>()};
  }

  SpatialVelocity operator+(const SpatialVelocity& o) const
  {
    return SpatialVelocity{translational + o.translational, angular + o.angular};
  }
};

}  // namespace hybridplan

#endif  // HYBRIDPLAN_POSE_HPP_

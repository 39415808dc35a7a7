#include "hybridplan/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace hybridplan
{

namespace
{
void check_config(const RobotModel& model, const JointConfig& q)
{
  if (q.size() != model.joint_count()) {
    throw std::invalid_argument("joint configuration length does not match model");
  }
  if (!q.allFinite()) {
    throw std::invalid_argument("joint configuration has non-finite entries");
  }
}

/// Flip each column so its largest-magnitude entry is nonnegative; ties go to
/// the lowest row index.
void fix_column_signs(Eigen::Ref<Eigen::MatrixXd> m)
{
  for (int c = 0; c < m.cols(); ++c) {
    int best = 0;
    double best_abs = std::abs(m(0, c));
    for (int r = 1; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > best_abs) {
        best_abs = std::abs(m(r, c));
        best = r;
      }
    }
    if (m(best, c) < 0.0) {
      m.col(c) = -m.col(c);
    }
  }
}
}  // namespace

std::vector<Pose> link_poses(const RobotModel& model, const JointConfig& q)
{
  check_config(model, q);
  const int n = model.joint_count();
  std::vector<Pose> poses;
  poses.reserve(n + 1);
  poses.push_back(model.base());
  Pose cur = model.base();
  for (int i = 0; i < n; ++i) {
    const JointDescriptor& jd = model.joints()[i];
    cur = cur * jd.origin;
    cur.rotation = cur.rotation * axis_angle(jd.axis, q(i));
    if (i < n - 1) {
      poses.push_back(cur);
    }
  }
  poses.push_back(cur * model.tool());
  return poses;
}

Pose forward_kinematics(const RobotModel& model, const JointConfig& q, int link_index)
{
  const int n = model.joint_count();
  if (link_index < 0 || link_index > n) {
    throw std::invalid_argument("link index out of range");
  }
  return link_poses(model, q)[static_cast<std::size_t>(link_index)];
}

Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian(const RobotModel& model, const JointConfig& q)
{
  check_config(model, q);
  const int n = model.joint_count();

  // World-frame joint origins and axes.
  std::vector<Eigen::Vector3d> origins(n), axes(n);
  Pose cur = model.base();
  for (int i = 0; i < n; ++i) {
    const JointDescriptor& jd = model.joints()[i];
    cur = cur * jd.origin;
    origins[i] = cur.translation;
    axes[i] = cur.rotation * jd.axis;
    cur.rotation = cur.rotation * axis_angle(jd.axis, q(i));
  }
  const Pose ee = cur * model.tool();

  Eigen::Matrix<double, 6, Eigen::Dynamic> J(6, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d lin = axes[i].cross(ee.translation - origins[i]);
    J.block<3, 1>(0, i) = ee.rotation.transpose() * lin;
    J.block<3, 1>(3, i) = ee.rotation.transpose() * axes[i];
  }
  return J;
}

double yoshikawa(const Eigen::MatrixXd& J)
{
  // Translational manipulability. Angular rows mix rad/s with m/s and mask
  // the translational singularities this measure gates on, so a 6-row
  // spatial Jacobian reduces to its translational block; the Gram
  // determinant on the smaller side generalizes to low-DOF arms.
  const Eigen::MatrixXd jt = J.rows() == 6 ? J.topRows(3) : J;
  double det = 0.0;
  if (jt.rows() <= jt.cols()) {
    det = (jt * jt.transpose()).determinant();
  } else {
    det = (jt.transpose() * jt).determinant();
  }
  return det > 0.0 ? std::sqrt(det) : 0.0;
}

double yoshikawa(const RobotModel& model, const JointConfig& q)
{
  return yoshikawa(Eigen::MatrixXd(jacobian(model, q)));
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> svd_basis(const Eigen::MatrixXd& J)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU);
  Eigen::MatrixXd u = svd.matrixU();
  fix_column_signs(u);
  return {u, svd.singularValues()};
}

EllipsoidBasis ellipsoid(const RobotModel& model, const JointConfig& q)
{
  const Eigen::MatrixXd J = jacobian(model, q);

  EllipsoidBasis basis;
  auto [u, sigma] = svd_basis(J);
  basis.axes = u;
  basis.magnitudes = sigma;

  auto [ut, sigma_t] = svd_basis(J.topRows(3));
  basis.translational_block = ut * sigma_t.asDiagonal();
  return basis;
}

Eigen::VectorXd manipulability_gradient(const RobotModel& model, const JointConfig& q)
{
  check_config(model, q);
  if (yoshikawa(model, q) <= 0.0) {
    throw std::domain_error("manipulability gradient undefined at a singular configuration");
  }
  constexpr double h = 1e-6;
  const int n = model.joint_count();
  Eigen::VectorXd grad(n);
  JointConfig qp = q, qm = q;
  for (int i = 0; i < n; ++i) {
    qp(i) = q(i) + h;
    qm(i) = q(i) - h;
    grad(i) = (yoshikawa(model, qp) - yoshikawa(model, qm)) / (2.0 * h);
    qp(i) = q(i);
    qm(i) = q(i);
  }
  return grad;
}

}  // namespace hybridplan

#include "hybridplan/pose.hpp"

#include <algorithm>
#include <cmath>

namespace hybridplan
{

Eigen::Matrix3d rotation_xyz(double a, double b, double c)
{
  Eigen::Matrix3d rx, ry, rz;
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  const double cc = std::cos(c), sc = std::sin(c);
  rx << 1, 0, 0, 0, ca, -sa, 0, sa, ca;
  ry << cb, 0, sb, 0, 1, 0, -sb, 0, cb;
  rz << cc, -sc, 0, sc, cc, 0, 0, 0, 1;
  return rx * ry * rz;
}

Eigen::Vector3d cardan_xyz(const Eigen::Matrix3d& R)
{
  // R = Rx(a) Ry(b) Rz(c):
  //   R(0,2) = sin b
  //   R(1,2) = -sin a cos b,  R(2,2) = cos a cos b
  //   R(0,1) = -cos b sin c,  R(0,0) = cos b cos c
  const double sb = std::clamp(R(0, 2), -1.0, 1.0);
  const double b = std::asin(sb);
  const double cb = std::cos(b);
  if (std::abs(cb) < 1e-6) {
    // Gimbal: a and c act about the same axis. Convention: a = 0, the
    // remaining rotation goes into c. R(1,0) = sin(c +/- a), R(1,1) = cos(c +/- a).
    return {0.0, b, std::atan2(R(1, 0), R(1, 1))};
  }
  const double a = std::atan2(-R(1, 2), R(2, 2));
  const double c = std::atan2(-R(0, 1), R(0, 0));
  return {a, b, c};
}

Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle)
{
  Eigen::Matrix3d k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

}  // namespace hybridplan

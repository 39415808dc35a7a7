#include "hybridplan/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hybridplan
{

void FieldParams::validate(int joint_count) const
{
  if (!(k_rep0 > k_rep1) || !(k_rep1 > 0.0)) {
    throw std::invalid_argument("repulsive gains must satisfy k_rep0 > k_rep1 > 0");
  }
  if (!(d_min > 0.0) || !(d_min < d_max)) {
    throw std::invalid_argument("distance band must satisfy 0 < d_min < d_max");
  }
  if (!(zeta > 0.0) || zeta > 1.0) {
    throw std::invalid_argument("zeta must lie in (0, 1]");
  }
  if (link_weights.size() != joint_count) {
    throw std::invalid_argument("link weights must match the joint count");
  }
  if ((link_weights.array() < 0.0).any()) {
    throw std::invalid_argument("link weights must be nonnegative");
  }
  if (std::abs(link_weights.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("link weights must sum to 1");
  }
}

void FieldParams::normalize_weights()
{
  const double s = link_weights.sum();
  if (s > 0.0) {
    link_weights /= s;
  }
}

Eigen::Matrix<double, 6, 1> pose_error(const Pose& current, const Pose& goal)
{
  // Goal pose expressed in the current end-effector frame; the error is the
  // negated twist so that -k_att * e points towards the goal.
  const Pose rel = current.inverse() * goal;
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = -rel.translation;
  e.tail<3>() = -cardan_xyz(rel.rotation);
  return e;
}

SpatialVelocity attractive_velocity(const Eigen::Matrix<double, 6, 1>& e, double k_att)
{
  return SpatialVelocity::from_vector(-k_att * e);
}

Eigen::Vector3d repulsive_link_velocity(const DistanceWitness& witness,
                                        const Eigen::Vector3d& v_obs, const FieldParams& params,
                                        const std::optional<Eigen::Vector3d>& fallback_dir)
{
  if (witness.distance < 0.0) {
    throw std::invalid_argument("witness distance must be nonnegative");
  }

  Eigen::Vector3d u;
  const double dn = witness.d.norm();
  if (dn > 1e-12) {
    u = -witness.d / dn;
  } else if (fallback_dir && fallback_dir->norm() > 1e-12) {
    u = fallback_dir->normalized();
  } else {
    return Eigen::Vector3d::Zero();
  }

  // Signed approach rate: positive when the obstacle closes in on the link.
  const double approach = v_obs.dot(u);
  const double k_par = params.k_rep0 + params.k_rep1 * std::tanh(params.gamma1 * approach);
  const double expo = params.alpha * params.d_max * (witness.distance - params.beta * params.d_min);
  Eigen::Vector3d v = (k_par / (1.0 + std::exp(expo))) * u;

  const Eigen::Vector3d cross = v_obs.cross(u);
  const double cn = cross.norm();
  if (cn > 1e-12) {
    v += params.k_rep2 * std::tanh(params.gamma2 * cn) * (cross / cn);
  }
  return v;
}

SpatialVelocity aggregate_repulsive(const std::vector<Eigen::Vector3d>& link_velocities,
                                    const Pose& ee_pose, const Eigen::VectorXd& weights)
{
  if (static_cast<int>(link_velocities.size()) != weights.size()) {
    throw std::invalid_argument("one weight per link velocity required");
  }
  const Eigen::Matrix3d world_to_ee = ee_pose.rotation.transpose();
  SpatialVelocity out;
  for (std::size_t i = 0; i < link_velocities.size(); ++i) {
    out.translational += weights(static_cast<int>(i)) * (world_to_ee * link_velocities[i]);
  }
  return out;
}

double mobility(const Eigen::Matrix3d& ellipsoid_t, const Eigen::Vector3d& v)
{
  if (v.norm() <= 0.0) {
    throw std::invalid_argument("mobility needs a nonzero direction");
  }
  const Eigen::Matrix3d gram = ellipsoid_t * ellipsoid_t.transpose();
  Eigen::FullPivLU<Eigen::Matrix3d> lu(gram);
  if (!lu.isInvertible()) {
    throw std::domain_error("rank-deficient ellipsoid; mobility undefined");
  }
  const double quad = v.dot(lu.solve(v));
  if (!(quad > 0.0)) {
    throw std::domain_error("rank-deficient ellipsoid; mobility undefined");
  }
  return v.norm() / std::sqrt(quad);
}

double mobility(const EllipsoidBasis& basis, const SpatialVelocity& v)
{
  return mobility(basis.translational_block, v.translational);
}

SpatialVelocity adjust_toward_mobility(const EllipsoidBasis& basis, const SpatialVelocity& v,
                                       const Eigen::Vector3d& d, const FieldParams& params)
{
  const Eigen::Vector3d vt = v.translational;
  if (vt.norm() <= 0.0) {
    throw std::invalid_argument("cannot adjust a zero translational velocity");
  }

  // Largest translational semiaxis; singular values of E_t are its column
  // norms since E_t = U_t * diag(sigma).
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(basis.translational_block, Eigen::ComputeFullU);
  const double e_max_mag = svd.singularValues()(0);
  Eigen::Vector3d e_max = svd.matrixU().col(0) * e_max_mag;

  const double mu_v = mobility(basis.translational_block, vt);
  if (mu_v / e_max_mag >= params.zeta) {
    return v;
  }
  if (vt.dot(e_max) < 0.0) {
    e_max = -e_max;
  }

  const Eigen::Vector3d axis_raw = vt.cross(e_max);
  if (axis_raw.norm() < 1e-9) {
    return v;  // already aligned (or anti-aligned with zero lever)
  }
  const Eigen::Vector3d axis = axis_raw.normalized();

  constexpr int kGridPoints = 65;
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best = vt;
  for (int i = 0; i < kGridPoints; ++i) {
    const double phi = (M_PI / 2.0) * static_cast<double>(i) / (kGridPoints - 1);
    const Eigen::Vector3d cand = axis_angle(axis, phi) * vt;
    const double cost =
        -params.omega1 * cand.dot(e_max) + params.omega2 * std::max(0.0, cand.dot(d));
    if (cost < best_cost) {
      best_cost = cost;
      best = cand;
    }
  }
  SpatialVelocity out = v;
  out.translational = best;
  return out;
}

bool detect_trap(const SpatialVelocity& v_att, const SpatialVelocity& v_rep,
                 const FieldParams& params)
{
  const Eigen::Vector3d a = v_att.translational;
  const Eigen::Vector3d r = v_rep.translational;
  const double an = a.norm();
  const double rn = r.norm();
  if (an <= 1e-6 || rn <= 0.0) {
    return false;
  }
  const double resultant = (a + r).norm();
  if (resultant >= params.trap_ratio * std::max(an, rn)) {
    return false;
  }
  const double angle = std::acos(std::clamp(a.dot(r) / (an * rn), -1.0, 1.0));
  return angle > params.trap_angle;
}

EscapeResult escape_velocity(const EllipsoidBasis& basis, const SpatialVelocity& v_att,
                             const JointConfig& q, const JointConfig& q_next,
                             const RobotModel& model, double v_def, double dt)
{
  EscapeResult result;
  const Eigen::Vector3d at = v_att.translational;
  if (at.norm() <= 0.0) {
    throw std::invalid_argument("escape needs a nonzero attractive velocity");
  }
  const Eigen::Vector3d u = at.normalized();
  const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - u * u.transpose();
  const Eigen::Matrix3d e_prj = proj * basis.translational_block;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(e_prj, Eigen::ComputeFullU);
  if (svd.singularValues()(0) < 1e-12) {
    return result;  // fully degenerate projection; trap unresolved
  }
  const Eigen::Vector3d rho = svd.matrixU().col(0);

  // Pick the candidate whose induced step lands closer to q_next.
  const Eigen::MatrixXd J = jacobian(model, q);
  const Eigen::MatrixXd pinv = J.completeOrthogonalDecomposition().pseudoInverse();
  double best_dist = std::numeric_limits<double>::infinity();
  Eigen::Vector3d chosen = rho;
  for (const double sign : {1.0, -1.0}) {
    Eigen::Matrix<double, 6, 1> v6 = Eigen::Matrix<double, 6, 1>::Zero();
    v6.head<3>() = sign * v_def * rho;
    const double dist = (q + dt * (pinv * v6) - q_next).norm();
    if (dist < best_dist) {
      best_dist = dist;
      chosen = sign * rho;
    }
  }
  result.velocity.translational = v_def * chosen;
  result.resolved = true;
  return result;
}

}  // namespace hybridplan

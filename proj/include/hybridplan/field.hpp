#ifndef HYBRIDPLAN_FIELD_HPP_
#define HYBRIDPLAN_FIELD_HPP_

#include <optional>
#include <vector>

#include "hybridplan/kinematics.hpp"
#include "hybridplan/world.hpp"

namespace hybridplan
{

/// Velocity-field gains. Defaults follow the experiment parameter set; link
/// weights are renormalized to sum to one at load.
struct FieldParams
{
  double k_att = 1.5;
  double k_rep0 = 0.5;
  double k_rep1 = 0.2;
  double k_rep2 = 0.1;
  double d_min = 0.01;  // m
  double d_max = 0.2;   // m
  double alpha = 200.0;
  double beta = 12.5;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double zeta = 0.7;
  double omega1 = 1.0;
  double omega2 = 1.0;
  Eigen::VectorXd link_weights;  // base -> end effector, sums to 1
  double v_def = 0.1;            // m/s escape speed
  double trap_ratio = 0.1;
  double trap_angle = 170.0 * M_PI / 180.0;

  void validate(int joint_count) const;
  /// Scales the weights to sum to one (preserving ratios).
  void normalize_weights();
};

/// Error 6-vector between the current and goal pose, expressed in the
/// current end-effector frame (Cardan XYZ angles for the rotational part).
/// Signed so that -k_att * e points from the current pose towards the goal.
Eigen::Matrix<double, 6, 1> pose_error(const Pose& current, const Pose& goal);

SpatialVelocity attractive_velocity(const Eigen::Matrix<double, 6, 1>& e, double k_att);

/// Bounded repulsive translational velocity for one link (world frame).
/// The parallel gain adapts to the signed approach rate of the obstacle; the
/// perpendicular term reacts to the obstacle sweeping across the link.
/// `fallback_dir` supplies the push direction when the witness degenerates
/// (contact, d = 0); when it is absent too the result is zero.
Eigen::Vector3d repulsive_link_velocity(const DistanceWitness& witness,
                                        const Eigen::Vector3d& v_obs, const FieldParams& params,
                                        const std::optional<Eigen::Vector3d>& fallback_dir = {});

/// Weighted sum of per-link world-frame repulsive velocities rotated into
/// the end-effector frame. Angular part is zero.
SpatialVelocity aggregate_repulsive(const std::vector<Eigen::Vector3d>& link_velocities,
                                    const Pose& ee_pose, const Eigen::VectorXd& weights);

/// Distance from the ellipsoid center to its surface along v.
double mobility(const Eigen::Matrix3d& ellipsoid_t, const Eigen::Vector3d& v);
double mobility(const EllipsoidBasis& basis, const SpatialVelocity& v);

/// Rotates the translational velocity towards the major ellipsoid semiaxis
/// when the mobility ratio drops below zeta, trading alignment against
/// approach towards the obstacle direction d (all vectors in the
/// end-effector frame). Magnitude and angular part are preserved.
SpatialVelocity adjust_toward_mobility(const EllipsoidBasis& basis, const SpatialVelocity& v,
                                       const Eigen::Vector3d& d, const FieldParams& params);

/// Stagnation test: attractive and repulsive translational parts nearly
/// cancel while pointing in opposing directions.
bool detect_trap(const SpatialVelocity& v_att, const SpatialVelocity& v_rep,
                 const FieldParams& params);

struct EscapeResult
{
  SpatialVelocity velocity;
  bool resolved = false;
};

/// Perpendicular escape velocity along the major semiaxis of the
/// manipulability ellipse projected onto the plane normal to v_att. Of the
/// two antiparallel candidates, picks the one whose induced displacement
/// moves the configuration closer to q_next.
EscapeResult escape_velocity(const EllipsoidBasis& basis, const SpatialVelocity& v_att,
                             const JointConfig& q, const JointConfig& q_next,
                             const RobotModel& model, double v_def, double dt);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_FIELD_HPP_

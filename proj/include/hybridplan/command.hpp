#ifndef HYBRIDPLAN_COMMAND_HPP_
#define HYBRIDPLAN_COMMAND_HPP_

#include <string>
#include <vector>

#include "hybridplan/robot_model.hpp"

namespace hybridplan
{

struct CommandParams
{
  double epsilon = 0.01;     // manipulability threshold for damping
  double lambda_max = 0.5;   // maximum damping factor
  double alpha_null = 0.01;  // null-space objective weight
  double k_m = 0.1;          // manipulability-ascent gain
  double dt = 0.01;          // control period, seconds
  double d_max = 0.2;        // switch threshold, meters
  bool hysteresis = false;   // optional band against mode chattering
};

enum class ControlMode
{
  kTracking,
  kAvoidance
};

struct CommandResult
{
  Eigen::VectorXd qd;
  bool dls_active = false;
  double lambda_used = 0.0;
  std::vector<std::string> constraints_active;
  ControlMode mode = ControlMode::kTracking;
};

/// Damping factor: ramps from 0 at mu = epsilon up to lambda_max at mu = 0.
double damping_factor(double mu, double epsilon, double lambda_max);

/// Damped least-squares joint velocity: the minimizer of
/// |J qd - v|^2 + lambda |qd|^2. With lambda = 0 this is the pseudo-inverse
/// solution; a singular J then raises a rank-deficiency error.
Eigen::VectorXd dls_velocity(const Eigen::MatrixXd& J, const Eigen::VectorXd& v, double lambda);

/// Box-constrained velocity command: minimizes
///   |J qd - v|^2 + lambda |qd|^2 + alpha |(I - J+ J)(qd0 - qd)|^2
/// subject to the per-joint position, velocity and acceleration intervals.
/// lambda comes from damping_factor(mu).
CommandResult qp_velocity(const Eigen::MatrixXd& J, const Eigen::VectorXd& v,
                          const JointConfig& q, const Eigen::VectorXd& qd_prev,
                          const RobotModel& model, const CommandParams& params, double mu,
                          const Eigen::VectorXd& qd0);

/// Binary switch: 1 (avoidance) when the closest obstacle is inside d_max.
int select_mode(double min_distance, double d_max);

/// Eq-style convex selection between the global and local commands.
Eigen::VectorXd compose_command(int nu, const Eigen::VectorXd& qd_global,
                                const Eigen::VectorXd& qd_local);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_COMMAND_HPP_

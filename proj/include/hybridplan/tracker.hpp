#ifndef HYBRIDPLAN_TRACKER_HPP_
#define HYBRIDPLAN_TRACKER_HPP_

#include <memory>

#include "hybridplan/kdtree.hpp"
#include "hybridplan/planner.hpp"

namespace hybridplan
{

struct TrackerParams
{
  double k_v = 5.0;
  double k_c = -5.0 / M_PI;  // -s_base / pi
  int s_base = 5;
  int s_min = 1;
  int s_max = 10;
  double k_p = 200.0;  // scalar gains applied as K * I
  double k_d = 100.0;
};

/// KD-tree over the configurations of a timed path. Immutable after build;
/// queries are pure and thread-safe.
class PathIndex
{
public:
  explicit PathIndex(const TimedPath& path);

  int size() const { return tree_.size(); }
  const JointConfig& config(int i) const { return tree_.point(i); }

  /// Index of the closest path configuration; ties break to the lowest index.
  int nearest(const JointConfig& q) const { return tree_.nearest(q); }

private:
  KdTree tree_;
};

struct NearestConfig
{
  JointConfig config;
  int index = 0;
};

NearestConfig nearest_config(const PathIndex& index, const JointConfig& q);

/// Dynamic look-ahead target: adapts the step to the joint speed and the
/// local path curvature, clamped to [s_min, s_max] and the path end.
JointConfig lookahead(const TimedPath& path, const PathIndex& index, const JointConfig& q,
                      const Eigen::VectorXd& qd, const TrackerParams& params,
                      int* index_out = nullptr);

/// PD tracking law on the look-ahead error; qd_e is the caller-estimated
/// time derivative of the configuration error.
Eigen::VectorXd pd_velocity(const JointConfig& q_next, const JointConfig& q,
                            const Eigen::VectorXd& qd_e, const TrackerParams& params);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_TRACKER_HPP_

#include "hybridplan/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridplan
{

PathIndex::PathIndex(const TimedPath& path)
    : tree_(path.configs.empty() ? 1 : static_cast<int>(path.configs.front().size()))
{
  if (path.configs.empty()) {
    throw std::invalid_argument("cannot index an empty path");
  }
  for (const auto& q : path.configs) {
    tree_.insert(q);
  }
}

NearestConfig nearest_config(const PathIndex& index, const JointConfig& q)
{
  const int i = index.nearest(q);
  return NearestConfig{index.config(i), i};
}

JointConfig lookahead(const TimedPath& path, const PathIndex& index, const JointConfig& q,
                      const Eigen::VectorXd& qd, const TrackerParams& params, int* index_out)
{
  const int n_points = path.size();
  const int x = index.nearest(q);

  int s = 0;
  if (x < n_points - 1) {
    // Curvature from the two adjacent segments; degenerate segments (missing
    // predecessor or zero length) contribute zero curvature.
    double kappa = 0.0;
    if (x >= 1) {
      const Eigen::VectorXd fwd = path.configs[static_cast<std::size_t>(x + 1)] -
                                  path.configs[static_cast<std::size_t>(x)];
      const Eigen::VectorXd back = path.configs[static_cast<std::size_t>(x)] -
                                   path.configs[static_cast<std::size_t>(x - 1)];
      const double denom = fwd.norm() * back.norm();
      if (denom > 0.0) {
        kappa = std::acos(std::clamp(fwd.dot(back) / denom, -1.0, 1.0));
      }
    }
    s = static_cast<int>(params.k_v * qd.norm() + params.k_c * kappa +
                         static_cast<double>(params.s_base));
    const int s_cap = std::min(params.s_max, n_points - 1 - x);
    s = std::min(s_cap, std::max(params.s_min, s));
    s = std::max(0, s);
  }

  const int y = std::min(x + s, n_points - 1);
  if (index_out != nullptr) {
    *index_out = y;
  }
  return path.configs[static_cast<std::size_t>(y)];
}

Eigen::VectorXd pd_velocity(const JointConfig& q_next, const JointConfig& q,
                            const Eigen::VectorXd& qd_e, const TrackerParams& params)
{
  if (q_next.size() != q.size() || qd_e.size() != q.size()) {
    throw std::invalid_argument("dimension mismatch in pd_velocity");
  }
  return params.k_p * (q_next - q) + params.k_d * qd_e;
}

}  // namespace hybridplan

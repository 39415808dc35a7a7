#ifndef HYBRIDPLAN_KDTREE_HPP_
#define HYBRIDPLAN_KDTREE_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace hybridplan
{

/// KD-tree over joint-space points with incremental insertion (no
/// rebalancing). Nearest queries break distance ties by the lowest point
/// index, matching a linear scan in insertion order.
class KdTree
{
public:
  explicit KdTree(int dim) : dim_(dim) {}

  int size() const { return static_cast<int>(points_.size()); }
  const Eigen::VectorXd& point(int i) const { return points_[static_cast<std::size_t>(i)]; }

  /// Returns the index assigned to the inserted point.
  int insert(const Eigen::VectorXd& p);

  /// Index of the nearest stored point (-1 when empty).
  int nearest(const Eigen::VectorXd& q) const;

  /// Indices of all points within `radius` of q, ascending by index.
  std::vector<int> radius_search(const Eigen::VectorXd& q, double radius) const;

private:
  struct Node
  {
    int point = -1;
    int split = 0;
    int left = -1;
    int right = -1;
  };

  void search(int node, const Eigen::VectorXd& q, double& best_dist2, int& best_idx) const;
  void search_radius(int node, const Eigen::VectorXd& q, double r2,
                     std::vector<int>& out) const;

  int dim_;
  int root_ = -1;
  std::vector<Node> nodes_;
  std::vector<Eigen::VectorXd> points_;
};

}  // namespace hybridplan

#endif  // HYBRIDPLAN_KDTREE_HPP_

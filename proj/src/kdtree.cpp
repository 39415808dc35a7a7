#include "hybridplan/kdtree.hpp"

#include <algorithm>
#include <limits>

namespace hybridplan
{

int KdTree::insert(const Eigen::VectorXd& p)
{
  const int idx = static_cast<int>(points_.size());
  points_.push_back(p);
  Node node;
  node.point = idx;
  const int node_id = static_cast<int>(nodes_.size());

  if (root_ < 0) {
    node.split = 0;
    nodes_.push_back(node);
    root_ = node_id;
    return idx;
  }
  int cur = root_;
  while (true) {
    Node& c = nodes_[static_cast<std::size_t>(cur)];
    const int axis = c.split;
    const bool go_left = p(axis) < points_[static_cast<std::size_t>(c.point)](axis);
    int& child = go_left ? c.left : c.right;
    if (child < 0) {
      node.split = (axis + 1) % dim_;
      child = node_id;
      nodes_.push_back(node);
      return idx;
    }
    cur = child;
  }
}

void KdTree::search(int node, const Eigen::VectorXd& q, double& best_dist2, int& best_idx) const
{
  if (node < 0) {
    return;
  }
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const Eigen::VectorXd& p = points_[static_cast<std::size_t>(n.point)];
  const double d2 = (p - q).squaredNorm();
  if (d2 < best_dist2 || (d2 == best_dist2 && n.point < best_idx)) {
    best_dist2 = d2;
    best_idx = n.point;
  }
  const double delta = q(n.split) - p(n.split);
  const int near = delta < 0.0 ? n.left : n.right;
  const int far = delta < 0.0 ? n.right : n.left;
  search(near, q, best_dist2, best_idx);
  if (delta * delta <= best_dist2) {
    search(far, q, best_dist2, best_idx);
  }
}

int KdTree::nearest(const Eigen::VectorXd& q) const
{
  if (root_ < 0) {
    return -1;
  }
  double best = std::numeric_limits<double>::infinity();
  int idx = -1;
  search(root_, q, best, idx);
  return idx;
}

void KdTree::search_radius(int node, const Eigen::VectorXd& q, double r2,
                           std::vector<int>& out) const
{
  if (node < 0) {
    return;
  }
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const Eigen::VectorXd& p = points_[static_cast<std::size_t>(n.point)];
  if ((p - q).squaredNorm() <= r2) {
    out.push_back(n.point);
  }
  const double delta = q(n.split) - p(n.split);
  if (delta < 0.0) {
    search_radius(n.left, q, r2, out);
    if (delta * delta <= r2) {
      search_radius(n.right, q, r2, out);
    }
  } else {
    search_radius(n.right, q, r2, out);
    if (delta * delta <= r2) {
      search_radius(n.left, q, r2, out);
    }
  }
}

std::vector<int> KdTree::radius_search(const Eigen::VectorXd& q, double radius) const
{
  std::vector<int> out;
  search_radius(root_, q, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hybridplan

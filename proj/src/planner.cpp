#include "hybridplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hybridplan/kdtree.hpp"
#include "hybridplan/kinematics.hpp"
#include "hybridplan/rng.hpp"

namespace hybridplan
{

namespace
{
double sigmoid(double x, double scale)
{
  const double s = scale > 0.0 ? scale : 1.0;
  return 1.0 / (1.0 + std::exp(-x / s));
}

double config_min_clearance(const RobotModel& model, const JointConfig& q,
                            const WorldState& world)
{
  return min_clearance(min_distance(model, q, world));
}
}  // namespace

std::vector<Eigen::VectorXd> TimedPath::velocities() const
{
  std::vector<Eigen::VectorXd> v;
  v.reserve(configs.size() > 0 ? configs.size() - 1 : 0);
  for (std::size_t k = 0; k + 1 < configs.size(); ++k) {
    v.push_back((configs[k + 1] - configs[k]) / dt);
  }
  return v;
}

std::string TimedPath::check_invariants(const RobotModel& model) const
{
  if (size() < 2) {
    return "trajectory needs at least 2 configurations";
  }
  if (!(dt > 0.0)) {
    return "dt must be positive";
  }
  const int n = model.joint_count();
  Eigen::VectorXd prev_v = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < configs.size(); ++k) {
    if (model.limit_violation(configs[k]) >= 0) {
      return "configuration outside joint limits at step " + std::to_string(k);
    }
    if (k + 1 < configs.size()) {
      const Eigen::VectorXd v = (configs[k + 1] - configs[k]) / dt;
      for (int j = 0; j < n; ++j) {
        if (std::abs(v(j)) > model.velocity_limits()(j)) {
          return "velocity limit exceeded at step " + std::to_string(k);
        }
        if (std::abs(v(j) - prev_v(j)) > model.acceleration_limits()(j) * dt) {
          return "acceleration limit exceeded at step " + std::to_string(k);
        }
      }
      prev_v = v;
    }
  }
  return "";
}

bool config_collides(const RobotModel& model, const JointConfig& q, const WorldState& world)
{
  if (world.empty()) {
    return false;
  }
  for (const auto& w : min_distance(model, q, world)) {
    if (w.distance <= 0.0) {
      return true;
    }
  }
  return false;
}

bool edge_collision_free(const RobotModel& model, const JointConfig& a, const JointConfig& b,
                         const WorldState& world, double resolution)
{
  if (world.empty()) {
    return true;
  }
  const double len = (b - a).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
  for (int k = 0; k <= steps; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(steps);
    if (config_collides(model, a + u * (b - a), world)) {
      return false;
    }
  }
  return true;
}

double path_cost(const RobotModel& model, const std::vector<JointConfig>& path,
                 const WorldState& world, const CostWeights& weights)
{
  if (path.empty()) {
    throw std::invalid_argument("path_cost needs a non-empty path");
  }
  double length = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    length += (path[k + 1] - path[k]).norm();
  }
  double cost = weights.path * sigmoid(length, weights.length_scale);

  if (weights.manipulability > 0.0) {
    double m = 0.0;
    for (const auto& q : path) {
      m += yoshikawa(model, q);
    }
    m /= static_cast<double>(path.size());
    cost += weights.manipulability / sigmoid(m, weights.manip_scale);
  }
  if (weights.obstacle > 0.0) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& q : path) {
      dmin = std::min(dmin, config_min_clearance(model, q, world));
    }
    const double norm = std::isfinite(dmin) ? sigmoid(dmin, weights.dist_scale) : 1.0;
    cost += weights.obstacle / norm;
  }
  return cost;
}

namespace
{
struct TreeNode
{
  int parent = -1;
  double edge_cost = 0.0;
  double cost = 0.0;
  double mu = 0.0;         // cached manipulability at the node
  double clearance = 0.0;  // cached min obstacle distance (only if weighted)
  std::vector<int> children;
};

class RrtStar
{
public:
  RrtStar(const RobotModel& model, const WorldState& world, const PlannerParams& params)
      : model_(model),
        world_(world),
        params_(params),
        tree_(model.joint_count()),
        rng_(params.seed)
  {
    resolution_ = params.step_size / 4.0;
    w_ = params.weights;
  }

  PlanResult plan(const JointConfig& q_start, const JointConfig& q_goal)
  {
    PlanResult result;
    if (model_.limit_violation(q_start) >= 0 || config_collides(model_, q_start, world_)) {
      result.status = PlanStatus::kInfeasibleStart;
      return result;
    }
    if (model_.limit_violation(q_goal) >= 0 || config_collides(model_, q_goal, world_)) {
      result.status = PlanStatus::kInfeasibleGoal;
      return result;
    }
    if ((q_goal - q_start).norm() <= params_.goal_tolerance) {
      result.status = PlanStatus::kSuccess;
      result.waypoints = {q_start};
      result.cost = 0.0;
      return result;
    }

    add_node(q_start, -1, 0.0, 0.0);
    std::vector<int> goal_nodes;

    for (int it = 0; it < params_.max_iterations; ++it) {
      result.iterations = it + 1;
      const JointConfig q_rand = sample(q_goal);
      const int nearest = tree_.nearest(q_rand);
      const JointConfig q_near = tree_.point(nearest);
      const JointConfig q_new = steer(q_near, q_rand);
      if ((q_new - q_near).norm() == 0.0 || model_.limit_violation(q_new) >= 0) {
        continue;
      }
      if (!edge_collision_free(model_, q_near, q_new, world_, resolution_)) {
        continue;
      }

      const double mu_new = node_mu(q_new);
      const double clr_new = node_clearance(q_new);
      std::vector<int> neighbors = tree_.radius_search(q_new, neighbor_radius());

      // Choose the cheapest valid parent.
      int parent = nearest;
      double parent_edge = edge_cost(nearest, q_new, mu_new, clr_new);
      double new_cost = nodes_[static_cast<std::size_t>(nearest)].cost + parent_edge;
      for (int nb : neighbors) {
        if (nb == nearest) {
          continue;
        }
        const double ec = edge_cost(nb, q_new, mu_new, clr_new);
        const double total = nodes_[static_cast<std::size_t>(nb)].cost + ec;
        if (total < new_cost &&
            edge_collision_free(model_, tree_.point(nb), q_new, world_, resolution_)) {
          parent = nb;
          parent_edge = ec;
          new_cost = total;
        }
      }

      const int idx = add_node(q_new, parent, parent_edge, new_cost, mu_new, clr_new);

      // Rewire neighbors through the new node when cheaper.
      for (int nb : neighbors) {
        const std::size_t nbi = static_cast<std::size_t>(nb);
        const double ec = edge_cost(idx, tree_.point(nb), nodes_[nbi].mu, nodes_[nbi].clearance);
        if (new_cost + ec < nodes_[nbi].cost &&
            edge_collision_free(model_, q_new, tree_.point(nb), world_, resolution_)) {
          detach(nb);
          nodes_[nbi].parent = idx;
          nodes_[nbi].edge_cost = ec;
          nodes_[static_cast<std::size_t>(idx)].children.push_back(nb);
          propagate_cost(nb, new_cost + ec);
        }
      }

      if ((q_new - q_goal).norm() <= params_.goal_tolerance) {
        goal_nodes.push_back(idx);
      }
    }

    int best_goal = -1;
    for (int g : goal_nodes) {
      if (best_goal < 0 ||
          nodes_[static_cast<std::size_t>(g)].cost < nodes_[static_cast<std::size_t>(best_goal)].cost) {
        best_goal = g;
      }
    }
    if (best_goal < 0) {
      result.status = PlanStatus::kNoPath;
      return result;
    }
    result.status = PlanStatus::kSuccess;
    result.cost = nodes_[static_cast<std::size_t>(best_goal)].cost;
    for (int cur = best_goal; cur >= 0; cur = nodes_[static_cast<std::size_t>(cur)].parent) {
      result.waypoints.push_back(tree_.point(cur));
    }
    std::reverse(result.waypoints.begin(), result.waypoints.end());
    return result;
  }

private:
  JointConfig sample(const JointConfig& q_goal)
  {
    if (rng_.uniform() < params_.goal_bias) {
      return q_goal;
    }
    const int n = model_.joint_count();
    JointConfig q(n);
    for (int i = 0; i < n; ++i) {
      q(i) = rng_.uniform(model_.q_min()(i), model_.q_max()(i));
    }
    return q;
  }

  JointConfig steer(const JointConfig& from, const JointConfig& to) const
  {
    const Eigen::VectorXd delta = to - from;
    const double len = delta.norm();
    if (len <= params_.step_size) {
      return to;
    }
    return from + (params_.step_size / len) * delta;
  }

  double neighbor_radius() const
  {
    const double k = static_cast<double>(tree_.size());
    if (k < 2.0) {
      return 0.0;
    }
    const double n = static_cast<double>(model_.joint_count());
    const double shrinking = params_.rewire_gamma * std::pow(std::log(k) / k, 1.0 / n);
    // Connections are capped at the steering range so the edge cost terms
    // (notably the endpoint clearance) stay representative of the edge.
    return std::min(shrinking, params_.step_size);
  }

  double node_mu(const JointConfig& q) const
  {
    return w_.manipulability > 0.0 ? yoshikawa(model_, q) : 0.0;
  }

  double node_clearance(const JointConfig& q) const
  {
    return w_.obstacle > 0.0 ? config_min_clearance(model_, q, world_)
                             : std::numeric_limits<double>::infinity();
  }

  /// Equals path_cost on the two-config path, using the cached per-node terms.
  double edge_cost(int from, const JointConfig& q_to, double mu_to, double clr_to) const
  {
    const TreeNode& a = nodes_[static_cast<std::size_t>(from)];
    const double length = (q_to - tree_.point(from)).norm();
    double cost = w_.path * sigmoid(length, w_.length_scale);
    if (w_.manipulability > 0.0) {
      cost += w_.manipulability / sigmoid(0.5 * (a.mu + mu_to), w_.manip_scale);
    }
    if (w_.obstacle > 0.0) {
      const double dmin = std::min(a.clearance, clr_to);
      cost += w_.obstacle / (std::isfinite(dmin) ? sigmoid(dmin, w_.dist_scale) : 1.0);
    }
    return cost;
  }

  int add_node(const JointConfig& q, int parent, double edge, double cost)
  {
    return add_node(q, parent, edge, cost, node_mu(q), node_clearance(q));
  }

  int add_node(const JointConfig& q, int parent, double edge, double cost, double mu,
               double clearance)
  {
    const int idx = tree_.insert(q);
    TreeNode node;
    node.parent = parent;
    node.edge_cost = edge;
    node.cost = cost;
    node.mu = mu;
    node.clearance = clearance;
    nodes_.push_back(std::move(node));
    if (parent >= 0) {
      nodes_[static_cast<std::size_t>(parent)].children.push_back(idx);
    }
    return idx;
  }

  void detach(int node)
  {
    const int p = nodes_[static_cast<std::size_t>(node)].parent;
    if (p < 0) {
      return;
    }
    auto& siblings = nodes_[static_cast<std::size_t>(p)].children;
    siblings.erase(std::remove(siblings.begin(), siblings.end(), node), siblings.end());
  }

  void propagate_cost(int node, double cost)
  {
    TreeNode& n = nodes_[static_cast<std::size_t>(node)];
    n.cost = cost;
    for (int c : n.children) {
      propagate_cost(c, cost + nodes_[static_cast<std::size_t>(c)].edge_cost);
    }
  }

  const RobotModel& model_;
  const WorldState& world_;
  PlannerParams params_;
  KdTree tree_;
  std::vector<TreeNode> nodes_;
  SplitMix64 rng_;
  double resolution_ = 0.05;
  CostWeights w_;
};
}  // namespace

PlanResult plan_rrt_star(const RobotModel& model, const WorldState& world_snapshot,
                         const JointConfig& q_start, const JointConfig& q_goal,
                         const PlannerParams& params)
{
  RrtStar planner(model, world_snapshot, params);
  return planner.plan(q_start, q_goal);
}

namespace
{
double densified_clearance(const RobotModel& model, const std::vector<JointConfig>& chain,
                           const WorldState& world, double resolution)
{
  if (world.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    const double len = (chain[k + 1] - chain[k]).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    for (int s = 0; s <= steps; ++s) {
      const JointConfig q = chain[k] + (chain[k + 1] - chain[k]) *
                                           (static_cast<double>(s) / steps);
      dmin = std::min(dmin, min_clearance(min_distance(model, q, world)));
    }
  }
  return dmin;
}
}  // namespace

std::vector<JointConfig> shortcut_path(const RobotModel& model, const WorldState& world,
                                       const std::vector<JointConfig>& waypoints,
                                       double resolution, const CostWeights& weights)
{
  if (waypoints.size() <= 2) {
    return waypoints;
  }
  const auto chain_length = [](const std::vector<JointConfig>& c) {
    double len = 0.0;
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
      len += (c[k + 1] - c[k]).norm();
    }
    return len;
  };
  // A shortcut must not buy length with clearance: when the obstacle term is
  // weighted, the direct edge is accepted only if the sigmoid-priced
  // length/clearance trade (evaluated on densified samples) does not worsen.
  const auto accept = [&](const std::vector<JointConfig>& chain) {
    const std::vector<JointConfig> direct{chain.front(), chain.back()};
    if (!edge_collision_free(model, chain.front(), chain.back(), world, resolution)) {
      return false;
    }
    if (weights.obstacle <= 0.0 || world.empty()) {
      return true;
    }
    const auto priced = [&](const std::vector<JointConfig>& c) {
      const double sig_len =
          1.0 / (1.0 + std::exp(-chain_length(c) / std::max(weights.length_scale, 1e-9)));
      const double d = densified_clearance(model, c, world, resolution);
      const double sig_d =
          std::isfinite(d) ? 1.0 / (1.0 + std::exp(-d / std::max(weights.dist_scale, 1e-9)))
                           : 1.0;
      return weights.path * sig_len + weights.obstacle / sig_d;
    };
    return priced(direct) <= priced(chain);
  };

  std::vector<JointConfig> out;
  out.push_back(waypoints.front());
  std::size_t i = 0;
  while (i + 1 < waypoints.size()) {
    std::size_t j = waypoints.size() - 1;
    while (j > i + 1) {
      std::vector<JointConfig> chain(waypoints.begin() + static_cast<std::ptrdiff_t>(i),
                                     waypoints.begin() + static_cast<std::ptrdiff_t>(j + 1));
      if (accept(chain)) {
        break;
      }
      --j;
    }
    out.push_back(waypoints[j]);
    i = j;
  }
  return out;
}

std::vector<JointConfig> push_clearance(const RobotModel& model, const WorldState& world,
                                        std::vector<JointConfig> waypoints, double target,
                                        double resolution, int sweeps)
{
  if (world.empty() || waypoints.size() < 3) {
    return waypoints;
  }
  const int n = model.joint_count();
  constexpr double h = 1e-4;
  constexpr double step = 0.03;
  const auto clearance = [&](const JointConfig& q) {
    return min_clearance(min_distance(model, q, world));
  };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool changed = false;
    for (std::size_t i = 1; i + 1 < waypoints.size(); ++i) {
      JointConfig& q = waypoints[i];
      if (clearance(q) >= target) {
        continue;
      }
      Eigen::VectorXd grad(n);
      JointConfig probe = q;
      for (int j = 0; j < n; ++j) {
        probe(j) = q(j) + h;
        const double up = clearance(probe);
        probe(j) = q(j) - h;
        grad(j) = (up - clearance(probe)) / (2.0 * h);
        probe(j) = q(j);
      }
      const double gn = grad.norm();
      if (gn < 1e-9) {
        continue;
      }
      JointConfig cand = q + (step / gn) * grad;
      if (model.limit_violation(cand) >= 0 || clearance(cand) <= clearance(q)) {
        continue;
      }
      if (!edge_collision_free(model, waypoints[i - 1], cand, world, resolution) ||
          !edge_collision_free(model, cand, waypoints[i + 1], world, resolution)) {
        continue;
      }
      q = cand;
      changed = true;
    }
    if (!changed) {
      break;
    }
  }
  return waypoints;
}

std::vector<JointConfig> resample_polyline(const std::vector<JointConfig>& waypoints,
                                           double max_leg)
{
  std::vector<JointConfig> out;
  if (waypoints.empty()) {
    return out;
  }
  out.push_back(waypoints.front());
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    const Eigen::VectorXd delta = waypoints[k] - waypoints[k - 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil(delta.norm() / max_leg)));
    for (int p = 1; p <= pieces; ++p) {
      out.push_back(waypoints[k - 1] + delta * (static_cast<double>(p) / pieces));
    }
  }
  return out;
}

std::vector<JointConfig> smooth_bspline(const RobotModel& model, const WorldState& world,
                                        const std::vector<JointConfig>& raw,
                                        int samples_per_segment)
{
  if (raw.size() < 2) {
    throw std::invalid_argument("spline smoothing needs at least 2 waypoints");
  }
  const int m = static_cast<int>(raw.size());
  const int degree = std::min(3, m - 1);

  // Clamped uniform knot vector.
  const int num_knots = m + degree + 1;
  std::vector<double> knots(static_cast<std::size_t>(num_knots));
  const int interior = m - degree - 1;
  for (int i = 0; i < num_knots; ++i) {
    if (i <= degree) {
      knots[static_cast<std::size_t>(i)] = 0.0;
    } else if (i >= m) {
      knots[static_cast<std::size_t>(i)] = 1.0;
    } else {
      knots[static_cast<std::size_t>(i)] =
          static_cast<double>(i - degree) / static_cast<double>(interior + 1);
    }
  }

  const auto de_boor = [&](double u) -> JointConfig {
    u = std::clamp(u, 0.0, 1.0);
    // Locate the knot span.
    int span = degree;
    if (u >= 1.0) {
      span = m - 1;
    } else {
      while (span + 1 < m && knots[static_cast<std::size_t>(span + 1)] <= u) {
        ++span;
      }
    }
    std::vector<JointConfig> d(static_cast<std::size_t>(degree + 1));
    for (int j = 0; j <= degree; ++j) {
      d[static_cast<std::size_t>(j)] = raw[static_cast<std::size_t>(span - degree + j)];
    }
    for (int r = 1; r <= degree; ++r) {
      for (int j = degree; j >= r; --j) {
        const int i = span - degree + j;
        const double denom = knots[static_cast<std::size_t>(i + degree - r + 1)] -
                             knots[static_cast<std::size_t>(i)];
        const double alpha = denom > 0.0 ? (u - knots[static_cast<std::size_t>(i)]) / denom : 0.0;
        d[static_cast<std::size_t>(j)] = (1.0 - alpha) * d[static_cast<std::size_t>(j - 1)] +
                                         alpha * d[static_cast<std::size_t>(j)];
      }
    }
    return d[static_cast<std::size_t>(degree)];
  };

  // Polyline fallback parameterized by control-point index.
  const auto polyline = [&](double u) -> JointConfig {
    const double x = std::clamp(u, 0.0, 1.0) * static_cast<double>(m - 1);
    const int seg = std::min(m - 2, static_cast<int>(x));
    const double frac = x - static_cast<double>(seg);
    return raw[static_cast<std::size_t>(seg)] +
           frac * (raw[static_cast<std::size_t>(seg + 1)] - raw[static_cast<std::size_t>(seg)]);
  };

  const int total = samples_per_segment * (m - 1) + 1;
  std::vector<JointConfig> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int k = 0; k < total; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(total - 1);
    JointConfig q = de_boor(u);
    if (!world.empty() && config_collides(model, q, world)) {
      q = polyline(u);
    }
    out.push_back(q);
  }
  // Clamped spline hits the endpoints exactly; pin them bitwise anyway.
  out.front() = raw.front();
  out.back() = raw.back();
  return out;
}

TimedPath time_parameterize(const RobotModel& model, const std::vector<JointConfig>& path,
                            double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  if (path.empty()) {
    throw std::invalid_argument("empty path");
  }

  TimedPath out;
  out.dt = dt;

  // Deduplicated input waypoints.
  std::vector<JointConfig> pts;
  pts.push_back(path.front());
  for (std::size_t k = 1; k < path.size(); ++k) {
    if ((path[k] - pts.back()).norm() > 0.0) {
      pts.push_back(path[k]);
    }
  }
  if (pts.size() < 2) {
    out.configs = {path.front(), path.front()};
    return out;
  }
  const std::size_t npts = pts.size();
  const int n = model.joint_count();

  // Per-segment tangents, cruise speed caps and the path acceleration bound.
  std::vector<Eigen::VectorXd> seg_u(npts - 1);
  std::vector<double> seg_len(npts - 1);
  std::vector<double> seg_vmax(npts - 1, std::numeric_limits<double>::infinity());
  double a_path = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < npts; ++k) {
    const Eigen::VectorXd delta = pts[k + 1] - pts[k];
    seg_len[k] = delta.norm();
    seg_u[k] = delta / seg_len[k];
    for (int j = 0; j < n; ++j) {
      const double uj = std::abs(seg_u[k](j));
      if (uj > 1e-12) {
        seg_vmax[k] = std::min(seg_vmax[k], model.velocity_limits()(j) / uj);
        a_path = std::min(a_path, model.acceleration_limits()(j) / uj);
      }
    }
  }

  const double margin = 1.0 - 1e-9;
  const double a = a_path * margin;

  // Optimistic per-waypoint speed caps from the local curvature (the turn at
  // a waypoint spread over the neighboring segments). Sampled verification
  // below tightens individual caps where the turn is really concentrated.
  std::vector<double> node_cap(npts, std::numeric_limits<double>::infinity());
  for (std::size_t k = 1; k + 1 < npts; ++k) {
    const double turn = (seg_u[k] - seg_u[k - 1]).norm();
    if (turn > 1e-12) {
      const double kappa = turn / (0.5 * (seg_len[k - 1] + seg_len[k]));
      node_cap[k] = std::sqrt(0.8 * a / kappa);
    }
  }

  // Fine arc-length nodes; each carries the owning waypoint for cap updates.
  constexpr double kNodeSpacing = 1e-3;  // rad
  std::vector<JointConfig> nodes;
  std::vector<int> owner;  // waypoint index whose cap gates this node (or -1)
  std::vector<double> ds;
  std::vector<std::size_t> seg_of_gap;
  nodes.push_back(pts.front());
  owner.push_back(0);
  for (std::size_t k = 0; k + 1 < npts; ++k) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(seg_len[k] / kNodeSpacing)));
    for (int p = 1; p <= pieces; ++p) {
      nodes.push_back(pts[k] + (pts[k + 1] - pts[k]) * (static_cast<double>(p) / pieces));
      owner.push_back(p == pieces ? static_cast<int>(k + 1) : -1);
      ds.push_back(seg_len[k] / pieces);
      seg_of_gap.push_back(k);
    }
  }
  const std::size_t m = nodes.size();

  for (int attempt = 0; attempt < 50; ++attempt) {
    // Forward-backward pass over the fine nodes.
    std::vector<double> v(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
      double cap = std::min(seg_vmax[seg_of_gap[i - 1]], seg_vmax[seg_of_gap[i]]) * margin;
      if (owner[i] >= 0) {
        cap = std::min(cap, node_cap[static_cast<std::size_t>(owner[i])]);
      }
      v[i] = cap;
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
      v[i + 1] = std::min(v[i + 1], std::sqrt(v[i] * v[i] + 2.0 * a * ds[i]));
    }
    for (std::size_t i = m - 1; i-- > 0;) {
      v[i] = std::min(v[i], std::sqrt(v[i + 1] * v[i + 1] + 2.0 * a * ds[i]));
    }

    std::vector<double> t(m, 0.0);
    std::vector<double> cum(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      t[i + 1] = t[i] + 2.0 * ds[i] / std::max(v[i] + v[i + 1], 1e-12);
      cum[i + 1] = cum[i] + ds[i];
    }
    const double duration = t.back();

    // Resample at the control period with constant acceleration inside each
    // node interval, so the finite differences of the samples respect the
    // profile exactly.
    const int steps = std::max(1, static_cast<int>(std::ceil(duration / dt - 1e-6)));
    std::vector<JointConfig> configs;
    std::vector<std::size_t> sample_node(static_cast<std::size_t>(steps) + 1, 0);
    configs.reserve(static_cast<std::size_t>(steps) + 1);
    std::size_t cursor = 0;
    for (int k = 0; k <= steps; ++k) {
      const double tk = static_cast<double>(k) * dt;
      if (tk >= duration) {
        configs.push_back(nodes.back());
        sample_node[static_cast<std::size_t>(k)] = m - 2;
        continue;
      }
      while (cursor + 2 < m && t[cursor + 1] <= tk) {
        ++cursor;
      }
      const double span = t[cursor + 1] - t[cursor];
      const double tau = std::clamp(tk - t[cursor], 0.0, span);
      const double acc_i = span > 0.0 ? (v[cursor + 1] - v[cursor]) / span : 0.0;
      double s = cum[cursor] + v[cursor] * tau + 0.5 * acc_i * tau * tau;
      s = std::clamp(s, cum[cursor], cum[cursor + 1]);
      const double u = ds[cursor] > 0.0 ? (s - cum[cursor]) / ds[cursor] : 0.0;
      configs.push_back(nodes[cursor] + u * (nodes[cursor + 1] - nodes[cursor]));
      sample_node[static_cast<std::size_t>(k)] = cursor;
    }
    configs.back() = nodes.back();

    // Verify the sampled trajectory; tighten the caps of the waypoints
    // bracketing any violation and retry.
    out.configs = std::move(configs);
    bool ok = true;
    Eigen::VectorXd prev_vel = Eigen::VectorXd::Zero(n);
    std::vector<double> tighten(npts, 1.0);
    for (std::size_t k = 0; k + 1 < out.configs.size(); ++k) {
      const Eigen::VectorXd vel = (out.configs[k + 1] - out.configs[k]) / dt;
      double f = 1.0;
      for (int j = 0; j < n; ++j) {
        f = std::max(f, std::abs(vel(j)) / model.velocity_limits()(j));
        f = std::max(f, std::abs(vel(j) - prev_vel(j)) / (model.acceleration_limits()(j) * dt));
      }
      prev_vel = vel;
      if (f > 1.0) {
        ok = false;
        // Blame the waypoints around the finite-difference stencil.
        const std::size_t g_lo = sample_node[k > 0 ? k - 1 : 0];
        const std::size_t g_hi = sample_node[std::min(k + 1, out.configs.size() - 2)];
        const std::size_t w_lo = seg_of_gap[g_lo];
        const std::size_t w_hi = std::min(seg_of_gap[g_hi] + 1, npts - 1);
        for (std::size_t w = w_lo; w <= w_hi; ++w) {
          tighten[w] = std::max(tighten[w], f);
        }
      }
    }
    if (ok) {
      return out;
    }
    for (std::size_t w = 0; w < npts; ++w) {
      if (tighten[w] > 1.0) {
        const double current =
            std::isfinite(node_cap[w]) ? node_cap[w] : seg_vmax[w < npts - 1 ? w : w - 1];
        node_cap[w] = current / (tighten[w] * 1.05);
      }
    }
  }
  return out;
}

}  // namespace hybridplan

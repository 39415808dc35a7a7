#include "hybridplan/robot_model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hybridplan
{

namespace
{
constexpr double kDegToRad = M_PI / 180.0;

Eigen::Vector3d read_vec3(const nlohmann::json& j)
{
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::VectorXd read_vec(const nlohmann::json& j)
{
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

Pose read_pose(const nlohmann::json& j)
{
  Pose p;
  if (j.contains("position")) {
    p.translation = read_vec3(j.at("position"));
  }
  if (j.contains("rpy_deg")) {
    const Eigen::Vector3d rpy = read_vec3(j.at("rpy_deg")) * kDegToRad;
    p.rotation = rotation_xyz(rpy.x(), rpy.y(), rpy.z());
  }
  return p;
}
}  // namespace

RobotModel::RobotModel(std::vector<JointDescriptor> joints, std::vector<Capsule> link_geometry,
                       Eigen::VectorXd q_min, Eigen::VectorXd q_max, Eigen::VectorXd qd_max,
                       Eigen::VectorXd qdd_max, Pose base, Pose tool)
    : joints_(std::move(joints)),
      link_geometry_(std::move(link_geometry)),
      q_min_(std::move(q_min)),
      q_max_(std::move(q_max)),
      qd_max_(std::move(qd_max)),
      qdd_max_(std::move(qdd_max)),
      base_(base),
      tool_(tool)
{
  const int n = joint_count();
  if (n < 2) {
    throw std::invalid_argument("robot model needs at least 2 joints");
  }
  if (q_min_.size() != n || q_max_.size() != n || qd_max_.size() != n || qdd_max_.size() != n) {
    throw std::invalid_argument("limit vectors must match joint count");
  }
  if (static_cast<int>(link_geometry_.size()) != n) {
    throw std::invalid_argument("expected one capsule per link");
  }
  for (int i = 0; i < n; ++i) {
    if (!(q_min_(i) < q_max_(i))) {
      throw std::invalid_argument("q_min must be strictly below q_max");
    }
    if (!(qd_max_(i) > 0.0) || !(qdd_max_(i) > 0.0)) {
      throw std::invalid_argument("velocity and acceleration limits must be positive");
    }
    if (!(link_geometry_[i].radius > 0.0)) {
      throw std::invalid_argument("capsule radii must be positive");
    }
    const double an = joints_[i].axis.norm();
    if (std::abs(an - 1.0) > 1e-9) {
      if (an < 1e-12) {
        throw std::invalid_argument("joint axis must be nonzero");
      }
      joints_[i].axis /= an;
    }
  }
}

bool RobotModel::within_limits(const JointConfig& q) const
{
  return limit_violation(q) < 0;
}

int RobotModel::limit_violation(const JointConfig& q) const
{
  for (int i = 0; i < joint_count(); ++i) {
    if (q(i) < q_min_(i) || q(i) > q_max_(i)) {
      return i;
    }
  }
  return -1;
}

RobotModel parse_robot_model(const std::string& json_text)
{
  const nlohmann::json doc = nlohmann::json::parse(json_text);

  std::vector<JointDescriptor> joints;
  for (const auto& jj : doc.at("joints")) {
    JointDescriptor d;
    d.origin = read_pose(jj.at("origin"));
    d.axis = read_vec3(jj.at("axis"));
    joints.push_back(d);
  }

  std::vector<Capsule> capsules;
  for (const auto& cj : doc.at("capsules")) {
    Capsule c;
    c.a = read_vec3(cj.at("a"));
    c.b = read_vec3(cj.at("b"));
    c.radius = cj.at("radius").get<double>();
    capsules.push_back(c);
  }

  const auto& lim = doc.at("limits");
  Eigen::VectorXd pos = read_vec(lim.at("position_deg")) * kDegToRad;
  Eigen::VectorXd vel = read_vec(lim.at("velocity_deg_s")) * kDegToRad;
  Eigen::VectorXd acc = read_vec(lim.at("acceleration_deg_s2")) * kDegToRad;

  Eigen::VectorXd q_min, q_max;
  if (lim.contains("position_min_deg")) {
    q_min = read_vec(lim.at("position_min_deg")) * kDegToRad;
    q_max = pos;
  } else {
    // Symmetric limits: position_deg holds the magnitudes.
    q_max = pos;
    q_min = -pos;
  }

  Pose base, tool;
  if (doc.contains("base")) {
    base = read_pose(doc.at("base"));
  }
  if (doc.contains("tool")) {
    tool = read_pose(doc.at("tool"));
  }

  return RobotModel(std::move(joints), std::move(capsules), std::move(q_min), std::move(q_max),
                    std::move(vel), std::move(acc), base, tool);
}

RobotModel load_robot_model(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open robot model file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_robot_model(ss.str());
}

}  // namespace hybridplan

#include "hybridplan/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hybridplan
{

namespace
{
constexpr double kDegToRad = M_PI / 180.0;

using nlohmann::json;

std::string read_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Converts a byte offset from nlohmann's parse_error into line/column.
std::string locate(const std::string& text, std::size_t byte)
{
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_document(const std::string& text, const std::string& path)
{
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path + ": parse error at " + locate(text, e.byte) + ": " + e.what());
  }
}

/// Applies "a.b.c=value" onto the document; the value text is parsed as JSON
/// when possible and treated as a string otherwise.
void apply_override(json& doc, const std::string& spec)
{
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    throw ScenarioError("override must have the form key.path=value: " + spec);
  }
  const std::string key = spec.substr(0, eq);
  const std::string value_text = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::parse_error&) {
    value = value_text;
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) {
      throw ScenarioError("empty key segment in override: " + spec);
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

Eigen::Vector3d get_vec3(const json& j)
{
  if (!j.is_array() || j.size() != 3) {
    throw ScenarioError("expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::VectorXd get_vec(const json& j)
{
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback)
{
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

MotionStyle parse_style(const std::string& s)
{
  if (s == "static") {
    return MotionStyle::kStatic;
  }
  if (s == "sinusoid") {
    return MotionStyle::kSinusoid;
  }
  if (s == "bounce") {
    return MotionStyle::kBounce;
  }
  if (s == "random_waypoint") {
    return MotionStyle::kRandomWaypoint;
  }
  throw ScenarioError("unknown motion style: " + s);
}

Obstacle parse_obstacle(const json& j, int index, double horizon)
{
  Obstacle obs;
  obs.id = get_or(j, "id", index);
  const auto& shape = j.at("shape");
  const std::string type = shape.at("type").get<std::string>();
  if (type == "sphere") {
    obs.shape = ShapeType::kSphere;
    obs.radius = shape.at("radius").get<double>();
  } else if (type == "box") {
    obs.shape = ShapeType::kBox;
    obs.half_extents = get_vec3(shape.at("half_extents"));
  } else {
    throw ScenarioError("unknown obstacle shape: " + type);
  }
  obs.initial_pose.translation = get_vec3(j.at("position"));
  if (j.contains("rpy_deg")) {
    const Eigen::Vector3d rpy = get_vec3(j.at("rpy_deg")) * kDegToRad;
    obs.initial_pose.rotation = rotation_xyz(rpy.x(), rpy.y(), rpy.z());
  }
  obs.pose = obs.initial_pose;

  if (j.contains("motion")) {
    const auto& m = j.at("motion");
    obs.motion.style = parse_style(get_or<std::string>(m, "style", "static"));
    if (m.contains("axis")) {
      obs.motion.axis = get_vec3(m.at("axis"));
    }
    obs.motion.amplitude = get_or(m, "amplitude_m", 0.0);
    obs.motion.speed = get_or(m, "speed_m_s", 0.0);
    obs.motion.phase = get_or(m, "phase_rad", 0.0);
    obs.motion.seed = get_or<std::uint64_t>(m, "seed", 0);
    if (obs.motion.style == MotionStyle::kRandomWaypoint) {
      obs.motion.schedule =
          build_waypoint_schedule(obs.initial_pose.translation, obs.motion, horizon);
    }
  }
  return obs;
}

Eigen::VectorXd default_link_weights(int n)
{
  Eigen::VectorXd w(n);
  if (n == 7) {
    w << 0.0, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0;
  } else {
    for (int i = 0; i < n; ++i) {
      w(i) = static_cast<double>(i);
    }
  }
  const double s = w.sum();
  return s > 0.0 ? Eigen::VectorXd(w / s) : Eigen::VectorXd::Constant(n, 1.0 / n);
}

json merged_document(const std::string& path, const std::vector<std::string>& overrides)
{
  json doc = parse_document(read_file(path), path);
  for (const auto& ov : overrides) {
    apply_override(doc, ov);
  }
  return doc;
}
}  // namespace

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides)
{
  const json doc = merged_document(path, overrides);
  Scenario sc;

  try {
    if (doc.contains("model") && doc.at("model").is_string()) {
      std::filesystem::path model_path = doc.at("model").get<std::string>();
      if (model_path.is_relative()) {
        model_path = std::filesystem::path(path).parent_path() / model_path;
      }
      sc.model = std::make_shared<RobotModel>(load_robot_model(model_path.string()));
    } else if (doc.contains("model")) {
      sc.model = std::make_shared<RobotModel>(parse_robot_model(doc.at("model").dump()));
    } else {
      throw ScenarioError("scenario is missing the robot model");
    }
    const int n = sc.model->joint_count();

    sc.q_start = get_vec(doc.at("q_start_deg")) * kDegToRad;
    sc.q_goal = get_vec(doc.at("q_goal_deg")) * kDegToRad;
    if (sc.q_start.size() != n || sc.q_goal.size() != n) {
      throw ScenarioError("start/goal configuration length does not match the model");
    }

    sc.control_rate = get_or(doc, "control_rate_hz", 100.0);
    sc.max_duration = get_or(doc, "max_duration_s", 60.0);
    if (!(sc.control_rate > 0.0) || !(sc.max_duration > 0.0)) {
      throw ScenarioError("control rate and max duration must be positive");
    }
    if (doc.contains("goal_tolerance")) {
      const auto& g = doc.at("goal_tolerance");
      sc.goal_tolerance_translation = get_or(g, "translation_m", 0.005);
      sc.goal_tolerance_rotation = get_or(g, "rotation_deg", 2.0) * kDegToRad;
    }
    const std::string kind = get_or<std::string>(doc, "planner", "hybrid");
    if (kind == "hybrid") {
      sc.planner = PlannerKind::kHybrid;
    } else if (kind == "vpf") {
      sc.planner = PlannerKind::kVpf;
    } else {
      throw ScenarioError("unknown planner kind: " + kind);
    }
    if (doc.contains("start_delay_s")) {
      const auto& d = doc.at("start_delay_s");
      sc.start_delay_min = get_or(d, "min", 0.0);
      sc.start_delay_max = get_or(d, "max", 2.0);
    }
    sc.seed = get_or<std::uint64_t>(doc, "seed", 1);
    sc.spline_samples_per_segment = get_or(doc, "spline_samples_per_segment", 8);

    const double horizon = sc.max_duration + sc.start_delay_max + 10.0;
    if (doc.contains("obstacles")) {
      int index = 0;
      for (const auto& oj : doc.at("obstacles")) {
        sc.obstacles.push_back(parse_obstacle(oj, index++, horizon));
      }
    }

    if (doc.contains("rrt")) {
      const auto& r = doc.at("rrt");
      sc.rrt.max_iterations = get_or(r, "max_iterations", sc.rrt.max_iterations);
      sc.rrt.step_size = get_or(r, "step_size_rad", sc.rrt.step_size);
      sc.rrt.rewire_gamma = get_or(r, "gamma", sc.rrt.rewire_gamma);
      sc.rrt.goal_bias = get_or(r, "goal_bias", sc.rrt.goal_bias);
      sc.rrt.goal_tolerance = get_or(r, "goal_tolerance_rad", sc.rrt.goal_tolerance);
      sc.rrt.weights.path = get_or(r, "weight_path", sc.rrt.weights.path);
      sc.rrt.weights.manipulability = get_or(r, "weight_manipulability", sc.rrt.weights.manipulability);
      sc.rrt.weights.obstacle = get_or(r, "weight_obstacle", sc.rrt.weights.obstacle);
    }
    sc.rrt.weights.length_scale = std::max(1e-9, (sc.q_goal - sc.q_start).norm());

    if (doc.contains("tracker")) {
      const auto& t = doc.at("tracker");
      sc.tracker.k_v = get_or(t, "k_v", sc.tracker.k_v);
      sc.tracker.s_base = get_or(t, "s_base", sc.tracker.s_base);
      sc.tracker.s_min = get_or(t, "s_min", sc.tracker.s_min);
      sc.tracker.s_max = get_or(t, "s_max", sc.tracker.s_max);
      sc.tracker.k_c = get_or(t, "k_c", -static_cast<double>(sc.tracker.s_base) / M_PI);
      sc.tracker.k_p = get_or(t, "k_p", sc.tracker.k_p);
      sc.tracker.k_d = get_or(t, "k_d", sc.tracker.k_d);
    } else {
      sc.tracker.k_c = -static_cast<double>(sc.tracker.s_base) / M_PI;
    }

    sc.vpf.link_weights = default_link_weights(n);
    if (doc.contains("vpf")) {
      const auto& f = doc.at("vpf");
      sc.vpf.k_att = get_or(f, "K_att", sc.vpf.k_att);
      sc.vpf.k_rep0 = get_or(f, "K_rep0", sc.vpf.k_rep0);
      sc.vpf.k_rep1 = get_or(f, "K_rep1", sc.vpf.k_rep1);
      sc.vpf.k_rep2 = get_or(f, "K_rep2", sc.vpf.k_rep2);
      sc.vpf.d_min = get_or(f, "d_min", sc.vpf.d_min);
      sc.vpf.d_max = get_or(f, "d_max", sc.vpf.d_max);
      sc.vpf.alpha = get_or(f, "alpha", sc.vpf.alpha);
      sc.vpf.beta = get_or(f, "beta", sc.vpf.beta);
      sc.vpf.gamma1 = get_or(f, "gamma1", sc.vpf.gamma1);
      sc.vpf.gamma2 = get_or(f, "gamma2", sc.vpf.gamma2);
      sc.vpf.zeta = get_or(f, "zeta", sc.vpf.zeta);
      sc.vpf.omega1 = get_or(f, "omega1", sc.vpf.omega1);
      sc.vpf.omega2 = get_or(f, "omega2", sc.vpf.omega2);
      sc.vpf.v_def = get_or(f, "v_def", sc.vpf.v_def);
      sc.vpf.trap_ratio = get_or(f, "trap_ratio", sc.vpf.trap_ratio);
      sc.vpf.trap_angle = get_or(f, "trap_angle_deg", sc.vpf.trap_angle / kDegToRad) * kDegToRad;
      if (f.contains("link_weights")) {
        sc.vpf.link_weights = get_vec(f.at("link_weights"));
      }
    }
    sc.vpf.normalize_weights();
    sc.vpf.validate(n);

    if (doc.contains("command")) {
      const auto& c = doc.at("command");
      sc.command.epsilon = get_or(c, "epsilon", sc.command.epsilon);
      sc.command.lambda_max = get_or(c, "lambda_max", sc.command.lambda_max);
      sc.command.alpha_null = get_or(c, "alpha_null", sc.command.alpha_null);
      sc.command.k_m = get_or(c, "k_m", sc.command.k_m);
      sc.command.hysteresis = get_or(c, "hysteresis", sc.command.hysteresis);
    }
    sc.command.dt = sc.dt();
    // The switching threshold is the repulsive field range unless overridden.
    sc.command.d_max = sc.vpf.d_max;
    if (doc.contains("command") && doc.at("command").contains("d_max")) {
      sc.command.d_max = doc.at("command").at("d_max").get<double>();
    }

    const int sv = sc.model->limit_violation(sc.q_start);
    if (sv >= 0) {
      throw ScenarioError("q_start joint " + std::to_string(sv + 1) + " is outside its limits");
    }
    const int gv = sc.model->limit_violation(sc.q_goal);
    if (gv >= 0) {
      throw ScenarioError("q_goal joint " + std::to_string(gv + 1) + " is outside its limits");
    }
  } catch (const json::exception& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  return sc;
}

std::string effective_scenario_json(const std::string& path,
                                    const std::vector<std::string>& overrides)
{
  return merged_document(path, overrides).dump(2) + "\n";
}

}  // namespace hybridplan

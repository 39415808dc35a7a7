#include "hybridplan/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hybridplan
{

std::string format_double(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_timed_path_csv(const std::string& path, const TimedPath& timed)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  const int n = timed.configs.empty() ? 0 : static_cast<int>(timed.configs.front().size());
  out << "t";
  for (int j = 1; j <= n; ++j) {
    out << ",q" << j;
  }
  out << "\n";
  for (std::size_t k = 0; k < timed.configs.size(); ++k) {
    out << format_double(static_cast<double>(k) * timed.dt);
    for (int j = 0; j < n; ++j) {
      out << "," << format_double(timed.configs[k](j));
    }
    out << "\n";
  }
}

namespace
{
std::vector<std::string> split_csv(const std::string& line)
{
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  return fields;
}
}  // namespace

TimedPath read_timed_path_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty path file: " + path);
  }
  const int n = static_cast<int>(split_csv(line).size()) - 1;
  if (n < 1) {
    throw std::runtime_error("malformed path header in " + path);
  }
  TimedPath timed;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != n + 1) {
      throw std::runtime_error("malformed path row in " + path);
    }
    times.push_back(std::stod(fields[0]));
    JointConfig q(n);
    for (int j = 0; j < n; ++j) {
      q(j) = std::stod(fields[static_cast<std::size_t>(j + 1)]);
    }
    timed.configs.push_back(q);
  }
  if (times.size() >= 2) {
    timed.dt = times[1] - times[0];
  }
  return timed;
}

StepCsvWriter::StepCsvWriter(const std::string& path, int joint_count)
    : out_(std::make_shared<std::ofstream>(path))
{
  if (!*out_) {
    throw std::runtime_error("cannot write " + path);
  }
  *out_ << "t";
  for (int j = 1; j <= joint_count; ++j) {
    *out_ << ",q" << j;
  }
  for (int j = 1; j <= joint_count; ++j) {
    *out_ << ",qd" << j;
  }
  *out_ << ",mode,lambda,min_dist\n";
}

void StepCsvWriter::operator()(const StepRecord& r)
{
  *out_ << format_double(r.t);
  for (int j = 0; j < r.q.size(); ++j) {
    *out_ << "," << format_double(r.q(j));
  }
  for (int j = 0; j < r.qd.size(); ++j) {
    *out_ << "," << format_double(r.qd(j));
  }
  *out_ << "," << (r.mode == ControlMode::kTracking ? "tracking" : "avoidance") << ","
        << format_double(r.lambda) << "," << format_double(r.min_dist) << "\n";
}

std::string metrics_csv_header()
{
  return "seed,planner,reached,collided,min_dist,time,avg_manip,dls_count,mobility_ratio";
}

std::string metrics_csv_row(std::uint64_t seed, PlannerKind planner, const TrialMetrics& m)
{
  std::ostringstream os;
  os << seed << "," << (planner == PlannerKind::kHybrid ? "hybrid" : "vpf") << ","
     << (m.reached_goal ? 1 : 0) << "," << (m.collided ? 1 : 0) << ","
     << format_double(m.min_obstacle_distance) << "," << format_double(m.completion_time) << ","
     << format_double(m.avg_manipulability) << "," << m.dls_count << ","
     << format_double(m.avg_mobility_ratio);
  return os.str();
}

void write_metrics_csv(const std::string& path, const ComparisonReport& report)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << metrics_csv_header() << "\n";
  for (const auto& row : report.rows) {
    out << metrics_csv_row(row.seed, row.planner, row.metrics) << "\n";
  }
}

namespace
{
double json_safe(double x)
{
  if (std::isfinite(x)) {
    return x;
  }
  return x > 0 ? std::numeric_limits<double>::max() : std::numeric_limits<double>::lowest();
}
}  // namespace

void write_comparison_json(const std::string& path, const ComparisonReport& report)
{
  nlohmann::json doc;
  doc["pairs_total"] = report.pairs_total;
  doc["pairs_excluded"] = report.pairs_excluded;
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& m : report.metrics) {
    metrics[m.name] = {{"mean_a", json_safe(m.mean_hybrid)},
                       {"mean_b", json_safe(m.mean_vpf)},
                       {"t", json_safe(m.t)},
                       {"p", m.p},
                       {"significant", m.significant}};
  }
  doc["metrics"] = metrics;
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << doc.dump(2) << "\n";
}

void write_histograms_csv(const std::string& path, const ComparisonReport& report, int bins)
{
  struct Getter
  {
    const char* name;
    double (*get)(const TrialMetrics&);
  };
  const Getter getters[] = {
      {"min_obstacle_distance", [](const TrialMetrics& m) { return m.min_obstacle_distance; }},
      {"completion_time", [](const TrialMetrics& m) { return m.completion_time; }},
      {"avg_manipulability", [](const TrialMetrics& m) { return m.avg_manipulability; }},
      {"dls_count", [](const TrialMetrics& m) { return static_cast<double>(m.dls_count); }},
      {"avg_mobility_ratio", [](const TrialMetrics& m) { return m.avg_mobility_ratio; }},
  };

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << "metric,bin_lo,bin_hi,count_hybrid,count_vpf\n";
  for (const auto& g : getters) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : report.rows) {
      const double x = g.get(row.metrics);
      if (std::isfinite(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (!(lo <= hi)) {
      continue;
    }
    const double width = hi > lo ? (hi - lo) / bins : 1.0;
    for (int b = 0; b < bins; ++b) {
      const double blo = lo + b * width;
      const double bhi = b + 1 == bins ? hi : lo + (b + 1) * width;
      int count_h = 0, count_v = 0;
      for (const auto& row : report.rows) {
        const double x = g.get(row.metrics);
        if (!std::isfinite(x)) {
          continue;
        }
        const bool inside = b + 1 == bins ? (x >= blo && x <= bhi) : (x >= blo && x < bhi);
        if (inside) {
          (row.planner == PlannerKind::kHybrid ? count_h : count_v) += 1;
        }
      }
      out << g.name << "," << format_double(blo) << "," << format_double(bhi) << "," << count_h
          << "," << count_v << "\n";
    }
  }
}

}  // namespace hybridplan

#ifndef HYBRIDPLAN_IO_HPP_
#define HYBRIDPLAN_IO_HPP_

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "hybridplan/simulator.hpp"

namespace hybridplan
{

/// Shortest round-trippable decimal form ("%.17g"); used everywhere so reruns
/// are byte-identical.
std::string format_double(double x);

void write_timed_path_csv(const std::string& path, const TimedPath& timed);
TimedPath read_timed_path_csv(const std::string& path);

/// Streams step records as `t,q1..qn,qd1..qdn,mode,lambda,min_dist`.
class StepCsvWriter
{
public:
  StepCsvWriter(const std::string& path, int joint_count);
  void operator()(const StepRecord& r);

private:
  std::shared_ptr<std::ofstream> out_;
};

std::string metrics_csv_header();
std::string metrics_csv_row(std::uint64_t seed, PlannerKind planner, const TrialMetrics& m);

void write_metrics_csv(const std::string& path, const ComparisonReport& report);
void write_comparison_json(const std::string& path, const ComparisonReport& report);

/// Plot-ready per-metric histogram bins (shared bins, one count column per
/// planner).
void write_histograms_csv(const std::string& path, const ComparisonReport& report, int bins = 10);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_IO_HPP_

#ifndef HYBRIDPLAN_STATS_HPP_
#define HYBRIDPLAN_STATS_HPP_

#include <vector>

namespace hybridplan
{

/// Regularized incomplete beta function I_x(a, b), evaluated by the
/// continued-fraction expansion (modified Lentz), |error| <= 1e-8.
double incomplete_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct TTestResult
{
  double t = 0.0;
  double p = 1.0;
};

/// Paired t-test on per-index differences a[i] - b[i]. Degenerate
/// zero-variance samples follow the fixed convention: nonzero mean gives
/// p = 0, zero mean gives t = 0 and p = 1.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

double mean(const std::vector<double>& v);

}  // namespace hybridplan

#endif  // HYBRIDPLAN_STATS_HPP_

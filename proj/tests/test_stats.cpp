#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hybridplan/stats.hpp"

using namespace hybridplan;

TEST_CASE("incomplete beta reference values")
{
  // Frozen from mpmath.betainc (regularized, 30 digits).
  CHECK(incomplete_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-10));
  CHECK(incomplete_beta(1.5, 0.5, 0.9) ==
        doctest::Approx(0.604181303590592188).epsilon(1e-8));
  CHECK(incomplete_beta(5.0, 5.0, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(incomplete_beta(3.0, 0.5, 0.99) ==
        doctest::Approx(0.813746249999999918).epsilon(1e-8));
  CHECK(incomplete_beta(1.0, 1.0, 0.25) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("student t two-sided p reference values")
{
  // Frozen from scipy.stats.t.sf(|t|, df) * 2.
  CHECK(student_t_two_sided_p(2.0, 10.0) ==
        doctest::Approx(0.07338803477074039).epsilon(1e-8));
  CHECK(student_t_two_sided_p(-2.0, 10.0) ==
        doctest::Approx(0.07338803477074039).epsilon(1e-8));
  CHECK(student_t_two_sided_p(0.0, 5.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(student_t_two_sided_p(12.0, 3.0) ==
        doctest::Approx(0.001245015800789336).epsilon(1e-6));
}

TEST_CASE("paired t-test")
{
  SUBCASE("identical samples")
  {
    const TTestResult r = paired_t_test({1, 2, 3}, {1, 2, 3});
    CHECK(r.t == 0.0);
    CHECK(r.p == 1.0);
  }

  SUBCASE("zero variance, nonzero mean")
  {
    const TTestResult r = paired_t_test({2, 3, 4, 5}, {1, 2, 3, 4});
    CHECK(r.p == 0.0);
    CHECK(std::isinf(r.t));
    CHECK(r.t > 0.0);
  }

  SUBCASE("reference computation")
  {
    // Frozen from scipy.stats.ttest_rel.
    const TTestResult r = paired_t_test({2.1, 1.9, 2.0, 2.2}, {1.0, 1.1, 0.9, 1.0});
    CHECK(r.t == doctest::Approx(12.12435565298213).epsilon(1e-9));
    CHECK(r.p == doctest::Approx(0.0012077024702717117).epsilon(1e-6));
  }

  SUBCASE("argument validation")
  {
    CHECK_THROWS_AS(paired_t_test({1, 2}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(paired_t_test({1}, {1}), std::invalid_argument);
  }
}

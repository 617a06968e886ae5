#include <doctest.h>

#include <cmath>

#include "blockdbg/analytics/stats.hpp"
#include "blockdbg/core/error.hpp"
#include "oracles.hpp"

using namespace blockdbg;
using namespace blockdbg::analytics;

namespace {

ContingencyTable2x2 t(int a, int b, int c, int d) { return {a, b, c, d}; }

}  // namespace

TEST_CASE("independent oracles agree with scipy reference values") {
  // scipy.stats.chi2_contingency(correction=True) and fisher_exact.
  CHECK(testing::yates_statistic(10, 5, 0, 5) == doctest::Approx(4.266666667).epsilon(1e-9));
  CHECK(testing::chi2_1df_tail_quadrature(testing::yates_statistic(10, 5, 0, 5)) ==
        doctest::Approx(0.038867103812).epsilon(1e-9));
  CHECK(testing::chi2_1df_tail_quadrature(testing::yates_statistic(0, 6, 10, 4)) ==
        doctest::Approx(0.0146974218).epsilon(1e-8));
  CHECK(testing::fisher_two_sided_exact(10, 5, 0, 5) == doctest::Approx(0.0325077399).epsilon(1e-9));
  CHECK(testing::fisher_two_sided_exact(0, 6, 10, 4) == doctest::Approx(0.0108359133).epsilon(1e-9));
  CHECK(testing::choose(24, 12) == 2704156);
}

TEST_CASE("chi-squared with Yates correction") {
  TestResult r = chi_squared_yates(t(10, 5, 0, 5));
  REQUIRE(r.statistic.has_value());
  CHECK(*r.statistic == doctest::Approx(4.2666667).epsilon(1e-7));
  CHECK(std::fabs(r.p_value - 0.038867104) <= 5e-6);
  CHECK(r.significant);
  CHECK(r.method == TestMethod::kChiSquaredYates);

  TestResult none = chi_squared_yates(t(5, 5, 5, 5));
  CHECK(*none.statistic == 0);
  CHECK(none.p_value == 1);
  CHECK_FALSE(none.significant);

  TestResult cont = chi_squared_yates(t(0, 6, 10, 4));
  CHECK(cont.p_value == doctest::Approx(0.0146974218).epsilon(1e-8));

  // The clamp: |ad - bc| < n/2 gives a zero statistic, never a negative one.
  CHECK(*chi_squared_yates(t(3, 2, 2, 3)).statistic == 0);
}

TEST_CASE("chi-squared tail function") {
  CHECK(chi_squared_1df_upper_tail(0) == 1);
  CHECK(chi_squared_1df_upper_tail(3.841458820694124) == doctest::Approx(0.05).epsilon(1e-10));
  for (double x : {0.01, 0.5, 1.0, 2.7, 6.6, 10.0, 20.0}) {
    CAPTURE(x);
    CHECK(chi_squared_1df_upper_tail(x) == doctest::Approx(testing::chi2_1df_tail_quadrature(x)).epsilon(1e-9));
  }
}

TEST_CASE("Fisher exact") {
  CHECK(fisher_exact(t(10, 5, 0, 5)).p_value == doctest::Approx(0.0325077399).epsilon(1e-9));
  CHECK(fisher_exact(t(5, 5, 5, 5)).p_value == doctest::Approx(1.0));
  CHECK(fisher_exact(t(0, 6, 10, 4)).p_value == doctest::Approx(0.0108359133).epsilon(1e-9));
  CHECK_FALSE(fisher_exact(t(10, 5, 0, 5)).statistic.has_value());
  CHECK(fisher_exact(t(10, 5, 0, 5), 0.01).significant == false);
}

TEST_CASE("Fisher matches exact enumeration on small tables") {
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b)
      for (int c = 0; c <= 6; ++c)
        for (int d = 0; d <= 6; ++d) {
          if (a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0) continue;
          const double want = testing::fisher_two_sided_exact(a, b, c, d);
          const double got = fisher_exact(t(a, b, c, d)).p_value;
          REQUIRE(std::fabs(got - want) <= 1e-9 * want);
        }
}

TEST_CASE("zero margins are degenerate") {
  for (auto table : {t(0, 0, 3, 4), t(3, 0, 4, 0), t(0, 0, 0, 0)}) {
    try {
      chi_squared_yates(table);
      FAIL("expected degenerate margin");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDegenerateMargin);
    }
    CHECK_THROWS_AS(fisher_exact(table), Error);
  }
}

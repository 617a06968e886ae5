#include "blockdbg/analytics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "blockdbg/core/error.hpp"

namespace blockdbg::analytics {
namespace {

void require_margins(const ContingencyTable2x2& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) {
    throw Error(ErrorKind::kDegenerateMargin, "negative cell count");
  }
  if (t.a + t.b == 0 || t.c + t.d == 0 || t.a + t.c == 0 || t.b + t.d == 0) {
    throw Error(ErrorKind::kDegenerateMargin,
                "a row or column total is zero; the test is undefined for this table");
  }
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

TestResult finish(TestMethod method, std::optional<double> statistic, double p, double alpha) {
  p = std::clamp(p, 0.0, 1.0);
  return TestResult{method, statistic, p, alpha, p < alpha};
}

}  // namespace

std::string_view method_name(TestMethod method) {
  return method == TestMethod::kChiSquaredYates ? "chi_squared_yates" : "fisher_exact";
}

double chi_squared_1df_upper_tail(double x) {
  if (x <= 0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

TestResult chi_squared_yates(const ContingencyTable2x2& t, double alpha) {
  require_margins(t);
  const double n = t.total();
  const double rows[2] = {static_cast<double>(t.a + t.b), static_cast<double>(t.c + t.d)};
  const double cols[2] = {static_cast<double>(t.a + t.c), static_cast<double>(t.b + t.d)};
  const double observed[2][2] = {{double(t.a), double(t.b)}, {double(t.c), double(t.d)}};
  double statistic = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double expected = rows[i] * cols[j] / n;
      double diff = std::max(0.0, std::fabs(observed[i][j] - expected) - 0.5);
      statistic += diff * diff / expected;
    }
  }
  return finish(TestMethod::kChiSquaredYates, statistic, chi_squared_1df_upper_tail(statistic), alpha);
}

TestResult fisher_exact(const ContingencyTable2x2& t, double alpha) {
  require_margins(t);
  const int row1 = t.a + t.b;
  const int row2 = t.c + t.d;
  const int col1 = t.a + t.c;
  const int n = t.total();
  const int lo = std::max(0, col1 - row2);
  const int hi = std::min(row1, col1);

  // Hypergeometric distribution of the top-left cell given all margins.
  const double log_denominator = log_choose(n, col1);
  std::vector<double> prob(static_cast<std::size_t>(hi - lo + 1));
  for (int x = lo; x <= hi; ++x) {
    prob[x - lo] = std::exp(log_choose(row1, x) + log_choose(row2, col1 - x) - log_denominator);
  }
  const double observed = prob[t.a - lo];
  const double threshold = observed * (1.0 + 1e-7);
  double p = 0;
  for (double q : prob) {
    if (q <= threshold) p += q;
  }
  return finish(TestMethod::kFisherExact, std::nullopt, p, alpha);
}

}  // namespace blockdbg::analytics

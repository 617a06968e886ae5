#pragma once

#include <optional>
#include <string_view>

#include "blockdbg/analytics/usage.hpp"

namespace blockdbg::analytics {

inline constexpr double kDefaultAlpha = 0.05;

enum class TestMethod { kChiSquaredYates, kFisherExact };
std::string_view method_name(TestMethod method);

struct TestResult {
  TestMethod method = TestMethod::kChiSquaredYates;
  std::optional<double> statistic;  // chi-squared only
  double p_value = 1.0;
  double alpha = kDefaultAlpha;
  bool significant = false;  // p_value < alpha
};

// Upper tail P(X > x) of the chi-squared distribution with one degree of
// freedom.
double chi_squared_1df_upper_tail(double x);

// Pearson chi-squared with Yates' continuity correction. The 0.5 correction
// is clamped so a cell with |observed - expected| < 0.5 contributes zero.
// Throws Error{kDegenerateMargin} when a row or column total is zero.
TestResult chi_squared_yates(const ContingencyTable2x2& table, double alpha = kDefaultAlpha);

// Two-sided Fisher exact test: the sum of hypergeometric probabilities of
// every table with the observed margins that is no more likely than the
// observed one (relative tolerance 1e-7). Throws Error{kDegenerateMargin}.
TestResult fisher_exact(const ContingencyTable2x2& table, double alpha = kDefaultAlpha);

}  // namespace blockdbg::analytics

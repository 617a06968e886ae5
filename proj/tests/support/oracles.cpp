#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blockdbg::testing {

std::uint64_t choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  // r * (n - k + i) / i stays integral at every step.
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

double fisher_two_sided_exact(int a, int b, int c, int d) {
  const int r1 = a + b, r2 = c + d, c1 = a + c, n = a + b + c + d;
  if (n > 60) throw std::invalid_argument("table too large for exact oracle");
  const int lo = std::max(0, c1 - r2), hi = std::min(r1, c1);
  const std::uint64_t observed = choose(r1, a) * choose(r2, c1 - a);
  std::uint64_t tail = 0;
  for (int x = lo; x <= hi; ++x) {
    const std::uint64_t w = choose(r1, x) * choose(r2, c1 - x);
    if (w <= observed) tail += w;
  }
  return static_cast<double>(tail) / static_cast<double>(choose(n, c1));
}

double yates_statistic(int a, int b, int c, int d) {
  const double n = a + b + c + d;
  const double diff = std::max(std::fabs(double(a) * d - double(b) * c) - n / 2, 0.0);
  const double denom = double(a + b) * (c + d) * (a + c) * (b + d);
  return n * diff * diff / denom;
}

double chi2_1df_tail_quadrature(double x) {
  if (x <= 0) return 1.0;
  const double z = std::sqrt(x);
  const int steps = 200000;  // even
  const double h = z / steps;
  const double kInvSqrt2Pi = 0.39894228040143267794;
  auto pdf = [&](double t) { return kInvSqrt2Pi * std::exp(-t * t / 2); };
  double sum = pdf(0) + pdf(z);
  for (int i = 1; i < steps; ++i) sum += pdf(i * h) * (i % 2 ? 4 : 2);
  return 1.0 - 2.0 * sum * h / 3.0;
}

}  // namespace blockdbg::testing

#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace ralab {

inline constexpr double kLn10 = 2.302585092994045684;

/// ln(e^a + e^b) without overflow; -inf acts as the zero element.
inline double log_add_exp(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// ln(e^a - e^b) for a >= b.
inline double log_sub_exp(double a, double b) noexcept {
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(-std::exp(b - a));
}

inline double log_factorial(double k) noexcept { return std::lgamma(k + 1.0); }

inline double log_binomial(double n, double k) noexcept {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace ralab

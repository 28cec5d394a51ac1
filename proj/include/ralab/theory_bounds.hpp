#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ralab/log_math.hpp"

namespace ralab {

/// A positive quantity stored as log10 so that bounds like alpha^(d+2) e^(n/alpha)
/// survive at any scale. `linear()` is +inf when the value exceeds double range.
struct Magnitude {
  double log10 = 0.0;

  static Magnitude from_linear(double value) { return {std::log10(value)}; }
  static Magnitude from_ln(double ln_value) { return {ln_value / kLn10}; }
  double ln() const noexcept { return log10 * kLn10; }
  double linear() const noexcept { return std::pow(10.0, log10); }

  friend Magnitude operator*(Magnitude a, Magnitude b) { return {a.log10 + b.log10}; }
  friend Magnitude operator+(Magnitude a, Magnitude b) { return from_ln(log_add_exp(a.ln(), b.ln())); }
  friend bool operator<=(Magnitude a, Magnitude b) { return a.log10 <= b.log10; }
};

enum class HypothesisStatus { Holds, Violated, Asymptotic };

std::string to_string(HypothesisStatus status);

struct Hypothesis {
  std::string statement;
  HypothesisStatus status;
};

/// Numeric value of a runtime bound, with every hypothesis of the underlying
/// statement and whether it can be checked at the queried finite parameters.
/// Asymptotic factors (1 +- o(1)), O(alpha/n) are dropped from the numbers;
/// `asymptotic_slack` is set whenever that happened.
struct BoundReport {
  std::string name;
  std::optional<Magnitude> lower;
  std::optional<Magnitude> upper;
  Magnitude main_term;
  std::vector<Hypothesis> validity;
  bool asymptotic_slack = false;
  std::vector<std::pair<std::string, double>> derived;
  std::string notes;

  std::optional<double> derived_value(const std::string& key) const;
};

/// n ln n + [alpha <= n] alpha e^(n/alpha).
BoundReport onemax_ma_bound(std::size_t n, double alpha);

/// Time to reach distance k = ceil(n/(alpha+1)):
/// upper alpha/(alpha+1) n (ln n + 1), lower n ln(n/k).
BoundReport posdrift_bounds(std::size_t n, double alpha);

/// E_1^+ = n sum_{i<ell} (n/alpha)^i/(i+1)! + (n/alpha)^ell / ell! * E_{ell+1}.
Magnitude e1_expansion(std::size_t n, double alpha, std::size_t ell, Magnitude e_ell_plus_1);

/// upper alpha e^(n/alpha) (tightened to 2n when alpha >= 2n);
/// lower (1 - 2 e^(-2n/(3 alpha))) alpha e^(n/alpha) when that factor is positive.
BoundReport e1_bounds(std::size_t n, double alpha);

/// Metropolis on Cliff. Picks the regime from k* = n/(alpha+1) against m+1.
/// Derived fields: k_star, beta_hat, part, and (regime 1) E_m-1 sandwich.
/// Throws std::invalid_argument outside 0 < d < m-1 < n-1, d >= 1, alpha > 1.
BoundReport cliff_ma_bounds(std::size_t n, std::size_t m, double d, double alpha);

/// (1+1) EA on Cliff with rate p; D = floor(d) + 2:
/// p^-1 (1-p)^-(n-1) (1 + ln n) + C(m, D)^-1 p^-D (1-p)^-(n-D).
BoundReport cliff_ea_bound(std::size_t n, std::size_t m, double d, double p);

struct OptimalParameters {
  std::optional<double> alpha_star_case1_exact;
  std::optional<double> alpha_star_case1_asym;
  std::optional<double> alpha_star_case2;
  std::optional<double> p_star;
  std::vector<std::string> notes;
};

OptimalParameters optimal_parameters(std::size_t n, std::size_t m, double d);

}  // namespace ralab

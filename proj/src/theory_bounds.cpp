#include "ralab/theory_bounds.hpp"

#include <limits>
#include <numbers>
#include <stdexcept>

#include "ralab/benchmarks.hpp"

namespace ralab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

Hypothesis checked(std::string statement, bool holds) {
  return {std::move(statement), holds ? HypothesisStatus::Holds : HypothesisStatus::Violated};
}

Hypothesis asymptotic(std::string statement) { return {std::move(statement), HypothesisStatus::Asymptotic}; }

}  // namespace

std::string to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::Holds: return "holds";
    case HypothesisStatus::Violated: return "violated";
    case HypothesisStatus::Asymptotic: return "asymptotic, not checkable";
  }
  return "?";
}

std::optional<double> BoundReport::derived_value(const std::string& key) const {
  for (const auto& [name, value] : derived) {
    if (name == key) return value;
  }
  return std::nullopt;
}

BoundReport onemax_ma_bound(std::size_t n, double alpha) {
  require(n >= 2, "onemax-ma bound requires n >= 2");
  require(alpha > 1.0, "alpha must be > 1");
  const double nn = static_cast<double>(n);
  const double ln_climb = std::log(nn) + std::log(std::log(nn));
  const bool indicator = alpha <= nn;
  const double ln_exp_term = indicator ? std::log(alpha) + nn / alpha : kNegInf;

  BoundReport r;
  r.name = "onemax-ma";
  r.main_term = Magnitude::from_ln(log_add_exp(ln_climb, ln_exp_term));
  r.asymptotic_slack = true;
  r.validity = {checked("n >= 2", true), asymptotic("alpha = omega(sqrt(n))")};
  r.derived = {{"indicator_alpha_le_n", indicator ? 1.0 : 0.0},
               {"n_ln_n", nn * std::log(nn)},
               {"alpha_exp_term_log10", ln_exp_term / kLn10}};
  r.notes = "E[T] = (1 +- o(1)) n ln n + [alpha <= n] (1 +- o(1)) alpha e^(n/alpha); o(1) factors dropped";
  return r;
}

BoundReport posdrift_bounds(std::size_t n, double alpha) {
  require(n >= 2, "posdrift bound requires n >= 2");
  require(alpha > 1.0, "alpha must be > 1");
  const double nn = static_cast<double>(n);
  const double factor = std::isinf(alpha) ? 1.0 : alpha / (alpha + 1.0);
  const double k_star = std::isinf(alpha) ? 0.0 : nn / (alpha + 1.0);
  const double k = std::ceil(k_star);

  BoundReport r;
  r.name = "posdrift";
  r.upper = Magnitude::from_linear(factor * nn * (std::log(nn) + 1.0));
  r.main_term = *r.upper;
  r.validity = {checked("n >= 2", true), asymptotic("k = o(n) (lower bound only)")};
  if (k >= 1.0) {
    r.lower = Magnitude::from_linear(nn * std::log(nn / k));
    r.asymptotic_slack = true;
  } else {
    r.notes = "k = 0 for alpha = inf: the lower bound n ln(n/k) is undefined and omitted. ";
  }
  r.derived = {{"k_star", k_star}, {"k", k}};
  r.notes += "upper bound is non-asymptotic; lower bound carries a dropped (1 - o(1)) factor";
  return r;
}

Magnitude e1_expansion(std::size_t n, double alpha, std::size_t ell, Magnitude e_ell_plus_1) {
  require(ell >= 1, "e1_expansion requires ell >= 1");
  require(alpha >= 1.0, "e1_expansion requires alpha >= 1");
  const double nn = static_cast<double>(n);
  const double ln_ratio = std::isinf(alpha) ? kNegInf : std::log(nn / alpha);
  const auto ln_power = [&](std::size_t i) { return i == 0 ? 0.0 : static_cast<double>(i) * ln_ratio; };

  double ln_total = kNegInf;
  for (std::size_t i = 0; i < ell; ++i) {
    ln_total = log_add_exp(ln_total, std::log(nn) + ln_power(i) - log_factorial(static_cast<double>(i + 1)));
  }
  ln_total = log_add_exp(ln_total, ln_power(ell) - log_factorial(static_cast<double>(ell)) + e_ell_plus_1.ln());
  return Magnitude::from_ln(ln_total);
}

BoundReport e1_bounds(std::size_t n, double alpha) {
  require(n >= 1, "e1 bounds require n >= 1");
  require(alpha > 1.0, "alpha must be > 1");
  const double nn = static_cast<double>(n);
  const double ln_main = std::isinf(alpha) ? std::numeric_limits<double>::infinity() : std::log(alpha) + nn / alpha;
  const bool large_alpha = alpha >= 2.0 * nn;

  BoundReport r;
  r.name = "e1";
  r.main_term = Magnitude::from_ln(ln_main);
  double ln_upper = ln_main;
  if (large_alpha) ln_upper = std::min(ln_upper, std::log(2.0 * nn));
  r.upper = Magnitude::from_ln(ln_upper);
  const double factor = std::isinf(alpha) ? -1.0 : 1.0 - 2.0 * std::exp(-2.0 * nn / (3.0 * alpha));
  if (factor > 0.0) {
    r.lower = Magnitude::from_ln(std::log(factor) + ln_main);
  } else {
    r.notes = "lower-bound factor 1 - 2e^(-2n/(3alpha)) is not positive here; lower bound omitted. ";
  }
  r.asymptotic_slack = true;
  r.validity = {asymptotic("alpha = omega(sqrt(n))"), checked("alpha >= 2n (for E_1 <= 2n)", large_alpha)};
  r.derived = {{"alpha_exp_term_log10", ln_main / kLn10}, {"two_n", 2.0 * nn}};
  r.notes += "upper alpha e^(n/alpha) is stated without slack; the lower bound drops an o(1) term";
  return r;
}

BoundReport cliff_ma_bounds(std::size_t n, std::size_t m, double d, double alpha) {
  (void)ProblemInstance::cliff(n, m, d);
  require(d >= 1.0, "cliff-ma bounds require d >= 1");
  require(alpha > 1.0 && std::isfinite(alpha), "cliff-ma bounds require a finite alpha > 1");

  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double k_star = nn / (alpha + 1.0);
  const double beta_hat = 2.5 / (1.0 + 2.5 / alpha) * (nn / alpha);
  const bool part_one = k_star < mm + 1.0;

  BoundReport r;
  r.name = "cliff-ma";
  r.asymptotic_slack = true;
  r.validity = {asymptotic("alpha = omega(sqrt(n))"), asymptotic("m = o(sqrt(n))"), checked("d >= 1", true)};
  r.derived = {{"k_star", k_star}, {"beta_hat", beta_hat}, {"part", part_one ? 1.0 : 2.0}};

  if (part_one) {
    r.validity.push_back(checked("k* < m + 1 (regime 1)", true));
    const double ln_base = 2.0 * std::log(nn) + (d - 1.0) * std::log(alpha) - std::log(mm) - std::log(mm - 1.0);
    const double ln_e_lo = ln_base + std::log(alpha + nn / (mm + 1.0));
    const double drift_denominator = ((mm + 1.0) * (alpha + 1.0) - nn) / alpha;
    const double ln_e_hi = ln_base + std::log(alpha + nn / drift_denominator);
    const double ln_f = (mm - 2.0) * std::log(nn / alpha) - log_factorial(mm - 2.0);
    const bool near_cliff = mm - 2.0 <= beta_hat;
    const double constant = near_cliff ? 1.0 : 5.0 / 3.0;
    r.validity.push_back(checked("m - 2 <= beta_hat (selects constant 1, else 5/3)", near_cliff));

    r.lower = Magnitude::from_ln(log_add_exp(ln_f, 0.0) + ln_e_lo);
    r.upper = Magnitude::from_ln(log_add_exp(ln_f, std::log(constant)) + ln_e_hi);
    r.main_term = *r.lower;
    r.derived.emplace_back("E_m_minus_1_lower_log10", ln_e_lo / kLn10);
    r.derived.emplace_back("E_m_minus_1_upper_log10", ln_e_hi / kLn10);
    r.derived.emplace_back("valley_factor_log10", ln_f / kLn10);
    r.derived.emplace_back("upper_constant", constant);
    r.notes = "regime 1: bounds ((n/alpha)^(m-2)/(m-2)! + c) E_{m-1} with the E_{m-1} sandwich substituted";
  } else {
    r.validity.push_back(checked("m + 1 <= k* (regime 2)", true));
    const double ln_upper = (d + 2.0) * std::log(alpha) + nn / alpha;
    const double ln_lower = ln_upper - 0.5 * std::log(2.0 * std::numbers::pi) - alpha / (12.0 * nn) -
                            0.5 * std::log(nn / alpha);
    r.lower = Magnitude::from_ln(ln_lower);
    r.upper = Magnitude::from_ln(ln_upper);
    r.main_term = *r.upper;
    r.notes = "regime 2: alpha^(d+2) e^(n/alpha) / (sqrt(2 pi) e^(alpha/(12n)) sqrt(n/alpha)) .. alpha^(d+2) e^(n/alpha)";
  }
  return r;
}

BoundReport cliff_ea_bound(std::size_t n, std::size_t m, double d, double p) {
  (void)ProblemInstance::cliff(n, m, d);
  require(d >= 1.0, "cliff-ea bound requires d >= 1");
  require(p > 0.0 && p < 0.5, "cliff-ea bound requires 0 < p < 1/2");

  const double nn = static_cast<double>(n);
  const double jump = std::floor(d) + 2.0;
  const double ln_q = std::log1p(-p);
  const double ln_choose = log_binomial(static_cast<double>(m), jump);
  const double ln_term1 = -std::log(p) - (nn - 1.0) * ln_q + std::log(1.0 + std::log(nn));
  const double ln_term2 = -ln_choose - jump * std::log(p) - (nn - jump) * ln_q;
  const double lambda = p * nn;
  const double ln_simplified = lambda - jump * std::log(lambda) - ln_choose + jump * std::log(nn);

  BoundReport r;
  r.name = "cliff-ea";
  r.upper = Magnitude::from_ln(log_add_exp(ln_term1, ln_term2));
  r.main_term = *r.upper;
  r.asymptotic_slack = false;
  r.validity = {checked("0 < p < 1/2", true), checked("1 <= d < m - 1", true),
                asymptotic("m = O(sqrt(n)/log n) (simplified form only)"),
                checked("lambda = p n <= floor(d) + 2 (simplified form only)", lambda <= jump)};
  r.derived = {{"jump", jump},
               {"lambda", lambda},
               {"term1_log10", ln_term1 / kLn10},
               {"term2_log10", ln_term2 / kLn10},
               {"simplified_log10", ln_simplified / kLn10}};
  r.notes = "upper bound holds for every n; simplified form e^lambda/lambda^D C(m,D)^-1 n^D carries (1 + o(1))";
  return r;
}

OptimalParameters optimal_parameters(std::size_t n, std::size_t m, double d) {
  (void)ProblemInstance::cliff(n, m, d);
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);

  OptimalParameters out;
  if (mm - 2.0 >= d && mm - d - 2.0 > 0.0) {
    const double ln_inner = std::log(mm - d - 2.0) - std::log(d) - log_factorial(mm - 2.0);
    out.alpha_star_case1_exact = nn * std::exp(ln_inner / (mm - 2.0));
  } else {
    out.notes.emplace_back("case-1 exact alpha* needs m - 2 > d (the minimiser degenerates to 0 at m - 2 = d)");
  }
  if (m > 2) {
    out.alpha_star_case1_asym = std::numbers::e * nn / (mm - 2.0);
  } else {
    out.notes.emplace_back("case-1 asymptotic alpha* needs m > 2");
  }
  out.alpha_star_case2 = nn / (d + 2.5);
  out.p_star = (std::floor(d) + 2.0) / nn;
  return out;
}

}  // namespace ralab

#include "ralab/markov_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "ralab/heuristics.hpp"
#include "ralab/log_math.hpp"

namespace ralab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string chain_label(const ProblemInstance& instance, double alpha) {
  std::ostringstream out;
  out << instance.describe() << ", alpha=";
  if (std::isinf(alpha)) {
    out << "inf";
  } else {
    out << alpha;
  }
  return out.str();
}

}  // namespace

LevelChain build_level_chain(const ProblemInstance& instance, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must be > 1 (or inf)");
  const std::size_t n = instance.n();
  const double nn = static_cast<double>(n);
  const double inv_alpha = std::isinf(alpha) ? 0.0 : 1.0 / alpha;

  LevelChain chain;
  chain.n = n;
  chain.p_minus.assign(n + 1, 0.0);
  chain.p_plus.assign(n + 1, 0.0);
  chain.label = chain_label(instance, alpha);
  for (std::size_t i = 1; i <= n; ++i) chain.p_minus[i] = static_cast<double>(i) / nn;
  for (std::size_t i = 0; i < n; ++i) chain.p_plus[i] = static_cast<double>(n - i) * inv_alpha / nn;

  if (instance.kind() == ProblemKind::Cliff) {
    const std::size_t m = *instance.m();
    const double mm = static_cast<double>(m);
    chain.p_minus[m] = acceptance_probability(alpha, -*instance.d()) * mm / nn;
    chain.p_plus[m] = (nn - mm) * inv_alpha / nn;
    chain.p_minus[m - 1] = (mm - 1.0) / nn;
    chain.p_plus[m - 1] = (nn - mm + 1.0) / nn;
  }
  return chain;
}

std::vector<double> initial_level_weights(std::size_t n) {
  const double nn = static_cast<double>(n);
  std::size_t lo = 0;
  std::size_t hi = n;
  if (n > 1000) {
    const auto half_width = static_cast<std::size_t>(std::ceil(std::sqrt(nn * std::log(2e13) / 2.0)));
    lo = n / 2 > half_width ? n / 2 - half_width : 0;
    hi = std::min(n, n / 2 + half_width + 1);
  }
  std::vector<double> weights(n + 1, 0.0);
  const long double log_norm = std::lgamma(static_cast<long double>(n) + 1.0L) - static_cast<long double>(n) * std::log(2.0L);
  for (std::size_t k = lo; k <= hi; ++k) {
    const auto kk = static_cast<long double>(k);
    const long double log_w = log_norm - std::lgamma(kk + 1.0L) - std::lgamma(static_cast<long double>(n - k) + 1.0L);
    weights[k] = static_cast<double>(std::exp(log_w));
  }
  return weights;
}

HittingTimes expected_upgrade_times(const LevelChain& chain) {
  const std::size_t n = chain.n;
  for (std::size_t i = 1; i <= n; ++i) {
    if (!(chain.p_minus[i] > 0.0)) {
      throw UnreachableOptimum("level " + std::to_string(i) + " can never move closer to the optimum (" +
                               chain.label + ")");
    }
  }

  HittingTimes out;
  out.E.assign(n + 1, 0.0L);
  out.log10_E.assign(n + 1, kNegInf);
  std::vector<double> ln_E(n + 1, kNegInf);

  long double next = 0.0L;
  double ln_next = kNegInf;
  for (std::size_t i = n; i >= 1; --i) {
    const long double pm = chain.p_minus[i];
    const long double pp = chain.p_plus[i];
    const long double e = 1.0L / pm + (pp / pm) * next;
    out.E[i] = e;

    double ln_e = -std::log(chain.p_minus[i]);
    if (chain.p_plus[i] > 0.0 && i < n) {
      ln_e = log_add_exp(ln_e, std::log(chain.p_plus[i]) - std::log(chain.p_minus[i]) + ln_next);
    }
    ln_E[i] = ln_e;
    out.log10_E[i] = ln_e / kLn10;
    next = e;
    ln_next = ln_e;
  }

  out.E_total_from.assign(n + 1, 0.0L);
  out.log10_E_total_from.assign(n + 1, kNegInf);
  std::vector<double> ln_total(n + 1, kNegInf);
  for (std::size_t k = 1; k <= n; ++k) {
    out.E_total_from[k] = out.E_total_from[k - 1] + out.E[k];
    ln_total[k] = log_add_exp(ln_total[k - 1], ln_E[k]);
    out.log10_E_total_from[k] = ln_total[k] / kLn10;
  }

  const std::vector<double> weights = initial_level_weights(n);
  long double expected = 0.0L;
  double ln_expected = kNegInf;
  for (std::size_t k = 1; k <= n; ++k) {
    if (weights[k] == 0.0) continue;
    expected += static_cast<long double>(weights[k]) * out.E_total_from[k];
    ln_expected = log_add_exp(ln_expected, std::log(weights[k]) + ln_total[k]);
  }
  out.E_expected_start = expected;
  out.log10_E_expected_start = ln_expected / kLn10;
  return out;
}

FirstPassageTimes solve_first_passage_linear(const LevelChain& chain, std::size_t target_level) {
  using Matrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

  const std::size_t n = chain.n;
  if (target_level > n) throw std::invalid_argument("target level exceeds n");
  for (std::size_t j = target_level + 1; j <= n; ++j) {
    if (!(chain.p_minus[j] > 0.0)) {
      throw UnreachableTarget("first-passage system is singular: level " + std::to_string(target_level) +
                              " cannot be reached from level " + std::to_string(j) + " (" + chain.label + ")");
    }
  }

  // Dense state reduction over levels target..n, index 0 being the absorbing
  // target. Eliminating a state folds its transitions into the remaining ones,
  // and each diagonal is the sum of the remaining outgoing rates, so no step
  // subtracts and tiny rates keep their relative accuracy.
  const auto size = static_cast<Eigen::Index>(n - target_level + 1);
  Matrix rate = Matrix::Zero(size, size);
  Vector cost = Vector::Ones(size);
  for (Eigen::Index i = 1; i < size; ++i) {
    const std::size_t level = target_level + static_cast<std::size_t>(i);
    rate(i, i - 1) = chain.p_minus[level];
    if (i + 1 < size) rate(i, i + 1) = chain.p_plus[level];
  }

  Vector out_rate = Vector::Zero(size);
  for (Eigen::Index k = size - 1; k >= 1; --k) {
    long double total = 0.0L;
    for (Eigen::Index j = 0; j < k; ++j) total += rate(k, j);
    out_rate(k) = total;
    for (Eigen::Index i = 1; i < k; ++i) {
      const long double into = rate(i, k);
      if (into == 0.0L) continue;
      const long double share = into / total;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (j != i) rate(i, j) += share * rate(k, j);
      }
      cost(i) += share * cost(k);
    }
  }

  Vector h = Vector::Zero(size);
  for (Eigen::Index k = 1; k < size; ++k) {
    long double acc = cost(k);
    for (Eigen::Index j = 1; j < k; ++j) acc += rate(k, j) * h(j);
    h(k) = acc / out_rate(k);
  }

  FirstPassageTimes out;
  out.target = target_level;
  out.from_level.resize(static_cast<std::size_t>(size));
  for (Eigen::Index i = 0; i < size; ++i) {
    if (!std::isfinite(h(i))) {
      throw UnreachableTarget("first-passage system is numerically singular (" + chain.label + ")");
    }
    out.from_level[static_cast<std::size_t>(i)] = h(i);
  }
  return out;
}

std::vector<long double> upgrade_times_by_linear_solve(const LevelChain& chain) {
  std::vector<long double> e(chain.n + 1, 0.0L);
  for (std::size_t i = 1; i <= chain.n; ++i) e[i] = solve_first_passage_linear(chain, i - 1).from(i);
  return e;
}

double hitting_probability_before(const LevelChain& chain, std::size_t start, std::size_t low, std::size_t high) {
  if (!(low < start && start < high && high <= chain.n)) {
    throw ContractViolation("hitting_probability_before requires low < start < high <= n");
  }
  for (std::size_t k = low + 1; k < high; ++k) {
    if (!(chain.p_minus[k] > 0.0)) {
      throw ContractViolation("hitting_probability_before requires p_minus > 0 between low and high");
    }
  }
  // ln w_i for i = high down to low+1; w_high is the empty product.
  double ln_w = 0.0;
  double ln_numerator = kNegInf;
  double ln_denominator = kNegInf;
  for (std::size_t i = high; i > low; --i) {
    if (i < high) {
      const std::size_t k = i;
      ln_w = chain.p_plus[k] > 0.0 ? ln_w + std::log(chain.p_plus[k]) - std::log(chain.p_minus[k]) : kNegInf;
    }
    if (i > start) ln_numerator = log_add_exp(ln_numerator, ln_w);
    ln_denominator = log_add_exp(ln_denominator, ln_w);
  }
  return std::exp(ln_numerator - ln_denominator);
}

double one_step_drift(const LevelChain& chain, std::size_t level) {
  return chain.p_minus.at(level) - chain.p_plus.at(level);
}

double equilibrium_point(std::size_t n, double alpha) {
  if (std::isinf(alpha)) return 0.0;
  return static_cast<double>(n) / (alpha + 1.0);
}

}  // namespace ralab

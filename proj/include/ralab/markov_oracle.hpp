#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ralab/benchmarks.hpp"

namespace ralab {

/// The level process of one-bit Metropolis: a birth-death chain over the
/// distance to the optimum. Level i holds the points with exactly i zero-bits.
///
/// p_minus[i] is the probability of moving from level i to i-1 in one step,
/// p_plus[i] the probability of moving to i+1 (offspring created *and*
/// accepted). Both vectors have n+1 entries; p_minus[0] and p_plus[n] are 0.
struct LevelChain {
  std::size_t n = 0;
  std::vector<double> p_minus;
  std::vector<double> p_plus;
  std::string label;
};

/// p_minus[i] = i/n, p_plus[i] = (n-i)/(alpha n), except around a cliff at
/// level m: p_minus[m] = alpha^-d m/n, p_plus[m] = (n-m)/(alpha n),
/// p_minus[m-1] = (m-1)/n, p_plus[m-1] = (n-m+1)/n.
/// alpha may be kInfiniteAlpha, in which case every worsening move has
/// probability 0.
LevelChain build_level_chain(const ProblemInstance& instance, double alpha);

class UnreachableOptimum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expected hitting times of the level chain.
///
/// Values are carried in long double (x87 extended range) and, independently,
/// as log10 computed with a log-space recursion, so the log10 fields stay
/// finite even where the linear value overflows.
struct HittingTimes {
  /// E[i], i in [1..n]: expected steps from level i to level i-1. E[0] = 0.
  std::vector<long double> E;
  std::vector<double> log10_E;
  /// E_total_from[k] = sum_{l=1..k} E[l]: expected time to the optimum from level k.
  std::vector<long double> E_total_from;
  std::vector<double> log10_E_total_from;
  /// Expectation over a uniformly random initial point (level ~ Bin(n, 1/2)).
  long double E_expected_start = 0;
  double log10_E_expected_start = 0;
};

/// E_n = 1/p_minus[n], E_i = 1/p_minus[i] + (p_plus[i]/p_minus[i]) E_{i+1}.
/// Throws UnreachableOptimum when some p_minus[i] is zero.
HittingTimes expected_upgrade_times(const LevelChain& chain);

/// Binomial(n, 1/2) weights. Exact for n <= 1000; beyond that the weights
/// outside |k - n/2| <= sqrt(n ln(2e13) / 2) are dropped, which by
/// Hoeffding's inequality discards less than 1e-13 of the probability mass.
std::vector<double> initial_level_weights(std::size_t n);

class UnreachableTarget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expected first-passage times to `target`, for starts at or above it.
struct FirstPassageTimes {
  std::size_t target = 0;
  /// from_level[j] is the expected time from level target + j.
  std::vector<long double> from_level;

  long double from(std::size_t level) const { return from_level.at(level - target); }
};

/// Dense solve of the first-passage system h_target = 0,
/// (p_minus[j] + p_plus[j]) h_j - p_minus[j] h_{j-1} - p_plus[j] h_{j+1} = 1
/// over levels target..n (target = 0 gives the full (n+1)-state system).
/// Levels below the target are never visited from above in a birth-death
/// chain, so they are not part of the system. Solved by dense state reduction
/// with subtraction-free diagonals, which keeps relative accuracy when some
/// transition probabilities are many orders of magnitude below the others.
/// Throws UnreachableTarget when the system is singular.
FirstPassageTimes solve_first_passage_linear(const LevelChain& chain, std::size_t target_level);

/// E_i for every i in [1..n] through n separate dense solves (target i-1).
/// Independent of the recursion; used to cross-check it.
std::vector<long double> upgrade_times_by_linear_solve(const LevelChain& chain);

/// Probability that the chain started at `start` reaches `low` before `high`:
/// with w_i = prod_{k=i}^{high-1} p_plus[k]/p_minus[k],
/// P = sum_{i=start+1}^{high} w_i / sum_{i=low+1}^{high} w_i.
/// Products are accumulated as sums of log-ratios.
/// Requires low < start < high <= n and p_minus > 0 strictly between low and high.
double hitting_probability_before(const LevelChain& chain, std::size_t start, std::size_t low, std::size_t high);

/// p_minus[i] - p_plus[i]: expected one-step decrease of the distance.
double one_step_drift(const LevelChain& chain, std::size_t level);

/// k* = n/(alpha+1), where the OneMax drift of the MA changes sign.
double equilibrium_point(std::size_t n, double alpha);

}  // namespace ralab

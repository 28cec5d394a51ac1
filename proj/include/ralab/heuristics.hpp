#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ralab/benchmarks.hpp"
#include "ralab/rng.hpp"

namespace ralab {

enum class HeuristicKind { MA, OEA, RLS, FastOEA, SdOEA, MAGlobalStd, MAGlobalHeavy };

/// Command-line names: ma, oea, rls, fast, sd, ma-gstd, ma-gheavy.
std::string to_string(HeuristicKind kind);
HeuristicKind parse_heuristic_kind(const std::string& name);

/// alpha = +inf means "reject every strictly worse offspring" (RLS behaviour).
inline constexpr double kInfiniteAlpha = std::numeric_limits<double>::infinity();
inline constexpr std::uint64_t kDefaultBudget = 1'000'000'000;
inline constexpr double kDefaultBeta = 1.5;

/// Algorithm kind plus exactly the parameters that kind uses.
struct HeuristicConfig {
  HeuristicKind kind = HeuristicKind::RLS;
  std::optional<double> alpha;          // MA, MAGlobalStd, MAGlobalHeavy
  std::optional<double> p;              // OEA, MAGlobalStd
  std::optional<double> beta;           // FastOEA, MAGlobalHeavy
  std::optional<std::uint64_t> sd_R;    // SdOEA; n^3 when unset
  std::uint64_t budget = kDefaultBudget;

  static HeuristicConfig metropolis(double alpha, std::uint64_t budget = kDefaultBudget);
  static HeuristicConfig oea(double p, std::uint64_t budget = kDefaultBudget);
  static HeuristicConfig rls(std::uint64_t budget = kDefaultBudget);
  static HeuristicConfig fast_oea(double beta = kDefaultBeta, std::uint64_t budget = kDefaultBudget);
  static HeuristicConfig sd_oea(std::optional<std::uint64_t> R = std::nullopt, std::uint64_t budget = kDefaultBudget);
  static HeuristicConfig ma_global_std(double alpha, double p, std::uint64_t budget = kDefaultBudget);
  static HeuristicConfig ma_global_heavy(double alpha, double beta = kDefaultBeta,
                                         std::uint64_t budget = kDefaultBudget);

  /// Throws std::invalid_argument naming the offending parameter.
  void validate(std::size_t n) const;

  std::uint64_t resolved_sd_R(std::size_t n) const;
};

/// Exactly min(1, alpha^delta); 0 for delta < 0 when alpha is infinite.
double acceptance_probability(double alpha, double delta) noexcept;

/// Metropolis acceptance with the last two acceptance probabilities cached.
/// One-bit MA on Cliff only ever sees two distinct losses (1 and d).
class AcceptanceRule {
 public:
  explicit AcceptanceRule(double alpha);

  double alpha() const noexcept { return alpha_; }

  /// Consumes one uniform draw only when delta < 0 and alpha is finite.
  bool accept(double delta, Rng& rng) noexcept {
    if (delta >= 0.0) return true;
    if (infinite_) return false;
    return rng.uniform01() < probability(delta);
  }

  double probability(double delta) noexcept;

 private:
  double alpha_;
  double log_alpha_;
  bool infinite_;
  double cached_delta_[2];
  double cached_probability_[2];
  int next_slot_ = 0;
};

/// Current point with its running one-count and fitness.
struct SearchState {
  SearchPoint point;
  std::size_t ones;
  double fitness;

  static SearchState at(const ProblemInstance& instance, SearchPoint point);
};

struct StepOutcome {
  std::size_t offspring_ones;
  double offspring_fitness;
  bool accepted;
};

/// Binomial(n, p) flip count by inverse CDF, then a uniform subset of that
/// size (Floyd's algorithm).
class StandardBitMutation {
 public:
  StandardBitMutation(std::size_t n, double p);

  double rate() const noexcept { return p_; }

  /// Fills `flips` with distinct positions and returns the offspring's one-count.
  std::size_t sample(const SearchPoint& x, std::size_t ones, Rng& rng, std::vector<std::size_t>& flips) const;

  std::size_t sample_flip_count(Rng& rng) const;

 private:
  std::size_t n_;
  double p_;
  std::vector<double> cdf_;
};

/// Mutation strength r in {1..floor(n/2)} with mass proportional to r^-beta.
class PowerLawStrength {
 public:
  PowerLawStrength(std::size_t n, double beta);

  std::size_t max_strength() const noexcept { return cdf_.size(); }
  double probability(std::size_t r) const;
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> cdf_;
};

std::size_t sample_heavy_tailed_rate(std::size_t n, double beta, Rng& rng);

/// Fast-EA operator: draw r from the power law, then standard-bit mutation
/// at rate r/n. One table per strength, built up front.
class HeavyTailedMutation {
 public:
  HeavyTailedMutation(std::size_t n, double beta);

  std::size_t sample(const SearchPoint& x, std::size_t ones, Rng& rng, std::vector<std::size_t>& flips) const;

 private:
  PowerLawStrength strength_;
  std::vector<StandardBitMutation> by_strength_;
};

/// Applies a flip set to the state if the offspring is accepted.
void apply_flips(SearchState& state, const std::vector<std::size_t>& flips, std::size_t offspring_ones,
                 double offspring_fitness);

StepOutcome metropolis_step(SearchState& state, const ProblemInstance& instance, AcceptanceRule& rule, Rng& rng);
StepOutcome metropolis_step(SearchState& state, const ProblemInstance& instance, double alpha, Rng& rng);

StepOutcome rls_step(SearchState& state, const ProblemInstance& instance, Rng& rng);

StepOutcome oea_step(SearchState& state, const ProblemInstance& instance, const StandardBitMutation& mutation,
                     Rng& rng, std::vector<std::size_t>& flips);
StepOutcome oea_step(SearchState& state, const ProblemInstance& instance, double p, Rng& rng);

template <class Mutation>
StepOutcome ma_global_step(SearchState& state, const ProblemInstance& instance, AcceptanceRule& rule,
                           const Mutation& mutation, Rng& rng, std::vector<std::size_t>& flips) {
  const std::size_t ones = mutation.sample(state.point, state.ones, rng, flips);
  const double fitness = instance.fitness_of_ones(ones);
  const bool accepted = rule.accept(fitness - state.fitness, rng);
  if (accepted) apply_flips(state, flips, ones, fitness);
  return {ones, fitness, accepted};
}

/// (n/r)^r (n/(n-r))^(n-r) ln(e n R), evaluated in log space.
double sd_threshold(std::size_t n, std::size_t r, std::uint64_t R);

/// Precomputed thresholds and mutation tables for strengths 1..floor(n/2).
class StagnationSchedule {
 public:
  StagnationSchedule(std::size_t n, std::uint64_t R);

  std::size_t max_strength() const noexcept { return thresholds_.size(); }
  double threshold(std::size_t r) const { return thresholds_.at(r - 1); }
  const StandardBitMutation& mutation(std::size_t r) const { return mutations_.at(r - 1); }

 private:
  std::vector<double> thresholds_;
  std::vector<StandardBitMutation> mutations_;
};

struct SdState {
  SearchState search;
  std::size_t strength = 1;
  std::uint64_t failures = 0;
};

/// One SD-(1+1) EA iteration. Offspring at least as good replace the parent;
/// only strict improvements reset (r, u) to (1, 0). Any other outcome
/// increments u, and once u exceeds the threshold for r the strength grows
/// by one (capped at floor(n/2)) and u restarts at 0.
StepOutcome sd_oea_step(SdState& state, const ProblemInstance& instance, const StagnationSchedule& schedule,
                        Rng& rng, std::vector<std::size_t>& flips);

struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;
  bool hit_optimum = false;
  std::optional<std::uint64_t> censored_at;
  std::size_t final_distance = 0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// A configuration bound to an instance, with every lookup table built once.
/// `run` is const and may be called concurrently.
class Solver {
 public:
  Solver(HeuristicConfig config, ProblemInstance instance);

  const HeuristicConfig& config() const noexcept { return config_; }
  const ProblemInstance& instance() const noexcept { return instance_; }

  /// x^0 uniform from the seeded stream; iterations count offspring
  /// evaluations until the optimum is sampled or the budget runs out.
  RunRecord run(std::uint64_t seed) const;

 private:
  HeuristicConfig config_;
  ProblemInstance instance_;
  std::optional<StandardBitMutation> standard_;
  std::optional<HeavyTailedMutation> heavy_;
  std::optional<StagnationSchedule> schedule_;
};

RunRecord run(const HeuristicConfig& config, const ProblemInstance& instance, std::uint64_t seed);

}  // namespace ralab

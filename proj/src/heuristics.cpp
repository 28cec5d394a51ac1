#include "ralab/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ralab {

std::string to_string(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::MA: return "ma";
    case HeuristicKind::OEA: return "oea";
    case HeuristicKind::RLS: return "rls";
    case HeuristicKind::FastOEA: return "fast";
    case HeuristicKind::SdOEA: return "sd";
    case HeuristicKind::MAGlobalStd: return "ma-gstd";
    case HeuristicKind::MAGlobalHeavy: return "ma-gheavy";
  }
  return "?";
}

HeuristicKind parse_heuristic_kind(const std::string& name) {
  for (auto kind : {HeuristicKind::MA, HeuristicKind::OEA, HeuristicKind::RLS, HeuristicKind::FastOEA,
                    HeuristicKind::SdOEA, HeuristicKind::MAGlobalStd, HeuristicKind::MAGlobalHeavy}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

HeuristicConfig HeuristicConfig::metropolis(double alpha, std::uint64_t budget) {
  HeuristicConfig c;
  c.kind = HeuristicKind::MA;
  c.alpha = alpha;
  c.budget = budget;
  return c;
}

HeuristicConfig HeuristicConfig::oea(double p, std::uint64_t budget) {
  HeuristicConfig c;
  c.kind = HeuristicKind::OEA;
  c.p = p;
  c.budget = budget;
  return c;
}

HeuristicConfig HeuristicConfig::rls(std::uint64_t budget) {
  HeuristicConfig c;
  c.kind = HeuristicKind::RLS;
  c.budget = budget;
  return c;
}

HeuristicConfig HeuristicConfig::fast_oea(double beta, std::uint64_t budget) {
  HeuristicConfig c;
  c.kind = HeuristicKind::FastOEA;
  c.beta = beta;
  c.budget = budget;
  return c;
}

HeuristicConfig HeuristicConfig::sd_oea(std::optional<std::uint64_t> R, std::uint64_t budget) {
  HeuristicConfig c;
  c.kind = HeuristicKind::SdOEA;
  c.sd_R = R;
  c.budget = budget;
  return c;
}

HeuristicConfig HeuristicConfig::ma_global_std(double alpha, double p, std::uint64_t budget) {
  HeuristicConfig c;
  c.kind = HeuristicKind::MAGlobalStd;
  c.alpha = alpha;
  c.p = p;
  c.budget = budget;
  return c;
}

HeuristicConfig HeuristicConfig::ma_global_heavy(double alpha, double beta, std::uint64_t budget) {
  HeuristicConfig c;
  c.kind = HeuristicKind::MAGlobalHeavy;
  c.alpha = alpha;
  c.beta = beta;
  c.budget = budget;
  return c;
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

void HeuristicConfig::validate(std::size_t n) const {
  const bool wants_alpha =
      kind == HeuristicKind::MA || kind == HeuristicKind::MAGlobalStd || kind == HeuristicKind::MAGlobalHeavy;
  const bool wants_p = kind == HeuristicKind::OEA || kind == HeuristicKind::MAGlobalStd;
  const bool wants_beta = kind == HeuristicKind::FastOEA || kind == HeuristicKind::MAGlobalHeavy;
  const bool wants_R = kind == HeuristicKind::SdOEA;
  const std::string who = to_string(kind);

  require(wants_alpha == alpha.has_value(), wants_alpha ? who + " requires --alpha" : who + " does not take --alpha");
  require(wants_p == p.has_value(), wants_p ? who + " requires --p" : who + " does not take --p");
  require(wants_beta == beta.has_value(), wants_beta ? who + " requires --beta" : who + " does not take --beta");
  require(wants_R || !sd_R.has_value(), who + " does not take an SD parameter R");

  if (alpha) require(*alpha > 1.0, "--alpha must be > 1 (or inf)");
  if (p) require(*p > 0.0 && *p < 0.5, "--p must lie in (0, 1/2)");
  if (beta) require(std::isfinite(*beta) && *beta > 1.0, "--beta must be > 1");
  if (sd_R) require(*sd_R > 0, "SD parameter R must be positive");
  require(budget > 0, "--budget must be positive");
  if (kind == HeuristicKind::FastOEA || kind == HeuristicKind::MAGlobalHeavy || kind == HeuristicKind::SdOEA) {
    require(n >= 2, who + " requires n >= 2");
  }
}

std::uint64_t HeuristicConfig::resolved_sd_R(std::size_t n) const {
  if (sd_R) return *sd_R;
  const auto nn = static_cast<std::uint64_t>(n);
  return nn * nn * nn;
}

double acceptance_probability(double alpha, double delta) noexcept {
  if (delta >= 0.0) return 1.0;
  if (std::isinf(alpha)) return 0.0;
  return std::exp(delta * std::log(alpha));
}

AcceptanceRule::AcceptanceRule(double alpha)
    : alpha_(alpha),
      log_alpha_(std::log(alpha)),
      infinite_(std::isinf(alpha)),
      cached_delta_{1.0, 1.0},
      cached_probability_{1.0, 1.0} {}

double AcceptanceRule::probability(double delta) noexcept {
  if (delta >= 0.0) return 1.0;
  if (infinite_) return 0.0;
  if (delta == cached_delta_[0]) return cached_probability_[0];
  if (delta == cached_delta_[1]) return cached_probability_[1];
  const double prob = std::exp(delta * log_alpha_);
  cached_delta_[next_slot_] = delta;
  cached_probability_[next_slot_] = prob;
  next_slot_ ^= 1;
  return prob;
}

SearchState SearchState::at(const ProblemInstance& instance, SearchPoint point) {
  if (point.size() != instance.n()) throw ContractViolation("search point length does not match the instance");
  const std::size_t ones = point.count_ones();
  return SearchState{std::move(point), ones, instance.fitness_of_ones(ones)};
}

namespace {

std::vector<double> binomial_cdf(std::size_t n, double p) {
  std::vector<double> cdf(n + 1);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  double acc = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double log_pmf = log_n_fact - std::lgamma(kk + 1.0) - std::lgamma(static_cast<double>(n - k) + 1.0) +
                           kk * log_p + static_cast<double>(n - k) * log_q;
    acc += std::exp(log_pmf);
    cdf[k] = acc;
  }
  // Rounding can leave the total a hair off 1; the last entry must catch every u < 1.
  cdf[n] = 2.0;
  return cdf;
}

}  // namespace

StandardBitMutation::StandardBitMutation(std::size_t n, double p) : n_(n), p_(p), cdf_(binomial_cdf(n, p)) {
  if (!(p > 0.0 && p <= 0.5)) throw std::invalid_argument("mutation rate must lie in (0, 1/2]");
}

std::size_t StandardBitMutation::sample_flip_count(Rng& rng) const {
  const double u = rng.uniform01();
  std::size_t k = 0;
  while (cdf_[k] <= u) ++k;
  return k;
}

std::size_t StandardBitMutation::sample(const SearchPoint& x, std::size_t ones, Rng& rng,
                                        std::vector<std::size_t>& flips) const {
  const std::size_t k = sample_flip_count(rng);
  flips.clear();
  // Floyd: uniform k-subset of [0, n).
  for (std::size_t j = n_ - k; j < n_; ++j) {
    const auto t = static_cast<std::size_t>(rng.below(j + 1));
    if (std::find(flips.begin(), flips.end(), t) == flips.end()) {
      flips.push_back(t);
    } else {
      flips.push_back(j);
    }
  }
  std::size_t result = ones;
  for (auto i : flips) {
    if (x.get(i)) {
      --result;
    } else {
      ++result;
    }
  }
  return result;
}

PowerLawStrength::PowerLawStrength(std::size_t n, double beta) {
  if (n < 2) throw std::invalid_argument("heavy-tailed mutation requires n >= 2");
  if (!(beta > 1.0)) throw std::invalid_argument("heavy-tailed exponent beta must be > 1");
  const std::size_t top = n / 2;
  cdf_.resize(top);
  double total = 0.0;
  for (std::size_t r = 1; r <= top; ++r) {
    total += std::pow(static_cast<double>(r), -beta);
    cdf_[r - 1] = total;
  }
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 2.0;
}

double PowerLawStrength::probability(std::size_t r) const {
  if (r < 1 || r > cdf_.size()) return 0.0;
  const double upper = r == cdf_.size() ? 1.0 : cdf_[r - 1];
  const double lower = r == 1 ? 0.0 : cdf_[r - 2];
  return upper - lower;
}

std::size_t PowerLawStrength::sample(Rng& rng) const {
  const double u = rng.uniform01();
  std::size_t r = 0;
  while (cdf_[r] <= u) ++r;
  return r + 1;
}

std::size_t sample_heavy_tailed_rate(std::size_t n, double beta, Rng& rng) {
  return PowerLawStrength(n, beta).sample(rng);
}

HeavyTailedMutation::HeavyTailedMutation(std::size_t n, double beta) : strength_(n, beta) {
  by_strength_.reserve(strength_.max_strength());
  for (std::size_t r = 1; r <= strength_.max_strength(); ++r) {
    by_strength_.emplace_back(n, static_cast<double>(r) / static_cast<double>(n));
  }
}

std::size_t HeavyTailedMutation::sample(const SearchPoint& x, std::size_t ones, Rng& rng,
                                        std::vector<std::size_t>& flips) const {
  const std::size_t r = strength_.sample(rng);
  return by_strength_[r - 1].sample(x, ones, rng, flips);
}

void apply_flips(SearchState& state, const std::vector<std::size_t>& flips, std::size_t offspring_ones,
                 double offspring_fitness) {
  for (auto i : flips) state.point.flip(i);
  state.ones = offspring_ones;
  state.fitness = offspring_fitness;
}

namespace {

inline std::size_t one_bit_offspring(const SearchState& state, std::size_t position) {
  return state.point.get(position) ? state.ones - 1 : state.ones + 1;
}

}  // namespace

StepOutcome metropolis_step(SearchState& state, const ProblemInstance& instance, AcceptanceRule& rule, Rng& rng) {
  const auto position = static_cast<std::size_t>(rng.below(instance.n()));
  const std::size_t ones = one_bit_offspring(state, position);
  const double fitness = instance.fitness_of_ones(ones);
  const bool accepted = rule.accept(fitness - state.fitness, rng);
  if (accepted) {
    state.point.flip(position);
    state.ones = ones;
    state.fitness = fitness;
  }
  return {ones, fitness, accepted};
}

StepOutcome metropolis_step(SearchState& state, const ProblemInstance& instance, double alpha, Rng& rng) {
  AcceptanceRule rule(alpha);
  return metropolis_step(state, instance, rule, rng);
}

StepOutcome rls_step(SearchState& state, const ProblemInstance& instance, Rng& rng) {
  const auto position = static_cast<std::size_t>(rng.below(instance.n()));
  const std::size_t ones = one_bit_offspring(state, position);
  const double fitness = instance.fitness_of_ones(ones);
  const bool accepted = fitness >= state.fitness;
  if (accepted) {
    state.point.flip(position);
    state.ones = ones;
    state.fitness = fitness;
  }
  return {ones, fitness, accepted};
}

StepOutcome oea_step(SearchState& state, const ProblemInstance& instance, const StandardBitMutation& mutation,
                     Rng& rng, std::vector<std::size_t>& flips) {
  const std::size_t ones = mutation.sample(state.point, state.ones, rng, flips);
  const double fitness = instance.fitness_of_ones(ones);
  const bool accepted = fitness >= state.fitness;
  if (accepted) apply_flips(state, flips, ones, fitness);
  return {ones, fitness, accepted};
}

StepOutcome oea_step(SearchState& state, const ProblemInstance& instance, double p, Rng& rng) {
  if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("mutation rate must lie in (0, 1/2)");
  StandardBitMutation mutation(instance.n(), p);
  std::vector<std::size_t> flips;
  return oea_step(state, instance, mutation, rng, flips);
}

double sd_threshold(std::size_t n, std::size_t r, std::uint64_t R) {
  const double nn = static_cast<double>(n);
  const double rr = static_cast<double>(r);
  double log_threshold = rr * std::log(nn / rr) + std::log(std::log(nn * static_cast<double>(R)) + 1.0);
  if (r < n) log_threshold += (nn - rr) * std::log(nn / (nn - rr));
  return std::exp(log_threshold);
}

StagnationSchedule::StagnationSchedule(std::size_t n, std::uint64_t R) {
  const std::size_t top = std::max<std::size_t>(1, n / 2);
  thresholds_.reserve(top);
  mutations_.reserve(top);
  for (std::size_t r = 1; r <= top; ++r) {
    thresholds_.push_back(sd_threshold(n, r, R));
    mutations_.emplace_back(n, static_cast<double>(r) / static_cast<double>(n));
  }
}

StepOutcome sd_oea_step(SdState& state, const ProblemInstance& instance, const StagnationSchedule& schedule,
                        Rng& rng, std::vector<std::size_t>& flips) {
  SearchState& search = state.search;
  const std::size_t ones = schedule.mutation(state.strength).sample(search.point, search.ones, rng, flips);
  const double fitness = instance.fitness_of_ones(ones);
  if (fitness > search.fitness) {
    apply_flips(search, flips, ones, fitness);
    state.strength = 1;
    state.failures = 0;
    return {ones, fitness, true};
  }
  const bool accepted = fitness == search.fitness;
  if (accepted) apply_flips(search, flips, ones, fitness);
  ++state.failures;
  if (static_cast<double>(state.failures) > schedule.threshold(state.strength)) {
    state.strength = std::min(state.strength + 1, schedule.max_strength());
    state.failures = 0;
  }
  return {ones, fitness, accepted};
}

Solver::Solver(HeuristicConfig config, ProblemInstance instance)
    : config_(std::move(config)), instance_(std::move(instance)) {
  config_.validate(instance_.n());
  const std::size_t n = instance_.n();
  switch (config_.kind) {
    case HeuristicKind::OEA:
    case HeuristicKind::MAGlobalStd:
      standard_.emplace(n, *config_.p);
      break;
    case HeuristicKind::FastOEA:
    case HeuristicKind::MAGlobalHeavy:
      heavy_.emplace(n, *config_.beta);
      break;
    case HeuristicKind::SdOEA:
      schedule_.emplace(n, config_.resolved_sd_R(n));
      break;
    case HeuristicKind::MA:
    case HeuristicKind::RLS:
      break;
  }
}

namespace {

template <class Step>
RunRecord drive(const ProblemInstance& instance, std::uint64_t seed, std::uint64_t budget, Rng& rng,
                SearchState& state, Step&& step) {
  RunRecord record;
  record.seed = seed;
  const std::size_t n = instance.n();
  if (state.ones == n) {
    record.hit_optimum = true;
    return record;
  }
  for (std::uint64_t t = 1; t <= budget; ++t) {
    const StepOutcome outcome = step(state, rng);
    if (outcome.offspring_ones == n) {
      record.iterations = t;
      record.hit_optimum = true;
      // Under every implemented rule a sampled optimum is also accepted.
      return record;
    }
  }
  record.iterations = budget;
  record.censored_at = budget;
  record.final_distance = n - state.ones;
  return record;
}

}  // namespace

RunRecord Solver::run(std::uint64_t seed) const {
  Rng rng(seed);
  SearchState state = SearchState::at(instance_, SearchPoint::from_words(instance_.n(), [&] { return rng(); }));
  const auto budget = config_.budget;
  std::vector<std::size_t> flips;
  flips.reserve(instance_.n());

  switch (config_.kind) {
    case HeuristicKind::MA: {
      AcceptanceRule rule(*config_.alpha);
      return drive(instance_, seed, budget, rng, state,
                   [&](SearchState& s, Rng& g) { return metropolis_step(s, instance_, rule, g); });
    }
    case HeuristicKind::RLS:
      return drive(instance_, seed, budget, rng, state,
                   [&](SearchState& s, Rng& g) { return rls_step(s, instance_, g); });
    case HeuristicKind::OEA:
      return drive(instance_, seed, budget, rng, state,
                   [&](SearchState& s, Rng& g) { return oea_step(s, instance_, *standard_, g, flips); });
    case HeuristicKind::FastOEA:
      return drive(instance_, seed, budget, rng, state, [&](SearchState& s, Rng& g) {
        const std::size_t ones = heavy_->sample(s.point, s.ones, g, flips);
        const double fitness = instance_.fitness_of_ones(ones);
        const bool accepted = fitness >= s.fitness;
        if (accepted) apply_flips(s, flips, ones, fitness);
        return StepOutcome{ones, fitness, accepted};
      });
    case HeuristicKind::SdOEA: {
      SdState sd{state, 1, 0};
      RunRecord record = drive(instance_, seed, budget, rng, sd.search, [&](SearchState&, Rng& g) {
        return sd_oea_step(sd, instance_, *schedule_, g, flips);
      });
      return record;
    }
    case HeuristicKind::MAGlobalStd: {
      AcceptanceRule rule(*config_.alpha);
      return drive(instance_, seed, budget, rng, state,
                   [&](SearchState& s, Rng& g) { return ma_global_step(s, instance_, rule, *standard_, g, flips); });
    }
    case HeuristicKind::MAGlobalHeavy: {
      AcceptanceRule rule(*config_.alpha);
      return drive(instance_, seed, budget, rng, state,
                   [&](SearchState& s, Rng& g) { return ma_global_step(s, instance_, rule, *heavy_, g, flips); });
    }
  }
  throw std::logic_error("unhandled heuristic kind");
}

RunRecord run(const HeuristicConfig& config, const ProblemInstance& instance, std::uint64_t seed) {
  return Solver(config, instance).run(seed);
}

}  // namespace ralab

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ralab/harness.hpp"
#include "ralab/markov_oracle.hpp"
#include "ralab/theory_bounds.hpp"

using namespace ralab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!pass) ++failures;
}

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double rel(long double a, long double b) { return static_cast<double>(std::fabs(a - b) / std::fabs(b)); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

AlgorithmSpec ma(double alpha) {
  AlgorithmSpec a;
  a.kind = HeuristicKind::MA;
  a.alpha = alpha;
  return a;
}

AlgorithmSpec oea_per_n(double c) {
  AlgorithmSpec a;
  a.kind = HeuristicKind::OEA;
  a.p = MutationRate{c, true};
  return a;
}

void oracle_self_consistency() {
  const double alphas[] = {1.5, 2, 5, 10, 1e2, 1e4, kInfiniteAlpha};
  std::size_t chains = 0;
  std::size_t unreachable = 0;
  double worst = 0.0;
  std::string worst_at;
  bool ok = true;
  for (std::size_t n = 2; n <= 64; ++n) {
    std::vector<ProblemInstance> instances{ProblemInstance::onemax(n)};
    for (std::size_t m : std::set<std::size_t>{2, 3, n / 3}) {
      if (m < 2 || m >= n) continue;
      for (double d : std::set<double>{1.0, 1.5, static_cast<double>(m) - 1.5}) {
        if (d > 0 && d < static_cast<double>(m) - 1) instances.push_back(ProblemInstance::cliff(n, m, d));
      }
    }
    for (const auto& inst : instances) {
      for (double alpha : alphas) {
        const auto chain = build_level_chain(inst, alpha);
        ++chains;
        HittingTimes h;
        try {
          h = expected_upgrade_times(chain);
        } catch (const UnreachableOptimum&) {
          ++unreachable;
          bool linear_agrees = false;
          try {
            solve_first_passage_linear(chain, 0);
          } catch (const UnreachableTarget&) {
            linear_agrees = true;
          }
          if (!linear_agrees) {
            ok = false;
            worst_at = chain.label + " unreachable for the recursion only";
          }
          continue;
        }
        const auto dense = solve_first_passage_linear(chain, 0);
        const auto by_level = upgrade_times_by_linear_solve(chain);
        for (std::size_t i = 1; i <= n; ++i) {
          const double e = std::max(rel(h.E[i], by_level[i]), rel(h.E_total_from[i], dense.from(i)));
          if (e > worst) {
            worst = e;
            worst_at = chain.label + " level " + std::to_string(i);
          }
        }
      }
    }
  }
  ok = ok && worst <= 1e-10;
  report(ok, "oracle self-consistency",
         std::to_string(chains) + " chains, max relative error " + short_num(worst) + " at " + worst_at + ", " +
             std::to_string(unreachable) + " chains unreachable for both solvers");
}

void simulation_vs_oracle() {
  struct Cell {
    ProblemInstance instance;
    double alpha;
  };
  const Cell cells[] = {{ProblemInstance::onemax(30), 5},        {ProblemInstance::onemax(30), 10},
                        {ProblemInstance::onemax(30), 30},       {ProblemInstance::cliff(30, 5, 1.0), 10},
                        {ProblemInstance::cliff(30, 5, 1.0), 30}};
  double worst = 0.0;
  bool ok = true;
  std::string detail;
  for (const auto& c : cells) {
    ExperimentPlan plan;
    plan.instance.kind = c.instance.kind();
    plan.instance.n = c.instance.n();
    if (c.instance.kind() == ProblemKind::Cliff) {
      plan.instance.m = c.instance.m();
      plan.instance.d = c.instance.d();
    }
    plan.algorithms = {ma(c.alpha)};
    plan.trials = 10000;
    plan.master_seed = 31337;
    const auto result = run_experiment(plan);
    const auto cmp = compare_with_oracle(result.rows, c.instance, c.alpha);
    const bool cell_ok = cmp[0].marker == "ok" && !cmp[0].flagged;
    ok = ok && cell_ok;
    if (cmp[0].z) worst = std::max(worst, std::fabs(*cmp[0].z));
    detail += " " + to_string(c.instance.kind()) + "/" + short_num(c.alpha) + " z=" +
              (cmp[0].z ? short_num(*cmp[0].z) : cmp[0].marker);
  }
  report(ok, "simulation vs oracle", "max |z| " + short_num(worst) + " over 5 cells at 1e4 trials;" + detail);
}

void e1_corollary() {
  bool ok = true;
  std::string detail;
  for (std::size_t n : {50, 100, 200, 500}) {
    const double alpha = 2.0 * static_cast<double>(n);
    const auto h = expected_upgrade_times(build_level_chain(ProblemInstance::onemax(n), alpha));
    const bool cell = h.E[1] <= 2.0L * n;
    ok = ok && cell;
    detail += " n=" + std::to_string(n) + " E1/2n=" + short_num(static_cast<double>(h.E[1] / (2.0L * n)));
  }
  report(ok, "E_1 at most 2n when alpha = 2n", detail.substr(1));

  ok = true;
  std::size_t points = 0;
  double worst = 0.0;
  for (std::size_t n : {30, 60, 100}) {
    const double lo = 1.1 * std::sqrt(static_cast<double>(n));
    const double hi = 3.0 * static_cast<double>(n);
    const int steps = 200;
    for (int s = 0; s <= steps; ++s) {
      const double alpha = lo * std::pow(hi / lo, static_cast<double>(s) / steps);
      const auto h = expected_upgrade_times(build_level_chain(ProblemInstance::onemax(n), alpha));
      const long double bound = static_cast<long double>(alpha) * std::exp(static_cast<long double>(n) / alpha);
      ++points;
      ok = ok && h.E[1] <= bound;
      worst = std::max(worst, static_cast<double>(h.E[1] / bound));
    }
  }
  report(ok, "E_1 at most alpha e^(n/alpha)",
         std::to_string(points) + " grid points, max E1/bound " + short_num(worst));
}

void rls_harmonic() {
  double worst = 0.0;
  for (std::size_t n : {1, 2, 10, 100, 1000, 10000}) {
    const auto h = expected_upgrade_times(build_level_chain(ProblemInstance::onemax(n), kInfiniteAlpha));
    long double sum = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      sum += static_cast<long double>(n) / k;
      worst = std::max(worst, rel(h.E_total_from[k], sum));
    }
  }
  report(worst <= 1e-12, "RLS times equal harmonic sums", "max relative error " + short_num(worst));
}

void start_anywhere() {
  bool ok = true;
  std::string detail;
  const std::size_t n = 100;
  for (double alpha : {20.0, 50.0}) {
    const auto h = expected_upgrade_times(build_level_chain(ProblemInstance::onemax(n), alpha));
    const auto ell = static_cast<std::size_t>(std::ceil(n / (alpha + 1)));
    const long double ratio = h.E_total_from[ell] / h.E[1];
    ok = ok && ratio >= 1.0L && ratio <= 1.5L;
    detail += " alpha=" + short_num(alpha) + " l=" + std::to_string(ell) + " ratio=" + short_num(static_cast<double>(ratio));
  }
  report(ok, "E_l^0 within [E_1, 1.5 E_1]", detail.substr(1));
}

void cliff_ma_bracketing() {
  const std::size_t n = 100;
  bool ok = true;
  std::size_t cells = 0;
  std::string misses;
  for (double d : {1.0, 1.5}) {
    for (std::size_t m : {6, 10, 20}) {
      for (double alpha : {std::exp(1.0) * n / (m - 2.0), n / (d + 2.5)}) {
        BoundReport b;
        try {
          b = cliff_ma_bounds(n, m, d, alpha);
        } catch (const std::invalid_argument&) {
          continue;
        }
        if (!b.lower || !b.upper) continue;
        ++cells;
        const auto h = expected_upgrade_times(build_level_chain(ProblemInstance::cliff(n, m, d), alpha));
        const double exact = h.log10_E_expected_start;
        const double lo = b.lower->log10 + std::log10(0.2);
        const double hi = b.upper->log10 + std::log10(5.0);
        if (exact < lo || exact > hi) {
          ok = false;
          misses += " d=" + short_num(d) + ",m=" + std::to_string(m) + ",alpha=" + short_num(alpha) +
                    " exact/upper=" + short_num(std::pow(10.0, exact - b.upper->log10)) +
                    " exact/lower=" + short_num(std::pow(10.0, exact - b.lower->log10));
        }
      }
    }
  }
  report(ok, "Cliff MA exact time within [0.2 lower, 5 upper]",
         std::to_string(cells) + " cells" + (misses.empty() ? "" : ", outside:" + misses));
}

void cliff_ea_dominance() {
  ExperimentPlan plan;
  plan.instance.kind = ProblemKind::Cliff;
  plan.instance.n = 100;
  plan.instance.d = 3.0;
  plan.sweep = Sweep{"m", {8, 12}};
  plan.algorithms = {oea_per_n(1.0), oea_per_n(5.0)};
  plan.trials = 1000;
  plan.master_seed = 606;
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_experiment(plan);
  bool ok = true;
  std::string detail;
  for (const auto& row : result.rows) {
    const double bound = cliff_ea_bound(100, *row.m, 3.0, *row.param_value).upper->linear();
    const bool cell = row.censored == 0 && row.mean_iterations && row.stderr_iterations &&
                      *row.mean_iterations <= bound + 4 * *row.stderr_iterations;
    ok = ok && cell;
    detail += " m=" + std::to_string(*row.m) + ",p=" + short_num(*row.param_value) + " mean/bound=" +
              (row.mean_iterations ? short_num(*row.mean_iterations / bound) : "none");
  }
  report(ok, "EA mean below the Cliff EA bound", detail.substr(1) + " (" + short_num(seconds_since(start)) + " s)");
}

/// Lower estimate of a cell's mean that counts censored runs at their cap.
double capped_mean(const ResultRow& row) {
  long double sum = 0;
  for (const auto& r : row.records) sum += r.iterations;
  return static_cast<double>(sum / row.records.size());
}

/// Every MA row slower than EA(5/n) and Fast EA at every m.
bool fig2_ordering(const ExperimentResult& result, std::string& detail) {
  bool ok = true;
  std::size_t cells = 0;
  double tightest = std::numeric_limits<double>::infinity();
  std::string tightest_at;
  for (std::size_t s = 0; s < result.plan.sweep->values.size(); ++s) {
    std::vector<const ResultRow*> ma_rows;
    std::vector<const ResultRow*> rivals;
    for (const auto& row : result.rows) {
      if (row.sweep_value != result.plan.sweep->values[s]) continue;
      if (row.algorithm == HeuristicKind::MA) ma_rows.push_back(&row);
      const bool high_rate = row.algorithm == HeuristicKind::OEA &&
                             std::fabs(*row.param_value * static_cast<double>(row.n) - 5.0) < 1e-9;
      if (high_rate || row.algorithm == HeuristicKind::FastOEA) rivals.push_back(&row);
    }
    for (const auto* r : rivals) {
      if (r->censored > 0 || !r->mean_iterations) {
        ok = false;
        continue;
      }
      for (const auto* a : ma_rows) {
        ++cells;
        const double ratio = capped_mean(*a) / *r->mean_iterations;
        if (ratio <= 1.0) ok = false;
        if (ratio < tightest) {
          tightest = ratio;
          tightest_at = "m=" + short_num(result.plan.sweep->values[s]) + " MA alpha " + short_num(*a->param_value) +
                        " vs " + to_string(r->algorithm);
        }
      }
    }
  }
  detail = std::to_string(cells) + " comparisons, smallest MA/rival ratio " + short_num(tightest) + " at " + tightest_at;
  return ok && cells > 0;
}

ExperimentPlan fig2_plan(const FigureOptions& options) {
  ExperimentPlan plan = figure_plans(FigureKind::Fig2, options)[0];
  plan.algorithms.push_back(oea_per_n(5.0));
  return plan;
}

void fig2_smoke() {
  FigureOptions options;
  options.n = 100;
  options.trials = 20;
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_experiment(fig2_plan(options));
  const double elapsed = seconds_since(start);
  std::string detail;
  const bool ordered = fig2_ordering(result, detail);
  report(ordered && elapsed < 120.0, "Fig 2 smoke ordering (n=100, 20 trials)",
         detail + ", " + short_num(elapsed) + " s");
}

void fig2_full() {
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_experiment(fig2_plan({}));
  const double elapsed = seconds_since(start);
  std::string detail;
  const bool ordered = fig2_ordering(result, detail);
  report(ordered, "Fig 2 ordering (n=150, 100 trials)", detail + ", " + short_num(elapsed) + " s");

  std::size_t censored_cells = 0;
  std::string where;
  for (const auto& row : result.rows) {
    if (row.censored == 0) continue;
    ++censored_cells;
    where += " m=" + std::to_string(*row.m) + " " + to_string(row.algorithm) +
             (row.param_value ? " " + short_num(*row.param_value) : "") + " (" + std::to_string(row.censored) + "/" +
             std::to_string(row.trials) + ")";
  }
  report(censored_cells == 0, "Fig 2 without censoring at budget 1e9",
         std::to_string(censored_cells) + " of " + std::to_string(result.rows.size()) + " cells censored" +
             (where.empty() ? "" : ":" + where));
}

void fig3_majority() {
  const auto start = std::chrono::steady_clock::now();
  const auto plan = figure_plans(FigureKind::Fig3, {})[0];
  const auto result = run_experiment(plan);
  std::size_t wins = 0;
  std::size_t total = 0;
  std::string detail;
  for (double m : plan.sweep->values) {
    const ResultRow* standard = nullptr;
    const ResultRow* heavy = nullptr;
    for (const auto& row : result.rows) {
      if (row.sweep_value != m) continue;
      if (row.algorithm == HeuristicKind::MA) standard = &row;
      if (row.algorithm == HeuristicKind::MAGlobalHeavy) heavy = &row;
    }
    ++total;
    if (standard->censored == 0 && heavy->censored == 0 && *heavy->mean_iterations <= *standard->mean_iterations) {
      ++wins;
    }
    detail += " m=" + short_num(m) + ":" +
              (heavy->mean_iterations && standard->mean_iterations
                   ? short_num(*heavy->mean_iterations / *standard->mean_iterations)
                   : std::string("censored"));
  }
  report(wins >= 5, "Fig 3 heavy-tailed MA at most standard MA",
         std::to_string(wins) + " of " + std::to_string(total) + " m-values; heavy/standard" + detail + " (" +
             short_num(seconds_since(start)) + " s)");
}

void gamblers_ruin() {
  const std::size_t n = 400;
  const double alpha = 120.0;
  const double beta_hat = 2.5 / (1.0 + 2.5 / alpha) * (n / alpha);
  const auto low = static_cast<std::size_t>(std::floor(beta_hat));
  bool ok = true;
  double worst = 1.0;
  std::size_t cells = 0;
  for (std::size_t m = low + 3; m <= 20; ++m) {
    if (!(beta_hat < static_cast<double>(m) - 2)) continue;
    for (double d : {1.0, 3.0}) {
      const auto chain = build_level_chain(ProblemInstance::cliff(n, m, d), alpha);
      const double p = hitting_probability_before(chain, m - 2, low, m - 1);
      ++cells;
      ok = ok && p >= 0.6;
      worst = std::min(worst, p);
    }
  }
  report(ok && cells > 0, "climb after the cliff with probability at least 3/5",
         "beta_hat=" + short_num(beta_hat) + ", target level " + std::to_string(low) + ", " + std::to_string(cells) +
             " cells, min probability " + short_num(worst));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void figure_determinism() {
  const auto root = fs::temp_directory_path() / "ralab_acceptance_determinism";
  fs::remove_all(root);
  bool ok = true;
  std::string detail;
  for (const std::string kind : {"fig2", "fig3", "alpha-sweep"}) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = root / (kind + "_" + std::to_string(rep));
      const std::string cmd = std::string(RALAB_CLI_PATH) + " figure " + kind + " --out " + dir.string() +
                              " --n 30 --trials 4 --seed 77 --threads " + std::to_string(rep + 1) + " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ok = false;
      outputs[rep] = slurp(dir / (kind + ".csv"));
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    ok = ok && same;
    detail += " " + kind + (same ? " identical" : " differs");
  }
  fs::remove_all(root);
  report(ok, "figure output is byte-identical across invocations", detail.substr(1));
}

}  // namespace

int main(int argc, char** argv) {
  std::string suite = "quick";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--suite" && i + 1 < argc) {
      suite = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--suite quick|fig3|fig2-full]\n";
      return 2;
    }
  }
  if (suite == "quick") {
    oracle_self_consistency();
    simulation_vs_oracle();
    e1_corollary();
    rls_harmonic();
    start_anywhere();
    cliff_ma_bracketing();
    gamblers_ruin();
    figure_determinism();
    fig2_smoke();
    cliff_ea_dominance();
  } else if (suite == "fig3") {
    fig3_majority();
  } else if (suite == "fig2-full") {
    fig2_full();
  } else {
    std::cerr << "unknown suite '" << suite << "'\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}

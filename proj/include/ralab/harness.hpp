#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ralab/benchmarks.hpp"
#include "ralab/heuristics.hpp"

namespace ralab {

inline constexpr const char* kCodeVersion = "ralab 1.0.0";

struct InstanceTemplate {
  ProblemKind kind = ProblemKind::OneMax;
  std::size_t n = 1;
  std::optional<std::size_t> m;
  std::optional<double> d;

  ProblemInstance instantiate() const;
};

/// A mutation rate given either absolutely or as a multiple of 1/n.
struct MutationRate {
  double value = 0.0;
  bool per_n = false;

  double resolve(std::size_t n) const { return per_n ? value / static_cast<double>(n) : value; }
};

/// A heuristic as it appears in a plan. The instance size is not known until
/// the sweep is applied, hence the deferred rate.
struct AlgorithmSpec {
  HeuristicKind kind = HeuristicKind::RLS;
  std::optional<double> alpha;
  std::optional<MutationRate> p;
  std::optional<double> beta;
  std::optional<std::uint64_t> sd_R;

  /// Name and value of the parameter that distinguishes rows of this kind
  /// (alpha for the MA family, p for the EA, beta for Fast, R for SD).
  std::string param_name() const;
  std::optional<double> param_value(std::size_t n) const;

  HeuristicConfig resolve(std::size_t n, std::uint64_t budget) const;
};

struct Sweep {
  std::string name;  // n, m, d, alpha, p, beta
  std::vector<double> values;
};

struct ExperimentPlan {
  InstanceTemplate instance;
  std::optional<Sweep> sweep;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t budget = kDefaultBudget;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  std::size_t threads = 0;

  /// Throws std::invalid_argument. Also instantiates every cell so that
  /// domain errors surface before any trial runs.
  void validate() const;

  std::size_t cell_count() const;
};

struct ResultRow {
  ProblemKind problem = ProblemKind::OneMax;
  std::size_t n = 0;
  std::optional<std::size_t> m;
  std::optional<double> d;
  HeuristicKind algorithm = HeuristicKind::RLS;
  std::string param_name;
  std::optional<double> param_value;
  std::string sweep_name;
  std::optional<double> sweep_value;
  std::size_t trials = 0;
  std::size_t censored = 0;
  /// Over non-censored runs only; absent when every run was censored.
  std::optional<double> mean_iterations;
  /// Sample standard deviation over sqrt(#non-censored); needs two finished runs.
  std::optional<double> stderr_iterations;
  std::uint64_t master_seed = 0;
  std::vector<RunRecord> records;

  bool all_censored() const { return trials > 0 && censored == trials; }
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<ResultRow> rows;
  std::string code_version;
  std::string timestamp;
};

/// Seed of one trial: derive_seed(master, {sweep index, algorithm index, trial index}).
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t sweep_index, std::size_t algorithm_index,
                         std::size_t trial_index);

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every (sweep value, algorithm, trial) triple; rows come out in
/// (sweep, algorithm) order regardless of which worker finished first.
ExperimentResult run_experiment(const ExperimentPlan& plan, const ProgressCallback& progress = {});

/// Mean and standard error of the non-censored records.
void aggregate(ResultRow& row);

enum class ExportFormat { Csv, Json };

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader =
    "problem,n,m,d,algorithm,param_name,param_value,sweep_name,sweep_value,trials,censored,mean_iterations,stderr,"
    "master_seed";

/// Shortest-exact-enough decimal form: 17 significant digits, %g style.
std::string format_real(double value);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool with_header = true);
std::string to_json_text(const std::vector<ExperimentResult>& results);

/// Writes CSV or JSON to `path`; "-" means standard output.
void export_results(const std::vector<ExperimentResult>& results, ExportFormat format, const std::string& path);
void export_results(const ExperimentResult& result, ExportFormat format, const std::string& path);

/// Parses a CSV produced by write_csv. Records are not part of the CSV.
std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_csv_file(const std::filesystem::path& path);

struct OracleComparison {
  std::size_t row_index = 0;
  std::optional<double> exact;
  std::optional<double> z;
  bool flagged = false;
  /// "ok", "no oracle" (not one-bit MA or RLS), "no data" (mean or stderr missing).
  std::string marker;
};

inline constexpr double kZFlagThreshold = 4.0;

/// z = (mean - exact) / stderr against the exact expectation for `instance`
/// and `alpha`, for every MA or RLS row; |z| > 4 is flagged.
std::vector<OracleComparison> compare_with_oracle(const std::vector<ResultRow>& rows,
                                                  const ProblemInstance& instance, double alpha);

/// Same, with instance and alpha taken from each row's own columns.
std::vector<OracleComparison> compare_with_oracle(const std::vector<ResultRow>& rows);

void write_comparison(std::ostream& out, const std::vector<ResultRow>& rows,
                      const std::vector<OracleComparison>& comparisons);

enum class FigureKind { Fig2, Fig3, AlphaSweep };

FigureKind parse_figure_kind(const std::string& name);
std::string to_string(FigureKind kind);

struct FigureOptions {
  std::optional<std::size_t> n;
  std::optional<std::size_t> trials;
  std::optional<double> alpha;
  std::uint64_t master_seed = 20240101;
  std::uint64_t budget = kDefaultBudget;
  std::size_t threads = 0;
};

/// Experimental grids of the three figure reproductions.
///  fig2: Cliff n=150, d=3, m = 8,12,..,32; MA alpha in {20,30,40}, EA p = 1/n and
///        ceil(d+1)/n, Fast-EA beta=1.5, SD-EA R=n^3; 100 trials.
///  fig3: Cliff n=100, d=3, m = 8,12,..,32; MA, MA with standard-bit mutation (1/n),
///        MA with heavy-tailed mutation (beta=1.5), all alpha=20, plus EA p=1/n; 50 trials.
///  alpha-sweep: MA on Cliff n=100 for (d, m) in {(1,4), (2,6), (3,8)}, alpha = 15,20,..,60;
///        100 trials.
/// m values not below n are dropped so that shrunk smoke runs stay valid.
std::vector<ExperimentPlan> figure_plans(FigureKind kind, const FigureOptions& options);

}  // namespace ralab

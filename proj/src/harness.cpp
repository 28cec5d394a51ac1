#include "ralab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ralab/markov_oracle.hpp"

namespace ralab {

ProblemInstance InstanceTemplate::instantiate() const {
  if (kind == ProblemKind::OneMax) return ProblemInstance::onemax(n);
  if (!m || !d) throw std::invalid_argument("cliff requires --m and --d");
  return ProblemInstance::cliff(n, *m, *d);
}

std::string AlgorithmSpec::param_name() const {
  switch (kind) {
    case HeuristicKind::MA:
    case HeuristicKind::MAGlobalStd:
    case HeuristicKind::MAGlobalHeavy:
      return "alpha";
    case HeuristicKind::OEA: return "p";
    case HeuristicKind::FastOEA: return "beta";
    case HeuristicKind::SdOEA: return "R";
    case HeuristicKind::RLS: return "";
  }
  return "";
}

std::optional<double> AlgorithmSpec::param_value(std::size_t n) const {
  switch (kind) {
    case HeuristicKind::MA:
    case HeuristicKind::MAGlobalStd:
    case HeuristicKind::MAGlobalHeavy:
      return alpha;
    case HeuristicKind::OEA:
      return p ? std::optional<double>(p->resolve(n)) : std::nullopt;
    case HeuristicKind::FastOEA: return beta;
    case HeuristicKind::SdOEA: {
      HeuristicConfig c;
      c.sd_R = sd_R;
      return static_cast<double>(c.resolved_sd_R(n));
    }
    case HeuristicKind::RLS: return std::nullopt;
  }
  return std::nullopt;
}

HeuristicConfig AlgorithmSpec::resolve(std::size_t n, std::uint64_t budget) const {
  HeuristicConfig c;
  c.kind = kind;
  c.alpha = alpha;
  if (p) c.p = p->resolve(n);
  c.beta = beta;
  c.sd_R = sd_R;
  c.budget = budget;
  return c;
}

namespace {

struct Cell {
  std::size_t sweep_index;
  std::size_t algorithm_index;
  std::optional<double> sweep_value;
  InstanceTemplate instance;
  AlgorithmSpec algorithm;
};

bool is_integral(double v) { return std::isfinite(v) && v >= 0.0 && std::floor(v) == v; }

void apply_sweep(const std::string& name, double value, InstanceTemplate& instance, AlgorithmSpec& algorithm) {
  if (name == "n") {
    if (!is_integral(value) || value < 1) throw std::invalid_argument("sweep over n needs positive integers");
    instance.n = static_cast<std::size_t>(value);
  } else if (name == "m") {
    if (!is_integral(value) || value < 1) throw std::invalid_argument("sweep over m needs positive integers");
    instance.m = static_cast<std::size_t>(value);
  } else if (name == "d") {
    instance.d = value;
  } else if (name == "alpha") {
    if (algorithm.alpha) algorithm.alpha = value;
  } else if (name == "p") {
    if (algorithm.p) algorithm.p = MutationRate{value, false};
  } else if (name == "beta") {
    if (algorithm.beta) algorithm.beta = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + name + "' (expected n, m, d, alpha, p or beta)");
  }
}

std::vector<Cell> expand(const ExperimentPlan& plan) {
  std::vector<Cell> cells;
  const std::size_t sweep_count = plan.sweep ? plan.sweep->values.size() : 1;
  for (std::size_t s = 0; s < sweep_count; ++s) {
    for (std::size_t a = 0; a < plan.algorithms.size(); ++a) {
      Cell cell{s, a, std::nullopt, plan.instance, plan.algorithms[a]};
      if (plan.sweep) {
        cell.sweep_value = plan.sweep->values[s];
        apply_sweep(plan.sweep->name, *cell.sweep_value, cell.instance, cell.algorithm);
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace

void ExperimentPlan::validate() const {
  if (trials < 1) throw std::invalid_argument("--trials must be at least 1");
  if (budget < 1) throw std::invalid_argument("--budget must be positive");
  if (algorithms.empty()) throw std::invalid_argument("plan has no algorithms");
  if (sweep) {
    if (sweep->values.empty()) throw std::invalid_argument("sweep '" + sweep->name + "' has no values");
    for (std::size_t i = 1; i < sweep->values.size(); ++i) {
      if (!(sweep->values[i] > sweep->values[i - 1])) {
        throw std::invalid_argument("sweep values must be strictly increasing");
      }
    }
    const auto& name = sweep->name;
    if (name == "alpha" || name == "p" || name == "beta") {
      const bool used = std::any_of(algorithms.begin(), algorithms.end(), [&](const AlgorithmSpec& a) {
        return (name == "alpha" && a.alpha) || (name == "p" && a.p) || (name == "beta" && a.beta);
      });
      if (!used) throw std::invalid_argument("no algorithm in the plan takes the swept parameter '" + name + "'");
    }
    if ((name == "m" || name == "d") && instance.kind != ProblemKind::Cliff) {
      throw std::invalid_argument("sweep over '" + name + "' needs --problem cliff");
    }
  }
  for (const auto& cell : expand(*this)) {
    const ProblemInstance inst = cell.instance.instantiate();
    cell.algorithm.resolve(inst.n(), budget).validate(inst.n());
  }
}

std::size_t ExperimentPlan::cell_count() const {
  return (sweep ? sweep->values.size() : 1) * algorithms.size();
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t sweep_index, std::size_t algorithm_index,
                         std::size_t trial_index) {
  return derive_seed(master_seed, {sweep_index, algorithm_index, trial_index});
}

void aggregate(ResultRow& row) {
  row.trials = row.records.size();
  row.censored = 0;
  long double mean = 0.0L;
  long double m2 = 0.0L;
  std::size_t finished = 0;
  for (const auto& r : row.records) {
    if (!r.hit_optimum) {
      ++row.censored;
      continue;
    }
    ++finished;
    const long double x = static_cast<long double>(r.iterations);
    const long double delta = x - mean;
    mean += delta / static_cast<long double>(finished);
    m2 += delta * (x - mean);
  }
  row.mean_iterations.reset();
  row.stderr_iterations.reset();
  if (finished >= 1) row.mean_iterations = static_cast<double>(mean);
  if (finished >= 2) {
    const long double variance = m2 / static_cast<long double>(finished - 1);
    row.stderr_iterations = static_cast<double>(std::sqrt(variance / static_cast<long double>(finished)));
  }
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan, const ProgressCallback& progress) {
  plan.validate();
  const std::vector<Cell> cells = expand(plan);

  std::vector<Solver> solvers;
  solvers.reserve(cells.size());
  for (const auto& cell : cells) {
    const ProblemInstance inst = cell.instance.instantiate();
    solvers.emplace_back(cell.algorithm.resolve(inst.n(), plan.budget), inst);
  }

  const std::size_t total = cells.size() * plan.trials;
  std::vector<RunRecord> records(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  const auto worker = [&] {
    for (std::size_t task = next.fetch_add(1); task < total; task = next.fetch_add(1)) {
      const std::size_t c = task / plan.trials;
      const std::size_t trial = task % plan.trials;
      const auto seed = trial_seed(plan.master_seed, cells[c].sweep_index, cells[c].algorithm_index, trial);
      records[task] = solvers[c].run(seed);
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, total);
      }
    }
  };

  std::size_t threads = plan.threads;
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ExperimentResult result;
  result.plan = plan;
  result.code_version = kCodeVersion;
  result.timestamp = utc_timestamp();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    const ProblemInstance inst = cell.instance.instantiate();
    ResultRow row;
    row.problem = inst.kind();
    row.n = inst.n();
    row.m = inst.m();
    row.d = inst.d();
    row.algorithm = cell.algorithm.kind;
    row.param_name = cell.algorithm.param_name();
    row.param_value = cell.algorithm.param_value(inst.n());
    row.sweep_name = plan.sweep ? plan.sweep->name : "";
    row.sweep_value = cell.sweep_value;
    row.master_seed = plan.master_seed;
    row.records.assign(records.begin() + static_cast<std::ptrdiff_t>(c * plan.trials),
                       records.begin() + static_cast<std::ptrdiff_t>((c + 1) * plan.trials));
    aggregate(row);
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("failed to format a number");
  return std::string(buffer, end);
}

namespace {

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool with_header) {
  if (with_header) out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.problem) << ',' << r.n << ',' << (r.m ? std::to_string(*r.m) : "") << ','
        << optional_real(r.d) << ',' << to_string(r.algorithm) << ',' << r.param_name << ','
        << optional_real(r.param_value) << ',' << r.sweep_name << ',' << optional_real(r.sweep_value) << ','
        << r.trials << ',' << r.censored << ',' << optional_real(r.mean_iterations) << ','
        << optional_real(r.stderr_iterations) << ',' << r.master_seed << '\n';
  }
}

namespace {

using nlohmann::json;

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json plan_json(const ExperimentPlan& plan) {
  json algorithms = json::array();
  for (const auto& a : plan.algorithms) {
    json entry{{"kind", to_string(a.kind)}};
    if (a.alpha) entry["alpha"] = std::isinf(*a.alpha) ? json("inf") : json(*a.alpha);
    if (a.p) entry["p"] = {{"value", a.p->value}, {"per_n", a.p->per_n}};
    if (a.beta) entry["beta"] = *a.beta;
    if (a.sd_R) entry["sd_R"] = *a.sd_R;
    algorithms.push_back(std::move(entry));
  }
  json instance{{"problem", to_string(plan.instance.kind)}, {"n", plan.instance.n}};
  if (plan.instance.m) instance["m"] = *plan.instance.m;
  if (plan.instance.d) instance["d"] = *plan.instance.d;
  json out{{"instance", instance},
           {"algorithms", algorithms},
           {"trials", plan.trials},
           {"master_seed", plan.master_seed},
           {"budget", plan.budget}};
  if (plan.sweep) out["sweep"] = {{"name", plan.sweep->name}, {"values", plan.sweep->values}};
  return out;
}

json row_json(const ResultRow& r) {
  json records = json::array();
  for (const auto& rec : r.records) {
    json entry{{"seed", rec.seed},
               {"iterations", rec.iterations},
               {"hit_optimum", rec.hit_optimum},
               {"final_distance", rec.final_distance}};
    entry["censored_at"] = rec.censored_at ? json(*rec.censored_at) : json(nullptr);
    records.push_back(std::move(entry));
  }
  return json{{"problem", to_string(r.problem)},
              {"n", r.n},
              {"m", r.m ? json(*r.m) : json(nullptr)},
              {"d", optional_json(r.d)},
              {"algorithm", to_string(r.algorithm)},
              {"param_name", r.param_name},
              {"param_value", r.param_value && std::isinf(*r.param_value) ? json("inf") : optional_json(r.param_value)},
              {"sweep_name", r.sweep_name},
              {"sweep_value", optional_json(r.sweep_value)},
              {"trials", r.trials},
              {"censored", r.censored},
              {"all_censored_warning", r.all_censored()},
              {"mean_iterations", optional_json(r.mean_iterations)},
              {"stderr", optional_json(r.stderr_iterations)},
              {"master_seed", r.master_seed},
              {"records", std::move(records)}};
}

}  // namespace

std::string to_json_text(const std::vector<ExperimentResult>& results) {
  json experiments = json::array();
  for (const auto& result : results) {
    json rows = json::array();
    for (const auto& r : result.rows) rows.push_back(row_json(r));
    experiments.push_back({{"plan", plan_json(result.plan)},
                           {"rows", std::move(rows)},
                           {"provenance", {{"code_version", result.code_version}, {"timestamp", result.timestamp}}}});
  }
  return json{{"experiments", std::move(experiments)}}.dump(2);
}

void export_results(const std::vector<ExperimentResult>& results, ExportFormat format, const std::string& path) {
  const auto emit = [&](std::ostream& out) {
    if (format == ExportFormat::Csv) {
      out << kCsvHeader << '\n';
      for (const auto& result : results) write_csv(out, result.rows, false);
    } else {
      out << to_json_text(results) << '\n';
    }
  };
  if (path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ExportError("cannot open '" + path + "' for writing");
  emit(file);
  file.flush();
  if (!file) throw ExportError("failed while writing '" + path + "'");
}

void export_results(const ExperimentResult& result, ExportFormat format, const std::string& path) {
  export_results(std::vector<ExperimentResult>{result}, format, path);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_real(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw std::invalid_argument("bad number '" + text + "'");
  return value;
}

std::uint64_t parse_unsigned(const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw std::invalid_argument("bad integer '" + text + "'");
  return value;
}

std::optional<double> parse_optional_real(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_real(text);
}

}  // namespace

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header: " + line);
  std::vector<ResultRow> rows;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 14) {
      throw std::invalid_argument("CSV line " + std::to_string(line_number) + " has " + std::to_string(f.size()) +
                                  " fields, expected 14");
    }
    ResultRow r;
    r.problem = parse_problem_kind(f[0]);
    r.n = parse_unsigned(f[1]);
    if (!f[2].empty()) r.m = parse_unsigned(f[2]);
    r.d = parse_optional_real(f[3]);
    r.algorithm = parse_heuristic_kind(f[4]);
    r.param_name = f[5];
    r.param_value = parse_optional_real(f[6]);
    r.sweep_name = f[7];
    r.sweep_value = parse_optional_real(f[8]);
    r.trials = parse_unsigned(f[9]);
    r.censored = parse_unsigned(f[10]);
    r.mean_iterations = parse_optional_real(f[11]);
    r.stderr_iterations = parse_optional_real(f[12]);
    r.master_seed = parse_unsigned(f[13]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ExportError("cannot open '" + path.string() + "'");
  return read_csv(in);
}

namespace {

bool has_oracle(HeuristicKind kind) { return kind == HeuristicKind::MA || kind == HeuristicKind::RLS; }

OracleComparison compare_row(std::size_t index, const ResultRow& row, double exact) {
  OracleComparison c;
  c.row_index = index;
  c.exact = exact;
  if (!row.mean_iterations || !row.stderr_iterations) {
    c.marker = "no data";
    return c;
  }
  const double diff = *row.mean_iterations - exact;
  if (*row.stderr_iterations > 0.0) {
    c.z = diff / *row.stderr_iterations;
  } else {
    c.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  c.flagged = std::abs(*c.z) > kZFlagThreshold;
  c.marker = "ok";
  return c;
}

}  // namespace

std::vector<OracleComparison> compare_with_oracle(const std::vector<ResultRow>& rows,
                                                  const ProblemInstance& instance, double alpha) {
  std::optional<double> exact;
  std::vector<OracleComparison> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!has_oracle(rows[i].algorithm)) {
      out.push_back({i, std::nullopt, std::nullopt, false, "no oracle"});
      continue;
    }
    if (!exact) {
      const double a = rows[i].algorithm == HeuristicKind::RLS ? kInfiniteAlpha : alpha;
      exact = static_cast<double>(expected_upgrade_times(build_level_chain(instance, a)).E_expected_start);
    }
    out.push_back(compare_row(i, rows[i], *exact));
  }
  return out;
}

std::vector<OracleComparison> compare_with_oracle(const std::vector<ResultRow>& rows) {
  std::vector<OracleComparison> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ResultRow& row = rows[i];
    if (!has_oracle(row.algorithm)) {
      out.push_back({i, std::nullopt, std::nullopt, false, "no oracle"});
      continue;
    }
    const ProblemInstance instance = row.problem == ProblemKind::OneMax
                                         ? ProblemInstance::onemax(row.n)
                                         : ProblemInstance::cliff(row.n, row.m.value(), row.d.value());
    const double alpha = row.algorithm == HeuristicKind::RLS ? kInfiniteAlpha : row.param_value.value();
    const double exact = static_cast<double>(expected_upgrade_times(build_level_chain(instance, alpha)).E_expected_start);
    out.push_back(compare_row(i, row, exact));
  }
  return out;
}

void write_comparison(std::ostream& out, const std::vector<ResultRow>& rows,
                      const std::vector<OracleComparison>& comparisons) {
  out << "problem,n,m,d,algorithm,param_value,sweep_value,mean_iterations,stderr,exact,z,flagged,marker\n";
  for (const auto& c : comparisons) {
    const ResultRow& r = rows.at(c.row_index);
    out << to_string(r.problem) << ',' << r.n << ',' << (r.m ? std::to_string(*r.m) : "") << ','
        << optional_real(r.d) << ',' << to_string(r.algorithm) << ',' << optional_real(r.param_value) << ','
        << optional_real(r.sweep_value) << ',' << optional_real(r.mean_iterations) << ','
        << optional_real(r.stderr_iterations) << ',' << optional_real(c.exact) << ',' << optional_real(c.z) << ','
        << (c.flagged ? "yes" : "no") << ',' << c.marker << '\n';
  }
}

FigureKind parse_figure_kind(const std::string& name) {
  if (name == "fig2") return FigureKind::Fig2;
  if (name == "fig3") return FigureKind::Fig3;
  if (name == "alpha-sweep") return FigureKind::AlphaSweep;
  throw std::invalid_argument("unknown figure '" + name + "' (expected fig2, fig3 or alpha-sweep)");
}

std::string to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::Fig2: return "fig2";
    case FigureKind::Fig3: return "fig3";
    case FigureKind::AlphaSweep: return "alpha-sweep";
  }
  return "?";
}

namespace {

AlgorithmSpec ma(double alpha) { return {HeuristicKind::MA, alpha, std::nullopt, std::nullopt, std::nullopt}; }

AlgorithmSpec oea_per_n(double c) {
  return {HeuristicKind::OEA, std::nullopt, MutationRate{c, true}, std::nullopt, std::nullopt};
}

Sweep m_grid(std::size_t n) {
  Sweep s{"m", {}};
  for (std::size_t m = 8; m <= 32; m += 4) {
    if (m < n) s.values.push_back(static_cast<double>(m));
  }
  return s;
}

}  // namespace

std::vector<ExperimentPlan> figure_plans(FigureKind kind, const FigureOptions& options) {
  ExperimentPlan base;
  base.master_seed = options.master_seed;
  base.budget = options.budget;
  base.threads = options.threads;
  base.instance.kind = ProblemKind::Cliff;

  switch (kind) {
    case FigureKind::Fig2: {
      const double d = 3.0;
      base.instance.n = options.n.value_or(150);
      base.instance.d = d;
      base.trials = options.trials.value_or(100);
      base.sweep = m_grid(base.instance.n);
      base.algorithms = {ma(20),
                         ma(30),
                         ma(40),
                         oea_per_n(1.0),
                         oea_per_n(std::ceil(d + 1.0)),
                         {HeuristicKind::FastOEA, std::nullopt, std::nullopt, kDefaultBeta, std::nullopt},
                         {HeuristicKind::SdOEA, std::nullopt, std::nullopt, std::nullopt, std::nullopt}};
      return {base};
    }
    case FigureKind::Fig3: {
      const double alpha = options.alpha.value_or(20.0);
      base.instance.n = options.n.value_or(100);
      base.instance.d = 3.0;
      base.trials = options.trials.value_or(50);
      base.sweep = m_grid(base.instance.n);
      base.algorithms = {ma(alpha),
                         {HeuristicKind::MAGlobalStd, alpha, MutationRate{1.0, true}, std::nullopt, std::nullopt},
                         {HeuristicKind::MAGlobalHeavy, alpha, std::nullopt, kDefaultBeta, std::nullopt},
                         oea_per_n(1.0)};
      return {base};
    }
    case FigureKind::AlphaSweep: {
      base.instance.n = options.n.value_or(100);
      base.trials = options.trials.value_or(100);
      Sweep alphas{"alpha", {}};
      for (double a = 15.0; a <= 60.0; a += 5.0) alphas.values.push_back(a);
      base.sweep = alphas;
      base.algorithms = {ma(alphas.values.front())};
      std::vector<ExperimentPlan> plans;
      for (const auto& [d, m] : {std::pair{1.0, std::size_t{4}}, std::pair{2.0, std::size_t{6}},
                                 std::pair{3.0, std::size_t{8}}}) {
        if (m >= base.instance.n) continue;
        ExperimentPlan plan = base;
        plan.instance.d = d;
        plan.instance.m = m;
        plans.push_back(std::move(plan));
      }
      return plans;
    }
  }
  throw std::logic_error("unhandled figure kind");
}

}  // namespace ralab

#include "ralab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "ralab/markov_oracle.hpp"
#include "ralab/theory_bounds.hpp"

namespace ralab {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double parse_double(const std::string& text, const std::string& flag) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw UsageError(flag + ": '" + text + "' is not a number");
  return value;
}

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  return text;
}

/// "0.01" or "5/n".
MutationRate parse_rate(const std::string& text) {
  if (text.size() > 2 && text.substr(text.size() - 2) == "/n") {
    return {parse_double(text.substr(0, text.size() - 2), "--p"), true};
  }
  return {parse_double(text, "--p"), false};
}

}  // namespace

double parse_alpha(const std::string& text) {
  const std::string t = lower(text);
  if (t == "inf" || t == "+inf" || t == "infinity") return kInfiniteAlpha;
  const double value = parse_double(text, "--alpha");
  if (!std::isfinite(value)) throw UsageError("--alpha: '" + text + "' is not a number");
  return value;
}

Sweep parse_vary(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--vary expects NAME=START:STOP:STEP, got '" + text + "'");
  Sweep sweep{text.substr(0, eq), {}};
  std::vector<std::string> parts;
  std::istringstream in(text.substr(eq + 1));
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw UsageError("--vary expects NAME=START:STOP:STEP, got '" + text + "'");
  const double start = parse_double(parts[0], "--vary");
  const double stop = parse_double(parts[1], "--vary");
  const double step = parse_double(parts[2], "--vary");
  if (!(step > 0.0) || !(start <= stop) || !std::isfinite(stop)) {
    throw UsageError("--vary needs START <= STOP and STEP > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 100000) throw UsageError("--vary produces more than 100000 values");
  for (std::size_t k = 0; k < count; ++k) sweep.values.push_back(start + static_cast<double>(k) * step);
  return sweep;
}

namespace {

/// Rethrows a domain error from `f` as a usage error naming `flags`.
template <class F>
void with_flags(const std::string& flags, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.rfind("--", 0) == 0) throw;
    throw UsageError(flags + ": " + msg);
  }
}

struct InstanceFlags {
  std::string problem;
  std::size_t n = 0;
  std::size_t m = 0;
  double d = 0.0;
  CLI::Option* m_opt = nullptr;
  CLI::Option* d_opt = nullptr;

  void attach(CLI::App* app, bool problem_required = true) {
    auto* p = app->add_option("--problem", problem, "onemax or cliff")->check(CLI::IsMember({"onemax", "cliff"}));
    if (problem_required) p->required();
    app->add_option("--n", n, "number of bits")->required();
    m_opt = app->add_option("--m", m, "cliff offset (cliff only)");
    d_opt = app->add_option("--d", d, "cliff depth (cliff only)");
  }

  InstanceTemplate to_template() const {
    InstanceTemplate t;
    t.kind = parse_problem_kind(problem);
    t.n = n;
    if (t.kind == ProblemKind::OneMax) {
      if (m_opt->count() || d_opt->count()) throw UsageError("--m and --d apply to --problem cliff only");
    } else {
      if (m_opt->count()) t.m = m;
      if (d_opt->count()) t.d = d;
    }
    return t;
  }

  ProblemInstance instance() const {
    const InstanceTemplate t = to_template();
    if (t.kind == ProblemKind::Cliff && !t.m) throw UsageError("--problem cliff requires --m");
    if (t.kind == ProblemKind::Cliff && !t.d) throw UsageError("--problem cliff requires --d");
    std::optional<ProblemInstance> inst;
    with_flags("--n/--m/--d", [&] { inst = t.instantiate(); });
    return *inst;
  }
};

struct AlgorithmFlags {
  std::string algo;
  std::string alpha;
  std::string p;
  double beta = kDefaultBeta;
  std::uint64_t R = 0;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* R_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--algo", algo, "ma, oea, rls, fast, sd, ma-gstd or ma-gheavy")
        ->required()
        ->check(CLI::IsMember({"ma", "oea", "rls", "fast", "sd", "ma-gstd", "ma-gheavy"}));
    app->add_option("--alpha", alpha, "Metropolis acceptance base, a real > 1 or inf");
    app->add_option("--p", p, "mutation rate, absolute (0.01) or relative to n (5/n)");
    beta_opt = app->add_option("--beta", beta, "power-law exponent");
    R_opt = app->add_option("--R", R, "SD-EA failure-probability parameter (default n^3)");
  }

  /// Defaults: p = 1/n for oea and ma-gstd, beta = 1.5 for fast and ma-gheavy.
  AlgorithmSpec spec(const std::optional<std::string>& swept) const {
    AlgorithmSpec a;
    a.kind = parse_heuristic_kind(algo);
    const bool takes_alpha =
        a.kind == HeuristicKind::MA || a.kind == HeuristicKind::MAGlobalStd || a.kind == HeuristicKind::MAGlobalHeavy;
    const bool takes_p = a.kind == HeuristicKind::OEA || a.kind == HeuristicKind::MAGlobalStd;
    const bool takes_beta = a.kind == HeuristicKind::FastOEA || a.kind == HeuristicKind::MAGlobalHeavy;
    if (!alpha.empty()) {
      a.alpha = parse_alpha(alpha);
    } else if (takes_alpha && swept == "alpha") {
      a.alpha = 2.0;
    }
    if (!p.empty()) {
      a.p = parse_rate(p);
    } else if (takes_p) {
      a.p = MutationRate{1.0, true};
    }
    if (beta_opt->count() || takes_beta) a.beta = beta;
    if (R_opt->count()) a.sd_R = R;
    return a;
  }
};

ExportFormat parse_format(const std::string& name) { return name == "json" ? ExportFormat::Json : ExportFormat::Csv; }

void emit_results(const std::vector<ExperimentResult>& results, ExportFormat format, const std::string& path,
                  std::ostream& out) {
  if (path != "-") {
    export_results(results, format, path);
    return;
  }
  if (format == ExportFormat::Csv) {
    out << kCsvHeader << '\n';
    for (const auto& r : results) write_csv(out, r.rows, false);
  } else {
    out << to_json_text(results) << '\n';
  }
}

std::string real_text(long double value) { return format_real(static_cast<double>(value)); }

nlohmann::json real_json(long double value) {
  const double v = static_cast<double>(value);
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

void print_oracle(std::ostream& out, const ProblemInstance& instance, double alpha, const HittingTimes& h,
                  std::optional<std::size_t> start, bool as_json) {
  const std::size_t n = instance.n();
  if (as_json) {
    nlohmann::json levels = nlohmann::json::array();
    for (std::size_t i = 1; i <= n; ++i) {
      levels.push_back({{"level", i},
                        {"E", real_json(h.E[i])},
                        {"log10_E", h.log10_E[i]},
                        {"E_total", real_json(h.E_total_from[i])},
                        {"log10_E_total", h.log10_E_total_from[i]}});
    }
    nlohmann::json doc{{"instance", instance.describe()},
                       {"alpha", std::isinf(alpha) ? nlohmann::json("inf") : nlohmann::json(alpha)},
                       {"levels", levels},
                       {"E_expected_start", real_json(h.E_expected_start)},
                       {"log10_E_expected_start", h.log10_E_expected_start}};
    if (start) {
      doc["start_distance"] = *start;
      doc["E_from_start"] = real_json(h.E_total_from[*start]);
      doc["log10_E_from_start"] = h.log10_E_total_from[*start];
    }
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# " << instance.describe() << ", alpha=" << format_real(alpha) << '\n';
  out << "level,E_i,log10_E_i,E_total,log10_E_total\n";
  for (std::size_t i = 1; i <= n; ++i) {
    out << i << ',' << real_text(h.E[i]) << ',' << format_real(h.log10_E[i]) << ',' << real_text(h.E_total_from[i])
        << ',' << format_real(h.log10_E_total_from[i]) << '\n';
  }
  if (start) {
    out << "E_from_start_distance_" << *start << ',' << real_text(h.E_total_from[*start]) << ','
        << format_real(h.log10_E_total_from[*start]) << '\n';
  }
  out << "E_expected_start," << real_text(h.E_expected_start) << ',' << format_real(h.log10_E_expected_start)
      << '\n';
}

std::string magnitude_text(const Magnitude& m) {
  return format_real(m.linear()) + " (log10 " + format_real(m.log10) + ")";
}

void print_bound(std::ostream& out, const BoundReport& r, bool as_json) {
  if (as_json) {
    nlohmann::json validity = nlohmann::json::array();
    for (const auto& h : r.validity) validity.push_back({{"statement", h.statement}, {"status", to_string(h.status)}});
    nlohmann::json derived = nlohmann::json::object();
    for (const auto& [k, v] : r.derived) derived[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    const auto mag = [](const std::optional<Magnitude>& m) {
      return m ? nlohmann::json{{"value", std::isfinite(m->linear()) ? nlohmann::json(m->linear()) : nullptr},
                                {"log10", m->log10}}
               : nlohmann::json(nullptr);
    };
    nlohmann::json doc{{"bound", r.name},
                       {"lower", mag(r.lower)},
                       {"upper", mag(r.upper)},
                       {"main_term", mag(r.main_term)},
                       {"asymptotic_slack", r.asymptotic_slack},
                       {"validity", validity},
                       {"derived", derived},
                       {"notes", r.notes}};
    out << doc.dump(2) << '\n';
    return;
  }
  out << "bound: " << r.name << '\n';
  if (r.lower) out << "lower: " << magnitude_text(*r.lower) << '\n';
  if (r.upper) out << "upper: " << magnitude_text(*r.upper) << '\n';
  out << "main_term: " << magnitude_text(r.main_term) << '\n';
  out << "asymptotic_slack: " << (r.asymptotic_slack ? "yes" : "no") << '\n';
  for (const auto& h : r.validity) out << "hypothesis: " << h.statement << ": " << to_string(h.status) << '\n';
  for (const auto& [k, v] : r.derived) out << k << ": " << format_real(v) << '\n';
  if (!r.notes.empty()) out << "notes: " << r.notes << '\n';
}

void print_optimal(std::ostream& out, const OptimalParameters& o, bool as_json) {
  const std::pair<const char*, const std::optional<double>*> fields[] = {
      {"alpha_star_case1_exact", &o.alpha_star_case1_exact},
      {"alpha_star_case1_asym", &o.alpha_star_case1_asym},
      {"alpha_star_case2", &o.alpha_star_case2},
      {"p_star", &o.p_star}};
  if (as_json) {
    nlohmann::json doc{{"bound", "optimal"}, {"notes", o.notes}};
    for (const auto& [name, value] : fields) doc[name] = *value ? nlohmann::json(**value) : nlohmann::json(nullptr);
    out << doc.dump(2) << '\n';
    return;
  }
  out << "bound: optimal\n";
  for (const auto& [name, value] : fields) out << name << ": " << (*value ? format_real(**value) : "n/a") << '\n';
  for (const auto& note : o.notes) out << "notes: " << note << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ralab: Metropolis and (1+1) EA runtimes on OneMax and Cliff", "ralab"};
  app.require_subcommand(1);

  // run / sweep
  InstanceFlags run_instances[2];
  AlgorithmFlags run_algos[2];
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultBudget;
  std::size_t threads = 0;
  std::string out_path;
  std::string format = "csv";
  std::string vary;

  auto* run_cmd = app.add_subcommand("run", "simulate one configuration");
  auto* sweep_cmd = app.add_subcommand("sweep", "simulate one configuration over a parameter range");
  for (int k = 0; k < 2; ++k) {
    auto* cmd = k == 0 ? run_cmd : sweep_cmd;
    run_instances[k].attach(cmd);
    run_algos[k].attach(cmd);
    cmd->add_option("--trials", trials, "independent runs per cell")->required();
    cmd->add_option("--seed", seed, "master seed")->required();
    cmd->add_option("--budget", budget, "iteration cap per run");
    cmd->add_option("--threads", threads, "worker threads (default: all cores)");
    cmd->add_option("--out", out_path, "output file, - for stdout")->required();
    cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
  sweep_cmd->add_option("--vary", vary, "NAME=START:STOP:STEP with NAME in n, m, d, alpha, p, beta")->required();

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "exact expected hitting times of one-bit Metropolis");
  InstanceFlags oracle_instance;
  std::string oracle_alpha;
  std::size_t start_distance = 0;
  bool oracle_json = false;
  oracle_instance.attach(oracle_cmd);
  oracle_cmd->add_option("--alpha", oracle_alpha, "acceptance base, a real > 1 or inf")->required();
  auto* start_opt = oracle_cmd->add_option("--start-distance", start_distance, "report E from this distance");
  oracle_cmd->add_flag("--json", oracle_json, "JSON output");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form runtime bounds");
  std::string which;
  std::size_t bn = 0;
  std::size_t bm = 0;
  double bd = 0.0;
  std::string balpha;
  double bp = 0.0;
  bool bounds_json = false;
  bounds_cmd->add_option("--which", which, "onemax-ma, posdrift, e1, cliff-ma, cliff-ea or optimal")
      ->required()
      ->check(CLI::IsMember({"onemax-ma", "posdrift", "e1", "cliff-ma", "cliff-ea", "optimal"}));
  bounds_cmd->add_option("--n", bn, "number of bits")->required();
  auto* bm_opt = bounds_cmd->add_option("--m", bm, "cliff offset");
  auto* bd_opt = bounds_cmd->add_option("--d", bd, "cliff depth");
  bounds_cmd->add_option("--alpha", balpha, "acceptance base, a real > 1 or inf");
  auto* bp_opt = bounds_cmd->add_option("--p", bp, "mutation rate");
  bounds_cmd->add_flag("--json", bounds_json, "JSON output");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "z-scores of simulated means against the exact oracle");
  InstanceFlags compare_instance;
  std::string results_path;
  std::string compare_alpha;
  std::string compare_out = "-";
  compare_cmd->add_option("--results", results_path, "CSV written by run or sweep")->required();
  compare_instance.attach(compare_cmd);
  compare_cmd->add_option("--alpha", compare_alpha, "acceptance base, a real > 1 or inf")->required();
  compare_cmd->add_option("--out", compare_out, "output file, - for stdout");

  // figure
  auto* figure_cmd = app.add_subcommand("figure", "reproduce an experiment grid");
  std::string figure_name;
  std::string figure_dir;
  std::size_t figure_n = 0;
  std::size_t figure_trials = 0;
  std::string figure_alpha;
  FigureOptions figure_options;
  figure_cmd->add_option("kind", figure_name, "fig2, fig3 or alpha-sweep")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "alpha-sweep"}));
  figure_cmd->add_option("--out", figure_dir, "output directory")->required();
  auto* fn_opt = figure_cmd->add_option("--n", figure_n, "override the number of bits");
  auto* ft_opt = figure_cmd->add_option("--trials", figure_trials, "override the number of runs per cell");
  figure_cmd->add_option("--alpha", figure_alpha, "override alpha (fig3)");
  figure_cmd->add_option("--seed", figure_options.master_seed, "master seed");
  figure_cmd->add_option("--budget", figure_options.budget, "iteration cap per run");
  figure_cmd->add_option("--threads", figure_options.threads, "worker threads (default: all cores)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Validation: anything thrown here is a usage error and nothing has been written.
  std::optional<ExperimentPlan> plan;
  std::vector<ExperimentPlan> figure_plan_list;
  std::optional<ProblemInstance> instance;
  double alpha_value = 0.0;
  try {
    if (run_cmd->parsed() || sweep_cmd->parsed()) {
      const int k = sweep_cmd->parsed() ? 1 : 0;
      const InstanceFlags& run_instance = run_instances[k];
      const AlgorithmFlags& run_algo = run_algos[k];
      ExperimentPlan p;
      std::optional<std::string> swept;
      if (sweep_cmd->parsed()) {
        p.sweep = parse_vary(vary);
        swept = p.sweep->name;
      }
      p.instance = run_instance.to_template();
      if (p.instance.kind == ProblemKind::Cliff) {
        if (!p.instance.m && swept != "m") throw UsageError("--problem cliff requires --m");
        if (!p.instance.d && swept != "d") throw UsageError("--problem cliff requires --d");
      }
      p.algorithms = {run_algo.spec(swept)};
      p.trials = trials;
      p.master_seed = seed;
      p.budget = budget;
      p.threads = threads;
      if (!swept) (void)run_instance.instance();
      with_flags(swept ? "--vary " + *swept : std::string("--algo"), [&] { p.validate(); });
      plan = std::move(p);
    } else if (oracle_cmd->parsed()) {
      instance = oracle_instance.instance();
      alpha_value = parse_alpha(oracle_alpha);
      if (!(alpha_value > 1.0)) throw UsageError("--alpha must be > 1 (or inf)");
      if (start_opt->count() && start_distance > instance->n()) {
        throw UsageError("--start-distance must lie in [0, n]");
      }
    } else if (bounds_cmd->parsed()) {
      const bool cliff = which == "cliff-ma" || which == "cliff-ea" || which == "optimal";
      if (cliff && (!bm_opt->count() || !bd_opt->count())) throw UsageError("--which " + which + " requires --m and --d");
      if ((which == "onemax-ma" || which == "posdrift" || which == "e1" || which == "cliff-ma") && balpha.empty()) {
        throw UsageError("--which " + which + " requires --alpha");
      }
      if (which == "cliff-ea" && !bp_opt->count()) throw UsageError("--which cliff-ea requires --p");
      if (!balpha.empty()) alpha_value = parse_alpha(balpha);
    } else if (compare_cmd->parsed()) {
      instance = compare_instance.instance();
      alpha_value = parse_alpha(compare_alpha);
      if (!(alpha_value > 1.0)) throw UsageError("--alpha must be > 1 (or inf)");
    } else if (figure_cmd->parsed()) {
      if (fn_opt->count()) figure_options.n = figure_n;
      if (ft_opt->count()) figure_options.trials = figure_trials;
      if (!figure_alpha.empty()) {
        if (figure_name != "fig3") throw UsageError("--alpha applies to figure fig3 only");
        figure_options.alpha = parse_alpha(figure_alpha);
      }
      figure_plan_list = figure_plans(parse_figure_kind(figure_name), figure_options);
      for (const auto& p : figure_plan_list) p.validate();
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  // Work.
  try {
    if (plan) {
      const ExperimentResult result = run_experiment(*plan);
      emit_results({result}, parse_format(format), out_path, out);
      for (const auto& row : result.rows) {
        if (row.all_censored()) err << "warning: every run of a cell hit the budget; its mean is absent\n";
      }
    } else if (oracle_cmd->parsed()) {
      const HittingTimes h = expected_upgrade_times(build_level_chain(*instance, alpha_value));
      print_oracle(out, *instance, alpha_value, h,
                   start_opt->count() ? std::optional<std::size_t>(start_distance) : std::nullopt, oracle_json);
    } else if (bounds_cmd->parsed()) {
      if (which == "onemax-ma") {
        print_bound(out, onemax_ma_bound(bn, alpha_value), bounds_json);
      } else if (which == "posdrift") {
        print_bound(out, posdrift_bounds(bn, alpha_value), bounds_json);
      } else if (which == "e1") {
        print_bound(out, e1_bounds(bn, alpha_value), bounds_json);
      } else if (which == "cliff-ma") {
        print_bound(out, cliff_ma_bounds(bn, bm, bd, alpha_value), bounds_json);
      } else if (which == "cliff-ea") {
        print_bound(out, cliff_ea_bound(bn, bm, bd, bp), bounds_json);
      } else {
        print_optimal(out, optimal_parameters(bn, bm, bd), bounds_json);
      }
    } else if (compare_cmd->parsed()) {
      const auto rows = read_csv_file(results_path);
      const auto report = compare_with_oracle(rows, *instance, alpha_value);
      if (compare_out == "-") {
        write_comparison(out, rows, report);
      } else {
        std::ofstream file(compare_out);
        if (!file) throw ExportError("cannot open '" + compare_out + "' for writing");
        write_comparison(file, rows, report);
      }
    } else if (figure_cmd->parsed()) {
      std::vector<ExperimentResult> results;
      for (const auto& p : figure_plan_list) results.push_back(run_experiment(p));
      std::filesystem::create_directories(figure_dir);
      const auto path = std::filesystem::path(figure_dir) / (figure_name + ".csv");
      export_results(results, ExportFormat::Csv, path.string());
      err << "wrote " << path.string() << '\n';
    }
  } catch (const std::invalid_argument& e) {
    // Domain errors that only the computation can detect (e.g. bound preconditions).
    err << "error: " << e.what() << '\n';
    return bounds_cmd->parsed() ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace ralab

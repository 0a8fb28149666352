// icsa: anonymize tables, run the simulation grid, evaluate on real data and
// check the outlier bound. Exit codes: 0 ok, 2 bad input, 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "icsa/anonymize.hpp"
#include "icsa/csv.hpp"
#include "icsa/error.hpp"
#include "icsa/evaluate.hpp"
#include "icsa/simulate.hpp"
#include "icsa/theory.hpp"

namespace {

using namespace icsa;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    write_text(path, content);
}

struct AnonymizeArgs {
  std::string input, output = "-";
  std::string method = "sa";
  std::string s1, s2;
  std::vector<std::string> binary, numeric, drop;
  std::uint64_t seed = 1;
  int copies = 1;
  bool refit = false;
};

struct SimulateArgs {
  std::vector<int> scenarios{1}, ns{40}, ps{3};
  std::vector<double> kappas{16};
  std::vector<std::string> methods;
  int reps = 200;
  bool full = false, desk = false;
  std::uint64_t seed = 1;
  unsigned jobs = default_jobs();
  std::string output = "-";
};

struct EvaluateArgs {
  std::string input, output = "-";
  std::string outlier_column = "outlier";
  std::vector<std::string> drop;
  std::string method = "iii-iii", baseline = "sa";
  int runs = 2000, bootstrap = 2000, folds = 10;
  std::uint64_t seed = 1;
  unsigned jobs = default_jobs();
};

struct TheoremArgs {
  int n = 20, p = 4, trials = 1000;
  double m = 1.0;
  std::vector<double> hs{100, 1000, 10000};
  std::uint64_t seed = 1;
  std::string output = "-";
};

// Flat key = value file; a key fills the option of the same name unless the
// command line already set it.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidSpec, "cannot read config '" + path + "'");
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (!item.parents.empty() || item.name == "config") continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw Error(ErrorCode::InvalidSpec, "unknown config key '" + item.name + "'");
    if (opt->count() > 0) continue;
    try {
      if (opt->get_type_size() == 0) {
        opt->add_result(item.inputs.empty() || item.inputs.front() != "false" ? "true" : "false");
      } else {
        for (const auto& v : item.inputs) opt->add_result(v);
      }
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(ErrorCode::InvalidSpec, "config key '" + item.name + "': " + e.what());
    }
  }
}

void require_input(const std::string& input) {
  if (input.empty()) throw Error(ErrorCode::InvalidSpec, "--input is required");
}

int run_anonymize(const AnonymizeArgs& a) {
  require_input(a.input);
  LoadOptions opts;
  opts.force_binary = a.binary;
  opts.force_numeric = a.numeric;
  opts.drop = a.drop;
  const LoadedTable table = load_csv(a.input, opts);

  AnonymizationRequest req;
  if (!a.s1.empty() || !a.s2.empty()) {
    if (a.s1.empty() || a.s2.empty()) throw Error(ErrorCode::InvalidSpec, "--s1 and --s2 go together");
    req.spec1 = ScatterSpec::parse(a.s1);
    req.spec2 = ScatterSpec::parse(a.s2);
    req.binary_columns = table.data.binary_columns();
  } else {
    req = AnonymizationRequest::from_method(method_by_name(a.method), table.data.binary_columns());
  }
  if (a.copies < 1) throw Error(ErrorCode::InvalidSpec, "--copies must be positive");

  const DataMatrix& d = table.data;
  RngStream fit_rng(a.seed, stream_key(1));
  std::optional<Anonymizer> shared;
  if (!a.refit) shared.emplace(d.values, req, fit_rng);

  DataMatrix out;
  out.names = d.names;
  out.kinds = d.kinds;
  if (a.copies > 1) {
    out.names.insert(out.names.begin(), "copy");
    out.kinds.insert(out.kinds.begin(), ColumnKind::Numeric);
  }
  const Eigen::Index n = d.values.rows(), lead = a.copies > 1 ? 1 : 0;
  out.values.resize(n * a.copies, d.values.cols() + lead);
  for (int c = 0; c < a.copies; ++c) {
    RngStream rng(a.seed, stream_key(2, c));
    RowMatrix draw;
    if (a.refit) {
      RngStream refit_rng(a.seed, stream_key(3, c));
      draw = Anonymizer(d.values, req, refit_rng).draw(rng);
    } else {
      draw = shared->draw(rng);
    }
    if (lead) out.values.block(c * n, 0, n, 1).setConstant(c + 1);
    out.values.block(c * n, lead, n, d.values.cols()) = draw;
  }
  std::ostringstream s;
  write_csv(s, out);
  emit(a.output, s.str());
  return 0;
}

int run_simulate(const SimulateArgs& a) {
  if (a.full && a.desk) throw Error(ErrorCode::InvalidSpec, "--full and --desk are exclusive");
  GridConfig g;
  if (a.full) {
    g = GridConfig::full();
  } else if (a.desk) {
    g = GridConfig::desk();
  } else {
    g.scenarios = a.scenarios;
    g.ns = a.ns;
    g.ps = a.ps;
    g.kappas = a.kappas;
    g.replications = a.reps;
  }
  if (!a.methods.empty()) {
    g.methods.clear();
    for (const auto& m : a.methods) g.methods.push_back(method_by_name(m));
  } else if (g.methods.empty()) {
    for (const auto& m : method_names()) g.methods.push_back(method_by_name(m));
  }
  for (int s : g.scenarios)
    if (s != 1 && s != 2) throw Error(ErrorCode::InvalidSpec, "scenario must be 1 or 2");
  if (g.replications < 1) throw Error(ErrorCode::InvalidSpec, "--reps must be positive");
  g.seed = a.seed;
  g.jobs = a.jobs;
  emit(a.output, grid_csv(run_grid(g)));
  return 0;
}

int run_evaluate(const EvaluateArgs& a) {
  require_input(a.input);
  LoadOptions opts;
  opts.outlier_column = a.outlier_column;
  opts.drop = a.drop;
  const LoadedTable table = load_csv(a.input, opts);
  EvaluateConfig cfg;
  cfg.runs = a.runs;
  cfg.bootstrap = a.bootstrap;
  cfg.folds = a.folds;
  cfg.icsa_method = method_by_name(a.method);
  cfg.baseline = method_by_name(a.baseline);
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  const EvaluateReport rep = evaluate_real(table.data, table.outliers, cfg);
  emit(a.output, report_csv(rep));

  std::cerr << "rows " << table.data.values.rows() << ", outliers " << table.outliers.size() << "\n";
  for (const auto* s : {&rep.icsa_summary, &rep.baseline_summary}) {
    std::cerr << s->method << ": ORE " << s->ore_mean << " (" << s->ore_sd << ")";
    for (std::size_t k = 0; k < std::size(kUtilityKinds); ++k)
      std::cerr << ", " << to_string(kUtilityKinds[k]) << ' ' << s->metric_mean[k] << " (" << s->metric_sd[k] << ")";
    std::cerr << '\n';
  }
  std::cerr << "ratios above 1: " << rep.ratios_above_one << " of " << rep.ratios.size() * 5;
  if (rep.undefined_ratios) std::cerr << " (" << rep.undefined_ratios << " undefined)";
  std::cerr << ", failed runs " << rep.failed_runs << "\n";
  return 0;
}

int run_check_theorem(const TheoremArgs& a) {
  std::ostringstream s;
  s << "H,empirical_max,bound,pass\n";
  bool all = true;
  for (std::size_t i = 0; i < a.hs.size(); ++i) {
    RngStream rng(a.seed, stream_key(i));
    const OutlierConstruction c = make_construction(a.n, a.p, a.m, a.hs[i], rng);
    const BoundReport r = sa_min_ratio(c, a.trials, rng);
    s << format_double(a.hs[i]) << ',' << format_double(r.empirical_max) << ',' << format_double(r.bound) << ','
      << (r.pass ? 1 : 0) << '\n';
    all = all && r.pass;
  }
  emit(a.output, s.str());
  if (!all) std::cerr << "bound not met (or its condition H > (n + 2) M fails) for some H\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant coordinate selection anonymization"};
  app.require_subcommand(1);
  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value file mirroring the flags; flags win")
        ->check(CLI::ExistingFile);
  };

  AnonymizeArgs an;
  auto* anon = app.add_subcommand("anonymize", "Anonymize a CSV table");
  add_config(anon);
  anon->add_option("--input", an.input, "Input CSV with header")->check(CLI::ExistingFile);
  anon->add_option("--output", an.output, "Output CSV ('-' for stdout)");
  anon->add_option("--method", an.method, "sa, i-i, ii-i, ii-ii, iii75-i, iii50-i, iii75-ii, iii50-ii, iii-iii");
  anon->add_option("--s1", an.s1, "Explicit first scatter (cov, cov4, tyler, tyler-hr, hr, mcd50, identity, ...)");
  anon->add_option("--s2", an.s2, "Explicit second scatter");
  anon->add_option("--binary", an.binary, "Columns forced binary")->delimiter(',');
  anon->add_option("--numeric", an.numeric, "Columns never auto-tagged binary")->delimiter(',');
  anon->add_option("--drop", an.drop, "Columns left out")->delimiter(',');
  anon->add_option("--seed", an.seed);
  anon->add_option("--copies", an.copies, "Anonymized copies; more than one adds a leading 'copy' column");
  anon->add_flag("--refit", an.refit, "Refit the latent model for every copy");

  SimulateArgs sim;
  auto* simc = app.add_subcommand("simulate", "Run the simulation grid");
  add_config(simc);
  simc->add_option("--scenario", sim.scenarios)->delimiter(',');
  simc->add_option("--n", sim.ns)->delimiter(',');
  simc->add_option("--p", sim.ps, "Feature count (data dimension is p + 1)")->delimiter(',');
  simc->add_option("--kappa", sim.kappas)->delimiter(',');
  simc->add_option("--reps", sim.reps);
  simc->add_option("--methods", sim.methods, "Default: all")->delimiter(',');
  simc->add_flag("--full", sim.full, "Full grid, 1000 replications");
  simc->add_flag("--desk", sim.desk, "Reduced grid, 50 replications");
  simc->add_option("--seed", sim.seed);
  simc->add_option("--jobs", sim.jobs)->check(CLI::PositiveNumber);
  simc->add_option("--output", sim.output);

  EvaluateArgs ev;
  auto* evc = app.add_subcommand("evaluate", "Compare two methods on a real dataset");
  add_config(evc);
  evc->add_option("--input", ev.input)->check(CLI::ExistingFile);
  evc->add_option("--outlier-column", ev.outlier_column);
  evc->add_option("--drop", ev.drop)->delimiter(',');
  evc->add_option("--method", ev.method);
  evc->add_option("--baseline", ev.baseline);
  evc->add_option("--runs", ev.runs)->check(CLI::PositiveNumber);
  evc->add_option("--bootstrap", ev.bootstrap)->check(CLI::PositiveNumber);
  evc->add_option("--folds", ev.folds)->check(CLI::Range(2, 1000));
  evc->add_option("--seed", ev.seed);
  evc->add_option("--jobs", ev.jobs)->check(CLI::PositiveNumber);
  evc->add_option("--output", ev.output);

  TheoremArgs th;
  auto* thc = app.add_subcommand("check-theorem", "Sample SA draws on the outlier construction");
  add_config(thc);
  thc->add_option("--n", th.n, "Inlier count")->check(CLI::PositiveNumber);
  thc->add_option("--p", th.p)->check(CLI::PositiveNumber);
  thc->add_option("--M", th.m, "Inlier norm bound")->check(CLI::PositiveNumber);
  thc->add_option("--H", th.hs, "Outlier norms")->delimiter(',');
  thc->add_option("--trials", th.trials)->check(CLI::PositiveNumber);
  thc->add_option("--seed", th.seed);
  thc->add_option("--output", th.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (!config_path.empty()) {
      for (CLI::App* sub : {anon, simc, evc, thc})
        if (*sub) apply_config(*sub, config_path);
    }
    if (*anon) return run_anonymize(an);
    if (*simc) return run_simulate(sim);
    if (*evc) return run_evaluate(ev);
    if (*thc) return run_check_theorem(th);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_numerical(e.code()) ? kExitNumerical : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}

#include "icsa/evaluate.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "icsa/csv.hpp"
#include "icsa/error.hpp"
#include "icsa/lasso.hpp"
#include "icsa/parallel.hpp"

namespace icsa {

EvaluateConfig::EvaluateConfig() : icsa_method(method_by_name("iii-iii")), baseline(sa_method()) {}

namespace {

constexpr std::size_t kKinds = 5;

// Per run: ORE and, for each response, the five RPE values.
struct RunOutcome {
  double ore = 0;
  std::vector<std::array<double, kKinds>> utility;  // raw utility values
  std::vector<std::array<double, kKinds>> rpe;
};

struct MethodRuns {
  std::vector<std::optional<RunOutcome>> runs;
};

double utility_value(UtilityKind k, double distance, const SelectionMetrics& s) {
  switch (k) {
    case UtilityKind::Distance: return distance;
    case UtilityKind::Recall: return s.recall;
    case UtilityKind::Fpr: return s.fpr;
    case UtilityKind::Precision: return s.precision;
    case UtilityKind::Jaccard: return s.jaccard;
  }
  return 0;
}

MethodSummary summarize_method(const std::string& name, const MethodRuns& m) {
  MethodSummary s;
  s.method = name;
  std::vector<double> ores;
  std::array<std::vector<double>, kKinds> vals;
  for (const auto& r : m.runs) {
    if (!r) continue;
    ores.push_back(r->ore);
    for (const auto& u : r->utility)
      for (std::size_t k = 0; k < kKinds; ++k) vals[k].push_back(u[k]);
  }
  auto mean_sd = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = sd = std::nan("");
    if (v.empty()) return;
    double sum = 0;
    for (double x : v) sum += x;
    mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  mean_sd(ores, s.ore_mean, s.ore_sd);
  for (std::size_t k = 0; k < kKinds; ++k) mean_sd(vals[k], s.metric_mean[k], s.metric_sd[k]);
  return s;
}

// A cell whose ratio is undefined (every baseline efficiency infinite, or a
// zero baseline mean) is reported as NaN instead of failing the report.
template <class Fn>
RatioCi ratio_or_nan(Fn&& fn, std::size_t& undefined) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UndefinedRatio) throw;
    ++undefined;
    const double nan = std::nan("");
    return RatioCi{nan, nan, nan, 0, 0};
  }
}

}  // namespace

EvaluateReport evaluate_real(const DataMatrix& data, const IndexSet& outliers, const EvaluateConfig& cfg) {
  const int attrs = cfg.predictors + cfg.responses;
  if (static_cast<int>(data.cols()) != attrs) {
    std::ostringstream msg;
    msg << "expected " << attrs << " numeric attribute columns, found " << data.cols();
    throw Error(ErrorCode::SchemaError, msg.str());
  }
  if (outliers.empty()) throw Error(ErrorCode::SchemaError, "no outlier flags: the outlier column is required");
  if (cfg.runs < 1 || cfg.bootstrap < 1) throw Error(ErrorCode::InvalidSpec, "runs and bootstrap must be positive");

  const RowMatrix& x = data.values;
  const auto predictors = [&](const RowMatrix& m) -> RowMatrix { return m.leftCols(cfg.predictors); };
  const auto response = [&](const RowMatrix& m, int r) -> Vector { return m.col(cfg.predictors + r); };

  std::vector<LassoSolution> original(cfg.responses);
  std::vector<IndexSet> original_sel(cfg.responses);
  for (int r = 0; r < cfg.responses; ++r) {
    RngStream cv(cfg.seed, stream_key(10, r));
    original[r] = lasso_cv(predictors(x), response(x, r), cfg.folds, cv).solution;
    original_sel[r] = original[r].selected();
  }

  const std::array<const Method*, 2> methods{&cfg.icsa_method, &cfg.baseline};
  std::array<MethodRuns, 2> results;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    RngStream fit_rng(cfg.seed, stream_key(20, mi));
    const Anonymizer anonymizer(x, AnonymizationRequest::from_method(*methods[mi], data.binary_columns()), fit_rng);
    results[mi].runs.resize(static_cast<std::size_t>(cfg.runs));
    parallel_for(results[mi].runs.size(), cfg.jobs, [&](std::size_t t) {
      RngStream rng(cfg.seed, stream_key(30, mi, t));
      try {
        const RowMatrix anon = anonymizer.draw(rng);
        RunOutcome out;
        out.ore = ore(x, anon, outliers);
        for (int r = 0; r < cfg.responses; ++r) {
          RngStream cv(cfg.seed, stream_key(40, t, r));  // same folds for both methods
          const LassoSolution sol = lasso_cv(predictors(anon), response(anon, r), cfg.folds, cv).solution;
          const double dist = utility_distance(original[r].coefficients, sol.coefficients);
          const SelectionMetrics sel = selection_metrics(original_sel[r], sol.selected(), cfg.predictors);
          std::array<double, kKinds> u{}, e{};
          for (std::size_t k = 0; k < kKinds; ++k) {
            u[k] = utility_value(kUtilityKinds[k], dist, sel);
            e[k] = rpe(out.ore, u[k], kUtilityKinds[k]);
          }
          out.utility.push_back(u);
          out.rpe.push_back(e);
        }
        results[mi].runs[t] = std::move(out);
      } catch (const Error&) {
        results[mi].runs[t].reset();
      }
    });
  }

  EvaluateReport report;
  for (int r = 0; r < cfg.responses; ++r) report.variables.push_back(data.names[cfg.predictors + r]);
  for (const auto& m : results)
    for (const auto& run : m.runs) report.failed_runs += !run.has_value();

  report.ratios.resize(cfg.responses);
  for (std::size_t k = 0; k < kKinds; ++k) {
    std::array<std::vector<std::vector<double>>, 2> grouped;
    for (int r = 0; r < cfg.responses; ++r) {
      std::array<std::vector<double>, 2> samples;
      for (std::size_t mi = 0; mi < 2; ++mi)
        for (const auto& run : results[mi].runs)
          if (run) samples[mi].push_back(run->rpe[r][k]);
      RngStream boot(cfg.seed, stream_key(50, r, k));
      report.ratios[r][k] = ratio_or_nan(
          [&] { return rpe_ratio_ci(samples[0], samples[1], cfg.bootstrap, boot); }, report.undefined_ratios);
      report.ratios_above_one += report.ratios[r][k].ratio > 1.0;
    }
    for (std::size_t mi = 0; mi < 2; ++mi)
      for (const auto& run : results[mi].runs) {
        if (!run) continue;
        std::vector<double> g;
        for (int r = 0; r < cfg.responses; ++r) g.push_back(run->rpe[r][k]);
        grouped[mi].push_back(std::move(g));
      }
    RngStream boot(cfg.seed, stream_key(60, k));
    report.overall[k] = ratio_or_nan(
        [&] { return rpe_ratio_ci_grouped(grouped[0], grouped[1], cfg.bootstrap, boot); }, report.undefined_ratios);
  }
  report.icsa_summary = summarize_method(cfg.icsa_method.name, results[0]);
  report.baseline_summary = summarize_method(cfg.baseline.name, results[1]);
  return report;
}

std::string report_csv(const EvaluateReport& report) {
  std::ostringstream out;
  out << "variable,metric,ratio,lower,upper,excluded_icsa,excluded_sa\n";
  auto row = [&](const std::string& var, std::size_t k, const RatioCi& c) {
    out << var << ',' << to_string(kUtilityKinds[k]) << ',' << format_double(c.ratio) << ','
        << format_double(c.lower) << ',' << format_double(c.upper) << ',' << c.excluded_icsa << ','
        << c.excluded_sa << '\n';
  };
  for (std::size_t v = 0; v < report.variables.size(); ++v)
    for (std::size_t k = 0; k < kKinds; ++k) row(report.variables[v], k, report.ratios[v][k]);
  for (std::size_t k = 0; k < kKinds; ++k) row("Overall", k, report.overall[k]);
  return out.str();
}

}  // namespace icsa

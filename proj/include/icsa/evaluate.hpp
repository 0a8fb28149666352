#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "icsa/anonymize.hpp"
#include "icsa/metrics.hpp"
#include "icsa/types.hpp"

namespace icsa {

struct EvaluateConfig {
  int runs = 2000;
  int bootstrap = 2000;
  int folds = 10;
  int predictors = 20;
  int responses = 10;
  Method icsa_method;  // defaults to iii-iii
  Method baseline;     // defaults to sa
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  EvaluateConfig();
};

struct MethodSummary {
  std::string method;
  double ore_mean = 0, ore_sd = 0;
  // Distance, recall, FPR, precision, Jaccard over all runs and responses.
  std::array<double, 5> metric_mean{}, metric_sd{};
};

struct EvaluateReport {
  std::vector<std::string> variables;  // response names
  // ratios[v][k]: variable v, utility kind k (kUtilityKinds order)
  std::vector<std::array<RatioCi, 5>> ratios;
  std::array<RatioCi, 5> overall;
  MethodSummary icsa_summary;
  MethodSummary baseline_summary;
  std::size_t ratios_above_one = 0;
  std::size_t undefined_ratios = 0;  // cells reported as NaN
  std::size_t failed_runs = 0;
};

// Models each of the last `responses` attribute columns from the first
// `predictors` with 10-fold Lasso, on the original data and on `runs`
// anonymized copies per method; compares relative privacy efficiencies.
// Throws SchemaError unless the table has predictors + responses numeric
// columns and a nonempty outlier set.
EvaluateReport evaluate_real(const DataMatrix& data, const IndexSet& outliers,
                             const EvaluateConfig& config);

std::string report_csv(const EvaluateReport& report);

}  // namespace icsa

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "icsa/rng.hpp"
#include "icsa/types.hpp"

namespace icsa {

// Outlier replication error: mean over k in `outliers` of
// min_i ||orig_k - anon_i||^2 / ||orig_k||^2, searching all anonymized rows.
double ore(const RowMatrix& original, const RowMatrix& anonymized, const IndexSet& outliers);

// Least squares without intercept. Throws SingularDesign when X'X has an
// eigenvalue below 1e-10 times its largest.
Vector ols(const RowMatrix& x, const Vector& y);

double utility_distance(const Vector& beta_true, const Vector& beta_hat);

struct SelectionOutcome {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

enum SelectionFlag : std::uint8_t {
  kRecallUndefined = 1,
  kFprUndefined = 2,
  kPrecisionUndefined = 4,
  kJaccardUndefined = 8,
};

struct SelectionMetrics {
  SelectionOutcome outcome;
  double recall = 0, fpr = 0, precision = 0, jaccard = 0;
  std::uint8_t flags = 0;
};

// Zero denominators: recall, precision and Jaccard are 1 when both sets are
// empty and 0 otherwise; FPR is 0. Each such case sets its flag.
SelectionMetrics selection_metrics(const IndexSet& original, const IndexSet& anonymized,
                                   std::size_t universe);

enum class UtilityKind { Distance, Recall, Fpr, Precision, Jaccard };
inline constexpr UtilityKind kUtilityKinds[] = {UtilityKind::Distance, UtilityKind::Recall,
                                                UtilityKind::Fpr, UtilityKind::Precision,
                                                UtilityKind::Jaccard};
std::string_view to_string(UtilityKind k);

// Returned by rpe() when the utility loss is zero.
inline constexpr double kInfiniteEfficiency = std::numeric_limits<double>::infinity();

// sqrt(ORE) over the utility loss: the value itself for distance and FPR,
// 1 - value for recall, precision and Jaccard.
double rpe(double ore_value, double utility_value, UtilityKind kind);

struct RatioCi {
  double ratio = 0, lower = 0, upper = 0;
  std::size_t excluded_icsa = 0, excluded_sa = 0;  // infinite efficiencies dropped
};

// Ratio of means with a percentile bootstrap (2.5 / 97.5). Each method's
// samples are resampled independently. Non-finite samples are excluded.
RatioCi rpe_ratio_ci(std::span<const double> icsa, std::span<const double> sa, int bootstrap,
                     RngStream& rng);

// Same, with samples grouped by replication: the resampling unit is a group
// and a resample's mean pools all finite values of the drawn groups.
RatioCi rpe_ratio_ci_grouped(const std::vector<std::vector<double>>& icsa,
                             const std::vector<std::vector<double>>& sa, int bootstrap,
                             RngStream& rng);

// Type-7 (linear interpolation) sample quantile; copies and sorts.
double quantile(std::span<const double> values, double prob);
double median(std::span<const double> values);

struct MedianDifference {
  double difference = 0;  // median(a) - median(b)
  double lower = 0;       // 5th bootstrap percentile
  double upper = 0;       // 95th bootstrap percentile
};

// Bootstrap of median(a) - median(b). Paired resampling draws one index set
// for both samples (requires equal sizes).
MedianDifference bootstrap_median_difference(std::span<const double> a, std::span<const double> b,
                                             int bootstrap, RngStream& rng, bool paired);

}  // namespace icsa

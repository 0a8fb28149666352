#include "icsa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icsa/error.hpp"
#include "icsa/kernels.hpp"
#include "icsa/linalg.hpp"

namespace icsa {

double ore(const RowMatrix& original, const RowMatrix& anonymized, const IndexSet& outliers) {
  if (original.cols() != anonymized.cols())
    throw Error(ErrorCode::ShapeError, "original and anonymized column counts differ");
  if (outliers.empty()) throw Error(ErrorCode::EmptyOutlierSet, "no outliers given");
  const std::size_t n = static_cast<std::size_t>(anonymized.rows());
  const std::size_t p = static_cast<std::size_t>(anonymized.cols());
  double total = 0.0;
  for (std::size_t k : outliers) {
    if (k >= static_cast<std::size_t>(original.rows()))
      throw Error(ErrorCode::ShapeError, "outlier index out of range");
    const auto row = original.row(static_cast<Eigen::Index>(k));
    const double norm2 = row.squaredNorm();
    if (!(norm2 > 0.0))
      throw Error(ErrorCode::UndefinedNormalization, "outlier row " + std::to_string(k) + " has zero norm");
    const Eigen::RowVectorXd point = row;
    total += kernels::nearest_row(anonymized.data(), n, p, point.data()).sq_dist / norm2;
  }
  return total / static_cast<double>(outliers.size());
}

Vector ols(const RowMatrix& x, const Vector& y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::ShapeError, "design and response lengths differ");
  const Matrix xtx = x.transpose() * x;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(xtx, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().maxCoeff();
  if (!(largest > 0.0) || !(eig.eigenvalues().minCoeff() > 1e-10 * largest))
    throw Error(ErrorCode::SingularDesign, "X'X is numerically singular");
  const Matrix xd = x;
  return xd.householderQr().solve(y);
}

double utility_distance(const Vector& beta_true, const Vector& beta_hat) {
  if (beta_true.size() != beta_hat.size()) throw Error(ErrorCode::ShapeError, "coefficient lengths differ");
  return (beta_true - beta_hat).norm();
}

SelectionMetrics selection_metrics(const IndexSet& original, const IndexSet& anonymized,
                                   std::size_t universe) {
  std::vector<char> in_orig(universe, 0), in_anon(universe, 0);
  for (std::size_t i : original) {
    if (i >= universe) throw Error(ErrorCode::ShapeError, "selected index outside the universe");
    in_orig[i] = 1;
  }
  for (std::size_t i : anonymized) {
    if (i >= universe) throw Error(ErrorCode::ShapeError, "selected index outside the universe");
    in_anon[i] = 1;
  }
  SelectionMetrics m;
  auto& o = m.outcome;
  for (std::size_t i = 0; i < universe; ++i) {
    if (in_orig[i] && in_anon[i]) ++o.tp;
    else if (!in_orig[i] && in_anon[i]) ++o.fp;
    else if (in_orig[i] && !in_anon[i]) ++o.fn;
    else ++o.tn;
  }
  const bool both_empty = o.tp + o.fp + o.fn == 0;
  auto ratio = [&](std::size_t num, std::size_t den, SelectionFlag flag) {
    if (den > 0) return static_cast<double>(num) / static_cast<double>(den);
    m.flags |= flag;
    return both_empty ? 1.0 : 0.0;
  };
  m.recall = ratio(o.tp, o.tp + o.fn, kRecallUndefined);
  m.precision = ratio(o.tp, o.tp + o.fp, kPrecisionUndefined);
  m.jaccard = ratio(o.tp, o.tp + o.fp + o.fn, kJaccardUndefined);
  if (o.fp + o.tn > 0) {
    m.fpr = static_cast<double>(o.fp) / static_cast<double>(o.fp + o.tn);
  } else {
    m.fpr = 0.0;
    m.flags |= kFprUndefined;
  }
  return m;
}

std::string_view to_string(UtilityKind k) {
  switch (k) {
    case UtilityKind::Distance: return "distance";
    case UtilityKind::Recall: return "recall";
    case UtilityKind::Fpr: return "fpr";
    case UtilityKind::Precision: return "precision";
    case UtilityKind::Jaccard: return "jaccard";
  }
  return "?";
}

double rpe(double ore_value, double utility_value, UtilityKind kind) {
  double loss = utility_value;
  if (kind == UtilityKind::Recall || kind == UtilityKind::Precision || kind == UtilityKind::Jaccard)
    loss = 1.0 - utility_value;
  if (!(loss > 0.0)) return kInfiniteEfficiency;
  return std::sqrt(ore_value) / loss;
}

double quantile(std::span<const double> values, double prob) {
  if (values.empty()) throw Error(ErrorCode::ShapeError, "quantile of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = prob * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

namespace {

struct GroupStats {
  double sum = 0;
  std::size_t count = 0;
  std::size_t excluded = 0;
};

std::vector<GroupStats> group_stats(const std::vector<std::vector<double>>& groups) {
  std::vector<GroupStats> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    GroupStats s;
    for (double v : g) {
      if (std::isfinite(v)) {
        s.sum += v;
        ++s.count;
      } else {
        ++s.excluded;
      }
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

RatioCi rpe_ratio_ci_grouped(const std::vector<std::vector<double>>& icsa,
                             const std::vector<std::vector<double>>& sa, int bootstrap,
                             RngStream& rng) {
  if (icsa.empty() || sa.empty()) throw Error(ErrorCode::ShapeError, "empty sample set");
  const auto gi = group_stats(icsa);
  const auto gs = group_stats(sa);
  auto pooled_mean = [](const std::vector<GroupStats>& g, auto&& pick) {
    double sum = 0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const GroupStats& s = g[pick(k)];
      sum += s.sum;
      count += s.count;
    }
    return count ? sum / static_cast<double>(count) : std::nan("");
  };
  auto identity = [](std::size_t k) { return k; };

  RatioCi out;
  for (const auto& s : gi) out.excluded_icsa += s.excluded;
  for (const auto& s : gs) out.excluded_sa += s.excluded;
  const double mi = pooled_mean(gi, identity);
  const double ms = pooled_mean(gs, identity);
  if (!(ms != 0.0) || std::isnan(ms) || std::isnan(mi))
    throw Error(ErrorCode::UndefinedRatio, "mean SA efficiency is zero or undefined");
  out.ratio = mi / ms;

  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(bootstrap));
  for (int b = 0; b < bootstrap; ++b) {
    const double bi = pooled_mean(gi, [&](std::size_t) { return rng.uniform_index(gi.size()); });
    const double bs = pooled_mean(gs, [&](std::size_t) { return rng.uniform_index(gs.size()); });
    if (bs != 0.0 && std::isfinite(bi) && std::isfinite(bs)) draws.push_back(bi / bs);
  }
  if (draws.empty()) throw Error(ErrorCode::UndefinedRatio, "no finite bootstrap ratios");
  out.lower = quantile(draws, 0.025);
  out.upper = quantile(draws, 0.975);
  return out;
}

RatioCi rpe_ratio_ci(std::span<const double> icsa, std::span<const double> sa, int bootstrap,
                     RngStream& rng) {
  std::vector<std::vector<double>> gi, gs;
  gi.reserve(icsa.size());
  gs.reserve(sa.size());
  for (double v : icsa) gi.push_back({v});
  for (double v : sa) gs.push_back({v});
  return rpe_ratio_ci_grouped(gi, gs, bootstrap, rng);
}

MedianDifference bootstrap_median_difference(std::span<const double> a, std::span<const double> b,
                                             int bootstrap, RngStream& rng, bool paired) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::ShapeError, "empty sample");
  if (paired && a.size() != b.size()) throw Error(ErrorCode::ShapeError, "paired samples differ in size");
  MedianDifference out;
  out.difference = median(a) - median(b);
  std::vector<double> ra(a.size()), rb(b.size()), diffs;
  diffs.reserve(static_cast<std::size_t>(bootstrap));
  for (int rep = 0; rep < bootstrap; ++rep) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t k = rng.uniform_index(a.size());
      ra[i] = a[k];
      if (paired) rb[i] = b[k];
    }
    if (!paired)
      for (std::size_t i = 0; i < b.size(); ++i) rb[i] = b[rng.uniform_index(b.size())];
    diffs.push_back(median(ra) - median(rb));
  }
  out.lower = quantile(diffs, 0.05);
  out.upper = quantile(diffs, 0.95);
  return out;
}

}  // namespace icsa

#include "icsa/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "icsa/anonymize.hpp"
#include "icsa/error.hpp"
#include "icsa/linalg.hpp"

namespace icsa {

OutlierConstruction make_construction(int n, int p, double m, double h, RngStream& rng) {
  if (n < 1 || p < 1) throw Error(ErrorCode::InvalidDimension, "construction needs n >= 1 and p >= 1");
  RowMatrix data = RowMatrix::Zero(n + 1, p);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd dir(p);
    for (int j = 0; j < p; ++j) dir(j) = rng.normal();
    const double radius = m * std::pow(rng.uniform(), 1.0 / p);
    data.row(i) = dir.normalized() * radius;
  }
  data(n, 0) = h;
  return make_construction(std::move(data), m);
}

OutlierConstruction make_construction(RowMatrix data, double m) {
  if (data.rows() < 2) throw Error(ErrorCode::InvalidDimension, "construction needs an inlier and an outlier");
  OutlierConstruction c;
  c.n = static_cast<int>(data.rows()) - 1;
  c.p = static_cast<int>(data.cols());
  c.m = m;
  c.h = data.row(c.n).norm();
  for (int i = 0; i < c.n; ++i)
    if (data.row(i).norm() > m * (1.0 + 1e-12))
      throw Error(ErrorCode::InvalidDimension, "inlier " + std::to_string(i) + " exceeds the norm bound");
  c.data = std::move(data);
  return c;
}

double theorem_bound(int n, int p, double m, double h) {
  if (!(h > (n + 2) * m)) throw Error(ErrorCode::ConditionNotMet, "requires H > (n + 2) M");
  return 2.0 * (p - 1) * m * ((n - 4) * m + 4.0 * h) / (h * h);
}

double min_ratio(const Eigen::RowVectorXd& outlier, const RowMatrix& anonymized) {
  const double norm2 = outlier.squaredNorm();
  return (anonymized.rowwise() - outlier).rowwise().squaredNorm().minCoeff() / norm2;
}

namespace {

double bound_or_nan(const OutlierConstruction& c) {
  try {
    return theorem_bound(c.n, c.p, c.m, c.h);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

BoundReport sa_min_ratio(const OutlierConstruction& c, int trials, RngStream& rng) {
  if (trials < 1) throw Error(ErrorCode::InvalidDimension, "trials must be positive");
  const Anonymizer sa(c.data, AnonymizationRequest::from_method(sa_method()), rng);
  const Eigen::RowVectorXd outlier = c.outlier();
  BoundReport report;
  report.trials = trials;
  report.bound = bound_or_nan(c);
  report.ratios.reserve(trials);
  for (int t = 0; t < trials; ++t) report.ratios.push_back(min_ratio(outlier, sa.draw_continuous(rng)));
  report.empirical_max = *std::max_element(report.ratios.begin(), report.ratios.end());
  report.pass = !std::isnan(report.bound) && report.empirical_max <= report.bound;
  return report;
}

BoundReport sa_exhaustive_max(const OutlierConstruction& c) {
  if (c.p != 2 || c.n + 1 > 7) throw Error(ErrorCode::InvalidDimension, "exhaustive search needs p = 2 and n + 1 <= 7");
  RngStream unused(0, 0);
  const IcsFit fit = fit_ics(c.data, ScatterSpec::identity(), ScatterSpec::mean_cov(), unused);
  // Rotation by V preserves distances, so the search runs on the scores.
  const RowMatrix& z = fit.scores;
  const int rows = c.n + 1;
  std::vector<double> a(rows), b(rows);
  for (int r = 0; r < rows; ++r) {
    a[r] = std::pow(z(r, 0) - z(c.n, 0), 2);
    b[r] = std::pow(z(r, 1) - z(c.n, 1), 2);
  }
  // The anonymized rows are {(a[s1(i)], b[s2(i)])}; the minimum over rows only
  // depends on the matching s2 o s1^{-1}, so one permutation covers each class
  // of (s1, s2) pairs.
  std::vector<int> match(rows);
  std::iota(match.begin(), match.end(), 0);
  double best = 0.0;
  int count = 0;
  do {
    double m = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r) m = std::min(m, a[r] + b[match[r]]);
    best = std::max(best, m);
    ++count;
  } while (std::next_permutation(match.begin(), match.end()));

  BoundReport report;
  report.trials = count;
  report.empirical_max = best / c.outlier().squaredNorm();
  report.bound = bound_or_nan(c);
  report.pass = !std::isnan(report.bound) && report.empirical_max <= report.bound;
  return report;
}

VarianceExtremes lemma1_extremes(int n, double m, double h) {
  const double n1 = n + 1.0;
  return {n * (h + m) * (h + m) / (n1 * n1), (n * m * m + h * h) / n1, n * (h - m) * (h - m) / (n1 * n1)};
}

namespace {

double population_variance(const std::vector<double>& x, double h) {
  double mean = h;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size() + 1);
  double ss = (h - mean) * (h - mean);
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() + 1);
}

}  // namespace

VarianceOracle lemma1_oracle(int n, double m, double h, int grid_points) {
  if (n < 1 || n > 4) throw Error(ErrorCode::InvalidDimension, "oracle supports 1 <= n <= 4");
  if (grid_points < 21) throw Error(ErrorCode::InvalidDimension, "oracle needs at least 21 grid points");
  VarianceOracle out;
  out.grid_min = std::numeric_limits<double>::infinity();
  std::vector<double> x(n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1 ? m : -m;
    out.vertex_max = std::max(out.vertex_max, population_variance(x, h));
  }
  std::vector<int> idx(n, 0);
  const double step = 2.0 * m / (grid_points - 1);
  while (true) {
    for (int i = 0; i < n; ++i) x[i] = idx[i] == grid_points - 1 ? m : -m + step * idx[i];
    const double v = population_variance(x, h);
    out.grid_max = std::max(out.grid_max, v);
    out.grid_min = std::min(out.grid_min, v);
    int k = 0;
    while (k < n && ++idx[k] == grid_points) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

Lemma2Result lemma2_check(const OutlierConstruction& c) {
  if (!(c.h > (c.n + 2) * c.m)) throw Error(ErrorCode::ConditionNotMet, "requires H > (n + 2) M");
  const Vector mean = c.data.colwise().mean().transpose();
  const Matrix cov = covariance(c.data, mean, static_cast<double>(c.n + 1));
  const Vector u = sym_eigen(cov).vectors.col(0);
  const Vector out = c.outlier().transpose();
  Lemma2Result r;
  r.cosine = std::abs(out.dot(u)) / out.norm();
  r.threshold = 1.0 - 2.0 * c.m / c.h;
  r.holds = r.cosine >= r.threshold;
  return r;
}

}  // namespace icsa

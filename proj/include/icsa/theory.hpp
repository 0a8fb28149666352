#pragma once

#include <vector>

#include "icsa/rng.hpp"
#include "icsa/types.hpp"

namespace icsa {

// n inliers with norm at most M followed by one outlier of norm H.
struct OutlierConstruction {
  int n = 0;
  int p = 0;
  double m = 1.0;  // inlier norm bound
  double h = 0.0;  // outlier norm
  RowMatrix data;  // (n + 1) x p, outlier last

  Eigen::RowVectorXd outlier() const { return data.row(n); }
};

// Inliers uniform on the M-ball, outlier H e_1.
OutlierConstruction make_construction(int n, int p, double m, double h, RngStream& rng);
// Validates norms; throws InvalidDimension if an inlier exceeds M or the
// last row's norm differs from H by more than 1e-9 relative.
OutlierConstruction make_construction(RowMatrix data, double m);

// 2 (p - 1) M ((n - 4) M + 4 H) / H^2, the bound on the normalized squared
// distance from the outlier to its nearest SA-anonymized row. Requires
// H > (n + 2) M, else ConditionNotMet.
double theorem_bound(int n, int p, double m, double h);

// min_i ||x_out - x*_i||^2 / ||x_out||^2
double min_ratio(const Eigen::RowVectorXd& outlier, const RowMatrix& anonymized);

struct BoundReport {
  double empirical_max = 0;
  double bound = 0;
  int trials = 0;
  bool pass = false;
  std::vector<double> ratios;
};

// `trials` SA draws (one fit, independent permutations).
BoundReport sa_min_ratio(const OutlierConstruction& c, int trials, RngStream& rng);

// Exact max over every pair of column permutations of the centered PC
// scores; p = 2 and n + 1 <= 7 only (InvalidDimension otherwise).
BoundReport sa_exhaustive_max(const OutlierConstruction& c);

struct VarianceExtremes {
  double max_var = 0;
  double upper_bound = 0;
  double min_var = 0;
};

// Population-divisor variance of (x_1..x_n, H) with x_i in [-M, M]:
// max n(H+M)^2/(n+1)^2 (valid for H > nM), bound (nM^2+H^2)/(n+1),
// min n(H-M)^2/(n+1)^2.
VarianceExtremes lemma1_extremes(int n, double m, double h);

struct VarianceOracle {
  double vertex_max = 0;
  double grid_max = 0;
  double grid_min = 0;
};

// Brute force over the 2^n vertices and over a uniform grid of [-M, M]^n.
// n <= 4, grid_points >= 21.
VarianceOracle lemma1_oracle(int n, double m, double h, int grid_points);

struct Lemma2Result {
  double cosine = 0;     // |x_out' u| / ||x_out||
  double threshold = 0;  // 1 - 2M/H
  bool holds = false;
};

// u: leading eigenvector of the sample covariance of all n + 1 rows.
// Requires H > (n + 2) M, else ConditionNotMet.
Lemma2Result lemma2_check(const OutlierConstruction& c);

}  // namespace icsa

#pragma once

#include <vector>

#include "icsa/rng.hpp"
#include "icsa/types.hpp"

namespace icsa {

struct LassoSolution {
  double lambda = 0;
  double intercept = 0;
  Vector coefficients;  // original scale
  IndexSet selected() const;
};

// Tolerance (relative to max(1, lambda)) on the optimality conditions for
// accepting an active-set solve during coordinate descent.
inline constexpr double kKktTol = 1e-10;

struct LassoOptions {
  int grid_size = 100;
  double lambda_min_ratio = 1e-4;
  double tol = 1e-12;  // max coordinate change, standardized scale
  int max_sweeps = 100000;
};

// Objective (1/2n)||y - b0 - X b||^2 + lambda ||b||_1 over internally
// standardized columns (mean 0, divisor-n variance 1). Constant columns are
// left unstandardized and keep a zero coefficient.
class LassoProblem {
 public:
  LassoProblem(const RowMatrix& x, const Vector& y);

  // max_j |x_j'(y - ybar)| / n on the standardized scale.
  double lambda_max() const;
  std::vector<double> default_grid(const LassoOptions& opts = {}) const;

  // Warm-started coordinate descent along `lambdas` (any order).
  std::vector<LassoSolution> path(const std::vector<double>& lambdas,
                                  const LassoOptions& opts = {}) const;

  // Standardized-scale quantities for KKT checks.
  const Matrix& gram() const { return gram_; }
  const Vector& xty() const { return xty_; }

 private:
  bool polish(Vector& beta, Vector& grad, double lambda) const;

  Vector means_, scales_;
  std::vector<bool> constant_;
  double y_mean_ = 0;
  Matrix gram_;
  Vector xty_;
};

struct LassoCvResult {
  LassoSolution solution;
  std::vector<double> lambdas;
  std::vector<double> cv_error;
  std::size_t best_index = 0;
};

// K-fold CV over the default grid of the full data; folds come from one
// random permutation (fold of row perm[i] is i mod K). The lambda with the
// smallest mean held-out squared error is refit on all rows.
LassoCvResult lasso_cv(const RowMatrix& x, const Vector& y, int folds, RngStream& rng,
                       const LassoOptions& opts = {});

}  // namespace icsa

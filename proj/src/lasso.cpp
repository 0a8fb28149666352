#include "icsa/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icsa/error.hpp"

namespace icsa {

IndexSet LassoSolution::selected() const {
  IndexSet out;
  for (Eigen::Index j = 0; j < coefficients.size(); ++j)
    if (coefficients(j) != 0.0) out.push_back(static_cast<std::size_t>(j));
  return out;
}

LassoProblem::LassoProblem(const RowMatrix& x, const Vector& y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::ShapeError, "design and response lengths differ");
  if (x.rows() < 2) throw Error(ErrorCode::TooFewRows, "lasso needs at least two rows");
  const Eigen::Index n = x.rows(), p = x.cols();
  const double nd = static_cast<double>(n);
  means_ = x.colwise().mean().transpose();
  RowMatrix xs = x.rowwise() - means_.transpose();
  scales_ = (xs.colwise().squaredNorm() / nd).cwiseSqrt().transpose();
  constant_.assign(p, false);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (scales_(j) <= 1e-12 * (1.0 + std::abs(means_(j)))) {
      constant_[j] = true;
      xs.col(j).setZero();
      scales_(j) = 1.0;
    } else {
      xs.col(j) /= scales_(j);
    }
  }
  y_mean_ = y.mean();
  const Vector yc = y.array() - y_mean_;
  gram_ = xs.transpose() * xs / nd;
  xty_ = xs.transpose() * yc / nd;
}

double LassoProblem::lambda_max() const {
  double m = 0.0;
  for (Eigen::Index j = 0; j < xty_.size(); ++j)
    if (!constant_[j]) m = std::max(m, std::abs(xty_(j)));
  return m;
}

std::vector<double> LassoProblem::default_grid(const LassoOptions& opts) const {
  const double hi = lambda_max();
  std::vector<double> grid(opts.grid_size);
  if (opts.grid_size == 1) {
    grid[0] = hi;
    return grid;
  }
  const double log_hi = std::log(hi), log_lo = std::log(hi * opts.lambda_min_ratio);
  for (int k = 0; k < opts.grid_size; ++k)
    grid[k] = std::exp(log_hi + (log_lo - log_hi) * k / (opts.grid_size - 1));
  grid.front() = hi;
  return grid;
}

namespace {

constexpr int kSweepsPerPolish = 50;

// Largest violation of the lasso optimality conditions, given grad = xty - G beta.
double kkt_violation(const Vector& beta, const Vector& grad, double lambda, const std::vector<bool>& skip) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (skip[j]) continue;
    const double v = beta(j) == 0.0 ? std::max(0.0, std::abs(grad(j)) - lambda)
                                    : std::abs(grad(j) - (beta(j) > 0 ? lambda : -lambda));
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

// Solves the stationarity equations on the current support and signs; keeps
// the result only if it is an exact lasso solution.
bool LassoProblem::polish(Vector& beta, Vector& grad, double lambda) const {
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) active.push_back(j);
  Vector next = Vector::Zero(beta.size());
  if (!active.empty()) {
    const Eigen::Index k = static_cast<Eigen::Index>(active.size());
    Matrix g(k, k);
    Vector rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      rhs(a) = xty_(active[a]) - (beta(active[a]) > 0 ? lambda : -lambda);
      for (Eigen::Index b = 0; b < k; ++b) g(a, b) = gram_(active[a], active[b]);
    }
    const Eigen::LDLT<Matrix> ldlt(g);
    if (ldlt.info() != Eigen::Success) return false;
    const Vector sol = ldlt.solve(rhs);
    for (Eigen::Index a = 0; a < k; ++a) {
      if (!std::isfinite(sol(a)) || (sol(a) > 0) != (beta(active[a]) > 0) || sol(a) == 0.0) return false;
      next(active[a]) = sol(a);
    }
  }
  const Vector next_grad = xty_ - gram_ * next;
  if (kkt_violation(next, next_grad, lambda, constant_) > kKktTol * std::max(1.0, lambda)) return false;
  beta = next;
  grad = next_grad;
  return true;
}

std::vector<LassoSolution> LassoProblem::path(const std::vector<double>& lambdas,
                                              const LassoOptions& opts) const {
  const Eigen::Index p = xty_.size();
  Vector beta = Vector::Zero(p);
  Vector grad = xty_;  // xty - G beta
  std::vector<LassoSolution> out;
  out.reserve(lambdas.size());

  for (double lambda : lambdas) {
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      double max_change = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (constant_[j]) continue;
        const double gjj = gram_(j, j);
        const double z = grad(j) + gjj * beta(j);
        const double next = (z > lambda ? z - lambda : z < -lambda ? z + lambda : 0.0) / gjj;
        const double delta = next - beta(j);
        if (delta != 0.0) {
          grad.noalias() -= gram_.col(j) * delta;
          beta(j) = next;
          max_change = std::max(max_change, std::abs(delta));
        }
      }
      if (max_change < opts.tol) break;
      if ((sweep + 1) % kSweepsPerPolish == 0 && polish(beta, grad, lambda)) break;
    }
    LassoSolution s;
    s.lambda = lambda;
    s.coefficients = beta.cwiseQuotient(scales_);
    for (Eigen::Index j = 0; j < p; ++j)
      if (constant_[j]) s.coefficients(j) = 0.0;
    s.intercept = y_mean_ - s.coefficients.dot(means_);
    out.push_back(std::move(s));
  }
  return out;
}

LassoCvResult lasso_cv(const RowMatrix& x, const Vector& y, int folds, RngStream& rng,
                       const LassoOptions& opts) {
  const Eigen::Index n = x.rows();
  if (folds < 2 || n < folds) throw Error(ErrorCode::InvalidDimension, "need 2 <= folds <= n");
  if (y.size() != n) throw Error(ErrorCode::ShapeError, "design and response lengths differ");
  if ((y.array() == y(0)).all()) throw Error(ErrorCode::DegenerateResponse, "response is constant");

  const LassoProblem full(x, y);
  LassoCvResult result;
  result.lambdas = full.default_grid(opts);
  const std::size_t grid = result.lambdas.size();

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i-- > 1;) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
  std::vector<int> fold_of(n);
  for (Eigen::Index i = 0; i < n; ++i) fold_of[perm[i]] = static_cast<int>(i % folds);

  std::vector<double> sse(grid, 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(i);
    const RowMatrix xt = x(train, Eigen::all);
    const Vector yt = y(train);
    const auto sols = LassoProblem(xt, yt).path(result.lambdas, opts);
    for (std::size_t k = 0; k < grid; ++k) {
      for (Eigen::Index i : test) {
        const double pred = sols[k].intercept + x.row(i).dot(sols[k].coefficients);
        sse[k] += (y(i) - pred) * (y(i) - pred);
      }
    }
  }
  result.cv_error.resize(grid);
  for (std::size_t k = 0; k < grid; ++k) result.cv_error[k] = sse[k] / static_cast<double>(n);
  result.best_index = static_cast<std::size_t>(
      std::min_element(result.cv_error.begin(), result.cv_error.end()) - result.cv_error.begin());

  const std::vector<double> prefix(result.lambdas.begin(),
                                   result.lambdas.begin() + static_cast<std::ptrdiff_t>(result.best_index) + 1);
  result.solution = full.path(prefix, opts).back();
  return result;
}

}  // namespace icsa

#include "icsa/scatter.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "icsa/error.hpp"
#include "icsa/kernels.hpp"
#include "icsa/linalg.hpp"

namespace icsa {

ScatterSpec ScatterSpec::parse(const std::string& name) {
  if (name == "cov") return mean_cov();
  if (name == "cov4") return cov4();
  if (name == "tyler") return tyler();
  if (name == "tyler-hr") return tyler(TylerLocation::HR);
  if (name == "hr") return hr();
  if (name == "identity") return identity();
  if (name.size() > 3 && name.compare(0, 3, "mcd") == 0) {
    int pct = 0;
    const char* first = name.data() + 3;
    const char* last = name.data() + name.size();
    const auto [ptr, ec] = std::from_chars(first, last, pct);
    if (ec == std::errc() && ptr == last && pct > 0 && pct <= 100) return mcd(pct / 100.0);
  }
  throw Error(ErrorCode::InvalidSpec, "unknown scatter '" + name + "'");
}

void ScatterSpec::validate() const {
  if (alpha.has_value() != (kind == ScatterKind::MCD))
    throw Error(ErrorCode::InvalidSpec, "trim fraction is required for MCD and only for MCD");
  if (alpha && !(*alpha > 0.0 && *alpha <= 1.0))
    throw Error(ErrorCode::InvalidSpec, "MCD trim fraction must lie in (0, 1]");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidSpec, "tolerance must be positive");
  if (max_iter < 1) throw Error(ErrorCode::InvalidSpec, "max_iter must be positive");
}

std::string ScatterSpec::label() const {
  switch (kind) {
    case ScatterKind::MeanCov: return "Cov";
    case ScatterKind::Cov4: return "Cov4";
    case ScatterKind::Tyler:
      return tyler_location == TylerLocation::HR ? "Tyler(HR)" : "Tyler";
    case ScatterKind::HR: return "HR";
    case ScatterKind::MCD: {
      std::ostringstream s;
      s << "MCD" << std::lround(alpha.value_or(1.0) * 100);
      return s.str();
    }
    case ScatterKind::Identity: return "Identity";
  }
  return "?";
}

RobustnessClass robustness_class(ScatterKind kind) {
  switch (kind) {
    case ScatterKind::MeanCov:
    case ScatterKind::Cov4: return RobustnessClass::I;
    case ScatterKind::Tyler:
    case ScatterKind::HR: return RobustnessClass::II;
    case ScatterKind::MCD: return RobustnessClass::III;
    case ScatterKind::Identity: return RobustnessClass::Fixed;
  }
  return RobustnessClass::Fixed;
}

std::string_view to_string(RobustnessClass c) {
  switch (c) {
    case RobustnessClass::I: return "I";
    case RobustnessClass::II: return "II";
    case RobustnessClass::III: return "III";
    case RobustnessClass::Fixed: return "Fixed";
  }
  return "?";
}

namespace {

void require_finite(const RowMatrix& x) {
  if (x.rows() == 0 || x.cols() == 0) throw Error(ErrorCode::InvalidDimension, "empty data");
  if (!x.allFinite()) throw Error(ErrorCode::InvalidMatrix, "data contain non-finite values");
}

Vector column_means(const RowMatrix& x) { return x.colwise().mean().transpose(); }

// Squared Mahalanobis norms of the rows of `centered` under `shape`.
std::vector<double> mahalanobis_sq(const RowMatrix& centered, const Eigen::LLT<Matrix>& llt) {
  const Eigen::Index n = centered.rows(), p = centered.cols();
  // Columns of L^{-1} Y' are the whitened rows, stored contiguously.
  const Matrix whitened = llt.matrixL().solve(centered.transpose());
  std::vector<double> out(n);
  kernels::row_sq_norms(whitened.data(), n, p, out.data());
  return out;
}

Eigen::LLT<Matrix> checked_llt(const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularScatter, "Cholesky factorization failed");
  return llt;
}

double degenerate_threshold(const std::vector<double>& r2) {
  const double mean = std::accumulate(r2.begin(), r2.end(), 0.0) / static_cast<double>(r2.size());
  return 1e-20 * mean;
}

Matrix weighted_scatter(const RowMatrix& centered, const std::vector<double>& w) {
  const Eigen::Map<const Vector> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  Matrix s = centered.transpose() * wv.asDiagonal() * centered;
  return 0.5 * (s + s.transpose());
}

}  // namespace

ScatterEstimate mean_cov(const RowMatrix& x) {
  require_finite(x);
  if (x.rows() < 2) throw Error(ErrorCode::TooFewRows, "mean/covariance needs n >= 2");
  ScatterEstimate est;
  est.location = column_means(x);
  est.scatter = covariance(x, est.location, static_cast<double>(x.rows() - 1));
  est.robustness = RobustnessClass::I;
  return est;
}

ScatterEstimate cov4(const RowMatrix& x) {
  require_finite(x);
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n < p + 2) throw Error(ErrorCode::TooFewRows, "fourth-moment scatter needs n >= p + 2");
  ScatterEstimate est;
  est.location = column_means(x);
  const Matrix cov_n = covariance(x, est.location, static_cast<double>(n));
  sym_pow(cov_n, SymPower::Inverse, RankTest::ScaleFree);  // rank check
  const RowMatrix centered = x.rowwise() - est.location.transpose();
  const std::vector<double> r2 = mahalanobis_sq(centered, checked_llt(cov_n));
  est.scatter = weighted_scatter(centered, r2) / (static_cast<double>(n) * static_cast<double>(p + 2));
  est.robustness = RobustnessClass::I;
  return est;
}

LocationEstimate spatial_median(const RowMatrix& x, double tol, int max_iter) {
  require_finite(x);
  const Eigen::Index n = x.rows(), p = x.cols();
  LocationEstimate out;
  Vector m = column_means(x);
  std::vector<double> d2(n);

  for (int it = 0; it <= max_iter; ++it) {
    kernels::sq_dists_to_point(x.data(), n, p, m.data(), d2.data());
    const double max_d = std::sqrt(*std::max_element(d2.begin(), d2.end()));
    const double tiny = 1e-14 * (1.0 + max_d);

    Vector num = Vector::Zero(p);
    double wsum = 0.0;
    int coincident = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = std::sqrt(d2[i]);
      if (d <= tiny) {
        ++coincident;
        continue;
      }
      num += x.row(i).transpose() / d;
      wsum += 1.0 / d;
    }
    out.location = m;
    out.iterations = it;
    if (wsum == 0.0) {
      out.gradient_norm = 0.0;
      out.converged = true;
      return out;
    }
    const Vector pull = num - wsum * m;  // sum of unit vectors towards the data
    const double r = pull.norm();
    out.gradient_norm = std::max(0.0, r - coincident) / static_cast<double>(n);
    if (out.gradient_norm <= tol) {
      out.converged = true;
      return out;
    }
    if (it == max_iter) break;
    const Vector target = num / wsum;
    if (coincident == 0) {
      m = target;
    } else {
      const double gamma = std::min(1.0, coincident / r);
      m = (1.0 - gamma) * target + gamma * m;
    }
  }
  out.converged = false;
  return out;
}

namespace {

// With `drop_coincident`, rows sitting on the location get zero weight.
Matrix tyler_update(const RowMatrix& x, const Vector& location, const Matrix& shape, bool drop_coincident) {
  const Eigen::Index n = x.rows(), p = x.cols();
  const RowMatrix centered = x.rowwise() - location.transpose();
  const std::vector<double> r2 = mahalanobis_sq(centered, checked_llt(shape));
  const double tiny = degenerate_threshold(r2);
  std::vector<double> w(n);
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r2[i] > tiny) {
      w[i] = 1.0 / r2[i];
      ++kept;
    } else if (drop_coincident) {
      w[i] = 0.0;
    } else {
      std::ostringstream msg;
      msg << "row " << i << " coincides with the location";
      throw Error(ErrorCode::DegenerateRow, msg.str());
    }
  }
  if (kept <= p) throw Error(ErrorCode::DegenerateRow, "too many rows coincide with the location");
  return weighted_scatter(centered, w) * (static_cast<double>(p) / static_cast<double>(kept));
}

}  // namespace

Matrix tyler_map(const RowMatrix& x, const Vector& location, const Matrix& shape) {
  return tyler_update(x, location, shape, false);
}

namespace {

ScatterEstimate tyler_iterate(const RowMatrix& x, const Vector& location, const ScatterSpec& spec,
                              bool drop_coincident) {
  require_finite(x);
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n <= p) throw Error(ErrorCode::TooFewRows, "Tyler's shape needs n > p");
  ScatterEstimate est;
  est.location = location;
  est.robustness = RobustnessClass::II;
  Matrix v = Matrix::Identity(p, p);
  for (int it = 1; it <= spec.max_iter; ++it) {
    const Matrix next = tyler_update(x, location, v, drop_coincident);
    est.iterations = it;
    if ((next - v).norm() <= spec.tol) {
      est.scatter = v;
      est.converged = true;
      return est;
    }
    v = next * (static_cast<double>(p) / next.trace());
  }
  est.scatter = v;
  est.converged = false;
  return est;
}

}  // namespace

ScatterEstimate tyler_shape(const RowMatrix& x, const Vector& location, const ScatterSpec& spec) {
  return tyler_iterate(x, location, spec, false);
}

// Weiszfeld step in the metric of `shape`, with the Vardi-Zhang correction
// when the location sits on data points.
Vector hr_location_step(const RowMatrix& x, const Vector& location, const Matrix& shape) {
  const Eigen::Index n = x.rows();
  const RowMatrix centered = x.rowwise() - location.transpose();
  const Eigen::LLT<Matrix> llt = checked_llt(shape);
  const std::vector<double> r2 = mahalanobis_sq(centered, llt);
  const double tiny = degenerate_threshold(r2);
  Vector num = Vector::Zero(x.cols());
  double wsum = 0.0;
  int coincident = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(r2[i] > tiny)) {
      ++coincident;
      continue;
    }
    const double w = 1.0 / std::sqrt(r2[i]);
    num += w * centered.row(i).transpose();
    wsum += w;
  }
  if (wsum == 0.0) return Vector::Zero(x.cols());
  if (coincident == 0) return num / wsum;
  const double pull = std::sqrt(num.dot(llt.solve(num)));
  if (pull <= coincident) return Vector::Zero(x.cols());
  return (1.0 - coincident / pull) * (num / wsum);
}

ScatterEstimate hr_estimate(const RowMatrix& x, const ScatterSpec& spec) {
  require_finite(x);
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n <= p) throw Error(ErrorCode::TooFewRows, "H-R estimator needs n > p");

  // Coordinatewise median start.
  Vector mu(p);
  std::vector<double> col(n);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) col[i] = x(i, j);
    std::nth_element(col.begin(), col.begin() + n / 2, col.end());
    mu(j) = col[n / 2];
  }
  Matrix v = Matrix::Identity(p, p);

  ScatterEstimate est;
  est.robustness = RobustnessClass::II;
  for (int it = 1; it <= spec.max_iter; ++it) {
    const Vector step = hr_location_step(x, mu, v);
    const Matrix next = tyler_update(x, mu, v, true);
    const double loc_residual = std::sqrt(step.dot(checked_llt(v).solve(step)));
    est.iterations = it;
    if (loc_residual <= spec.tol && (next - v).norm() <= spec.tol) {
      est.location = mu;
      est.scatter = v;
      est.converged = true;
      return est;
    }
    mu += step;
    v = next * (static_cast<double>(p) / next.trace());
  }
  est.location = mu;
  est.scatter = v;
  est.converged = false;
  return est;
}

std::size_t mcd_subset_size(std::size_t n, double alpha) {
  return static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n) - 1e-9));
}

double mcd_consistency_factor(std::size_t p, double alpha) {
  if (alpha >= 1.0) return 1.0;
  const boost::math::chi_squared chi_p(static_cast<double>(p));
  const boost::math::chi_squared chi_p2(static_cast<double>(p + 2));
  const double q = boost::math::quantile(chi_p, alpha);
  return alpha / boost::math::cdf(chi_p2, q);
}

namespace {

constexpr int kMcdStarts = 500;
constexpr int kMcdInitialCSteps = 2;
constexpr int kMcdFinalists = 10;
constexpr int kMcdMaxCSteps = 200;

struct SubsetFit {
  Vector mean;
  Matrix cov;
  Eigen::LLT<Matrix> llt;
  double log_det = 0.0;
  bool singular = true;
};

SubsetFit fit_subset(const RowMatrix& x, const IndexSet& subset) {
  const Eigen::Index p = x.cols();
  SubsetFit f;
  f.mean = Vector::Zero(p);
  for (std::size_t i : subset) f.mean += x.row(static_cast<Eigen::Index>(i)).transpose();
  f.mean /= static_cast<double>(subset.size());
  f.cov = Matrix::Zero(p, p);
  for (std::size_t i : subset) {
    const Vector d = x.row(static_cast<Eigen::Index>(i)).transpose() - f.mean;
    f.cov.selfadjointView<Eigen::Lower>().rankUpdate(d);
  }
  f.cov = f.cov.selfadjointView<Eigen::Lower>();
  f.cov /= static_cast<double>(subset.size());
  f.llt.compute(f.cov);
  if (f.llt.info() != Eigen::Success) return f;
  // Each squared pivot is a conditional variance; compare it with the
  // column's own variance so the test does not depend on column scales.
  const Vector diag = f.llt.matrixLLT().diagonal();
  for (Eigen::Index j = 0; j < p; ++j)
    if (!(diag(j) * diag(j) > kRankTol * f.cov(j, j))) return f;
  f.log_det = 2.0 * diag.array().log().sum();
  f.singular = false;
  return f;
}

// The h rows with the smallest Mahalanobis distance under `f`; ties go to the
// lower index. Returned ascending.
IndexSet concentrate(const RowMatrix& x, const SubsetFit& f, std::size_t h) {
  const RowMatrix centered = x.rowwise() - f.mean.transpose();
  const std::vector<double> d = mahalanobis_sq(centered, f.llt);
  IndexSet idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(h) - 1, idx.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] != d[b] ? d[a] < d[b] : a < b; });
  idx.resize(h);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct Candidate {
  IndexSet subset;
  double log_det;
};

bool better(const Candidate& a, const Candidate& b) {
  const double scale = std::max({1.0, std::abs(a.log_det), std::abs(b.log_det)});
  if (std::abs(a.log_det - b.log_det) > 1e-12 * scale) return a.log_det < b.log_det;
  return a.subset < b.subset;
}

// C-steps from `subset` until the subset repeats or `steps` are used.
std::optional<Candidate> refine(const RowMatrix& x, IndexSet subset, std::size_t h, int steps) {
  SubsetFit f = fit_subset(x, subset);
  if (f.singular) return std::nullopt;
  for (int s = 0; s < steps; ++s) {
    IndexSet next = concentrate(x, f, h);
    if (next == subset) break;
    SubsetFit g = fit_subset(x, next);
    if (g.singular || g.log_det > f.log_det) break;
    subset = std::move(next);
    f = std::move(g);
  }
  return Candidate{std::move(subset), f.log_det};
}

}  // namespace

ScatterEstimate mcd(const RowMatrix& x, double alpha, RngStream& rng, McdDiagnostics* diagnostics) {
  require_finite(x);
  const std::size_t n = static_cast<std::size_t>(x.rows());
  const std::size_t p = static_cast<std::size_t>(x.cols());
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidSpec, "MCD trim fraction must lie in (0, 1]");
  const std::size_t h = mcd_subset_size(n, alpha);
  if (h <= p || n <= p) {
    std::ostringstream msg;
    msg << "h = " << h << " must exceed p = " << p;
    throw Error(ErrorCode::InsufficientSubsetSize, msg.str());
  }

  std::optional<Candidate> best;
  if (h == n) {
    IndexSet all(n);
    std::iota(all.begin(), all.end(), 0);
    const SubsetFit f = fit_subset(x, all);
    if (f.singular) throw Error(ErrorCode::SingularScatter, "covariance of all rows is singular");
    best = Candidate{all, f.log_det};
  } else {
    std::vector<Candidate> pool;
    std::vector<std::size_t> perm(n);
    for (int start = 0; start < kMcdStarts; ++start) {
      // Random (p + 1)-subset, grown while its covariance is singular.
      std::iota(perm.begin(), perm.end(), 0);
      std::size_t size = 0;
      auto take = [&] {
        const std::size_t k = size + rng.uniform_index(n - size);
        std::swap(perm[size], perm[k]);
        ++size;
      };
      while (size < p + 1) take();
      SubsetFit f = fit_subset(x, IndexSet(perm.begin(), perm.begin() + size));
      while (f.singular && size < n) {
        take();
        f = fit_subset(x, IndexSet(perm.begin(), perm.begin() + size));
      }
      if (f.singular) continue;
      if (auto c = refine(x, concentrate(x, f, h), h, kMcdInitialCSteps)) pool.push_back(std::move(*c));
    }
    if (pool.empty()) throw Error(ErrorCode::SingularScatter, "every MCD candidate subset is singular");

    std::sort(pool.begin(), pool.end(), better);
    pool.erase(std::unique(pool.begin(), pool.end(),
                           [](const Candidate& a, const Candidate& b) { return a.subset == b.subset; }),
               pool.end());
    const std::size_t finalists = std::min<std::size_t>(kMcdFinalists, pool.size());
    for (std::size_t c = 0; c < finalists; ++c) {
      auto refined = refine(x, pool[c].subset, h, kMcdMaxCSteps);
      if (refined && (!best || better(*refined, *best))) best = std::move(refined);
    }
    if (!best) throw Error(ErrorCode::SingularScatter, "every MCD candidate subset is singular");
  }

  const SubsetFit f = fit_subset(x, best->subset);
  const double factor = mcd_consistency_factor(p, alpha);
  ScatterEstimate est;
  est.location = f.mean;
  est.scatter = f.cov * factor;
  est.robustness = RobustnessClass::III;
  if (diagnostics) {
    diagnostics->subset = best->subset;
    diagnostics->log_det = best->log_det;
    diagnostics->consistency_factor = factor;
  }
  return est;
}

ScatterEstimate estimate(const RowMatrix& x, const ScatterSpec& spec, RngStream& rng) {
  spec.validate();
  ScatterEstimate est;
  switch (spec.kind) {
    case ScatterKind::MeanCov: est = mean_cov(x); break;
    case ScatterKind::Cov4: est = cov4(x); break;
    case ScatterKind::HR: est = hr_estimate(x, spec); break;
    case ScatterKind::MCD: est = mcd(x, *spec.alpha, rng); break;
    case ScatterKind::Tyler: {
      Vector location;
      if (spec.tyler_location == TylerLocation::HR) {
        const ScatterEstimate hr = hr_estimate(x, spec);
        if (!hr.converged) throw Error(ErrorCode::NotConverged, "H-R location did not converge");
        location = hr.location;
      } else {
        const LocationEstimate med = spatial_median(x, 1e-3 * spec.tol, 20 * spec.max_iter);
        if (!med.converged) throw Error(ErrorCode::NotConverged, "spatial median did not converge");
        location = med.location;
      }
      // an estimated location may land on a data row; such rows are dropped
      est = tyler_iterate(x, location, spec, true);
      break;
    }
    case ScatterKind::Identity:
      require_finite(x);
      est.location = column_means(x);
      est.scatter = Matrix::Identity(x.cols(), x.cols());
      est.robustness = RobustnessClass::Fixed;
      break;
  }
  if (!est.converged) {
    std::ostringstream msg;
    msg << spec.label() << " did not converge in " << spec.max_iter << " iterations";
    throw Error(ErrorCode::NotConverged, msg.str());
  }
  return est;
}

}  // namespace icsa

#pragma once

#include <optional>
#include <string>

#include "icsa/rng.hpp"
#include "icsa/types.hpp"

namespace icsa {

enum class ScatterKind { MeanCov, Cov4, Tyler, HR, MCD, Identity };

// Robustness class: I breaks under one outlier, II tolerates a single
// outlier, III tolerates up to half the data. Identity does not look at the
// data at all.
enum class RobustnessClass { I, II, III, Fixed };

// Location paired with a standalone Tyler shape.
enum class TylerLocation { SpatialMedian, HR };

struct ScatterSpec {
  ScatterKind kind = ScatterKind::MeanCov;
  std::optional<double> alpha;  // MCD trim fraction
  int max_iter = 200;
  double tol = 1e-6;
  TylerLocation tyler_location = TylerLocation::SpatialMedian;

  static ScatterSpec of(ScatterKind kind) {
    ScatterSpec s;
    s.kind = kind;
    return s;
  }
  static ScatterSpec mean_cov() { return of(ScatterKind::MeanCov); }
  static ScatterSpec cov4() { return of(ScatterKind::Cov4); }
  static ScatterSpec tyler(TylerLocation loc = TylerLocation::SpatialMedian) {
    ScatterSpec s = of(ScatterKind::Tyler);
    s.tyler_location = loc;
    return s;
  }
  static ScatterSpec hr() { return of(ScatterKind::HR); }
  static ScatterSpec mcd(double alpha) {
    ScatterSpec s = of(ScatterKind::MCD);
    s.alpha = alpha;
    return s;
  }
  static ScatterSpec identity() { return of(ScatterKind::Identity); }

  // cov | cov4 | tyler | tyler-hr | hr | identity | mcd<percent> (mcd50).
  // Throws InvalidSpec.
  static ScatterSpec parse(const std::string& name);

  // Throws InvalidSpec.
  void validate() const;
  std::string label() const;
};

RobustnessClass robustness_class(ScatterKind kind);
std::string_view to_string(RobustnessClass c);

struct ScatterEstimate {
  Vector location;
  Matrix scatter;
  RobustnessClass robustness = RobustnessClass::I;
  bool converged = true;
  int iterations = 0;
};

struct LocationEstimate {
  Vector location;
  bool converged = true;
  int iterations = 0;
  double gradient_norm = 0.0;
};

// Sample mean and covariance (divisor n - 1).
ScatterEstimate mean_cov(const RowMatrix& x);

// Fourth-moment scatter (1 / (n (p + 2))) sum r_i^2 (x_i - m)(x_i - m)' with
// r_i the Mahalanobis distance under the divisor-n covariance.
ScatterEstimate cov4(const RowMatrix& x);

// Weiszfeld iteration with the Vardi-Zhang step for iterates landing on a
// data point. Convergence is declared when the norm of the gradient of the
// mean distance (1/n) sum ||x_i - m|| is at most tol. Does not throw on
// non-convergence; check the flag.
LocationEstimate spatial_median(const RowMatrix& x, double tol = 1e-8, int max_iter = 2000);

// Tyler's shape about a fixed location, trace normalized to p. Iterates
// until the fixed-point residual ||RHS(V) - V||_F is at most spec.tol.
ScatterEstimate tyler_shape(const RowMatrix& x, const Vector& location, const ScatterSpec& spec);

// Tyler-type map evaluated at (location, shape), without normalization.
// Exposed for residual checks.
Matrix tyler_map(const RowMatrix& x, const Vector& location, const Matrix& shape);

// Hettmansperger-Randles simultaneous location and shape.
ScatterEstimate hr_estimate(const RowMatrix& x, const ScatterSpec& spec);

// Location step of the H-R iteration: sum (x_i - T)/r_i / sum 1/r_i, with
// r_i the Mahalanobis norm under `shape`.
Vector hr_location_step(const RowMatrix& x, const Vector& location, const Matrix& shape);

struct McdDiagnostics {
  IndexSet subset;  // optimal h-subset, ascending
  double log_det = 0.0;
  double consistency_factor = 1.0;
};

// FastMCD with h = ceil(alpha n). Location and scatter are the mean and the
// divisor-h covariance of the best subset, the scatter scaled by the
// chi-square consistency factor.
ScatterEstimate mcd(const RowMatrix& x, double alpha, RngStream& rng,
                    McdDiagnostics* diagnostics = nullptr);

std::size_t mcd_subset_size(std::size_t n, double alpha);
double mcd_consistency_factor(std::size_t p, double alpha);

ScatterEstimate estimate(const RowMatrix& x, const ScatterSpec& spec, RngStream& rng);

}  // namespace icsa

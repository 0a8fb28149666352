#pragma once

#include "icsa/rng.hpp"
#include "icsa/types.hpp"

namespace icsa {

// Eigenvalues below this fraction of the largest make a scatter singular.
inline constexpr double kRankTol = 1e-10;

struct EigenPair {
  Vector values;   // descending
  Matrix vectors;  // columns are eigenvectors
};

// Symmetric eigendecomposition with descending eigenvalues. Each eigenvector
// is signed so its entry of largest magnitude is nonnegative; exactly tied
// eigenvalues are ordered by that leading entry, descending.
EigenPair sym_eigen(const Matrix& s);

enum class SymPower { InvSqrt, Sqrt, Inverse };

// Relative: eigenvalues of S itself. ScaleFree: eigenvalues of
// D^{-1/2} S D^{-1/2} with D = diag(S), so column units do not matter.
enum class RankTest { Relative, ScaleFree };

// S^{-1/2}, S^{1/2} or S^{-1} through the eigendecomposition. Throws
// SingularScatter when the smallest eigenvalue is not above kRankTol times
// the largest, under the chosen rank test.
Matrix sym_pow(const Matrix& s, SymPower power, RankTest test = RankTest::Relative);

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
// of diag(R) folded into Q.
Matrix random_orthogonal(int p, RngStream& rng);

bool is_symmetric(const Matrix& s, double rel_tol = 1e-12);

// Covariance of the rows with the given divisor offset (divisor = n - ddof).
Matrix covariance(const RowMatrix& x, const Vector& center, double divisor);

}  // namespace icsa

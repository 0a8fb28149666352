#include "icsa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "icsa/error.hpp"

namespace icsa {

bool is_symmetric(const Matrix& s, double rel_tol) {
  if (s.rows() != s.cols()) return false;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  return (s - s.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

EigenPair sym_eigen(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0)
    throw Error(ErrorCode::InvalidMatrix, "eigendecomposition needs a nonempty square matrix");
  if (!s.allFinite()) throw Error(ErrorCode::InvalidMatrix, "non-finite entries");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::InvalidMatrix, "eigensolver failed");

  const Eigen::Index p = s.rows();
  Matrix vecs = solver.eigenvectors();
  const Vector& vals = solver.eigenvalues();

  std::vector<double> lead(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::Index arg = 0;
    vecs.col(j).cwiseAbs().maxCoeff(&arg);
    if (vecs(arg, j) < 0) vecs.col(j) = -vecs.col(j);
    lead[j] = vecs(arg, j);
  }

  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (vals(a) != vals(b)) return vals(a) > vals(b);
    return lead[a] > lead[b];
  });

  EigenPair out{Vector(p), Matrix(p, p)};
  for (Eigen::Index j = 0; j < p; ++j) {
    out.values(j) = vals(order[j]);
    out.vectors.col(j) = vecs.col(order[j]);
  }
  return out;
}

namespace {

void check_rank(const Vector& values, const char* what) {
  const double largest = values(0);
  const double smallest = values(values.size() - 1);
  if (!(largest > 0) || !(smallest > kRankTol * largest)) {
    std::ostringstream msg;
    msg << "smallest eigenvalue " << smallest << what << " is not above " << kRankTol
        << " x largest eigenvalue " << largest;
    throw Error(ErrorCode::SingularScatter, msg.str());
  }
}

}  // namespace

Matrix sym_pow(const Matrix& s, SymPower power, RankTest test) {
  const EigenPair eig = sym_eigen(s);
  if (test == RankTest::ScaleFree) {
    const Vector d = s.diagonal();
    if (!(d.minCoeff() > 0)) {
      std::ostringstream msg;
      msg << "diagonal entry " << d.minCoeff() << " is not positive";
      throw Error(ErrorCode::SingularScatter, msg.str());
    }
    const Vector inv = d.cwiseSqrt().cwiseInverse();
    const Matrix scaled = inv.asDiagonal() * s * inv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(scaled, Eigen::EigenvaluesOnly);
    check_rank(es.eigenvalues().reverse(), " of the unit-diagonal scaling");
    if (!(eig.values(eig.values.size() - 1) > 0)) check_rank(eig.values, "");
  } else {
    check_rank(eig.values, "");
  }
  Vector d(eig.values.size());
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    const double v = eig.values(j);
    switch (power) {
      case SymPower::InvSqrt: d(j) = 1.0 / std::sqrt(v); break;
      case SymPower::Sqrt: d(j) = std::sqrt(v); break;
      case SymPower::Inverse: d(j) = 1.0 / v; break;
    }
  }
  Matrix out = eig.vectors * d.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix random_orthogonal(int p, RngStream& rng) {
  if (p < 1) throw Error(ErrorCode::InvalidDimension, "random_orthogonal needs p >= 1");
  Matrix g(p, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < p; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Matrix covariance(const RowMatrix& x, const Vector& center, double divisor) {
  const RowMatrix centered = x.rowwise() - center.transpose();
  Matrix c = centered.transpose() * centered;
  c /= divisor;
  return 0.5 * (c + c.transpose());
}

}  // namespace icsa

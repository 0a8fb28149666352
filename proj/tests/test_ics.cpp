#include "doctest.h"
#include "icsa/anonymize.hpp"
#include "icsa/error.hpp"
#include "icsa/ics.hpp"
#include "icsa/linalg.hpp"
#include "test_support.hpp"

using namespace icsa;
using icsa::testing::gaussian;

namespace {

ScatterSpec tight(ScatterSpec s) {
  s.tol = 1e-11;
  s.max_iter = 5000;
  return s;
}

RowMatrix skewed(int n, int p, RngStream& rng) {
  RowMatrix x = gaussian(n, p, rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = std::exp(0.4 * (j + 1) * x(i, j));
  return x;
}

// Column-sign-insensitive distance between score matrices. With `unit_cols`
// each column is first scaled to unit norm.
double signless_diff(const RowMatrix& a, const RowMatrix& b, bool unit_cols = false) {
  double worst = 0;
  for (int j = 0; j < a.cols(); ++j) {
    const Vector u = unit_cols ? Vector(a.col(j).normalized()) : Vector(a.col(j));
    const Vector v = unit_cols ? Vector(b.col(j).normalized()) : Vector(b.col(j));
    const double plus = (u - v).cwiseAbs().maxCoeff();
    const double minus = (u + v).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::min(plus, minus));
  }
  return worst;
}

}  // namespace

TEST_CASE("SA pairing reproduces centered principal components") {
  RngStream rng(41, 0);
  for (int t = 0; t < 20; ++t) {
    const int p = 2 + t % 4;
    RowMatrix x = gaussian(30, p, rng) * testing::random_invertible(p, rng);
    const auto fit = fit_ics(x, ScatterSpec::identity(), ScatterSpec::mean_cov(), rng);
    const Vector mean = x.colwise().mean();
    const RowMatrix centered = x.rowwise() - mean.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(centered.transpose() * centered / 29.0);
    const Matrix vecs = es.eigenvectors().rowwise().reverse();
    const RowMatrix pcs = centered * vecs;
    REQUIRE(signless_diff(fit.scores, pcs) < 1e-8);
    for (int j = 0; j < p; ++j) REQUIRE(fit.model.eigenvalues(j) == doctest::Approx(es.eigenvalues()(p - 1 - j)));
  }
}

TEST_CASE("model invariants and round trip") {
  RngStream rng(42, 0);
  for (const auto& name : method_names()) {
    CAPTURE(name);
    const Method m = method_by_name(name);
    const RowMatrix x = skewed(60, 3, rng);
    const auto fit = fit_ics(x, m.spec1, m.spec2, rng);
    const auto& md = fit.model;
    REQUIRE((md.rotation.transpose() * md.rotation - Matrix::Identity(3, 3)).norm() < 1e-8);
    REQUIRE((md.s1_sqrt * md.s1_inv_sqrt - Matrix::Identity(3, 3)).norm() < 1e-8);
    for (int j = 0; j < 2; ++j) REQUIRE(md.eigenvalues(j) >= md.eigenvalues(j + 1));
    REQUIRE(testing::rel_frob(md.back_transform(fit.scores), x) < 1e-8);
    REQUIRE(testing::rel_frob(md.transform(x), fit.scores) < 1e-12);
  }
}

// A shape-type S1 (trace normalized) is equivariant only up to scale, which
// rescales the scores; the back-transform cancels it. Class-I and MCD pairs
// are compared directly.
TEST_CASE("scores are affine invariant up to column signs") {
  RngStream rng(43, 0);
  const std::pair<ScatterSpec, ScatterSpec> pairs[] = {
      {ScatterSpec::mean_cov(), ScatterSpec::cov4()},
      {tight(ScatterSpec::hr()), ScatterSpec::mean_cov()},
      {tight(ScatterSpec::hr()), tight(ScatterSpec::tyler(TylerLocation::HR))},
      {ScatterSpec::mcd(0.5), ScatterSpec::mcd(0.75)},
  };
  for (int t = 0; t < 8; ++t) {
    const RowMatrix x = skewed(80, 3, rng);
    const Matrix a = testing::random_invertible(3, rng);
    const Vector b = Vector::Constant(3, 2.0 * rng.normal());
    const RowMatrix y = testing::affine(x, a, b);
    for (const auto& [s1, s2] : pairs) {
      CAPTURE(s1.label());
      CAPTURE(s2.label());
      RngStream r1(7, t), r2(7, t);
      const auto fx = fit_ics(x, s1, s2, r1);
      const auto fy = fit_ics(y, s1, s2, r2);
      const Vector ev = fx.model.eigenvalues;
      bool distinct = true;
      for (int j = 0; j + 1 < ev.size(); ++j) distinct &= (ev(j) - ev(j + 1)) > 1e-6 * ev(0);
      if (!distinct) continue;
      const bool shape = s1.kind == ScatterKind::HR || s1.kind == ScatterKind::Tyler;
      REQUIRE(signless_diff(fx.scores, fy.scores, shape) < 1e-6);
    }
  }
}

TEST_CASE("p = 1") {
  RowMatrix x(4, 1);
  x << 1, 2, 4, 9;
  RngStream rng(1, 1);
  const auto fit = fit_ics(x, ScatterSpec::mean_cov(), ScatterSpec::cov4(), rng);
  const double mean = 4, sd = std::sqrt((9 + 4 + 0 + 25) / 3.0);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(fit.scores(i, 0)) == doctest::Approx(std::abs((x(i, 0) - mean) / sd)));
  RowMatrix st(4, 1);
  for (int i = 0; i < 4; ++i) st(i, 0) = (x(i, 0) - mean) / sd;
  CHECK(fit.model.eigenvalues(0) == doctest::Approx(cov4(st).scatter(0, 0)));
}

TEST_CASE("back_transform edge cases") {
  RowMatrix x(3, 2);
  x << 0, 0, 2, 1, 1, 5;
  RngStream rng(2, 2);
  const auto fit = fit_ics(x, ScatterSpec::identity(), ScatterSpec::mean_cov(), rng);
  const RowMatrix zero = back_transform(RowMatrix::Zero(3, 2), fit.model);
  for (int i = 0; i < 3; ++i) CHECK((zero.row(i).transpose() - fit.model.location).norm() < 1e-14);

  CHECK_THROWS_AS(back_transform(RowMatrix::Zero(3, 3), fit.model), Error);

  // Swap the first column's scores only; the result is not a row shuffle of X.
  RowMatrix z = fit.scores;
  std::swap(z(0, 0), z(1, 0));
  const RowMatrix out = back_transform(z, fit.model);
  int matched = 0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) matched += (out.row(i) - x.row(k)).norm() < 1e-9;
  CHECK(matched < 3);
  // The direct formula, computed independently.
  const Matrix direct = (z * fit.model.rotation.transpose() * fit.model.s1_sqrt).rowwise() +
                        fit.model.location.transpose();
  CHECK((out - direct).norm() < 1e-12);
}

TEST_CASE("errors carry the stage label") {
  RngStream rng(3, 3);
  RowMatrix x = gaussian(10, 2, rng);
  x.col(1).setConstant(1.0);
  try {
    fit_ics(x, ScatterSpec::mean_cov(), ScatterSpec::cov4(), rng);
    FAIL("expected SingularScatter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularScatter);
    CHECK(std::string(e.what()).find("SingularScatter: S1: ") == 0);
  }
  ScatterSpec s2 = ScatterSpec::hr();
  s2.max_iter = 1;
  try {
    fit_ics(gaussian(20, 2, rng), ScatterSpec::mean_cov(), s2, rng);
    FAIL("expected NotConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConverged);
    CHECK(std::string(e.what()).find("NotConverged: S2: ") == 0);
  }
}

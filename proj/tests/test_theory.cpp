#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "icsa/error.hpp"
#include "icsa/ics.hpp"
#include "icsa/theory.hpp"
#include "test_support.hpp"

using namespace icsa;

TEST_CASE("theorem_bound values") {
  CHECK(theorem_bound(20, 4, 1, 1000) == doctest::Approx(0.024096).epsilon(1e-12));
  CHECK(theorem_bound(20, 1, 1, 1000) == 0);
  CHECK_THROWS_AS(theorem_bound(20, 4, 1, 22), Error);
  // Asymptotically 8 (p - 1) M / H.
  const double h = 1e9;
  CHECK(theorem_bound(20, 4, 1, h) * h / (8 * 3) == doctest::Approx(1).epsilon(1e-6));
  for (double hh : {2200.0, 1e4, 1e5}) {
    const double r = theorem_bound(20, 4, 1, hh) / theorem_bound(20, 4, 1, 2 * hh);
    CHECK(std::abs(r - 2) < 0.2);
  }
}

TEST_CASE("construction validation") {
  RngStream rng(91, 0);
  const auto c = make_construction(10, 3, 2.0, 500, rng);
  for (int i = 0; i < 10; ++i) CHECK(c.data.row(i).norm() <= 2.0);
  CHECK(c.outlier().norm() == doctest::Approx(500));
  RowMatrix bad = c.data;
  bad(0, 0) = 3;
  CHECK_THROWS_AS(make_construction(bad, 2.0), Error);
}

TEST_CASE("SA draws stay within the bound") {
  RngStream rng(92, 0);
  for (int t = 0; t < 10; ++t) {
    const auto c = make_construction(20, 4, 1, 100 * 22, rng);
    const auto rep = sa_min_ratio(c, 100, rng);
    REQUIRE(rep.pass);
    REQUIRE(rep.empirical_max <= rep.bound);
    REQUIRE(rep.ratios.size() == 100);
  }
}

TEST_CASE("bound not asserted below the condition") {
  RngStream rng(93, 0);
  const auto c = make_construction(20, 4, 1, 10, rng);
  const auto rep = sa_min_ratio(c, 5, rng);
  CHECK(std::isnan(rep.bound));
  CHECK_FALSE(rep.pass);
}

TEST_CASE("matching reduction equals brute force over permutation pairs") {
  // n + 1 = 5 rows: all 120^2 (s1, s2) pairs through the actual back-transform.
  RngStream rng(94, 0);
  for (int t = 0; t < 3; ++t) {
    const auto c = make_construction(4, 2, 1, 40, rng);
    const auto fit = fit_ics(c.data, ScatterSpec::identity(), ScatterSpec::mean_cov(), rng);
    const Eigen::RowVectorXd out = c.outlier();
    std::vector<int> s1(5), s2(5);
    std::iota(s1.begin(), s1.end(), 0);
    double best = 0;
    do {
      std::iota(s2.begin(), s2.end(), 0);
      do {
        RowMatrix z(5, 2);
        for (int i = 0; i < 5; ++i) {
          z(i, 0) = fit.scores(s1[i], 0);
          z(i, 1) = fit.scores(s2[i], 1);
        }
        best = std::max(best, min_ratio(out, fit.model.back_transform(z)));
      } while (std::next_permutation(s2.begin(), s2.end()));
    } while (std::next_permutation(s1.begin(), s1.end()));
    const auto rep = sa_exhaustive_max(c);
    REQUIRE(rep.empirical_max == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("exhaustive maximum, n = 6, p = 2") {
  RngStream rng(95, 0);
  for (double h : {100.0, 1000.0}) {
    const auto c = make_construction(6, 2, 1, h, rng);
    const auto rep = sa_exhaustive_max(c);
    CHECK(rep.trials == 5040);
    CHECK(rep.pass);
    CHECK(rep.empirical_max <= rep.bound);
  }
  CHECK_THROWS_AS(sa_exhaustive_max(make_construction(7, 2, 1, 100, rng)), Error);
}

TEST_CASE("identity permutation gives ratio 0") {
  RngStream rng(96, 0);
  const auto c = make_construction(5, 3, 1, 100, rng);
  CHECK(min_ratio(c.outlier(), c.data) == 0);
}

TEST_CASE("variance extremes against the vertex oracle") {
  const auto e = lemma1_extremes(2, 1, 10);
  CHECK(e.max_var == doctest::Approx(2.0 * 121 / 9).epsilon(1e-12));
  CHECK(e.min_var == doctest::Approx(18).epsilon(1e-12));
  const auto zero = lemma1_extremes(3, 0, 10);
  CHECK(zero.max_var == zero.min_var);

  const auto o = lemma1_oracle(2, 1, 10, 201);
  CHECK(std::abs(o.vertex_max - 26.888888888888889) < 1e-9);
  CHECK(std::abs(o.grid_min - 18) < 1e-9);  // (1, 1) lies on the grid

  for (int n = 2; n <= 4; ++n)
    for (double m : {0.5, 1.0, 2.0})
      for (double h : {(n + 0.5) * m, 10.0 * n * m, 100.0 * n * m}) {
        CAPTURE(n);
        CAPTURE(m);
        CAPTURE(h);
        const auto ex = lemma1_extremes(n, m, h);
        const auto orc = lemma1_oracle(n, m, h, 21);
        REQUIRE(std::abs(orc.vertex_max - ex.max_var) <= 1e-9 * ex.max_var);
        REQUIRE(orc.grid_max <= ex.upper_bound + 1e-12);
        REQUIRE(ex.upper_bound >= ex.max_var);
        REQUIRE(orc.grid_min >= ex.min_var - 1e-9);
      }
}

TEST_CASE("cosine inequality on outlier constructions") {
  RowMatrix zeros = RowMatrix::Zero(6, 3);
  zeros(5, 0) = 50;
  const auto z = lemma2_check(make_construction(zeros, 1.0));
  CHECK(z.cosine == doctest::Approx(1));
  CHECK(z.holds);

  RngStream rng(97, 0);
  for (int t = 0; t < 200; ++t) {
    const auto c = make_construction(8, 3, 1, 100 * 10, rng);
    REQUIRE(lemma2_check(c).holds);
    const auto edge = make_construction(8, 3, 1, 10 * (1 + 1e-6), rng);
    REQUIRE(lemma2_check(edge).holds);
  }
  CHECK_THROWS_AS(lemma2_check(make_construction(8, 3, 1, 9, rng)), Error);
}

#include <gtest/gtest.h>

#include "orbi/pfaffian.hpp"
#include "support/oracles.hpp"
#include "support/random_expr.hpp"

using namespace orbi;

TEST(Pfaffian, TwoByTwo) {
  EXPECT_DOUBLE_EQ(pfaffian<double>({{0, 3.5}, {-3.5, 0}}), 3.5);
  EXPECT_EQ(pfaffian<Rational>({{Rational(0), Rational(2, 3)}, {Rational(-2, 3), Rational(0)}}), Rational(2, 3));
}

TEST(Pfaffian, BlockDiagonal) {
  std::vector<std::vector<double>> a{{0, 2, 0, 0}, {-2, 0, 0, 0}, {0, 0, 0, 5}, {0, 0, -5, 0}};
  EXPECT_DOUBLE_EQ(pfaffian(a), 10.0);
  EXPECT_DOUBLE_EQ(fixtures::pfaffian_cofactor(a), 10.0);
}

TEST(Pfaffian, EmptyIsOne) { EXPECT_EQ(pfaffian(std::vector<std::vector<Rational>>{}), Rational(1)); }

TEST(Pfaffian, Errors) {
  EXPECT_THROW(pfaffian<double>({{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}), InputError);
  EXPECT_THROW(pfaffian<double>({{0, 1}, {1, 0}}), InputError);
}

TEST(Pfaffian, MatchesCofactorAndDeterminant) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 * (1 + trial % 4);
    auto a = fixtures::random_antisymmetric(rng, n);
    double pf = pfaffian(a), ref = fixtures::pfaffian_cofactor(a);
    EXPECT_LE(std::fabs(pf - ref), 1e-9 * std::max(1.0, std::fabs(ref)));
    double det = fixtures::determinant(a);
    EXPECT_LE(std::fabs(pf * pf - det), 1e-9 * std::max(1.0, std::fabs(det)));

    auto q = fixtures::random_antisymmetric_rational(rng, n);
    EXPECT_EQ(pfaffian(q), fixtures::pfaffian_cofactor(q));
  }
}

TEST(Pfaffian, ZeroPivotHandled) {
  std::vector<std::vector<double>> a{{0, 0, 1, 0}, {0, 0, 0, 1}, {-1, 0, 0, 0}, {0, -1, 0, 0}};
  EXPECT_DOUBLE_EQ(pfaffian(a), fixtures::pfaffian_cofactor(a));
}

TEST(PfaffianForms, RankTwoIsTheEntry) {
  MatrixForm m = MatrixForm::zero(2, 2, 2);
  FormExpr area = parse("x1") * wedge(FormExpr::differential(2, 1), FormExpr::differential(2, 2));
  m.set(0, 1, area);
  m.set(1, 0, -area);
  EXPECT_EQ(pfaffian(m), area);
}

TEST(PfaffianForms, AgreesWithScalarPfaffianOnComponents) {
  // 4x4 matrix of 2-forms on R^4; the top-degree coefficient of Pf equals a
  // signed sum that the scalar cofactor oracle reproduces when every entry is
  // c_ij dx1^dx2 + d_ij dx3^dx4.
  std::mt19937_64 rng(4);
  auto c = fixtures::random_antisymmetric(rng, 4), d = fixtures::random_antisymmetric(rng, 4);
  FormExpr w12 = wedge(FormExpr::differential(4, 1), FormExpr::differential(4, 2));
  FormExpr w34 = wedge(FormExpr::differential(4, 3), FormExpr::differential(4, 4));
  MatrixForm m = MatrixForm::zero(4, 4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) m.set(i, j, Expr::real(c[i][j]) * w12 + Expr::real(d[i][j]) * w34);
  double got = component(pfaffian(m), {1, 2, 3, 4}, std::vector<double>{0, 0, 0, 0});
  // Pf(sC + tD) is quadratic in (s,t); the s*t coefficient is the answer.
  auto mix = [&](double s, double t) {
    auto a = c;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a[i][j] = s * c[i][j] + t * d[i][j];
    return fixtures::pfaffian_cofactor(a);
  };
  double st = (mix(1, 1) - mix(1, 0) - mix(0, 1));
  EXPECT_NEAR(got, st, 1e-12);
}

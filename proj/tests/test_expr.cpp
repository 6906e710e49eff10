#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "orbi/forms.hpp"
#include "support/random_expr.hpp"

using namespace orbi;

namespace {

double at(const Expr& e, std::vector<double> x) { return e.eval(x); }

}  // namespace

TEST(Parse, Variable) { EXPECT_EQ(parse("x1"), Expr::var(1)); }

TEST(Parse, PrecedenceAndExactRational) {
  Expr e = parse("sin(x1)*x2 + 3/2");
  ASSERT_EQ(e.op(), Op::Add);
  EXPECT_EQ(e.lhs().op(), Op::Mul);
  EXPECT_EQ(e.lhs().lhs().op(), Op::Sin);
  EXPECT_EQ(e.lhs().rhs(), Expr::var(2));
  ASSERT_TRUE(e.rhs().is_rational());
  EXPECT_EQ(e.rhs().rational(), Rational(3, 2));
}

TEST(Parse, EvaluatesArithmetic) { EXPECT_DOUBLE_EQ(at(parse("x1^2 - cos(x2)"), {2, 0}), 3.0); }

TEST(Parse, PowerBindsTighterThanUnaryMinus) {
  EXPECT_DOUBLE_EQ(at(parse("-x1^2"), {3}), -9.0);
  EXPECT_DOUBLE_EQ(at(parse("(-x1)^2"), {3}), 9.0);
  EXPECT_DOUBLE_EQ(at(parse("2^-2"), {}), 0.25);
}

TEST(Parse, LeftAssociative) {
  EXPECT_DOUBLE_EQ(at(parse("x1 - x2 - x3"), {1, 2, 3}), -4.0);
  EXPECT_DOUBLE_EQ(at(parse("x1/x2/x3"), {8, 2, 2}), 2.0);
}

TEST(Parse, Errors) {
  try {
    parse("x1 + * x2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
  EXPECT_THROW(parse("foo(x1)"), ParseError);
  EXPECT_THROW(parse("x1^1.5"), ParseError);
  EXPECT_THROW(parse("x1^x2"), ParseError);
  EXPECT_THROW(parse("(x1"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("dx1"), ParseError);
}

TEST(Parse, PrintParseIsIdentityOnRandomTrees) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    Expr e = fixtures::random_raw_tree(rng, 8, 4);
    std::string s = e.str();
    Expr back = parse(s);
    ASSERT_EQ(back, e) << s;
    ASSERT_EQ(back.str(), s);
  }
}

TEST(Differentiate, PowerRule) {
  Expr d = differentiate(parse("x1^2"), 1);
  EXPECT_EQ(d, Expr(2) * Expr::var(1));
}

TEST(Differentiate, Linearity) {
  Expr d = differentiate(parse("sin(x1)*x2"), 2);
  EXPECT_EQ(d, sin(Expr::var(1)));
}

TEST(Differentiate, ExpMatchesFiniteDifference) {
  Expr e = parse("exp(x1*x2)");
  double symbolic = differentiate(e, 1).eval(std::vector<double>{1, 2});
  double fd = fixtures::central_difference(e, {1, 2}, 1);
  EXPECT_NEAR(symbolic, fd, 1e-6 * std::fabs(fd));
  EXPECT_NEAR(symbolic, 2 * std::exp(2.0), 1e-12);
}

TEST(Differentiate, RandomAgainstCentralDifferences) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Expr e = fixtures::random_smooth(rng, 5, 3);
    auto x = fixtures::random_point(rng, 3);
    for (int j = 1; j <= 3; ++j) {
      double s = differentiate(e, j).eval(x);
      double fd = fixtures::central_difference(e, x, j);
      ASSERT_LE(std::fabs(s - fd), 1e-5 * std::max(1.0, std::fabs(fd))) << e.str();
    }
  }
}

TEST(Evaluate, DomainErrors) {
  EXPECT_THROW(parse("1/x1").eval(std::vector<double>{0}), DomainError);
  EXPECT_THROW(parse("sqrt(x1)").eval(std::vector<double>{-1}), DomainError);
  EXPECT_THROW(parse("x3").eval(std::vector<double>{0, 0}), DomainError);
}

TEST(Folding, LiteralsAndIdentities) {
  EXPECT_EQ(Expr(Rational(1, 2)) + Expr(Rational(1, 3)), Expr(Rational(5, 6)));
  EXPECT_EQ(Expr(0) * Expr::var(1), Expr(0));
  EXPECT_EQ(Expr(1) * Expr::var(1), Expr::var(1));
  EXPECT_EQ(sqrt(Expr(Rational(9, 4))), Expr(Rational(3, 2)));
  EXPECT_EQ(substitute(parse("x1*x2 + x2"), std::vector<Expr>{Expr::var(1), Expr(0)}), Expr(0));
}

TEST(Wedge, BasisAndAntisymmetry) {
  auto dx1 = FormExpr::differential(2, 1), dx2 = FormExpr::differential(2, 2);
  FormExpr a = wedge(dx1, dx2);
  EXPECT_EQ(a.coefficient({1, 2}), Expr(1));
  FormExpr b = wedge(dx2, dx1);
  EXPECT_EQ(b.coefficient({1, 2}), Expr(-1));
  FormExpr c = wedge(Expr::var(1) * dx1, Expr::var(2) * dx1);
  EXPECT_TRUE(c.is_zero());
}

TEST(Wedge, DegreeAboveDimensionIsZero) {
  auto dx1 = FormExpr::differential(2, 1), dx2 = FormExpr::differential(2, 2);
  EXPECT_TRUE(wedge(wedge(dx1, dx2), dx1).is_zero());
}

TEST(Wedge, GradedCommutativity) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    int pa = trial % 3, pb = (trial / 3) % 3;
    FormExpr a = fixtures::random_form(rng, 4, pa, 3), b = fixtures::random_form(rng, 4, pb, 3);
    FormExpr ab = wedge(a, b), ba = wedge(b, a);
    double sign = ((pa * pb) % 2) ? -1.0 : 1.0;
    for (int k = 0; k < 5; ++k) {
      auto x = fixtures::random_point(rng, 4);
      for (const auto& idx : multi_indices(4, pa + pb))
        ASSERT_NEAR(component(ab, idx, x), sign * component(ba, idx, x), 1e-10);
    }
  }
}

TEST(ExteriorDerivative, Examples) {
  FormExpr a = Expr::var(1) * FormExpr::differential(2, 2);
  FormExpr da = exterior_derivative(a);
  EXPECT_EQ(da.degree(), 2);
  EXPECT_EQ(da.coefficient({1, 2}), Expr(1));

  FormExpr df = exterior_derivative(FormExpr::scalar(2, parse("x1*x2")));
  EXPECT_EQ(df.coefficient({1}), Expr::var(2));
  EXPECT_EQ(df.coefficient({2}), Expr::var(1));
}

TEST(ExteriorDerivative, SquareVanishes) {
  std::mt19937_64 rng(5);
  FormExpr f = FormExpr::scalar(2, parse("sin(x1)*x2"));
  FormExpr ddf = exterior_derivative(exterior_derivative(f));
  for (int k = 0; k < 10; ++k) EXPECT_LE(ddf.max_abs(fixtures::random_point(rng, 2)), 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    FormExpr a = fixtures::random_form(rng, 3, trial % 2, 4);
    FormExpr dda = exterior_derivative(exterior_derivative(a));
    for (int k = 0; k < 10; ++k) ASSERT_LE(dda.max_abs(fixtures::random_point(rng, 3)), 1e-12);
  }
}

TEST(EvaluateForm, Examples) {
  FormExpr a = wedge(Expr::var(1) * FormExpr::differential(2, 1), FormExpr::differential(2, 2));
  auto v = a.evaluate(std::vector<double>{3, 1});
  EXPECT_DOUBLE_EQ(v.at({1, 2}), 3.0);

  EXPECT_TRUE(FormExpr(2, 1).evaluate(std::vector<double>{1, 1}).empty());

  FormExpr s = sin(Expr::var(1)) * FormExpr::differential(2, 2);
  EXPECT_NEAR(s.evaluate(std::vector<double>{std::numbers::pi / 2, 0}).at({2}), 1.0, 1e-15);
}

TEST(ParseForm, OneFormsAndWedges) {
  FormExpr a = parse_form("x2*dx1 - x1*dx2", 2);
  EXPECT_EQ(a.degree(), 1);
  EXPECT_EQ(a.coefficient({1}), Expr::var(2));
  EXPECT_DOUBLE_EQ(a.coefficient({2}).eval(std::vector<double>{4, 0}), -4.0);

  FormExpr b = parse_form("(1 + x1^2)*dx2*dx1", 2);
  EXPECT_DOUBLE_EQ(component(b, {1, 2}, std::vector<double>{1, 0}), -2.0);
  EXPECT_TRUE(parse_form("0", 3).is_zero());
  EXPECT_THROW(parse_form("dx1 + x1", 2), ParseError);
  EXPECT_THROW(parse_form("dx3", 2), ParseError);
  EXPECT_THROW(parse_form("sin(dx1)", 2), ParseError);

  FormExpr c = parse_form(b.str(), 2);
  EXPECT_EQ(c, b);
}

TEST(Pullback, AlongPolarMap) {
  // dx ^ dy pulled back along (r cos t, r sin t) is r dr ^ dt.
  FormExpr area = wedge(FormExpr::differential(2, 1), FormExpr::differential(2, 2));
  std::vector<Expr> polar{Expr::var(1) * cos(Expr::var(2)), Expr::var(1) * sin(Expr::var(2))};
  FormExpr p = pullback(area, polar, 2);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    auto x = fixtures::random_point(rng, 2, 0.1, 2);
    EXPECT_NEAR(component(p, {1, 2}, x), x[0], 1e-12);
  }
}

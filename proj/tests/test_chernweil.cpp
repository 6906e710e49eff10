#include <gtest/gtest.h>

#include <numbers>

#include "orbi/gallery.hpp"

using namespace orbi;

namespace {

Document with_checked_connection(Document d) {
  auto r = validate_connection(d.bundle, *d.connection);
  EXPECT_TRUE(r.ok()) << d.name << ": " << (r.problems.empty() ? "" : r.problems.front());
  return d;
}

double euler_integral(const Document& d, bool via_vertical = false) {
  ClassOptions opt;
  opt.via_vertical = via_vertical;
  auto cls = orbifold_characteristic_class(d.bundle, *d.connection, *d.partition, ClassKind::Euler, opt);
  double total = 0;
  for (const auto& c : cls.components) total += c.integral.value_or(0.0);
  return total;
}

}  // namespace

TEST(Connection, GalleryConnectionsTransform) {
  for (const auto& name : gallery::example_names()) {
    auto d = gallery::example(name);
    auto r = validate_connection(d.bundle, *d.connection);
    EXPECT_TRUE(r.ok()) << name;
    EXPECT_LE(r.max_residual, 1e-10) << name;
  }
}

TEST(Connection, WrongSignIsRejected) {
  auto d = gallery::s2_tangent();
  d.connection->forms[1] = -d.connection->forms[1];
  EXPECT_FALSE(validate_connection(d.bundle, *d.connection).ok());
}

TEST(Partition, GalleryPartitionsSumToOne) {
  for (const auto& name : gallery::example_names()) {
    auto d = gallery::example(name);
    EXPECT_TRUE(validate_partition(d.bundle.base, *d.partition).ok()) << name;
  }
  auto d = gallery::s2_trivial();
  d.partition->psi[0] = Expr(1);
  EXPECT_FALSE(validate_partition(d.bundle.base, *d.partition).ok());
}

TEST(Curvature, RoundSphereMatchesClosedForm) {
  auto d = with_checked_connection(gallery::s2_tangent());
  MatrixForm om = curvature(d.connection->forms[0]);
  for (const auto& x : sample_points(d.bundle.base.charts[0].domain, 3)) {
    double r2 = x[0] * x[0] + x[1] * x[1];
    EXPECT_NEAR(om.evaluate({1, 2}, x)(0, 1), 4.0 / ((1 + r2) * (1 + r2)), 1e-12);
    FormExpr e = euler_form(om, 2);
    EXPECT_NEAR(component(e, {1, 2}, x), 2.0 / (std::numbers::pi * (1 + r2) * (1 + r2)), 1e-12);
  }
}

TEST(Curvature, Bianchi) {
  // d Omega = Omega ^ omega - omega ^ Omega
  for (const auto& name : {"s2-tangent", "teardrop-3"}) {
    auto d = with_checked_connection(gallery::example(name));
    for (std::size_t c = 0; c < d.connection->forms.size(); ++c) {
      const MatrixForm& w = d.connection->forms[c];
      MatrixForm om = curvature(w);
      MatrixForm lhs = exterior_derivative(om), rhs = wedge(om, w) - wedge(w, om);
      for (const auto& x : sample_points(d.bundle.base.charts[c].domain, 1)) {
        EXPECT_NEAR(lhs.evaluate({1, 2}, x).cwiseAbs().maxCoeff(), 0.0, 1e-9);
        EXPECT_NEAR(rhs.evaluate({1, 2}, x).cwiseAbs().maxCoeff(), 0.0, 1e-9);
      }
    }
  }
}

TEST(Characteristic, GaussBonnetSphere) {
  auto d = with_checked_connection(gallery::s2_tangent());
  EXPECT_NEAR(euler_integral(d), 2.0, 1e-6);
}

TEST(Characteristic, ChernOfTangentEqualsEuler) {
  auto d = with_checked_connection(gallery::s2_tangent());
  auto cls = orbifold_characteristic_class(d.bundle, *d.connection, *d.partition, ClassKind::Chern1);
  ASSERT_TRUE(cls.components.front().integral.has_value());
  EXPECT_NEAR(*cls.components.front().integral, 2.0, 1e-6);
}

TEST(Characteristic, PontryaginOfSurfaceBundleVanishes) {
  auto d = with_checked_connection(gallery::s2_tangent());
  auto cls = orbifold_characteristic_class(d.bundle, *d.connection, *d.partition, ClassKind::Pontryagin1);
  for (const auto& c : cls.components) EXPECT_TRUE(c.is_zero());
}

TEST(Characteristic, TeardropOrbifoldEuler) {
  for (int p : {2, 3, 7}) {
    auto d = with_checked_connection(gallery::teardrop(p));
    auto cls = orbifold_characteristic_class(d.bundle, *d.connection, *d.partition, ClassKind::Euler);
    ASSERT_EQ(static_cast<int>(cls.components.size()), p);
    // untwisted part is the orbifold Euler characteristic 2 - (1 - 1/p)
    EXPECT_NEAR(*cls.components[0].integral, 1.0 + 1.0 / p, 1e-3) << p;
    for (int k = 1; k < p; ++k) {
      EXPECT_TRUE(cls.components[static_cast<std::size_t>(k)].is_constant_one());
      EXPECT_NEAR(*cls.components[static_cast<std::size_t>(k)].integral, 1.0 / p, 1e-12);
    }
  }
}

TEST(Characteristic, DirectAndVerticalRoutesAgree) {
  auto d = with_checked_connection(gallery::teardrop(3));
  EXPECT_NEAR(euler_integral(d), euler_integral(d, true), 1e-6);
}

TEST(Characteristic, OddAndZeroRank) {
  FormExpr one = euler_form(MatrixForm::zero(0, 2, 2), 2);
  EXPECT_EQ(one.degree(), 0);
  EXPECT_TRUE(one.scalar_part() == Expr(1));
  EXPECT_TRUE(euler_form(MatrixForm::zero(3, 2, 2), 2).is_zero());
}

TEST(Characteristic, Z3SphereThroughVertical) {
  auto d = with_checked_connection(gallery::s2_z3_bad());
  auto on_e = vertical_characteristic_class(d.bundle, *d.connection, ClassKind::Euler);
  ASSERT_EQ(on_e.components.size(), 3u);
  EXPECT_EQ(*on_e.components[1].degree(), Rational(2, 3));
  EXPECT_EQ(*on_e.components[2].degree(), Rational(4, 3));
  auto q = orbifold_characteristic_class(d.bundle, *d.connection, *d.partition, ClassKind::Euler);
  for (int k = 1; k < 3; ++k) {
    EXPECT_TRUE(q.components[static_cast<std::size_t>(k)].is_constant_one());
    EXPECT_EQ(*q.components[static_cast<std::size_t>(k)].degree(), Rational(0));
  }
}

TEST(Split, ParallelUnitSection) {
  // nabla'(s/|s|) = 0 for the split connection of a turning section on a flat disc
  Expr x1 = Expr::var(1), x2 = Expr::var(2);
  BundleCocycle flat;
  GroupPtr g = FiniteGroup::trivial();
  flat.base.charts.push_back({"P", Domain::ball(2, 0.5), g, Representation::trivial(g, 2), {}});
  flat.rank = 2;
  flat.fiber_actions.push_back(Representation::trivial(g, 2));
  Section t{"t", {{Expr(2) + x1 * x2, Expr(1) + x1}}};
  SplitConnection sc = split_connection(flat, t);
  ConnectionData cd = sc.global;
  EXPECT_TRUE(validate_connection(flat, cd).ok());
  std::vector<Expr> unit;
  Expr n = sqrt(t.values[0][0] * t.values[0][0] + t.values[0][1] * t.values[0][1]);
  for (const auto& e : t.values[0]) unit.push_back(e / n);
  for (const auto& x : sample_points(flat.base.charts[0].domain, 2))
    for (int j = 1; j <= 2; ++j) {
      Vec u(2), du(2);
      for (int i = 0; i < 2; ++i) {
        u(i) = unit[static_cast<std::size_t>(i)].eval(x);
        du(i) = differentiate(unit[static_cast<std::size_t>(i)], j).eval(x);
      }
      Vec cov = du + cd.forms[0].evaluate({j}, x) * u;
      EXPECT_LE(cov.cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Obstruction, ConstantSectionsGiveZero) {
  QuadratureOptions opt;
  for (const auto& name : {"flat-torus", "s2-trivial", "s2-tangentless"}) {
    auto d = gallery::example(name);
    auto rep = obstruction_verdict(d.bundle, d.sections.front(), *d.partition, opt);
    EXPECT_FALSE(rep.refused) << name;
    EXPECT_FALSE(rep.bad_route);
    EXPECT_LE(rep.max_node_value, 1e-10);
    EXPECT_LE(rep.max_integral, 1e-8);
    EXPECT_TRUE(rep.pass);
  }
}

TEST(Obstruction, BadBundleGoesThroughVertical) {
  auto d = gallery::bad_section_bundle();
  auto rep = obstruction_verdict(d.bundle, d.sections.front(), *d.partition);
  EXPECT_FALSE(rep.refused) << rep.reason;
  EXPECT_TRUE(rep.bad_route);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.max_node_value, 1e-10);
}

TEST(Obstruction, RefusesWithoutNonvanishingSection) {
  auto d = gallery::s2_z3_bad();
  auto rep = obstruction_verdict(d.bundle, d.sections.front(), *d.partition);
  EXPECT_TRUE(rep.refused);
  auto t = gallery::s2_tangent();
  auto r2 = obstruction_verdict(t.bundle, Section::constant(t.bundle, {Expr(1), Expr(0)}), *t.partition);
  EXPECT_TRUE(r2.refused);  // not compatible across the overlap
}

TEST(Integrate, NonConvergenceIsReported) {
  auto d = gallery::s2_tangent();
  validate_connection(d.bundle, *d.connection);
  auto om = curvature(*d.connection);
  std::vector<FormExpr> f;
  for (std::size_t c = 0; c < om.size(); ++c) f.push_back(euler_form(om[c], 2));
  EXPECT_THROW(integrate(d.bundle.base, f, *d.partition, {4, 1e-12, 0}), CertificateError);
}

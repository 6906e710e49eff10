#include <gtest/gtest.h>

#include <numbers>

#include "orbi/quadrature.hpp"

using namespace orbi;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {1, 2, 5, 48, 96}) {
    Rule1D r = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1 && p < 40; ++p) {
      double s = 0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
      double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(s, exact, 1e-13) << n << " " << p;
    }
  }
}

TEST(GaussLegendre, NodesAgreeWithSmallClosedForms) {
  Rule1D r = gauss_legendre(2);
  EXPECT_NEAR(r.nodes[1], 1 / std::sqrt(3.0), 1e-15);
  Rule1D r3 = gauss_legendre(3);
  EXPECT_NEAR(r3.nodes[2], std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(r3.weights[1], 8.0 / 9.0, 1e-15);
}

TEST(DomainRule, BallVolumes) {
  auto one = [](const std::vector<double>&) { return 1.0; };
  EXPECT_NEAR(integrate_domain(Domain::ball(1, 2.0), 8, one), 4.0, 1e-13);
  EXPECT_NEAR(integrate_domain(Domain::ball(2, 3.0), 8, one), 9 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(integrate_domain(Domain::ball(3), 32, one), 4 * std::numbers::pi / 3, 1e-12);
  EXPECT_NEAR(integrate_domain(Domain::ball(4), 32, one), std::numbers::pi * std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(integrate_domain(Domain::point(), 8, one), 1.0, 0.0);
}

TEST(DomainRule, ProductsAndBoxes) {
  Domain d = Domain::ball(2).times(Domain::box({{-1, 1}, {0, 3}}));
  EXPECT_EQ(d.dim(), 4);
  double v = integrate_domain(d, 32, [](const std::vector<double>& x) { return x[0] * x[0] + x[3]; });
  // int_disk x^2 = pi/4; area pi; box area 6, int x3 over box = 2*4.5 = 9
  EXPECT_NEAR(v, std::numbers::pi / 4 * 6 + std::numbers::pi * 9, 1e-11);
}

TEST(DomainRule, GaussianOnDisk) {
  double v = integrate_domain(Domain::ball(2, 2.0), 48, [](const std::vector<double>& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  EXPECT_NEAR(v, std::numbers::pi * (1 - std::exp(-4.0)), 1e-12);
}

TEST(Samples, InsideDomainAndDeterministic) {
  Domain d = Domain::ball(2, 0.25).times(Domain::box({{-1, 1}, {-1, 1}}));
  auto a = sample_points(d, 3), b = sample_points(d, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 16u + 1u + 50u);
  for (const auto& x : a) EXPECT_TRUE(d.contains(x));
  EXPECT_NE(sample_points(d, 4), a);
}

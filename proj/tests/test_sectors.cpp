#include <gtest/gtest.h>

#include <complex>
#include <numbers>
#include <random>

#include "orbi/gallery.hpp"

using namespace orbi;

namespace {

// Shift from eigenvalue angles: sum of theta_j / 2 pi with theta_j in [0, 2 pi).
double shift_by_angles(const CMat& m) {
  Eigen::ComplexEigenSolver<CMat> es(m);
  double s = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double t = std::arg(es.eigenvalues()(i));
    if (t < -1e-12) t += 2 * std::numbers::pi;
    if (t < 1e-12) t = 0;
    s += t / (2 * std::numbers::pi);
  }
  return s;
}

ComplexRepresentation random_abelian_rep(std::mt19937_64& rng, GroupPtr g, int dim) {
  ComplexRepresentation r = ComplexRepresentation::character(g, std::uniform_int_distribution<int>(0, g->order() - 1)(rng));
  for (int d = 1; d < dim; ++d)
    r = direct_sum(r, ComplexRepresentation::character(g, std::uniform_int_distribution<int>(0, g->order() - 1)(rng)));
  return r;
}

}  // namespace

TEST(Census, TeardropClassesAndShifts) {
  for (int p : {2, 3, 7}) {
    auto d = gallery::teardrop(p);
    SectorCensus c = sector_census(d.bundle.base);
    ASSERT_EQ(static_cast<int>(c.classes.size()), p);
    EXPECT_FALSE(c.twisted[0]);
    for (int k = 1; k < p; ++k) {
      EXPECT_TRUE(c.twisted[static_cast<std::size_t>(k)]);
      auto shift = sector_degree_shift(d.bundle.base, c, k);
      ASSERT_TRUE(shift.has_value());
      const auto& m = c.classes[static_cast<std::size_t>(k)].front();
      double oracle = shift_by_angles((*d.bundle.base.charts[static_cast<std::size_t>(m.chart)].complex_action)(m.element));
      EXPECT_NEAR(shift->to_double(), oracle, 1e-12);
      EXPECT_EQ(*shift, Rational(m.element, p));
    }
  }
}

TEST(Census, UntwistedSectorSpansAllCharts) {
  auto d = gallery::s2_tangent();
  SectorCensus c = sector_census(d.bundle.base);
  ASSERT_EQ(c.classes.size(), 1u);
  EXPECT_EQ(c.classes[0].size(), d.bundle.base.charts.size());
}

TEST(Census, Z3SphereOverBaseAndTotalSpace) {
  auto d = gallery::s2_z3_bad();
  SectorCensus q = sector_census(d.bundle.base);
  ASSERT_EQ(q.classes.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(*sector_degree_shift(d.bundle.base, q, k), Rational(0));
  Atlas e = total_space(d.bundle);
  SectorCensus ce = sector_census(e);
  ASSERT_EQ(ce.classes.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(*sector_degree_shift(e, ce, k), Rational(k, 3));
}

TEST(Census, CoincidenceOnGalleryAndRandom) {
  for (const auto& name : gallery::example_names()) EXPECT_TRUE(census_coincidence(gallery::example(name).bundle).match) << name;
  for (std::uint64_t seed = 0; seed < 25; ++seed) EXPECT_TRUE(census_coincidence(gallery::random_bundle(seed)).match) << seed;
}

TEST(DegreeShift, InverseSumsToCodimension) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    GroupPtr g = FiniteGroup::cyclic(1 + trial % 6);
    auto rep = random_abelian_rep(rng, g, 1 + trial % 3);
    for (int e = 0; e < g->order(); ++e) {
      Rational sum = degree_shift(rep, e) + degree_shift(rep, g->inverse(e));
      EXPECT_EQ(sum, Rational(fixed_codimension(rep, e)));
      EXPECT_NEAR(degree_shift(rep, e).to_double(), shift_by_angles(rep(e)), 1e-12);
    }
  }
}

TEST(DegreeShift, NonAbelianConjugationInvariant) {
  GroupPtr d3 = FiniteGroup::dihedral(3);
  // two-dimensional complex rep of D3 from its real rotation/reflection form
  auto real = gallery::detail::dihedral_rep(d3, 3, 1);
  ComplexRepresentation rep{d3, {}};
  for (const auto& m : real.matrices) rep.matrices.push_back(m.cast<std::complex<double>>());
  for (const auto& cls : conjugacy_classes(*d3))
    for (int e : cls) EXPECT_EQ(degree_shift(rep, e), degree_shift(rep, cls.front()));
}

TEST(SectorAtlas, TwistedTeardropSectorIsAPoint) {
  auto d = gallery::teardrop(3);
  SectorCensus c = sector_census(d.bundle.base);
  SectorAtlas sa = sector_atlas(d.bundle.base, c, 1);
  ASSERT_EQ(sa.atlas.charts.size(), 1u);
  EXPECT_EQ(sa.atlas.charts[0].dim(), 0);
  EXPECT_EQ(sa.atlas.charts[0].group->order(), 3);
  EXPECT_TRUE(validate_atlas(sa.atlas).ok());
  SectorBundle sb = sector_bundle(d.bundle, sa);
  EXPECT_EQ(sb.bundle.rank, 0);  // rotation has no fixed vectors
}

TEST(SectorAtlas, ValidOnRandomBundles) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto b = gallery::random_bundle(seed);
    SectorCensus c = sector_census(b.base);
    for (int k = 0; k < static_cast<int>(c.classes.size()); ++k) {
      SectorAtlas sa = sector_atlas(b.base, c, k);
      auto r = validate_atlas(sa.atlas, seed);
      EXPECT_TRUE(r.ok()) << seed << "/" << k << ": " << (r.problems.empty() ? "" : r.problems.front());
      SectorBundle sb = sector_bundle(b, sa);
      auto rb = validate_bundle(sb.bundle, seed);
      EXPECT_TRUE(rb.ok()) << seed << "/" << k << ": " << (rb.problems.empty() ? "" : rb.problems.front());
    }
  }
}

TEST(SectorAtlas, FixedSetDimensionMatchesRank) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto b = gallery::random_bundle(seed);
    SectorCensus c = sector_census(b.base);
    for (int k = 0; k < static_cast<int>(c.classes.size()); ++k) {
      SectorAtlas sa = sector_atlas(b.base, c, k);
      for (std::size_t j = 0; j < sa.atlas.charts.size(); ++j) {
        const auto& m = c.classes[static_cast<std::size_t>(k)][j];
        const Chart& parent = b.base.charts[static_cast<std::size_t>(m.chart)];
        Mat a = parent.action(m.element) - Mat::Identity(2, 2);
        Eigen::FullPivLU<Mat> lu(a);
        EXPECT_EQ(sa.atlas.charts[j].dim(), 2 - static_cast<int>(lu.rank()));
      }
    }
  }
}

TEST(Retraction, HomotopyOnTotalSpaceSectors) {
  auto d = gallery::s2_z3_bad();
  for (int k = 0; k < 3; ++k) {
    auto r = retraction_check(d.bundle, k, {Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)});
    EXPECT_TRUE(r.ok()) << k;
  }
}

#include <gtest/gtest.h>

#include <random>

#include "orbi/gallery.hpp"

using namespace orbi;

namespace {

// Does some sample point of the chart get moved by g? Checked by direct action.
bool acts_effectively(const Chart& c, int g, std::uint64_t seed) {
  for (const auto& x : sample_points(c.domain, seed))
    if (relative_gap(act(c.action(g), x), x) > 1e-9) return true;
  return false;
}

}  // namespace

TEST(Atlas, GalleryValidates) {
  for (const auto& name : gallery::example_names()) {
    auto d = gallery::example(name);
    auto r = validate_atlas(d.bundle.base);
    EXPECT_TRUE(r.ok()) << name << ": " << (r.problems.empty() ? "" : r.problems.front());
    EXPECT_LE(r.max_residual, 1e-10) << name;
  }
}

TEST(Atlas, ActionMustPreserveDomain) {
  GroupPtr z2 = FiniteGroup::cyclic(2);
  Chart c{"Q", Domain::box({{0.0, 1.0}, {0.0, 1.0}}), z2, Representation::rotation(z2, 1), {}};
  EXPECT_FALSE(validate_chart(c, 0).ok());
  c.domain = Domain::box({{-1.0, 1.0}, {-1.0, 1.0}});
  EXPECT_TRUE(validate_chart(c, 0).ok());
}

TEST(Atlas, LambdaChecks) {
  GroupPtr z2 = FiniteGroup::cyclic(2), z4 = FiniteGroup::cyclic(4);
  Atlas a;
  a.charts.push_back({"A", Domain::ball(2), z4, Representation::rotation(z4, 1), {}});
  a.charts.push_back({"B", Domain::ball(2, 0.5), z2, Representation::rotation(z2, 1), {}});
  a.injections.push_back({"B->A", "B", "A", {Expr::var(1), Expr::var(2)}, {0, 2}});
  EXPECT_TRUE(validate_atlas(a).ok());
  a.injections[0].lambda = {0, 1};
  EXPECT_FALSE(validate_atlas(a).ok());  // not a homomorphism
  a.injections[0].lambda = {0, 0};
  EXPECT_FALSE(validate_atlas(a).ok());  // not injective
  a.injections[0].lambda = {0, 2};
  a.injections[0].map = {Expr::var(1) + Expr(Rational(1, 4)), Expr::var(2)};
  EXPECT_FALSE(validate_atlas(a).ok());  // translation breaks equivariance
}

TEST(Atlas, CompositionLaw) {
  auto b = gallery::random_bundle(11);
  EXPECT_TRUE(validate_compositions(b.base, 0).ok());
  b.base.injections[2].map[0] = b.base.injections[2].map[0] + Expr(Rational(1, 100));
  EXPECT_FALSE(validate_compositions(b.base, 0).ok());
}

TEST(Atlas, KernelAgainstDirectAction) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto b = gallery::random_bundle(seed);
    auto k = base_kernel(b.base);
    EXPECT_TRUE(k.consistent) << seed;
    for (std::size_t c = 0; c < b.base.charts.size(); ++c) {
      const Chart& ch = b.base.charts[c];
      for (int g = 0; g < ch.group->order(); ++g) EXPECT_EQ(k.per_chart[c].contains(g), !acts_effectively(ch, g, seed)) << seed;
    }
  }
}

TEST(Bundle, GalleryValidates) {
  for (const auto& name : gallery::example_names()) {
    auto d = gallery::example(name);
    auto r = validate_bundle(d.bundle);
    EXPECT_TRUE(r.ok()) << name << ": " << (r.problems.empty() ? "" : r.problems.front());
    EXPECT_LE(r.max_residual, 1e-10) << name;
  }
  auto bad = gallery::bad_section_bundle();
  EXPECT_TRUE(validate_bundle(bad.bundle).ok());
}

TEST(Bundle, DetectsBrokenCocycle) {
  std::uint64_t seed = 0;
  while (gallery::random_bundle(seed).rank == 0) ++seed;
  auto b = gallery::random_bundle(seed);
  b.transitions["O2->M"] = ExprMatrix::identity(b.rank);
  EXPECT_FALSE(validate_bundle(b).ok());
}

TEST(Bundle, RandomBundlesValidate) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto b = gallery::random_bundle(seed);
    auto r = validate_bundle(b);
    EXPECT_TRUE(r.ok()) << seed << ": " << (r.problems.empty() ? "" : r.problems.front());
    EXPECT_LE(b.base.charts.front().group->order(), 6);
    EXPECT_LE(b.rank, 3);
  }
}

TEST(Classify, Z3BadSphere) {
  auto d = gallery::s2_z3_bad();
  auto v = classify(d.bundle);
  EXPECT_EQ(v.verdict, Verdict::Bad);
  EXPECT_EQ(v.k_b_summary, "Z3");
  EXPECT_EQ(v.k_f_summary, "1");
  EXPECT_TRUE(v.fiber_kernel_trivial_on_ve);
}

TEST(Classify, GoodGallery) {
  for (const auto& name : {"s2-tangent", "s2-trivial", "flat-torus", "teardrop-2", "teardrop-7"})
    EXPECT_EQ(classify(gallery::example(name).bundle).verdict, Verdict::Good) << name;
}

TEST(Classify, VerticalBundleIsGoodWithExactRestriction) {
  std::vector<BundleCocycle> all;
  for (const auto& name : gallery::example_names()) all.push_back(gallery::example(name).bundle);
  for (std::uint64_t seed = 0; seed < 25; ++seed) all.push_back(gallery::random_bundle(seed));
  for (const auto& b : all) {
    BundleCocycle ve = vertical_bundle(b);
    EXPECT_TRUE(validate_bundle(ve).ok());
    auto v = classify(ve);
    EXPECT_EQ(v.verdict, Verdict::Good);
    // oracle: every non-identity element of K_f moves some point of E
    for (std::size_t c = 0; c < ve.base.charts.size(); ++c) {
      const Chart& ch = ve.base.charts[c];
      Representation tot = total_action(ch, ve.fiber_actions[c]);
      for (int g = 1; g < ch.group->order(); ++g) {
        if (!v.k_b[c].contains(g)) continue;
        Chart probe{ch.id, ch.domain.times(fiber_domain(ve.rank)), ch.group, tot, {}};
        EXPECT_EQ(v.k_f[c].contains(g), !acts_effectively(probe, g, 0));
      }
    }
    auto r = restrict_to_zero_section(ve, b);
    EXPECT_LE(r.certificate, 1e-12);
    EXPECT_TRUE(r.atlas_matches);
  }
}

TEST(Classify, BadSectionBundle) {
  auto d = gallery::bad_section_bundle();
  EXPECT_EQ(classify(d.bundle).verdict, Verdict::Bad);
  EXPECT_EQ(classify(vertical_bundle(d.bundle)).verdict, Verdict::Good);
}

TEST(Sections, OnlyZeroSurvivesOnZ3Sphere) {
  auto d = gallery::s2_z3_bad();
  ASSERT_EQ(d.sections.size(), 20u);
  int valid = 0;
  for (const auto& s : d.sections) {
    auto r = validate_section(d.bundle, s);
    if (r.ok()) {
      ++valid;
      EXPECT_EQ(s, Section::zero(d.bundle));
      EXPECT_FALSE(r.nonvanishing);
    }
  }
  EXPECT_EQ(valid, 1);
}

TEST(Sections, ConstantSectionsValidate) {
  for (const auto& name : {"s2-trivial", "flat-torus"}) {
    auto d = gallery::example(name);
    auto r = validate_section(d.bundle, d.sections.front());
    EXPECT_TRUE(r.ok()) << name;
    EXPECT_TRUE(r.nonvanishing);
    EXPECT_NEAR(r.min_norm, 1.0, 1e-12);
  }
  auto bad = gallery::bad_section_bundle();
  auto r = validate_section(bad.bundle, bad.sections.front());
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.nonvanishing);
}

TEST(Sections, IncompatibleSectionRejected) {
  auto d = gallery::s2_trivial();
  Section s = d.sections.front();
  s.values[1][0] = Expr(2);
  EXPECT_FALSE(validate_section(d.bundle, s).ok());
}

TEST(Sections, LiftRestrictRoundTrip) {
  for (const auto& name : gallery::example_names()) {
    auto d = gallery::example(name);
    for (const auto& s : d.sections) {
      Section lifted = lift_section(d.bundle, s);
      EXPECT_EQ(restrict_section(d.bundle, lifted), s);
      EXPECT_TRUE(validate_section(vertical_bundle(d.bundle), lifted).ok() == validate_section(d.bundle, s).ok()) << name;
    }
  }
}

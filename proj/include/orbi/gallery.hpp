#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "orbi/document.hpp"
#include "orbi/sectors.hpp"

namespace orbi::gallery {

namespace detail {

struct CExpr {
  Expr re, im;
};

inline CExpr operator*(const CExpr& a, const CExpr& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }

inline CExpr cpow(const CExpr& z, int n) {
  CExpr r{Expr(1), Expr(0)};
  for (int i = 0; i < n; ++i) r = r * z;
  return r;
}

inline Expr x(int i) { return Expr::var(i); }
inline Expr r2(const Expr& a, const Expr& b) { return a * a + b * b; }

inline std::vector<int> identity_lambda(const GroupPtr& g) {
  std::vector<int> l;
  for (int e = 0; e < g->order(); ++e) l.push_back(e);
  return l;
}

inline ExprMatrix rotation(const Expr& c, const Expr& s) {
  ExprMatrix m(2, 2);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return m;
}

// 2x2 skew connection matrix with omega_12 = f * (u1 du2 - u2 du1), u = (x1 + t1, x2 + t2).
inline MatrixForm rotational_connection(const Expr& f, double t1 = 0.0) {
  Expr u1 = x(1) + ExprMatrix::exact_or_real(t1), u2 = x(2);
  FormExpr w = FormExpr::monomial(2, f * u1, {2}) - FormExpr::monomial(2, f * u2, {1});
  MatrixForm m = MatrixForm::zero(2, 2, 1);
  m.set(0, 1, w);
  m.set(1, 0, -w);
  return m;
}

inline Representation dihedral_rep(const GroupPtr& g, int n, int k) {
  Representation r{g, {}};
  Mat s(2, 2);
  s << 1, 0, 0, -1;
  for (int e = 0; e < g->order(); ++e) {
    int flip = e / n, j = e % n;
    double t = 2.0 * std::numbers::pi * static_cast<double>(k * j % n) / n;
    Mat rot(2, 2);
    rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    Mat m = flip ? Mat(s * rot) : rot;
    Representation::snap(m);
    r.matrices.push_back(m);
  }
  return r;
}

// One-dimensional sign character; for D_n it records the reflection part, for Z_n (n even) the parity.
inline Representation sign_rep(const GroupPtr& g, bool dihedral, int n) {
  Representation r{g, {}};
  for (int e = 0; e < g->order(); ++e) {
    int s = dihedral ? (e / n) : (e % 2);
    r.matrices.push_back(Mat::Constant(1, 1, s ? -1.0 : 1.0));
  }
  return r;
}

}  // namespace detail

// Two-chart sphere with cone angle 2 pi / p at the centre of chart `a`:
// w = 1 / z^p on the overlap chart O (a small disc about z = 1).
struct SphereSpec {
  int p = 1;
  GroupPtr group_a;  // acts on chart a by rotation; nullptr = trivial
  GroupPtr uniform;  // when set, every chart carries this group acting trivially
  std::string a = "N", b = "S";
  double radius_a = 7.0, radius_b = 7.0;
};

inline Atlas sphere_atlas(const SphereSpec& s) {
  using namespace detail;
  const int p = s.p;
  Atlas at;
  GroupPtr ga = s.uniform ? s.uniform : (s.group_a ? s.group_a : FiniteGroup::trivial());
  GroupPtr gb = s.uniform ? s.uniform : FiniteGroup::trivial();
  Chart ca{s.a, Domain::ball(2, s.radius_a), ga, s.uniform ? Representation::trivial(ga, 2) : Representation::rotation(ga, 1), {}};
  Chart cb{s.b, Domain::ball(2, s.radius_b), gb, Representation::trivial(gb, 2), {}};
  Chart co{"O", Domain::ball(2, 1.0 / (4.0 * p)), gb, Representation::trivial(gb, 2), {}};
  at.charts = {ca, cb, co};

  Expr a = x(1) + Expr(1), b = x(2);
  Injection to_a{"O->" + s.a, "O", s.a, {a, b}, {}};
  CExpr w = cpow({a, -b}, p);
  Expr den = pow(r2(a, b), p);
  Injection to_b{"O->" + s.b, "O", s.b, {w.re / den, w.im / den}, {}};
  if (s.uniform) {
    to_a.lambda = identity_lambda(gb);
    to_b.lambda = identity_lambda(gb);
  } else {
    to_a.lambda = {0};
    to_b.lambda = {0};
  }
  at.injections = {to_a, to_b};
  return at;
}

// psi_a(z) + psi_b(w) = 1 since |w| = |z|^-p; steeper k shrinks the truncation error.
inline PartitionOfUnity sphere_partition(int p, int k) {
  using namespace detail;
  Expr rr = r2(x(1), x(2));
  return {{Expr(1) / (Expr(1) + pow(rr, k * p)), Expr(1) / (Expr(1) + pow(rr, k)), Expr(0)}};
}

// Orthonormal-frame tangent bundle of the sphere with metric
// (1 + |z|^2p)^(-(p+1)/p) |dz|^2 on chart a.
inline Document sphere_tangent_document(const SphereSpec& s, const std::string& name) {
  using namespace detail;
  const int p = s.p;
  Document d;
  d.name = name;
  BundleCocycle& bc = d.bundle;
  bc.base = sphere_atlas(s);
  bc.rank = 2;
  for (const auto& c : bc.base.charts) bc.fiber_actions.push_back(c.action);
  Expr a = x(1) + Expr(1), b = x(2);
  bc.transitions["O->" + s.a] = ExprMatrix::identity(2);
  CExpr c = cpow({a, -b}, p + 1);
  Expr mod = pow(sqrt(r2(a, b)), p + 1);
  bc.transitions["O->" + s.b] = rotation(-c.re / mod, -c.im / mod);

  ConnectionData conn;
  auto fa = [&](const Expr& u1, const Expr& u2) {
    Expr rr = r2(u1, u2);
    return Expr(p + 1) * pow(rr, p - 1) / (Expr(1) + pow(rr, p));
  };
  conn.forms.push_back(rotational_connection(fa(x(1), x(2))));
  conn.forms.push_back(rotational_connection(Expr(Rational(p + 1, p)) / (Expr(1) + r2(x(1), x(2)))));
  conn.forms.push_back(rotational_connection(fa(a, b), 1.0));
  d.connection = conn;
  d.partition = sphere_partition(p, p == 1 ? 3 : 2);
  if (p > 1) {
    for (auto& ch : bc.base.charts) ch.complex_action = ComplexRepresentation::character(ch.group, 1);
    std::vector<ComplexRepresentation> fc;
    for (const auto& ch : bc.base.charts) fc.push_back(ComplexRepresentation::character(ch.group, 1));
    bc.fiber_complex = fc;
  }
  return d;
}

inline Document s2_tangent() { return sphere_tangent_document({}, "s2-tangent"); }

inline Document teardrop(int p) {
  if (p < 2) throw InputError("teardrop needs p >= 2");
  SphereSpec s;
  s.p = p;
  s.group_a = FiniteGroup::cyclic(p);
  s.a = "C";
  s.b = "D";
  s.radius_a = std::ceil(100.0 * std::pow(10.0, 1.0 / p)) / 100.0;
  s.radius_b = 10.0;
  return sphere_tangent_document(s, "teardrop-" + std::to_string(p));
}

// Trivial rank-2 bundle over the round sphere atlas with a constant section.
inline Document s2_trivial() {
  Document d;
  d.name = "s2-trivial";
  d.bundle.base = sphere_atlas({});
  d.bundle.rank = 2;
  for (const auto& c : d.bundle.base.charts) d.bundle.fiber_actions.push_back(Representation::trivial(c.group, 2));
  for (const auto& i : d.bundle.base.injections) d.bundle.transitions[i.id] = ExprMatrix::identity(2);
  d.connection = ConnectionData::flat(d.bundle);
  d.partition = sphere_partition(1, 3);
  d.sections.push_back(Section::constant(d.bundle, {Expr(1), Expr(0)}, "e1"));
  return d;
}

// Z3 acting trivially on the sphere and by rotation on a trivial plane bundle.
inline Document s2_z3_bad() {
  using namespace detail;
  GroupPtr g = FiniteGroup::cyclic(3);
  SphereSpec s;
  s.uniform = g;
  Document d;
  d.name = "s2-z3-bad";
  BundleCocycle& bc = d.bundle;
  bc.base = sphere_atlas(s);
  bc.rank = 2;
  std::vector<ComplexRepresentation> fc;
  for (auto& c : bc.base.charts) {
    bc.fiber_actions.push_back(Representation::rotation(g, 1));
    c.complex_action = ComplexRepresentation::character(g, 0);
    fc.push_back(ComplexRepresentation::character(g, 1));
  }
  bc.fiber_complex = fc;
  for (const auto& i : bc.base.injections) bc.transitions[i.id] = ExprMatrix::identity(2);
  d.connection = ConnectionData::flat(bc);
  d.partition = sphere_partition(1, 3);

  // h = (1 - r^2)/(1 + r^2) on N, its negative on S; O uses the N formula.
  auto h = [](const Expr& u1, const Expr& u2) {
    Expr rr = r2(u1, u2);
    return (Expr(1) - rr) / (Expr(1) + rr);
  };
  Expr hn = h(x(1), x(2)), hs = -h(x(1), x(2)), ho = h(x(1) + Expr(1), x(2));
  const int vals[3] = {0, 1, -1};
  for (int idx = 0; idx < 20; ++idx) {
    int q = idx, c[4];
    for (int k = 3; k >= 0; --k) {
      c[k] = vals[q % 3];
      q /= 3;
    }
    Section sec{"candidate-" + std::to_string(idx), {}};
    for (const Expr& hh : {hn, hs, ho}) sec.values.push_back({Expr(c[0]) + Expr(c[1]) * hh, Expr(c[2]) + Expr(c[3]) * hh});
    d.sections.push_back(sec);
  }
  return d;
}

inline Document flat_torus() {
  Document d;
  d.name = "flat-torus";
  GroupPtr g = FiniteGroup::trivial();
  d.bundle.base.charts.push_back({"T", Domain::box({{0.0, 1.0}, {0.0, 1.0}}), g, Representation::trivial(g, 2), {}});
  d.bundle.rank = 2;
  d.bundle.fiber_actions.push_back(Representation::trivial(g, 2));
  d.connection = ConnectionData::flat(d.bundle);
  d.partition = PartitionOfUnity{{Expr(1)}};
  d.sections.push_back(Section::constant(d.bundle, {Expr(1), Expr(0)}, "e1"));
  return d;
}

inline const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names = {"s2-z3-bad", "s2-tangent", "s2-trivial", "flat-torus",
                                                 "teardrop-2", "teardrop-3", "teardrop-7"};
  return names;
}

inline Document example(const std::string& name) {
  if (name == "s2-z3-bad") return s2_z3_bad();
  if (name == "s2-tangent") return s2_tangent();
  if (name == "s2-trivial" || name == "s2-tangentless") return s2_trivial();
  if (name == "flat-torus") return flat_torus();
  if (name.rfind("teardrop-", 0) == 0) {
    std::string tail = name.substr(9);
    if (tail.empty() || tail.size() > 3 || tail.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("teardrop order must be an integer, got '" + tail + "'");
    return teardrop(std::stoi(tail));
  }
  throw InputError("unknown example '" + name + "'");
}

// Base chart M (unit disc) with a finite group, a small disc O about (1/2, 0)
// carrying the stabiliser, and O2 inside O; scalar transitions.
struct RandomBundleSpec {
  GroupPtr group;
  bool dihedral = false;
  int n = 1;  // cyclic order or dihedral index
  Representation base, fiber;
};

inline RandomBundleSpec random_spec(std::mt19937_64& rng) {
  RandomBundleSpec s;
  int choice = std::uniform_int_distribution<int>(0, 7)(rng);
  if (choice < 6) {
    s.n = choice + 1;
    s.group = FiniteGroup::cyclic(s.n);
  } else {
    s.n = choice - 4;
    s.dihedral = true;
    s.group = FiniteGroup::dihedral(s.n);
  }
  auto pick = [&](int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng); };
  auto two_dim = [&]() {
    if (s.dihedral) return detail::dihedral_rep(s.group, s.n, 1 + pick(std::max(1, s.n - 1)));
    return Representation::rotation(s.group, pick(s.n));
  };
  s.base = pick(4) == 0 ? Representation::trivial(s.group, 2) : two_dim();
  int rank = pick(4);
  s.fiber = Representation::trivial(s.group, 0);
  s.fiber.matrices.assign(static_cast<std::size_t>(s.group->order()), Mat(0, 0));
  while (s.fiber.dim() < rank) {
    int kind = pick(3);
    if (kind == 2 && rank - s.fiber.dim() >= 2)
      s.fiber = direct_sum(s.fiber, two_dim());
    else if (kind == 1 && (s.dihedral || s.n % 2 == 0))
      s.fiber = direct_sum(s.fiber, detail::sign_rep(s.group, s.dihedral, s.n));
    else
      s.fiber = direct_sum(s.fiber, Representation::trivial(s.group, 1));
  }
  return s;
}

inline BundleCocycle bundle_from_spec(const RandomBundleSpec& s) {
  using namespace detail;
  BundleCocycle b;
  const GroupPtr& g = s.group;
  Vec x0(2);
  x0 << 0.5, 0.0;
  std::vector<int> stab;
  for (int e = 0; e < g->order(); ++e)
    if ((s.base(e) * x0 - x0).norm() < 1e-12) stab.push_back(e);
  InducedGroup h = as_group(Subgroup(g, stab), "Stab");
  Representation base_h{h.group, {}}, fiber_h{h.group, {}};
  for (int e : h.to_parent) {
    base_h.matrices.push_back(s.base(e));
    fiber_h.matrices.push_back(s.fiber(e));
  }
  b.base.charts = {{"M", Domain::ball(2, 1.0), g, s.base, {}},
                   {"O", Domain::ball(2, 0.25), h.group, base_h, {}},
                   {"O2", Domain::ball(2, 0.125), h.group, base_h, {}}};
  Expr half(Rational(1, 2));
  b.base.injections = {{"O->M", "O", "M", {x(1) + half, x(2)}, h.to_parent},
                       {"O2->O", "O2", "O", {x(1), x(2)}, identity_lambda(h.group)},
                       {"O2->M", "O2", "M", {x(1) + half, x(2)}, h.to_parent}};
  b.base.compositions = {{"O2->O", "O->M", "O2->M"}};
  b.rank = s.fiber.dim();
  b.fiber_actions = {s.fiber, fiber_h, fiber_h};
  Expr ym = r2(x(1) + half, x(2)), yy = r2(x(1), x(2));
  auto scalar = [&](const Expr& f) {
    ExprMatrix m = ExprMatrix::identity(b.rank);
    for (int i = 0; i < b.rank; ++i) m(i, i) = f;
    return m;
  };
  b.transitions["O->M"] = scalar(Expr(1) + ym * half);
  b.transitions["O2->O"] = scalar(Expr(1) + yy);
  b.transitions["O2->M"] = scalar((Expr(1) + ym * half) * (Expr(1) + yy));
  return b;
}

inline BundleCocycle random_bundle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return bundle_from_spec(random_spec(rng));
}

// Z2 acting trivially on the disc and by (1, -1) on the fiber, with a
// nowhere-vanishing section in the invariant line.
inline Document bad_section_bundle() {
  using namespace detail;
  RandomBundleSpec s;
  s.group = FiniteGroup::cyclic(2);
  s.n = 2;
  s.base = Representation::trivial(s.group, 2);
  s.fiber = direct_sum(Representation::trivial(s.group, 1), sign_rep(s.group, false, 2));
  Document d;
  d.name = "z2-bad-section";
  d.bundle = bundle_from_spec(s);
  for (const auto& i : d.bundle.base.injections) d.bundle.transitions[i.id] = ExprMatrix::identity(2);
  d.connection = ConnectionData::flat(d.bundle);
  d.partition = PartitionOfUnity{{Expr(1), Expr(0), Expr(0)}};
  Expr quarter(Rational(1, 4)), half(Rational(1, 2));
  Expr fm = Expr(1) + r2(x(1), x(2)) * quarter, fo = Expr(1) + r2(x(1) + half, x(2)) * quarter;
  d.sections.push_back({"e1", {{fm, Expr(0)}, {fo, Expr(0)}, {fo, Expr(0)}}});
  return d;
}

// Random group acting trivially on the disc and nontrivially on the fiber,
// with a nowhere-vanishing section (1 + c|x|^2, 0, ...) in the invariant line.
inline Document random_bad_section_bundle(std::uint64_t seed) {
  using namespace detail;
  std::mt19937_64 rng(seed);
  RandomBundleSpec s;
  do {
    s = random_spec(rng);
  } while (s.group->order() < 2);
  s.base = Representation::trivial(s.group, 2);
  Representation moving = (s.dihedral || s.n % 2 == 0) ? sign_rep(s.group, s.dihedral, s.n)
                          : Representation::rotation(s.group, 1);
  s.fiber = direct_sum(Representation::trivial(s.group, 1), moving);
  Document d;
  d.name = "random-bad-section-" + std::to_string(seed);
  d.bundle = bundle_from_spec(s);
  for (const auto& i : d.bundle.base.injections) d.bundle.transitions[i.id] = ExprMatrix::identity(d.bundle.rank);
  d.connection = ConnectionData::flat(d.bundle);
  d.partition = PartitionOfUnity{{Expr(1), Expr(0), Expr(0)}};
  Expr c(Rational(std::uniform_int_distribution<int>(1, 9)(rng), 10)), half(Rational(1, 2));
  auto value = [&](const Expr& u1) {
    std::vector<Expr> v(static_cast<std::size_t>(d.bundle.rank), Expr(0));
    v[0] = Expr(1) + c * r2(u1, x(2));
    return v;
  };
  d.sections.push_back({"e1", {value(x(1)), value(x(1) + half), value(x(1) + half)}});
  return d;
}

}  // namespace orbi::gallery

#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "orbi/bundle.hpp"
#include "orbi/forms.hpp"

namespace orbi {

struct SectorMember {
  int chart = 0;  // index into atlas.charts
  int cls = 0;    // index into that chart's conjugacy classes
  int element = 0;  // representative: smallest element of the class

  friend bool operator==(const SectorMember&, const SectorMember&) = default;
};

struct SectorCensus {
  std::vector<std::vector<std::vector<int>>> chart_classes;  // per chart
  std::vector<std::vector<SectorMember>> classes;
  std::vector<bool> twisted;

  int class_of(int chart, int element) const {
    int cls = conjugacy_class_of(chart_classes[static_cast<std::size_t>(chart)], element);
    for (std::size_t c = 0; c < classes.size(); ++c)
      for (const auto& m : classes[c])
        if (m.chart == chart && m.cls == cls) return static_cast<int>(c);
    throw InputError("element not covered by the sector census");
  }
};

namespace detail {
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};
}  // namespace detail

inline SectorCensus sector_census(const Atlas& a) {
  SectorCensus s;
  std::vector<int> offset;
  int total = 0;
  for (const auto& c : a.charts) {
    s.chart_classes.push_back(conjugacy_classes(*c.group));
    offset.push_back(total);
    total += static_cast<int>(s.chart_classes.back().size());
  }
  detail::UnionFind uf(total);
  for (const auto& inj : a.injections) {
    int si = a.chart_index(inj.src), di = a.chart_index(inj.dst);
    for (int g = 0; g < static_cast<int>(inj.lambda.size()); ++g)
      uf.unite(offset[si] + conjugacy_class_of(s.chart_classes[si], g),
               offset[di] + conjugacy_class_of(s.chart_classes[di], inj.lambda[g]));
  }
  // node order is (chart, class) lexicographic, so roots are minimal members
  std::map<int, int> root_to_class;
  for (int c = 0; c < static_cast<int>(a.charts.size()); ++c)
    for (int k = 0; k < static_cast<int>(s.chart_classes[c].size()); ++k) {
      int root = uf.find(offset[c] + k);
      auto [it, fresh] = root_to_class.emplace(root, static_cast<int>(s.classes.size()));
      if (fresh) {
        s.classes.emplace_back();
        s.twisted.push_back(true);
      }
      s.classes[it->second].push_back({c, k, s.chart_classes[c][k].front()});
      if (s.chart_classes[c][k].front() == a.charts[c].group->identity()) s.twisted[it->second] = false;
    }
  return s;
}

struct CoincidenceCertificate {
  bool match = true;
  std::string detail;
};

inline CoincidenceCertificate census_coincidence(const BundleCocycle& b) {
  SectorCensus q = sector_census(b.base), e = sector_census(total_space(b));
  CoincidenceCertificate c;
  if (q.classes.size() != e.classes.size()) {
    c.match = false;
    c.detail = "class counts differ: " + std::to_string(q.classes.size()) + " on the base, " + std::to_string(e.classes.size()) + " on the total space";
    return c;
  }
  for (std::size_t k = 0; k < q.classes.size(); ++k)
    if (q.classes[k] != e.classes[k]) {
      c.match = false;
      c.detail = "class " + std::to_string(k) + " has different members";
      return c;
    }
  c.detail = std::to_string(q.classes.size()) + " classes match under the identity identification";
  return c;
}

// Subgroup reindexed as a standalone group; to_parent maps new indices back.
struct InducedGroup {
  GroupPtr group;
  std::vector<int> to_parent;

  int from_parent(int g) const {
    for (std::size_t i = 0; i < to_parent.size(); ++i)
      if (to_parent[i] == g) return static_cast<int>(i);
    return -1;
  }
};

inline InducedGroup as_group(const Subgroup& h, const std::string& name) {
  InducedGroup r;
  r.to_parent = h.elements();
  int n = h.size();
  std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    labels.push_back(h.parent()->labels()[r.to_parent[i]]);
    for (int j = 0; j < n; ++j) {
      int prod = h.parent()->mul(r.to_parent[i], r.to_parent[j]);
      t[i][j] = static_cast<int>(std::find(r.to_parent.begin(), r.to_parent.end(), prod) - r.to_parent.begin());
    }
  }
  r.group = std::make_shared<const FiniteGroup>(name, std::move(t), std::move(labels));
  return r;
}

// Fixed-set coordinates of one sector chart: x = basis * y.
struct SectorChartData {
  int member = 0;       // index into census.classes[c]
  int parent_chart = 0; // index into the parent atlas
  int element = 0;      // g (parent element index)
  Mat basis;            // parent dim x fixed dim
  std::vector<int> factor_dims;  // fixed dimension per domain factor
  InducedGroup centralizer;
};

struct SectorInjectionData {
  std::string parent_injection;
  int conjugator = 0;  // k in the target group with k^-1 lambda(g_src) k = g_dst
};

struct SectorAtlas {
  Atlas atlas;
  int class_index = 0;
  std::vector<SectorChartData> charts;  // parallel to atlas.charts
  std::vector<SectorInjectionData> injections;  // parallel to atlas.injections
};

namespace detail {

// Fixed-set basis per domain factor; the action must not mix factors.
inline Mat blockwise_fixed_basis(const Domain& d, const Mat& m, int order, std::vector<int>& dims) {
  std::vector<Mat> blocks;
  int off = 0, total = 0;
  for (const auto& f : d.factors) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) {
        bool in_i = i >= off && i < off + f.dim, in_j = j >= off && j < off + f.dim;
        if (in_i != in_j && std::fabs(m(i, j)) > kMatrixTol) throw InputError("group action mixes domain factors");
      }
    Mat b = fixed_subspace(Mat(m.block(off, off, f.dim, f.dim)), order);
    dims.push_back(static_cast<int>(b.cols()));
    total += static_cast<int>(b.cols());
    blocks.push_back(b);
    off += f.dim;
  }
  Mat r = Mat::Zero(m.rows(), total);
  int ro = 0, co = 0;
  for (const auto& b : blocks) {
    r.block(ro, co, b.rows(), b.cols()) = b;
    ro += static_cast<int>(b.rows());
    co += static_cast<int>(b.cols());
  }
  return r;
}

inline DomainFactor fixed_factor(const DomainFactor& f, const Mat& b) {
  if (b.cols() == 0) return DomainFactor::ball(0);
  if (f.kind == DomainFactor::Kind::Ball) return DomainFactor::ball(static_cast<int>(b.cols()), f.radius);
  // box: aligned with coordinate axes keeps the box, otherwise use the inscribed ball
  std::vector<std::pair<double, double>> bounds;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    Eigen::Index at = 0;
    double biggest = b.col(j).cwiseAbs().maxCoeff(&at);
    if (std::fabs(biggest - 1.0) > 1e-12) bounds.clear();
    if (std::fabs(biggest - 1.0) > 1e-12) break;
    auto [lo, hi] = f.bounds[static_cast<std::size_t>(at)];
    bounds.push_back(b(at, j) > 0 ? std::make_pair(lo, hi) : std::make_pair(-hi, -lo));
  }
  if (static_cast<Eigen::Index>(bounds.size()) == b.cols()) return DomainFactor::box(bounds);
  double r = std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : f.bounds) {
    if (std::fabs(lo + hi) > 1e-12) throw InputError("fixed set of an off-center box is not supported");
    r = std::min(r, hi);
  }
  return DomainFactor::ball(static_cast<int>(b.cols()), r);
}

inline std::vector<Expr> linear_map(const Mat& m, int offset = 0) {
  std::vector<Expr> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Expr e(0);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) e = e + ExprMatrix::exact_or_real(m(i, j)) * Expr::var(static_cast<int>(j) + 1 + offset);
    out.push_back(e);
  }
  return out;
}

}  // namespace detail

// Charts (V^g, C(g)) for every member of class c; injections induced from
// those of the parent atlas, corrected by a conjugator in the target group.
inline SectorAtlas sector_atlas(const Atlas& a, const SectorCensus& census, int c) {
  if (c < 0 || c >= static_cast<int>(census.classes.size())) throw InputError("sector class out of range");
  SectorAtlas s;
  s.class_index = c;
  const auto& members = census.classes[static_cast<std::size_t>(c)];
  std::map<int, int> per_chart_count;
  for (const auto& m : members) per_chart_count[m.chart]++;
  std::map<int, int> member_of_chart;  // chart index -> sector chart index (first member)
  for (std::size_t mi = 0; mi < members.size(); ++mi) {
    const auto& m = members[mi];
    const Chart& pc = a.charts[static_cast<std::size_t>(m.chart)];
    SectorChartData d;
    d.member = static_cast<int>(mi);
    d.parent_chart = m.chart;
    d.element = m.element;
    d.basis = detail::blockwise_fixed_basis(pc.domain, pc.action(m.element), pc.group->element_order(m.element), d.factor_dims);
    d.centralizer = as_group(centralizer(pc.group, m.element), "C(" + pc.group->labels()[m.element] + ")");
    Chart ch;
    ch.id = per_chart_count[m.chart] > 1 ? pc.id + "[" + pc.group->labels()[m.element] + "]" : pc.id;
    int off = 0, col = 0;
    for (std::size_t f = 0; f < pc.domain.factors.size(); ++f) {
      const auto& fac = pc.domain.factors[f];
      Mat block = d.basis.block(off, col, fac.dim, d.factor_dims[f]);
      DomainFactor nf = detail::fixed_factor(fac, block);
      if (nf.dim > 0 || ch.domain.factors.empty()) ch.domain.factors.push_back(nf);
      off += fac.dim;
      col += d.factor_dims[f];
    }
    if (ch.domain.dim() > 0) {
      std::vector<DomainFactor> nonzero;
      for (const auto& f : ch.domain.factors)
        if (f.dim > 0) nonzero.push_back(f);
      ch.domain.factors = nonzero;
    }
    ch.group = d.centralizer.group;
    ch.action.group = ch.group;
    for (int h : d.centralizer.to_parent) {
      Mat r = d.basis.transpose() * pc.action(h) * d.basis;
      Representation::snap(r);
      ch.action.matrices.push_back(r);
    }
    member_of_chart.emplace(m.chart, static_cast<int>(s.atlas.charts.size()));
    s.atlas.charts.push_back(std::move(ch));
    s.charts.push_back(std::move(d));
  }
  // induced injections
  for (const auto& inj : a.injections) {
    int si = a.chart_index(inj.src), di = a.chart_index(inj.dst);
    for (std::size_t sc = 0; sc < s.charts.size(); ++sc) {
      if (s.charts[sc].parent_chart != si) continue;
      const auto& sd = s.charts[sc];
      int image = inj.lambda[static_cast<std::size_t>(sd.element)];
      // target sector chart whose representative is conjugate to the image
      const Chart& tc = a.charts[static_cast<std::size_t>(di)];
      int target = -1, conj = -1;
      for (std::size_t tcx = 0; tcx < s.charts.size() && target < 0; ++tcx) {
        if (s.charts[tcx].parent_chart != di) continue;
        for (int k = 0; k < tc.group->order(); ++k)
          if (tc.group->conjugate(tc.group->inverse(k), image) == s.charts[tcx].element) {
            target = static_cast<int>(tcx);
            conj = k;
            break;
          }
      }
      if (target < 0) throw CertificateError("sector transport of '" + inj.id + "' leaves the class");
      const auto& td = s.charts[static_cast<std::size_t>(target)];
      int kinv = tc.group->inverse(conj);
      // y -> B_t^T M(k^-1) phi(B_s y)
      auto xs = detail::linear_map(sd.basis);
      std::vector<Expr> phi;
      for (const auto& e : inj.map) phi.push_back(substitute(e, std::span<const Expr>(xs)));
      Mat proj = td.basis.transpose() * tc.action(kinv);
      Representation::snap(proj);
      Injection si_inj;
      si_inj.id = s.charts.size() == member_of_chart.size() ? inj.id : inj.id + "[" + std::to_string(sc) + "]";
      si_inj.src = s.atlas.charts[sc].id;
      si_inj.dst = s.atlas.charts[static_cast<std::size_t>(target)].id;
      for (Eigen::Index i = 0; i < proj.rows(); ++i) {
        Expr e(0);
        for (Eigen::Index j = 0; j < proj.cols(); ++j)
          if (proj(i, j) != 0.0) e = e + ExprMatrix::exact_or_real(proj(i, j)) * phi[static_cast<std::size_t>(j)];
        si_inj.map.push_back(e);
      }
      for (int h : sd.centralizer.to_parent) {
        int lh = tc.group->conjugate(kinv, inj.lambda[static_cast<std::size_t>(h)]);
        si_inj.lambda.push_back(td.centralizer.from_parent(lh));
      }
      s.atlas.injections.push_back(std::move(si_inj));
      s.injections.push_back({inj.id, conj});
    }
  }
  // compositions survive when no conjugation was needed
  for (const auto& comp : a.compositions) {
    auto find = [&](const std::string& parent) -> int {
      int found = -1;
      for (std::size_t i = 0; i < s.injections.size(); ++i)
        if (s.injections[i].parent_injection == parent) {
          if (found >= 0 || s.injections[i].conjugator != a.chart(a.injection(parent).dst).group->identity()) return -1;
          found = static_cast<int>(i);
        }
      return found;
    };
    int f = find(comp.first), g = find(comp.second), r = find(comp.result);
    if (f >= 0 && g >= 0 && r >= 0)
      s.atlas.compositions.push_back({s.atlas.injections[f].id, s.atlas.injections[g].id, s.atlas.injections[r].id});
  }
  return s;
}

// Sector bundle over a sector atlas: fiber compressed to the g-fixed subspace.
struct SectorBundle {
  BundleCocycle bundle;
  std::vector<Mat> fiber_basis;  // parallel to sector charts, rank x sector rank
};

inline SectorBundle sector_bundle(const BundleCocycle& b, const SectorAtlas& s) {
  SectorBundle out;
  out.bundle.base = s.atlas;
  int rank = -1;
  for (const auto& d : s.charts) {
    const Representation& f = b.fiber_actions[static_cast<std::size_t>(d.parent_chart)];
    const Chart& pc = b.base.charts[static_cast<std::size_t>(d.parent_chart)];
    Mat fb = b.rank ? fixed_subspace(f, d.element) : Mat(0, 0);
    if (rank < 0) rank = static_cast<int>(fb.cols());
    if (rank != fb.cols()) throw CertificateError("fixed fiber rank varies along a sector");
    Representation r{d.centralizer.group, {}};
    for (int h : d.centralizer.to_parent) {
      Mat m = fb.transpose() * f(h) * fb;
      Representation::snap(m);
      r.matrices.push_back(m);
    }
    if (rank == 0) r.matrices.assign(static_cast<std::size_t>(d.centralizer.group->order()), Mat(0, 0));
    out.bundle.fiber_actions.push_back(std::move(r));
    out.fiber_basis.push_back(fb);
    (void)pc;
  }
  out.bundle.rank = std::max(rank, 0);
  for (std::size_t i = 0; i < s.injections.size(); ++i) {
    const auto& sinj = s.atlas.injections[i];
    const auto& pinj = b.base.injection(s.injections[i].parent_injection);
    int sc = s.atlas.chart_index(sinj.src), tc = s.atlas.chart_index(sinj.dst);
    const auto& sd = s.charts[static_cast<std::size_t>(sc)];
    const Chart& target_parent = b.base.charts[static_cast<std::size_t>(s.charts[static_cast<std::size_t>(tc)].parent_chart)];
    int kinv = target_parent.group->inverse(s.injections[i].conjugator);
    auto xs = detail::linear_map(sd.basis);
    ExprMatrix g = b.transition(pinj.id).map([&](const Expr& e) { return substitute(e, std::span<const Expr>(xs)); });
    Mat left = out.fiber_basis[static_cast<std::size_t>(tc)].transpose() * b.fiber(target_parent.id)(kinv);
    Representation::snap(left);
    ExprMatrix t = ExprMatrix::constant(left) * g * ExprMatrix::constant(out.fiber_basis[static_cast<std::size_t>(sc)]);
    out.bundle.transitions[sinj.id] = t;
  }
  return out;
}

// Degree shift of class c read from the complex action of the chart of its first member.
inline std::optional<Rational> sector_degree_shift(const Atlas& a, const SectorCensus& census, int c) {
  const auto& m = census.classes[static_cast<std::size_t>(c)].front();
  const Chart& ch = a.charts[static_cast<std::size_t>(m.chart)];
  if (!ch.complex_action) return std::nullopt;
  return degree_shift(*ch.complex_action, m.element);
}

struct ClassComponent {
  int sector = 0;
  bool twisted = false;
  std::optional<Rational> shift;  // absent without a complex structure
  int form_degree = 0;
  std::vector<FormExpr> forms;    // one per sector chart
  std::vector<int> sector_dims;
  std::optional<double> integral;

  std::optional<Rational> degree() const {
    if (!shift) return std::nullopt;
    return Rational(form_degree) + Rational(2) * *shift;
  }
  bool is_zero() const {
    for (const auto& f : forms)
      if (!f.is_zero()) return false;
    return true;
  }
  // The representative is the constant function 1 on every sector chart.
  bool is_constant_one() const {
    if (form_degree != 0 || forms.empty()) return false;
    for (const auto& f : forms)
      if (!(f.scalar_part() == Expr(1))) return false;
    return true;
  }
};

struct OrbifoldClass {
  std::string kind;
  std::string space;  // "Q" or "E"
  std::vector<ClassComponent> components;
};

// Pulls each component back along the zero-section maps (fiber coordinates
// and their differentials set to 0) and regrades with the base shifts.
inline OrbifoldClass iota_star(const BundleCocycle& b, const OrbifoldClass& cls) {
  SectorCensus q = sector_census(b.base);
  OrbifoldClass out{cls.kind, "Q", {}};
  for (const auto& comp : cls.components) {
    SectorAtlas sa = sector_atlas(b.base, q, comp.sector);
    ClassComponent r = comp;
    r.shift = sector_degree_shift(b.base, q, comp.sector);
    r.forms.clear();
    r.sector_dims.clear();
    for (std::size_t k = 0; k < comp.forms.size(); ++k) {
      int db = sa.atlas.charts[k].dim();
      std::vector<Expr> map = coordinate_vars(db);
      for (int j = db; j < comp.forms[k].dim(); ++j) map.push_back(Expr(0));
      r.forms.push_back(pullback(comp.forms[k], map, db));
      r.sector_dims.push_back(db);
    }
    bool all_zero = true;
    for (const auto& f : r.forms) all_zero = all_zero && f.is_zero();
    r.form_degree = all_zero ? comp.form_degree : r.forms.front().degree();
    r.integral.reset();
    out.components.push_back(std::move(r));
  }
  return out;
}

struct RetractionReport {
  bool identity_at_one = true;
  bool projection_at_zero = true;
  bool stays_in_fiber_domain = true;
  bool equivariant = true;
  bool ok() const { return identity_at_one && projection_at_zero && stays_in_fiber_domain && equivariant; }
};

// H_t(y, w) = (y, t w) on the total-space sector charts of class c.
inline RetractionReport retraction_check(const BundleCocycle& b, int c, const std::vector<Rational>& ts, std::uint64_t seed = 0) {
  RetractionReport r;
  Atlas e = total_space(b);
  SectorCensus census = sector_census(e);
  SectorAtlas sa = sector_atlas(e, census, c);
  SectorCensus qc = sector_census(b.base);
  SectorAtlas qa = sector_atlas(b.base, qc, c);
  for (std::size_t k = 0; k < sa.atlas.charts.size(); ++k) {
    const Chart& ch = sa.atlas.charts[k];
    int n = ch.dim(), db = qa.atlas.charts[k].dim();
    for (const auto& t : ts) {
      std::vector<Expr> h;
      for (int j = 1; j <= n; ++j) h.push_back(j <= db ? Expr::var(j) : Expr(t) * Expr::var(j));
      if (t == Rational(1))
        for (int j = 0; j < n; ++j) r.identity_at_one = r.identity_at_one && h[static_cast<std::size_t>(j)] == Expr::var(j + 1);
      if (t == Rational(0))
        for (int j = 0; j < n; ++j) {
          // zero section after projection: (y, w) -> (y, 0)
          Expr proj = j < db ? Expr::var(j + 1) : Expr(0);
          r.projection_at_zero = r.projection_at_zero && h[static_cast<std::size_t>(j)] == proj;
        }
      for (const auto& x : sample_points(ch.domain, seed)) {
        std::vector<double> hx;
        for (const auto& e2 : h) hx.push_back(e2.eval(x));
        if (!ch.domain.contains(hx, 1e-12)) r.stays_in_fiber_domain = false;
        for (int g = 0; g < ch.group->order(); ++g) {
          auto lhs = act(ch.action(g), hx);
          std::vector<double> gx = act(ch.action(g), x), hgx;
          for (const auto& e2 : h) hgx.push_back(e2.eval(gx));
          if (relative_gap(lhs, hgx) > kSampleTol) r.equivariant = false;
        }
      }
    }
  }
  return r;
}

}  // namespace orbi

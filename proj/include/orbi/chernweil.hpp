#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "orbi/pfaffian.hpp"
#include "orbi/quadrature.hpp"
#include "orbi/sectors.hpp"

namespace orbi {

inline constexpr double kConnectionTol = 1e-8;

// Connection 1-forms per chart for the convention nabla = d + omega acting on
// fiber coordinates, with s_dst = g s_src across injections.
struct ConnectionData {
  std::vector<MatrixForm> forms;  // parallel to charts
  bool metric = true;

  static ConnectionData flat(const BundleCocycle& b) {
    ConnectionData c;
    for (const auto& ch : b.base.charts) c.forms.push_back(MatrixForm::zero(b.rank, ch.dim(), 1));
    return c;
  }
};

namespace detail {

inline Mat component_matrix(const MatrixForm& m, int j, std::span<const double> x) { return m.evaluate({j}, x); }

// d(g) in direction j.
inline Mat derivative_matrix(const ExprMatrix& g, int j, std::span<const double> x) {
  return g.map([j](const Expr& e) { return differentiate(e, j); }).eval(x);
}

inline bool symbolically_skew(const MatrixForm& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j)
      if (!(m.at(i, j) + m.at(j, i)).is_zero()) return false;
  return true;
}

// Rewrites the lower triangle as the negated upper triangle and clears the diagonal.
inline MatrixForm mirror_skew(const MatrixForm& m) {
  MatrixForm r = m;
  for (int i = 0; i < m.rows(); ++i) {
    r.set(i, i, FormExpr(m.dim(), m.degree()));
    for (int j = i + 1; j < m.cols(); ++j) r.set(j, i, -m.at(i, j));
  }
  return r;
}

}  // namespace detail

// Checks shapes, skew-symmetry (symbolic, else sampled to 1e-12), chart-group
// equivariance and the transformation law across injections. A connection
// passing the skew test is normalised so that its entries are exactly opposed.
inline ValidationReport validate_connection(const BundleCocycle& b, ConnectionData& c, std::uint64_t seed = 0) {
  ValidationReport r;
  if (c.forms.size() != b.base.charts.size()) {
    r.add("connection must give one matrix per chart");
    return r;
  }
  int k = b.rank;
  for (std::size_t ci = 0; ci < c.forms.size(); ++ci) {
    const Chart& ch = b.base.charts[ci];
    MatrixForm& w = c.forms[ci];
    std::string where = "connection on '" + ch.id + "': ";
    if (w.rows() != k || w.cols() != k) {
      r.add(where + "must be rank x rank");
      continue;
    }
    if (k && (w.degree() != 1 || w.dim() != ch.dim())) {
      r.add(where + "entries must be 1-forms on the chart");
      continue;
    }
    if (c.metric && k) {
      bool skew = detail::symbolically_skew(w);
      if (!skew) {
        skew = true;
        for (const auto& x : sample_points(ch.domain, seed))
          for (int j = 1; j <= ch.dim(); ++j) {
            Mat a = detail::component_matrix(w, j, x);
            if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12) skew = false;
          }
      }
      if (!skew) r.add(where + "not skew-symmetric although the connection is declared metric");
      else w = detail::mirror_skew(w);
    }
    if (!k) continue;
    const Representation& f = b.fiber_actions[ci];
    for (int g = 0; g < ch.group->order(); ++g) {
      Mat a = ch.action(g);
      MatrixForm pulled = pullback(w, detail::linear_map(a), ch.dim());
      for (const auto& x : sample_points(ch.domain, seed)) {
        double worst = 0;
        for (int j = 1; j <= ch.dim(); ++j) {
          Mat lhs = detail::component_matrix(pulled, j, x);
          Mat rhs = f(g) * detail::component_matrix(w, j, x) * f(g).transpose();
          worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        r.max_residual = std::max(r.max_residual, worst);
        if (worst > kConnectionTol) {
          r.add(where + "not equivariant for element " + std::to_string(g) + " (residual " + std::to_string(worst) + ")");
          break;
        }
      }
    }
  }
  if (!r.ok()) return r;
  for (const auto& inj : b.base.injections) {
    if (!k) break;
    std::size_t si = static_cast<std::size_t>(b.base.chart_index(inj.src)), di = static_cast<std::size_t>(b.base.chart_index(inj.dst));
    int n = b.base.charts[si].dim();
    MatrixForm pulled = pullback(c.forms[di], inj.map, n);
    const ExprMatrix& g = b.transition(inj.id);
    for (const auto& x : sample_points(b.base.charts[si].domain, seed)) {
      Mat gx = g.eval(x), gi = gx.inverse();
      double worst = 0;
      for (int j = 1; j <= n; ++j) {
        Mat lhs = detail::component_matrix(pulled, j, x);
        Mat rhs = gx * detail::component_matrix(c.forms[si], j, x) * gi - detail::derivative_matrix(g, j, x) * gi;
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
      r.max_residual = std::max(r.max_residual, worst);
      if (worst > kConnectionTol) {
        r.add("connection does not transform across '" + inj.id + "' (residual " + std::to_string(worst) + ")");
        break;
      }
    }
  }
  return r;
}

// Omega = d omega + omega ^ omega; mirrored to exact skew-symmetry for metric data.
inline MatrixForm curvature(const MatrixForm& w, bool metric = true) {
  MatrixForm o = exterior_derivative(w) + wedge(w, w);
  return metric ? detail::mirror_skew(o) : o;
}

inline std::vector<MatrixForm> curvature(const ConnectionData& c) {
  std::vector<MatrixForm> out;
  for (const auto& w : c.forms) out.push_back(curvature(w, c.metric));
  return out;
}

// Pf(Omega) / (2 pi)^m for even rank 2m; zero for odd rank; 1 for rank 0.
inline FormExpr euler_form(const MatrixForm& omega, int dim) {
  int l = omega.rows();
  if (l == 0) return FormExpr::scalar(dim, Expr(1));
  if (l % 2) return FormExpr(dim, l);
  double scale = std::pow(2 * std::numbers::pi, -(l / 2));
  FormExpr pf = pfaffian(omega);
  return Expr::real(scale) * pf;
}

// p1 = -tr(Omega ^ Omega) / (8 pi^2)
inline FormExpr pontryagin_form(const MatrixForm& omega, int dim) {
  if (omega.rows() == 0) return FormExpr(dim, 4);
  MatrixForm sq = wedge(omega, omega);
  FormExpr tr(dim, 4);
  for (int i = 0; i < omega.rows(); ++i) tr = tr + sq.at(i, i);
  return Expr::real(-1.0 / (8 * std::numbers::pi * std::numbers::pi)) * tr;
}

// c1 = tr(J Omega) / (4 pi), J the standard complex structure on R^{2m}.
inline FormExpr chern_form(const MatrixForm& omega, int dim) {
  int l = omega.rows();
  if (l % 2) throw InputError("first Chern form needs even real rank");
  FormExpr tr(dim, 2);
  for (int a = 0; a < l; a += 2) tr = tr + omega.at(a, a + 1) - omega.at(a + 1, a);
  return Expr::real(1.0 / (4 * std::numbers::pi)) * tr;
}

struct PartitionOfUnity {
  std::vector<Expr> psi;  // parallel to charts
};

// psi >= 0, group-invariant, and psi_src + sum of psi_dst(phi) = 1 at the
// samples of every injection source chart; charts without injections need psi = 1.
inline ValidationReport validate_partition(const Atlas& a, const PartitionOfUnity& p, std::uint64_t seed = 0) {
  ValidationReport r;
  if (p.psi.size() != a.charts.size()) {
    r.add("partition must give one function per chart");
    return r;
  }
  std::vector<int> touched(a.charts.size(), 0);
  for (const auto& inj : a.injections) {
    touched[static_cast<std::size_t>(a.chart_index(inj.src))] = 1;
    touched[static_cast<std::size_t>(a.chart_index(inj.dst))] = 1;
  }
  try {
    for (std::size_t c = 0; c < a.charts.size(); ++c) {
      const Chart& ch = a.charts[c];
      for (const auto& x : sample_points(ch.domain, seed)) {
        double v = p.psi[c].eval(x);
        if (v < -1e-12) {
          r.add("partition function of '" + ch.id + "' is negative");
          break;
        }
        for (int g = 0; g < ch.group->order(); ++g)
          if (std::fabs(p.psi[c].eval(act(ch.action(g), x)) - v) > kConnectionTol) {
            r.add("partition function of '" + ch.id + "' is not invariant");
            g = ch.group->order();
          }
        if (!touched[c] && std::fabs(v - 1.0) > kConnectionTol) {
          r.add("partition function of isolated chart '" + ch.id + "' is not 1");
          break;
        }
      }
      bool is_source = false;
      for (const auto& inj : a.injections) is_source = is_source || inj.src == ch.id;
      if (!is_source) continue;
      for (const auto& x : sample_points(ch.domain, seed)) {
        double s = p.psi[c].eval(x);
        for (const auto& inj : a.injections)
          if (inj.src == ch.id) s += p.psi[static_cast<std::size_t>(a.chart_index(inj.dst))].eval(inj.apply(x));
        r.max_residual = std::max(r.max_residual, std::fabs(s - 1.0));
        if (std::fabs(s - 1.0) > kConnectionTol) {
          r.add("partition does not sum to 1 over the overlaps of '" + ch.id + "' (off by " + std::to_string(std::fabs(s - 1.0)) + ")");
          break;
        }
      }
    }
  } catch (const DomainError& e) {
    r.add(std::string("partition: ") + e.what());
  }
  return r;
}

struct IntegralResult {
  double value = 0, refined = 0;
  bool converged = true;
};

struct QuadratureOptions {
  int order = 48;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

// sum over charts of (1/|G|) int psi * f; f is the top-degree coefficient.
inline IntegralResult integrate(const Atlas& a, const std::vector<FormExpr>& forms, const PartitionOfUnity& p,
                                const QuadratureOptions& opt = {}) {
  if (forms.size() != a.charts.size() || p.psi.size() != a.charts.size())
    throw InputError("integrate: need one form and one partition function per chart");
  auto at_order = [&](int order) {
    double total = 0;
    for (std::size_t c = 0; c < a.charts.size(); ++c) {
      const Chart& ch = a.charts[c];
      const FormExpr& f = forms[c];
      if (f.is_zero()) continue;
      if (f.degree() != ch.dim()) throw InputError("integrate: form degree differs from the chart dimension on '" + ch.id + "'");
      MultiIndex top;
      for (int j = 1; j <= ch.dim(); ++j) top.push_back(j);
      Expr coef = f.coefficient(top);
      double s = 0;
      for (const auto& q : domain_rule(ch.domain, order)) s += q.weight * p.psi[c].eval(q.x) * coef.eval(q.x);
      total += s / ch.group->order();
    }
    return total;
  };
  IntegralResult r;
  r.value = at_order(opt.order);
  r.refined = at_order(2 * opt.order);
  r.converged = std::fabs(r.value - r.refined) <= opt.tol;
  if (!r.converged)
    throw CertificateError("quadrature did not converge: orders " + std::to_string(opt.order) + " and " +
                           std::to_string(2 * opt.order) + " differ by " + std::to_string(std::fabs(r.value - r.refined)));
  return r;
}

enum class ClassKind { Euler, Pontryagin1, Chern1 };
inline const char* to_string(ClassKind k) {
  switch (k) {
    case ClassKind::Euler: return "euler";
    case ClassKind::Pontryagin1: return "pontryagin_1";
    default: return "chern_1";
  }
}
inline const char* convention(ClassKind k) {
  switch (k) {
    case ClassKind::Euler: return "Pf(Omega)/(2 pi)^m, rank 0 -> 1";
    case ClassKind::Pontryagin1: return "-tr(Omega^Omega)/(8 pi^2)";
    default: return "tr(J Omega)/(4 pi) = (i/2pi) tr of the complex curvature";
  }
}

inline FormExpr characteristic_form(ClassKind kind, const MatrixForm& omega, int dim) {
  switch (kind) {
    case ClassKind::Euler: return euler_form(omega, dim);
    case ClassKind::Pontryagin1: return pontryagin_form(omega, dim);
    default: return chern_form(omega, dim);
  }
}

// Connection of a sector bundle: omega pulled back along x = B y and
// compressed to the fixed fiber subspace.
inline ConnectionData sector_connection(const ConnectionData& c, const SectorAtlas& sa, const SectorBundle& sb) {
  ConnectionData out;
  out.metric = c.metric;
  for (std::size_t k = 0; k < sa.charts.size(); ++k) {
    const auto& d = sa.charts[k];
    int dim = sa.atlas.charts[k].dim();
    const Mat& fb = sb.fiber_basis[k];
    int r = static_cast<int>(fb.cols());
    MatrixForm w = pullback(c.forms[static_cast<std::size_t>(d.parent_chart)], detail::linear_map(d.basis), dim);
    MatrixForm comp = MatrixForm::zero(r, dim, 1);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        FormExpr e(dim, 1);
        for (int a = 0; a < fb.rows(); ++a)
          for (int b2 = 0; b2 < fb.rows(); ++b2) {
            double coef = fb(a, i) * fb(b2, j);
            if (std::fabs(coef) > 1e-15) e = e + ExprMatrix::exact_or_real(coef) * w.at(a, b2);
          }
        comp.set(i, j, e);
      }
    out.forms.push_back(c.metric ? detail::mirror_skew(comp) : comp);
  }
  return out;
}

// Connection of VE: omega read in total-space coordinates.
inline ConnectionData vertical_connection(const BundleCocycle& b, const ConnectionData& c) {
  ConnectionData out;
  out.metric = c.metric;
  for (std::size_t k = 0; k < c.forms.size(); ++k) {
    int n = b.base.charts[k].dim();
    out.forms.push_back(pullback(c.forms[k], coordinate_vars(n), n + b.rank));
  }
  return out;
}

inline PartitionOfUnity sector_partition(const PartitionOfUnity& p, const SectorAtlas& sa) {
  PartitionOfUnity out;
  for (const auto& d : sa.charts) {
    auto xs = detail::linear_map(d.basis);
    out.psi.push_back(substitute(p.psi[static_cast<std::size_t>(d.parent_chart)], std::span<const Expr>(xs)));
  }
  return out;
}

struct ClassOptions {
  QuadratureOptions quad;
  bool via_vertical = false;  // forced for bad bundles
};

namespace detail {

inline ClassComponent sector_component(ClassKind kind, const BundleCocycle& b, const ConnectionData& c, const SectorCensus& census,
                                       int cls, const Atlas& atlas) {
  SectorAtlas sa = sector_atlas(atlas, census, cls);
  SectorBundle sb = sector_bundle(b, sa);
  ConnectionData sc = sector_connection(c, sa, sb);
  ClassComponent comp;
  comp.sector = cls;
  comp.twisted = census.twisted[static_cast<std::size_t>(cls)];
  comp.shift = sector_degree_shift(atlas, census, cls);
  for (std::size_t k = 0; k < sa.atlas.charts.size(); ++k) {
    int dim = sa.atlas.charts[k].dim();
    FormExpr f = characteristic_form(kind, curvature(sc.forms[k], sc.metric), dim);
    comp.forms.push_back(f);
    comp.sector_dims.push_back(dim);
  }
  comp.form_degree = comp.forms.empty() ? 0 : comp.forms.front().degree();
  return comp;
}

inline void attach_integrals(OrbifoldClass& cls, const Atlas& base, const PartitionOfUnity& p, const QuadratureOptions& opt) {
  SectorCensus q = sector_census(base);
  for (auto& comp : cls.components) {
    SectorAtlas sa = sector_atlas(base, q, comp.sector);
    bool top = !comp.forms.empty();
    for (std::size_t k = 0; k < comp.forms.size(); ++k)
      top = top && (comp.forms[k].is_zero() || comp.forms[k].degree() == sa.atlas.charts[k].dim());
    if (!top) continue;
    comp.integral = integrate(sa.atlas, comp.forms, sector_partition(p, sa), opt).value;
  }
}

}  // namespace detail

// Per-sector characteristic class. Good bundles (unless via_vertical is set)
// use the sector bundles of E directly; otherwise the computation runs on VE
// over the total space and is pulled back to Q by iota_star.
inline OrbifoldClass orbifold_characteristic_class(const BundleCocycle& b, const ConnectionData& c, const PartitionOfUnity& p,
                                                   ClassKind kind, const ClassOptions& opt = {}) {
  bool bad = classify(b).verdict == Verdict::Bad;
  OrbifoldClass out;
  if (!bad && !opt.via_vertical) {
    SectorCensus census = sector_census(b.base);
    out = {to_string(kind), "Q", {}};
    for (int cls = 0; cls < static_cast<int>(census.classes.size()); ++cls)
      out.components.push_back(detail::sector_component(kind, b, c, census, cls, b.base));
  } else {
    BundleCocycle ve = vertical_bundle(b);
    ConnectionData vc = vertical_connection(b, c);
    SectorCensus census = sector_census(ve.base);
    OrbifoldClass on_e{to_string(kind), "E", {}};
    for (int cls = 0; cls < static_cast<int>(census.classes.size()); ++cls)
      on_e.components.push_back(detail::sector_component(kind, ve, vc, census, cls, ve.base));
    out = iota_star(b, on_e);
  }
  detail::attach_integrals(out, b.base, p, opt.quad);
  return out;
}

// The same class on the total space before pulling back (for reporting the
// degrees over E).
inline OrbifoldClass vertical_characteristic_class(const BundleCocycle& b, const ConnectionData& c, ClassKind kind) {
  BundleCocycle ve = vertical_bundle(b);
  ConnectionData vc = vertical_connection(b, c);
  SectorCensus census = sector_census(ve.base);
  OrbifoldClass on_e{to_string(kind), "E", {}};
  for (int cls = 0; cls < static_cast<int>(census.classes.size()); ++cls)
    on_e.components.push_back(detail::sector_component(kind, ve, vc, census, cls, ve.base));
  return on_e;
}

struct SplitConnection {
  ConnectionData global;                // in the bundle's own trivialisations
  std::vector<MatrixForm> adapted;      // in the frame (s/|s|, ...), per chart
  std::vector<std::vector<std::vector<Expr>>> frames;  // columns of F per chart
};

namespace detail {

inline Expr dot(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  Expr s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

// Orthonormal frame with first vector s/|s|, completed by Gram-Schmidt on the
// standard basis without the vector most aligned with s at the chart center.
inline std::vector<std::vector<Expr>> adapted_frame(const std::vector<Expr>& s, const std::vector<double>& center) {
  int k = static_cast<int>(s.size());
  std::vector<std::vector<Expr>> frame;
  Expr norm = sqrt(dot(s, s));
  std::vector<Expr> e1;
  for (const auto& v : s) e1.push_back(v / norm);
  frame.push_back(e1);
  int drop = 0;
  double best = -1;
  for (int i = 0; i < k; ++i) {
    double v = std::fabs(s[static_cast<std::size_t>(i)].eval(center));
    if (v > best) {
      best = v;
      drop = i;
    }
  }
  for (int i = 0; i < k; ++i) {
    if (i == drop) continue;
    std::vector<Expr> v(static_cast<std::size_t>(k), Expr(0));
    v[static_cast<std::size_t>(i)] = Expr(1);
    for (const auto& f : frame) {
      Expr c = dot(f, v);
      for (int j = 0; j < k; ++j) v[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(j)] - c * f[static_cast<std::size_t>(j)];
    }
    Expr n = sqrt(dot(v, v));
    for (auto& x : v) x = x / n;
    frame.push_back(v);
  }
  return frame;
}

}  // namespace detail

// Connection respecting span(s) + span(s)^perp built from a reference metric
// connection (flat by default). Globally it is
//   omega' = (2P - I) dP + P omega P + (I - P) omega (I - P),  P = s s^T / |s|^2,
// and in the adapted frame F it is the block projection of F^T dF + F^T omega F.
inline SplitConnection split_connection(const BundleCocycle& b, const Section& s, const ConnectionData* reference = nullptr,
                                        std::uint64_t seed = 0) {
  SectionReport sr = validate_section(b, s, seed);
  if (!sr.ok()) throw CertificateError("split connection needs a valid section: " + sr.report.problems.front());
  if (!sr.nonvanishing) throw CertificateError("section '" + s.name + "' vanishes somewhere (min |s| = " + std::to_string(sr.min_norm) + ")");
  ConnectionData ref = reference ? *reference : ConnectionData::flat(b);
  int k = b.rank;
  SplitConnection out;
  for (std::size_t c = 0; c < b.base.charts.size(); ++c) {
    int n = b.base.charts[c].dim();
    const auto& sv = s.values[c];
    Expr n2 = detail::dot(sv, sv);
    ExprMatrix P(k, k), Q(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        P(i, j) = sv[static_cast<std::size_t>(i)] * sv[static_cast<std::size_t>(j)] / n2;
        Q(i, j) = (i == j ? Expr(1) : Expr(0)) - P(i, j);
      }
    MatrixForm dP = exterior_derivative(MatrixForm::scalars(P, n));
    ExprMatrix twoPmI = P.map([](const Expr& e) { return Expr(2) * e; });
    for (int i = 0; i < k; ++i) twoPmI(i, i) = twoPmI(i, i) - Expr(1);
    MatrixForm w = wedge(MatrixForm::scalars(twoPmI, n), dP) + wedge(wedge(MatrixForm::scalars(P, n), ref.forms[c]), MatrixForm::scalars(P, n)) +
                   wedge(wedge(MatrixForm::scalars(Q, n), ref.forms[c]), MatrixForm::scalars(Q, n));
    out.global.forms.push_back(detail::mirror_skew(w));

    auto frame = detail::adapted_frame(sv, b.base.charts[c].domain.center());
    ExprMatrix F(k, k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) F(i, j) = frame[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    MatrixForm Ft = MatrixForm::scalars(F.transposed(), n), Fm = MatrixForm::scalars(F, n);
    MatrixForm ad = wedge(Ft, exterior_derivative(Fm)) + wedge(wedge(Ft, ref.forms[c]), Fm);
    for (int i = 0; i < k; ++i) {
      ad.set(0, i, FormExpr(n, 1));
      ad.set(i, 0, FormExpr(n, 1));
    }
    out.adapted.push_back(detail::mirror_skew(ad));
    out.frames.push_back(frame);
  }
  out.global.metric = true;
  return out;
}

struct ObstructionComponent {
  int sector = 0;
  bool twisted = false;
  std::optional<Rational> shift;
  double max_node_value = 0;
  std::optional<double> integral;
};

struct ObstructionReport {
  bool refused = false;
  std::string reason;
  bool bad_route = false;
  std::vector<ObstructionComponent> components;
  double max_node_value = 0, max_integral = 0;
  double adapted_max_node_value = 0;  // Pf of the adapted-frame curvature
  bool pass = false;
};

// Euler class of E computed from the split connection of a nonvanishing
// section. Bad bundles go through VE and iota_star.
inline ObstructionReport obstruction_verdict(const BundleCocycle& b, const Section& s, const PartitionOfUnity& p,
                                             const QuadratureOptions& opt = {}) {
  ObstructionReport rep;
  SectionReport sr = validate_section(b, s, opt.seed);
  if (!sr.ok()) {
    rep.refused = true;
    rep.reason = "section '" + s.name + "' is not a valid section: " + sr.report.problems.front();
    return rep;
  }
  if (!sr.nonvanishing) {
    rep.refused = true;
    rep.reason = "section '" + s.name + "' vanishes (min |s| = " + std::to_string(sr.min_norm) + "); no nonvanishing section is available";
    return rep;
  }
  rep.bad_route = classify(b).verdict == Verdict::Bad;
  OrbifoldClass cls;
  if (rep.bad_route) {
    BundleCocycle ve = vertical_bundle(b);
    Section lifted = lift_section(b, s);
    SplitConnection sc = split_connection(ve, lifted, nullptr, opt.seed);
    for (std::size_t c = 0; c < sc.adapted.size(); ++c) {
      FormExpr e = euler_form(curvature(sc.adapted[c]), ve.base.charts[c].dim());
      for (const auto& x : sample_points(ve.base.charts[c].domain, opt.seed))
        rep.adapted_max_node_value = std::max(rep.adapted_max_node_value, e.max_abs(x));
    }
    SectorCensus census = sector_census(ve.base);
    OrbifoldClass on_e{"euler", "E", {}};
    for (int k = 0; k < static_cast<int>(census.classes.size()); ++k)
      on_e.components.push_back(detail::sector_component(ClassKind::Euler, ve, sc.global, census, k, ve.base));
    cls = iota_star(b, on_e);
  } else {
    SplitConnection sc = split_connection(b, s, nullptr, opt.seed);
    for (std::size_t c = 0; c < sc.adapted.size(); ++c) {
      FormExpr e = euler_form(curvature(sc.adapted[c]), b.base.charts[c].dim());
      for (const auto& q : domain_rule(b.base.charts[c].domain, opt.order))
        rep.adapted_max_node_value = std::max(rep.adapted_max_node_value, e.max_abs(q.x));
    }
    SectorCensus census = sector_census(b.base);
    cls = {"euler", "Q", {}};
    for (int k = 0; k < static_cast<int>(census.classes.size()); ++k)
      cls.components.push_back(detail::sector_component(ClassKind::Euler, b, sc.global, census, k, b.base));
  }
  detail::attach_integrals(cls, b.base, p, opt);
  SectorCensus q = sector_census(b.base);
  for (const auto& comp : cls.components) {
    ObstructionComponent oc{comp.sector, comp.twisted, comp.shift, 0.0, comp.integral};
    SectorAtlas sa = sector_atlas(b.base, q, comp.sector);
    for (std::size_t k = 0; k < comp.forms.size(); ++k)
      for (const auto& node : domain_rule(sa.atlas.charts[k].domain, opt.order))
        oc.max_node_value = std::max(oc.max_node_value, comp.forms[k].max_abs(node.x));
    rep.max_node_value = std::max(rep.max_node_value, oc.max_node_value);
    if (oc.integral) rep.max_integral = std::max(rep.max_integral, std::fabs(*oc.integral));
    rep.components.push_back(oc);
  }
  rep.pass = rep.max_node_value <= 1e-10 && rep.max_integral <= 1e-8 && rep.adapted_max_node_value <= 1e-10;
  return rep;
}

}  // namespace orbi

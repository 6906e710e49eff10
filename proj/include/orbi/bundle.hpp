#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orbi/atlas.hpp"

namespace orbi {

// Orbifold vector bundle of rank k given by fiber representations per chart
// and transition matrices g_i(x) per injection.
struct BundleCocycle {
  Atlas base;
  int rank = 0;
  std::vector<Representation> fiber_actions;  // parallel to base.charts
  std::map<std::string, ExprMatrix> transitions;
  std::optional<std::vector<ComplexRepresentation>> fiber_complex;

  const Representation& fiber(const std::string& chart) const {
    return fiber_actions[static_cast<std::size_t>(base.chart_index(chart))];
  }
  const ExprMatrix& transition(const std::string& injection) const {
    auto it = transitions.find(injection);
    if (it == transitions.end()) throw InputError("no transition for injection '" + injection + "'");
    return it->second;
  }
};

inline ValidationReport validate_bundle(const BundleCocycle& b, std::uint64_t seed = 0) {
  ValidationReport r = validate_atlas(b.base, seed);
  if (!r.ok()) return r;
  if (b.rank < 0) r.add("negative rank");
  if (b.fiber_actions.size() != b.base.charts.size()) {
    r.add("expected one fiber action per chart");
    return r;
  }
  for (std::size_t c = 0; c < b.base.charts.size(); ++c) {
    const auto& chart = b.base.charts[c];
    const auto& f = b.fiber_actions[c];
    std::string where = "fiber action on '" + chart.id + "': ";
    if (f.group->table() != chart.group->table()) r.add(where + "group differs from the chart group");
    if (static_cast<int>(f.matrices.size()) == chart.group->order() && f.dim() != b.rank && b.rank > 0)
      r.add(where + "dimension differs from the rank");
    for (const auto& p : f.problems()) r.add(where + p);
    if (b.fiber_complex) {
      if (b.fiber_complex->size() != b.base.charts.size()) {
        r.add("expected one complex fiber action per chart");
      } else {
        const auto& fc = (*b.fiber_complex)[c];
        for (const auto& p : fc.problems()) r.add("complex " + where + p);
        if (2 * fc.dim() != b.rank) r.add("complex " + where + "dimension must be half the rank");
      }
    }
  }
  if (!r.ok()) return r;
  for (const auto& inj : b.base.injections) {
    std::string where = "transition of '" + inj.id + "': ";
    auto it = b.transitions.find(inj.id);
    if (it == b.transitions.end()) {
      r.add(where + "missing");
      continue;
    }
    const ExprMatrix& g = it->second;
    const Chart& src = b.base.chart(inj.src);
    if (g.rows() != b.rank || g.cols() != b.rank) {
      r.add(where + "must be rank x rank");
      continue;
    }
    if (g.max_var() > src.dim()) {
      r.add(where + "uses a variable beyond the source dimension");
      continue;
    }
    const Representation &f1 = b.fiber(inj.src), &f2 = b.fiber(inj.dst);
    try {
      for (const auto& x : sample_points(src.domain, seed)) {
        Mat gx = g.eval(x);
        if (b.rank > 0 && std::fabs(gx.determinant()) < 1e-8) {
          r.add(where + "singular at a sample point");
          break;
        }
        bool bad = false;
        for (int e = 0; e < src.group->order() && !bad; ++e) {
          Mat lhs = g.eval(act(src.action(e), x)) * f1(e);
          Mat rhs = f2(inj.lambda[e]) * gx;
          double gap = b.rank ? (lhs - rhs).cwiseAbs().maxCoeff() : 0.0;
          r.max_residual = std::max(r.max_residual, gap);
          if (gap > kSampleTol) {
            r.add(where + "not equivariant for element " + std::to_string(e) + " (residual " + std::to_string(gap) + ")");
            bad = true;
          }
        }
        if (bad) break;
      }
    } catch (const DomainError& e) {
      r.add(where + e.what());
    }
  }
  if (!r.ok()) return r;
  for (const auto& c : b.base.compositions) {
    const auto& f = b.base.injection(c.first);
    const ExprMatrix &g1 = b.transition(c.first), &g2 = b.transition(c.second), &g3 = b.transition(c.result);
    for (const auto& x : sample_points(b.base.chart(f.src).domain, seed)) {
      Mat lhs = g3.eval(x), rhs = g2.eval(f.apply(x)) * g1.eval(x);
      double gap = b.rank ? (lhs - rhs).cwiseAbs().maxCoeff() : 0.0;
      r.max_residual = std::max(r.max_residual, gap);
      if (gap > kSampleTol) {
        r.add("cocycle law fails for " + c.first + " then " + c.second + " (residual " + std::to_string(gap) + ")");
        break;
      }
    }
  }
  return r;
}

enum class Verdict { Good, Bad };
inline const char* to_string(Verdict v) { return v == Verdict::Good ? "Good" : "Bad"; }

struct GoodBadVerdict {
  Verdict verdict = Verdict::Good;
  std::vector<Subgroup> k_b, k_f;  // parallel to charts
  std::string k_b_summary, k_f_summary;
  // K_f acts trivially on the total space of VE (base, fiber and vertical fiber).
  bool fiber_kernel_trivial_on_ve = true;
};

inline Representation total_action(const Chart& c, const Representation& fiber) {
  return fiber.dim() ? direct_sum(c.action, fiber) : c.action;
}

inline GoodBadVerdict classify(const BundleCocycle& b) {
  GoodBadVerdict v;
  std::vector<int> bad(b.base.charts.size(), 0);
  for (std::size_t c = 0; c < b.base.charts.size(); ++c) {
    const Chart& chart = b.base.charts[c];
    Representation tot = total_action(chart, b.fiber_actions[c]);
    v.k_b.push_back(action_kernel(chart.action));
    v.k_f.push_back(action_kernel(tot));
    bad[c] = v.k_f.back() != v.k_b.back();
    Subgroup ve_kernel = action_kernel(b.rank ? direct_sum(tot, b.fiber_actions[c]) : tot);
    for (int g : v.k_f.back().elements())
      if (!ve_kernel.contains(g)) v.fiber_kernel_trivial_on_ve = false;
  }
  for (const auto& inj : b.base.injections)
    if (bad[static_cast<std::size_t>(b.base.chart_index(inj.src))] != bad[static_cast<std::size_t>(b.base.chart_index(inj.dst))])
      throw CertificateError("good/bad verdict differs across injection '" + inj.id + "'");
  v.verdict = std::find(bad.begin(), bad.end(), 1) != bad.end() ? Verdict::Bad : Verdict::Good;
  v.k_b_summary = v.k_b.empty() ? "1" : describe_group(v.k_b.front());
  v.k_f_summary = v.k_f.empty() ? "1" : describe_group(v.k_f.front());
  return v;
}

// Unit ball: preserved by any orthogonal fiber action.
inline Domain fiber_domain(int rank) {
  if (rank == 0) return Domain{};
  return Domain::ball(rank, 1.0);
}

// Charts V x B^k with the combined action; injections
// (x, v) -> (phi(x), g_i(x) v) with the same lambda.
inline Atlas total_space(const BundleCocycle& b) {
  Atlas e;
  for (std::size_t c = 0; c < b.base.charts.size(); ++c) {
    const Chart& chart = b.base.charts[c];
    Chart t;
    t.id = chart.id;
    t.domain = b.rank ? chart.domain.times(fiber_domain(b.rank)) : chart.domain;
    t.group = chart.group;
    t.action = total_action(chart, b.fiber_actions[c]);
    if (chart.complex_action && b.fiber_complex)
      t.complex_action = b.rank ? direct_sum(*chart.complex_action, (*b.fiber_complex)[c]) : *chart.complex_action;
    e.charts.push_back(std::move(t));
  }
  for (const auto& inj : b.base.injections) {
    int n = b.base.chart(inj.src).dim();
    Injection t = inj;
    auto v = coordinate_vars(b.rank, n);
    auto gv = b.transition(inj.id) * std::span<const Expr>(v);
    t.map.insert(t.map.end(), gv.begin(), gv.end());
    e.injections.push_back(std::move(t));
  }
  e.compositions = b.base.compositions;
  return e;
}

// VE over the total space: same fiber actions, transitions g_i(x) read in
// total-space coordinates (the base variables come first).
inline BundleCocycle vertical_bundle(const BundleCocycle& b) {
  BundleCocycle v;
  v.base = total_space(b);
  v.rank = b.rank;
  v.fiber_actions = b.fiber_actions;
  v.transitions = b.transitions;
  v.fiber_complex = b.fiber_complex;
  return v;
}

// Substitution setting fiber coordinates x_{n+1..n+k} to zero.
inline std::vector<Expr> zero_fiber_substitution(int n, int k) {
  auto s = coordinate_vars(n, 0);
  for (int j = 0; j < k; ++j) s.push_back(Expr(0));
  return s;
}

struct RestrictionResult {
  BundleCocycle bundle;   // VE restricted to the zero section, over the base ids
  double certificate = 0; // max |restricted transition - original transition|
  bool atlas_matches = true;
};

inline RestrictionResult restrict_to_zero_section(const BundleCocycle& ve, const BundleCocycle& b, std::uint64_t seed = 0) {
  RestrictionResult out;
  out.bundle.base = b.base;
  out.bundle.rank = ve.rank;
  out.bundle.fiber_actions = ve.fiber_actions;
  out.bundle.fiber_complex = ve.fiber_complex;
  int k = b.rank;
  for (const auto& inj : ve.base.injections) {
    const Chart& tsrc = ve.base.chart(inj.src);
    const Chart& bsrc = b.base.chart(inj.src);
    int n = bsrc.dim();
    if (tsrc.dim() != n + k || tsrc.group->table() != bsrc.group->table()) out.atlas_matches = false;
    auto zero = zero_fiber_substitution(n, k);
    ExprMatrix g = ve.transition(inj.id).map([&](const Expr& e) { return substitute(e, std::span<const Expr>(zero)); });
    const Injection& binj = b.base.injection(inj.id);
    if (binj.lambda != inj.lambda) out.atlas_matches = false;
    for (const auto& x : sample_points(bsrc.domain, seed)) {
      std::vector<double> xe = x;
      xe.resize(static_cast<std::size_t>(n + k), 0.0);
      auto y = inj.apply(xe);
      auto yb = binj.apply(x);
      for (int i = 0; i < n; ++i) out.certificate = std::max(out.certificate, std::fabs(y[i] - yb[i]));
      for (int i = n; i < n + k; ++i) out.certificate = std::max(out.certificate, std::fabs(y[i]));
      if (k) out.certificate = std::max(out.certificate, (g.eval(x) - b.transition(inj.id).eval(x)).cwiseAbs().maxCoeff());
    }
    out.bundle.transitions[inj.id] = g;
  }
  for (std::size_t c = 0; c < b.base.charts.size(); ++c) {
    const auto &fv = ve.fiber_actions[c], &fb = b.fiber_actions[c];
    for (int e = 0; e < b.base.charts[c].group->order() && k; ++e)
      out.certificate = std::max(out.certificate, (fv(e) - fb(e)).cwiseAbs().maxCoeff());
  }
  if (out.certificate > 1e-12)
    throw CertificateError("zero-section restriction deviates from the bundle by " + std::to_string(out.certificate));
  return out;
}

struct Section {
  std::string name;
  std::vector<std::vector<Expr>> values;  // parallel to charts, rank entries each

  static Section zero(const BundleCocycle& b) {
    Section s{"zero", {}};
    for (std::size_t c = 0; c < b.base.charts.size(); ++c) s.values.emplace_back(static_cast<std::size_t>(b.rank), Expr(0));
    return s;
  }
  static Section constant(const BundleCocycle& b, const std::vector<Expr>& v, std::string name = "constant") {
    Section s{std::move(name), {}};
    for (std::size_t c = 0; c < b.base.charts.size(); ++c) s.values.push_back(v);
    return s;
  }

  Vec eval(std::size_t chart, std::span<const double> x) const {
    Vec r(static_cast<Eigen::Index>(values[chart].size()));
    for (std::size_t i = 0; i < values[chart].size(); ++i) r(static_cast<Eigen::Index>(i)) = values[chart][i].eval(x);
    return r;
  }

  friend bool operator==(const Section& a, const Section& b) { return a.values == b.values; }
};

struct SectionReport {
  ValidationReport report;
  double equivariance_residual = 0, compatibility_residual = 0;
  double min_norm = 0;
  bool nonvanishing = false;

  bool ok() const { return report.ok(); }
};

inline SectionReport validate_section(const BundleCocycle& b, const Section& s, std::uint64_t seed = 0) {
  SectionReport out;
  auto& r = out.report;
  if (s.values.size() != b.base.charts.size()) {
    r.add("section '" + s.name + "' must give values on every chart");
    return out;
  }
  for (std::size_t c = 0; c < s.values.size(); ++c)
    if (static_cast<int>(s.values[c].size()) != b.rank) {
      r.add("section '" + s.name + "' has the wrong rank on chart '" + b.base.charts[c].id + "'");
      return out;
    }
  out.min_norm = std::numeric_limits<double>::infinity();
  try {
    for (std::size_t c = 0; c < s.values.size(); ++c) {
      const Chart& chart = b.base.charts[c];
      const Representation& f = b.fiber_actions[c];
      for (const auto& x : sample_points(chart.domain, seed)) {
        Vec sx = s.eval(c, x);
        for (int e = 0; e < chart.group->order(); ++e) {
          Vec lhs = s.eval(c, act(chart.action(e), x));
          Vec rhs = b.rank ? Vec(f(e) * sx) : sx;
          double gap = b.rank ? (lhs - rhs).cwiseAbs().maxCoeff() : 0.0;
          out.equivariance_residual = std::max(out.equivariance_residual, gap);
        }
      }
      for (const auto& x : sample_points(chart.domain, seed + 1, 1000))
        out.min_norm = std::min(out.min_norm, b.rank ? s.eval(c, x).norm() : 0.0);
      for (const auto& x : sample_points(chart.domain, seed))
        out.min_norm = std::min(out.min_norm, b.rank ? s.eval(c, x).norm() : 0.0);
    }
    for (const auto& inj : b.base.injections) {
      std::size_t si = static_cast<std::size_t>(b.base.chart_index(inj.src)), di = static_cast<std::size_t>(b.base.chart_index(inj.dst));
      const ExprMatrix& g = b.transition(inj.id);
      for (const auto& x : sample_points(b.base.charts[si].domain, seed)) {
        if (!b.rank) break;
        Vec lhs = s.eval(di, inj.apply(x));
        Vec rhs = g.eval(x) * s.eval(si, x);
        out.compatibility_residual = std::max(out.compatibility_residual, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
  } catch (const DomainError& e) {
    r.add("section '" + s.name + "': " + e.what());
  }
  if (out.equivariance_residual > kSampleTol)
    r.add("section '" + s.name + "' is not equivariant (residual " + std::to_string(out.equivariance_residual) + ")");
  if (out.compatibility_residual > kSampleTol)
    r.add("section '" + s.name + "' is not compatible across injections (residual " + std::to_string(out.compatibility_residual) + ")");
  r.max_residual = std::max(out.equivariance_residual, out.compatibility_residual);
  out.nonvanishing = out.min_norm > 1e-8;
  return out;
}

// Section of VE constant along each fiber.
inline Section lift_section(const BundleCocycle&, const Section& s) { return {s.name, s.values}; }

inline Section restrict_section(const BundleCocycle& b, const Section& lifted) {
  Section r{lifted.name, {}};
  for (std::size_t c = 0; c < lifted.values.size(); ++c) {
    auto zero = zero_fiber_substitution(b.base.charts[c].dim(), b.rank);
    std::vector<Expr> v;
    for (const auto& e : lifted.values[c]) v.push_back(substitute(e, std::span<const Expr>(zero)));
    r.values.push_back(std::move(v));
  }
  return r;
}

}  // namespace orbi

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orbi/domain.hpp"
#include "orbi/groups.hpp"
#include "orbi/matrix.hpp"

namespace orbi {

inline constexpr double kSampleTol = 1e-10;

struct Chart {
  std::string id;
  Domain domain;
  GroupPtr group;
  Representation action;
  std::optional<ComplexRepresentation> complex_action;

  int dim() const { return domain.dim(); }
};

// Embedding phi of the source domain into the target, with lambda an
// injective homomorphism of the source group into the target group.
struct Injection {
  std::string id;
  std::string src, dst;
  std::vector<Expr> map;
  std::vector<int> lambda;

  static std::vector<Expr> affine(const Mat& a, const Vec& b) {
    std::vector<Expr> m;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      Expr e = ExprMatrix::exact_or_real(b(i));
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        e = e + ExprMatrix::exact_or_real(a(i, j)) * Expr::var(static_cast<int>(j + 1));
      m.push_back(e);
    }
    return m;
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y;
    y.reserve(map.size());
    for (const auto& e : map) y.push_back(e.eval(x));
    return y;
  }
};

// Declares that injection `result` equals `second` after `first`.
struct Composition {
  std::string first, second, result;
};

struct Atlas {
  std::vector<Chart> charts;
  std::vector<Injection> injections;
  std::vector<Composition> compositions;

  int chart_index(const std::string& id) const {
    for (std::size_t i = 0; i < charts.size(); ++i)
      if (charts[i].id == id) return static_cast<int>(i);
    return -1;
  }
  const Chart& chart(const std::string& id) const {
    int i = chart_index(id);
    if (i < 0) throw InputError("unknown chart '" + id + "'");
    return charts[static_cast<std::size_t>(i)];
  }
  int injection_index(const std::string& id) const {
    for (std::size_t i = 0; i < injections.size(); ++i)
      if (injections[i].id == id) return static_cast<int>(i);
    return -1;
  }
  const Injection& injection(const std::string& id) const {
    int i = injection_index(id);
    if (i < 0) throw InputError("unknown injection '" + id + "'");
    return injections[static_cast<std::size_t>(i)];
  }
  int dim() const { return charts.empty() ? 0 : charts.front().dim(); }
};

struct ValidationReport {
  std::vector<std::string> problems;
  double max_residual = 0.0;

  bool ok() const { return problems.empty(); }
  void add(std::string p) { problems.push_back(std::move(p)); }
  void merge(const ValidationReport& o, const std::string& prefix = "") {
    for (const auto& p : o.problems) problems.push_back(prefix + p);
    max_residual = std::max(max_residual, o.max_residual);
  }
};

inline double relative_gap(std::span<const double> a, std::span<const double> b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]) / std::max(1.0, std::fabs(b[i])));
  return worst;
}

inline std::vector<double> act(const Mat& m, std::span<const double> x) {
  return to_std(m * to_eigen(x));
}

inline ValidationReport validate_chart(const Chart& c, std::uint64_t seed) {
  ValidationReport r;
  std::string where = "chart '" + c.id + "': ";
  if (!c.group) {
    r.add(where + "missing group");
    return r;
  }
  if (c.action.group != c.group && (!c.action.group || c.action.group->table() != c.group->table()))
    r.add(where + "action is for a different group");
  for (const auto& p : c.action.problems()) r.add(where + p);
  if (c.action.dim() != c.dim()) {
    r.add(where + "action dimension " + std::to_string(c.action.dim()) + " differs from chart dimension " + std::to_string(c.dim()));
    return r;
  }
  if (c.complex_action) {
    for (const auto& p : c.complex_action->problems()) r.add(where + p);
    if (2 * c.complex_action->dim() != c.dim()) r.add(where + "complex action dimension must be half the chart dimension");
  }
  if (!r.ok()) return r;
  for (const auto& x : sample_points(c.domain, seed))
    for (int g = 0; g < c.group->order(); ++g)
      if (!c.domain.contains(act(c.action(g), x), 1e-9)) {
        r.add(where + "action of element " + std::to_string(g) + " leaves the domain");
        return r;
      }
  return r;
}

inline ValidationReport validate_injection(const Atlas& a, const Injection& inj, std::uint64_t seed) {
  ValidationReport r;
  std::string where = "injection '" + inj.id + "': ";
  int si = a.chart_index(inj.src), di = a.chart_index(inj.dst);
  if (si < 0 || di < 0) {
    r.add(where + "unknown source or target chart");
    return r;
  }
  const Chart &s = a.charts[static_cast<std::size_t>(si)], &t = a.charts[static_cast<std::size_t>(di)];
  if (static_cast<int>(inj.map.size()) != t.dim()) r.add(where + "map has wrong number of components");
  for (const auto& e : inj.map)
    if (e.max_var() > s.dim()) {
      r.add(where + "map uses a variable beyond the source dimension");
      break;
    }
  if (static_cast<int>(inj.lambda.size()) != s.group->order()) r.add(where + "lambda must list one image per source element");
  for (int v : inj.lambda)
    if (v < 0 || v >= t.group->order()) {
      r.add(where + "lambda image out of range");
      break;
    }
  if (!r.ok()) return r;
  const auto& L = inj.lambda;
  bool hom = true;
  for (int x = 0; x < s.group->order() && hom; ++x)
    for (int y = 0; y < s.group->order(); ++y)
      if (L[s.group->mul(x, y)] != t.group->mul(L[x], L[y])) {
        hom = false;
        break;
      }
  if (!hom) r.add(where + "lambda is not a homomorphism");
  std::vector<int> sorted = L;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) r.add(where + "lambda is not injective");
  if (!r.ok()) return r;
  try {
    for (const auto& x : sample_points(s.domain, seed)) {
      auto y = inj.apply(x);
      for (int g = 0; g < s.group->order(); ++g) {
        auto lhs = inj.apply(act(s.action(g), x));
        auto rhs = act(t.action(L[g]), y);
        double gap = relative_gap(lhs, rhs);
        r.max_residual = std::max(r.max_residual, gap);
        if (gap > kSampleTol) {
          r.add(where + "not equivariant for element " + std::to_string(g) + " (residual " + std::to_string(gap) + ")");
          return r;
        }
      }
    }
  } catch (const DomainError& e) {
    r.add(where + "map is singular on the source domain: " + e.what());
  }
  return r;
}

inline ValidationReport validate_compositions(const Atlas& a, std::uint64_t seed) {
  ValidationReport r;
  for (const auto& c : a.compositions) {
    std::string where = "composition " + c.first + " then " + c.second + ": ";
    int i1 = a.injection_index(c.first), i2 = a.injection_index(c.second), i3 = a.injection_index(c.result);
    if (i1 < 0 || i2 < 0 || i3 < 0) {
      r.add(where + "unknown injection");
      continue;
    }
    const auto &f = a.injections[i1], &s = a.injections[i2], &res = a.injections[i3];
    if (f.dst != s.src || res.src != f.src || res.dst != s.dst) {
      r.add(where + "injections do not chain into '" + c.result + "'");
      continue;
    }
    for (std::size_t g = 0; g < f.lambda.size(); ++g)
      if (s.lambda[f.lambda[g]] != res.lambda[g]) {
        r.add(where + "lambda of '" + c.result + "' is not the composite");
        break;
      }
    try {
      for (const auto& x : sample_points(a.chart(f.src).domain, seed)) {
        double gap = relative_gap(s.apply(f.apply(x)), res.apply(x));
        r.max_residual = std::max(r.max_residual, gap);
        if (gap > kSampleTol) {
          r.add(where + "map of '" + c.result + "' is not the composite");
          break;
        }
      }
    } catch (const DomainError& e) {
      r.add(where + e.what());
    }
  }
  return r;
}

inline ValidationReport validate_atlas(const Atlas& a, std::uint64_t seed = 0) {
  ValidationReport r;
  if (a.charts.empty()) r.add("atlas has no charts");
  std::map<std::string, int> seen;
  for (const auto& c : a.charts)
    if (seen[c.id]++) r.add("duplicate chart id '" + c.id + "'");
  for (const auto& c : a.charts) {
    r.merge(validate_chart(c, seed));
    if (c.dim() != a.dim()) r.add("chart '" + c.id + "' has a different dimension from the others");
  }
  std::map<std::string, int> seen_inj;
  for (const auto& i : a.injections)
    if (seen_inj[i.id]++) r.add("duplicate injection id '" + i.id + "'");
  if (!r.ok()) return r;
  for (const auto& i : a.injections) r.merge(validate_injection(a, i, seed));
  if (r.ok()) r.merge(validate_compositions(a, seed));
  return r;
}

inline std::string describe_group(const Subgroup& k) {
  if (k.size() == 1) return "1";
  for (int g : k.elements())
    if (k.parent()->element_order(g) == k.size()) return "Z" + std::to_string(k.size());
  return "order " + std::to_string(k.size());
}

struct KernelReport {
  std::vector<Subgroup> per_chart;  // parallel to atlas.charts
  bool consistent = true;           // lambda carries each source kernel onto the target kernel
  std::string summary;
  std::vector<std::string> problems;

  bool trivial() const {
    for (const auto& k : per_chart)
      if (!k.is_trivial()) return false;
    return true;
  }
};

inline KernelReport base_kernel(const Atlas& a) {
  KernelReport r;
  for (const auto& c : a.charts) r.per_chart.push_back(action_kernel(c.action));
  for (const auto& inj : a.injections) {
    const Subgroup& ks = r.per_chart[static_cast<std::size_t>(a.chart_index(inj.src))];
    const Subgroup& kt = r.per_chart[static_cast<std::size_t>(a.chart_index(inj.dst))];
    std::vector<int> image;
    for (int g : ks.elements()) image.push_back(inj.lambda[g]);
    if (Subgroup(kt.parent(), image) != kt) {
      r.consistent = false;
      r.problems.push_back("injection '" + inj.id + "' does not carry the kernel of '" + inj.src + "' onto that of '" + inj.dst + "'");
    }
  }
  r.summary = r.per_chart.empty() ? "1" : describe_group(r.per_chart.front());
  return r;
}

inline bool is_reduced(const Atlas& a) { return base_kernel(a).trivial(); }

}  // namespace orbi

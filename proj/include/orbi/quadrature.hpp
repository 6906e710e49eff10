#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "orbi/domain.hpp"
#include "orbi/error.hpp"

namespace orbi {

struct Rule1D {
  std::vector<double> nodes, weights;
};

// Gauss-Legendre nodes and weights on [-1, 1]: Newton iteration on P_n from
// the Chebyshev-like initial guesses, weights 2 / ((1 - x^2) P_n'(x)^2).
inline Rule1D gauss_legendre(int n) {
  if (n < 1) throw InputError("quadrature order must be positive");
  static std::mutex mu;
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  Rule1D r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
    }
    double w = 2.0 / ((1 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  cache.emplace(n, r);
  return r;
}

inline Rule1D gauss_legendre(int n, double a, double b) {
  Rule1D r = gauss_legendre(n);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    r.nodes[i] = 0.5 * (b - a) * r.nodes[i] + 0.5 * (a + b);
    r.weights[i] *= 0.5 * (b - a);
  }
  return r;
}

struct QuadratureNode {
  std::vector<double> x;
  double weight;
};

// Nodes and weights (Jacobian included) for one domain factor.
inline std::vector<QuadratureNode> factor_rule(const DomainFactor& f, int order) {
  std::vector<QuadratureNode> out;
  if (f.dim == 0) return {{{}, 1.0}};
  if (f.kind == DomainFactor::Kind::Box) {
    out.push_back({{}, 1.0});
    for (const auto& [lo, hi] : f.bounds) {
      Rule1D r = gauss_legendre(order, lo, hi);
      std::vector<QuadratureNode> next;
      for (const auto& q : out)
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
          QuadratureNode n = q;
          n.x.push_back(r.nodes[i]);
          n.weight *= r.weights[i];
          next.push_back(std::move(n));
        }
      out = std::move(next);
    }
    return out;
  }
  if (f.dim == 1) {
    Rule1D r = gauss_legendre(order, -f.radius, f.radius);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) out.push_back({{r.nodes[i]}, r.weights[i]});
    return out;
  }
  // hyperspherical: x = r (cos p1, sin p1 cos p2, ..., sin p1..sin p_{n-2} cos t, ... sin t)
  // Jacobian r^{n-1} prod_k sin^{n-1-k}(p_k); the last angle spans [0, 2 pi).
  int n = f.dim;
  Rule1D rr = gauss_legendre(order, 0.0, f.radius);
  Rule1D pr = gauss_legendre(order, 0.0, std::numbers::pi);
  Rule1D tr = gauss_legendre(order, 0.0, 2 * std::numbers::pi);
  std::vector<std::pair<std::vector<double>, double>> angles{{{}, 1.0}};
  for (int k = 0; k < n - 2; ++k) {
    std::vector<std::pair<std::vector<double>, double>> next;
    for (const auto& [a, w] : angles)
      for (std::size_t i = 0; i < pr.nodes.size(); ++i) {
        auto b = a;
        b.push_back(pr.nodes[i]);
        next.push_back({b, w * pr.weights[i] * std::pow(std::sin(pr.nodes[i]), n - 2 - k)});
      }
    angles = std::move(next);
  }
  for (const auto& [a, wa] : angles)
    for (std::size_t it = 0; it < tr.nodes.size(); ++it)
      for (std::size_t ir = 0; ir < rr.nodes.size(); ++ir) {
        double r = rr.nodes[ir];
        std::vector<double> x(static_cast<std::size_t>(n));
        double s = r;
        for (int k = 0; k < n - 2; ++k) {
          x[k] = s * std::cos(a[k]);
          s *= std::sin(a[k]);
        }
        x[n - 2] = s * std::cos(tr.nodes[it]);
        x[n - 1] = s * std::sin(tr.nodes[it]);
        out.push_back({std::move(x), wa * tr.weights[it] * rr.weights[ir] * std::pow(r, n - 1)});
      }
  return out;
}

inline std::vector<QuadratureNode> domain_rule(const Domain& d, int order) {
  std::vector<QuadratureNode> out{{{}, 1.0}};
  for (const auto& f : d.factors) {
    auto fr = factor_rule(f, order);
    std::vector<QuadratureNode> next;
    next.reserve(out.size() * fr.size());
    for (const auto& a : out)
      for (const auto& b : fr) {
        QuadratureNode n = a;
        n.x.insert(n.x.end(), b.x.begin(), b.x.end());
        n.weight *= b.weight;
        next.push_back(std::move(n));
      }
    out = std::move(next);
  }
  return out;
}

inline double integrate_domain(const Domain& d, int order, const std::function<double(const std::vector<double>&)>& f) {
  double s = 0;
  for (const auto& q : domain_rule(d, order)) s += q.weight * f(q.x);
  return s;
}

}  // namespace orbi

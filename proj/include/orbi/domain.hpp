#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "orbi/error.hpp"

namespace orbi {

// One factor of a chart domain: an open ball about the origin or an open box.
struct DomainFactor {
  enum class Kind { Ball, Box };
  Kind kind = Kind::Ball;
  int dim = 0;
  double radius = 1.0;                            // Ball
  std::vector<std::pair<double, double>> bounds;  // Box

  static DomainFactor ball(int dim, double radius = 1.0) {
    if (dim < 0 || radius <= 0) throw InputError("ball needs dim >= 0 and positive radius");
    return {Kind::Ball, dim, radius, {}};
  }
  static DomainFactor box(std::vector<std::pair<double, double>> b) {
    for (const auto& [lo, hi] : b)
      if (!(lo < hi)) throw InputError("box bounds must satisfy lo < hi");
    int d = static_cast<int>(b.size());
    return {Kind::Box, d, 1.0, std::move(b)};
  }

  bool contains(const double* x, double slack = 0.0) const {
    if (kind == Kind::Ball) {
      double r2 = 0;
      for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
      return std::sqrt(r2) < radius + slack;
    }
    for (int i = 0; i < dim; ++i)
      if (x[i] <= bounds[i].first - slack || x[i] >= bounds[i].second + slack) return false;
    return true;
  }

  friend bool operator==(const DomainFactor&, const DomainFactor&) = default;
};

// Product of factors; coordinates are the concatenation of factor coordinates.
struct Domain {
  std::vector<DomainFactor> factors;

  static Domain ball(int dim, double radius = 1.0) { return {{DomainFactor::ball(dim, radius)}}; }
  static Domain box(std::vector<std::pair<double, double>> b) { return {{DomainFactor::box(std::move(b))}}; }
  static Domain point() { return {{DomainFactor::ball(0)}}; }

  int dim() const {
    int d = 0;
    for (const auto& f : factors) d += f.dim;
    return d;
  }

  Domain times(const Domain& other) const {
    Domain r = *this;
    r.factors.insert(r.factors.end(), other.factors.begin(), other.factors.end());
    return r;
  }

  bool contains(const std::vector<double>& x, double slack = 0.0) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    int off = 0;
    for (const auto& f : factors) {
      if (!f.contains(x.data() + off, slack)) return false;
      off += f.dim;
    }
    return true;
  }

  std::vector<double> center() const {
    std::vector<double> c;
    for (const auto& f : factors)
      for (int i = 0; i < f.dim; ++i)
        c.push_back(f.kind == DomainFactor::Kind::Ball ? 0.0 : 0.5 * (f.bounds[i].first + f.bounds[i].second));
    return c;
  }

  friend bool operator==(const Domain&, const Domain&) = default;
};

// Validation sample set: the 2^n corners of a cube shrunk well inside the
// domain, the center, and `random` seeded interior points.
inline std::vector<std::vector<double>> sample_points(const Domain& d, std::uint64_t seed, int random = 50) {
  int n = d.dim();
  std::vector<std::vector<double>> pts;
  std::vector<double> c = d.center();
  auto corner = [&](unsigned mask) {
    std::vector<double> x;
    int k = 0;
    for (const auto& f : d.factors)
      for (int i = 0; i < f.dim; ++i, ++k) {
        double s = (mask >> k) & 1u ? 1.0 : -1.0;
        if (f.kind == DomainFactor::Kind::Ball) {
          x.push_back(s * 0.9 * f.radius / std::sqrt(static_cast<double>(f.dim)));
        } else {
          double mid = 0.5 * (f.bounds[i].first + f.bounds[i].second), half = 0.5 * (f.bounds[i].second - f.bounds[i].first);
          x.push_back(mid + s * 0.9 * half);
        }
      }
    return x;
  };
  if (n <= 12)
    for (unsigned mask = 0; mask < (1u << n); ++mask) pts.push_back(corner(mask));
  pts.push_back(c);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < random; ++r) {
    std::vector<double> x;
    for (const auto& f : d.factors) {
      if (f.kind == DomainFactor::Kind::Ball) {
        std::vector<double> g(static_cast<std::size_t>(f.dim));
        double norm = 0;
        for (auto& v : g) {
          v = gauss(rng);
          norm += v * v;
        }
        norm = std::sqrt(norm);
        double rad = 0.98 * f.radius * std::pow(unit(rng), 1.0 / std::max(1, f.dim));
        for (double v : g) x.push_back(norm > 0 ? v / norm * rad : 0.0);
      } else {
        for (const auto& [lo, hi] : f.bounds) x.push_back(lo + (hi - lo) * (0.01 + 0.98 * unit(rng)));
      }
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace orbi

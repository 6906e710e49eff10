#pragma once

// Independent reference computations used to cross-check library results.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "orbi/rational.hpp"

namespace orbi::fixtures {

// Expansion along the first row: Pf(A) = sum_j (-1)^j a_{0j} Pf(A with rows/cols 0, j removed).
template <class T>
T pfaffian_cofactor(const std::vector<std::vector<T>>& a) {
  std::size_t n = a.size();
  if (n == 0) return T(1);
  T total = T(0);
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<std::size_t> keep;
    for (std::size_t k = 1; k < n; ++k)
      if (k != j) keep.push_back(k);
    std::vector<std::vector<T>> minor(keep.size(), std::vector<T>(keep.size(), T(0)));
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t c = 0; c < keep.size(); ++c) minor[r][c] = a[keep[r]][keep[c]];
    T term = a[0][j] * pfaffian_cofactor(minor);
    total = (j % 2 == 1) ? total + term : total - term;
  }
  return total;
}

inline std::vector<std::vector<double>> random_antisymmetric(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a[i][j] = u(rng);
      a[j][i] = -a[i][j];
    }
  return a;
}

inline std::vector<std::vector<Rational>> random_antisymmetric_rational(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  std::vector<std::vector<Rational>> a(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a[i][j] = Rational(num(rng), den(rng));
      a[j][i] = Rational(0) - a[i][j];
    }
  return a;
}

inline double determinant(const std::vector<std::vector<double>>& a) {
  Eigen::MatrixXd m(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i][j];
  return m.determinant();
}

}  // namespace orbi::fixtures

#pragma once

#include <cmath>
#include <vector>

#include "orbi/error.hpp"
#include "orbi/forms.hpp"
#include "orbi/rational.hpp"

namespace orbi {

namespace detail {
inline bool is_zero_scalar(double v) { return v == 0.0; }
inline bool is_zero_scalar(const Rational& v) { return v.is_zero(); }
inline double magnitude(double v) { return std::fabs(v); }
inline double magnitude(const Rational& v) { return std::fabs(v.to_double()); }
}  // namespace detail

// Pfaffian of an antisymmetric matrix (row-major vector of rows) by skew
// Gaussian elimination with pivoting, O(n^3). Works for double and Rational.
template <class T>
T pfaffian(std::vector<std::vector<T>> a, double tol = 1e-12) {
  std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw InputError("pfaffian: matrix is not square");
  if (n % 2) throw InputError("pfaffian: odd dimension");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double scale = std::max(1.0, std::max(detail::magnitude(a[i][j]), detail::magnitude(a[j][i])));
      if (detail::magnitude(a[i][j] + a[j][i]) > tol * scale) throw InputError("pfaffian: matrix is not antisymmetric");
    }
  T pf = T(1);
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    // pivot: largest |a[k][j]|, j > k, moved into column k+1
    std::size_t p = k + 1;
    for (std::size_t j = k + 2; j < n; ++j)
      if (detail::magnitude(a[k][j]) > detail::magnitude(a[k][p])) p = j;
    if (detail::is_zero_scalar(a[k][p])) return T(0);
    if (p != k + 1) {
      std::swap(a[k + 1], a[p]);
      for (auto& row : a) std::swap(row[k + 1], row[p]);
      pf = T(0) - pf;
    }
    T piv = a[k][k + 1];
    pf = pf * piv;
    for (std::size_t i = k + 2; i < n; ++i)
      for (std::size_t j = k + 2; j < n; ++j)
        a[i][j] = a[i][j] - (a[k][i] * a[k + 1][j] - a[k + 1][i] * a[k][j]) / piv;
  }
  return pf;
}

// Pfaffian of an antisymmetric matrix of 2-forms: sum over perfect matchings
// of wedge products, sign from the matching's crossing parity.
inline FormExpr pfaffian(const MatrixForm& m) {
  int n = m.rows();
  if (m.cols() != n) throw InputError("pfaffian: matrix is not square");
  if (n % 2) throw InputError("pfaffian: odd dimension");
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (!(m.at(i, j) + m.at(j, i)).is_zero()) throw InputError("pfaffian: form matrix is not antisymmetric");
  int dim = m.dim();
  if (n == 0) return FormExpr::scalar(dim, Expr(1));
  std::vector<int> remaining(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) remaining[static_cast<std::size_t>(i)] = i;
  std::function<FormExpr(const std::vector<int>&)> rec = [&](const std::vector<int>& idx) -> FormExpr {
    if (idx.empty()) return FormExpr::scalar(dim, Expr(1));
    FormExpr total(dim, m.degree() * static_cast<int>(idx.size()) / 2);
    int first = idx[0];
    for (std::size_t j = 1; j < idx.size(); ++j) {
      std::vector<int> rest;
      for (std::size_t k = 1; k < idx.size(); ++k)
        if (k != j) rest.push_back(idx[k]);
      FormExpr term = wedge(m.at(first, idx[j]), rec(rest));
      total = (j % 2 == 1) ? total + term : total - term;
    }
    return total;
  };
  return rec(remaining);
}

}  // namespace orbi

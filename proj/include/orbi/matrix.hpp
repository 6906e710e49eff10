#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "orbi/error.hpp"
#include "orbi/expr.hpp"

namespace orbi {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

// Dense matrix of expressions, row-major.
class ExprMatrix {
 public:
  ExprMatrix() = default;
  ExprMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows * cols), Expr(0)) {}

  static ExprMatrix identity(int n) {
    ExprMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Expr(1);
    return m;
  }
  static ExprMatrix constant(const Mat& a) {
    ExprMatrix m(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
    for (int i = 0; i < m.rows_; ++i)
      for (int j = 0; j < m.cols_; ++j) m(i, j) = exact_or_real(a(i, j));
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Expr& operator()(int i, int j) { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Expr& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i * cols_ + j)]; }

  Mat eval(std::span<const double> x) const {
    Mat m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(x);
    return m;
  }

  int max_var() const {
    int v = 0;
    for (const auto& e : e_) v = std::max(v, e.max_var());
    return v;
  }

  ExprMatrix transposed() const {
    ExprMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class F>
  ExprMatrix map(F&& f) const {
    ExprMatrix r(rows_, cols_);
    for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = f(e_[k]);
    return r;
  }

  friend ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b) {
    if (a.cols_ != b.rows_) throw InputError("matrix shape mismatch in product");
    ExprMatrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) {
        Expr s(0);
        for (int k = 0; k < a.cols_; ++k) s = s + a(i, k) * b(k, j);
        r(i, j) = s;
      }
    return r;
  }

  friend std::vector<Expr> operator*(const ExprMatrix& a, std::span<const Expr> v) {
    if (static_cast<std::size_t>(a.cols_) != v.size()) throw InputError("matrix-vector shape mismatch");
    std::vector<Expr> r(static_cast<std::size_t>(a.rows_), Expr(0));
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) r[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] + a(i, k) * v[static_cast<std::size_t>(k)];
    return r;
  }

  friend bool operator==(const ExprMatrix& a, const ExprMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
  }

  // Small integers and simple fractions become exact rationals.
  static Expr exact_or_real(double v) {
    for (std::int64_t d : {1, 2, 3, 4, 5, 6, 8, 10, 12, 16}) {
      double n = v * static_cast<double>(d);
      if (std::fabs(n) < 1e12 && n == std::round(n)) return Expr(Rational(static_cast<std::int64_t>(n), d));
    }
    return Expr::real(v);
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Expr> e_;
};

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }
inline Vec to_eigen(std::span<const double> v) {
  Vec r(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<Eigen::Index>(i)) = v[i];
  return r;
}

inline Mat block_diag(const Mat& a, const Mat& b) {
  Mat r = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  r.topLeftCorner(a.rows(), a.cols()) = a;
  r.bottomRightCorner(b.rows(), b.cols()) = b;
  return r;
}

inline CMat block_diag(const CMat& a, const CMat& b) {
  CMat r = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  r.topLeftCorner(a.rows(), a.cols()) = a;
  r.bottomRightCorner(b.rows(), b.cols()) = b;
  return r;
}

// Orthonormal basis of the column space of p (Gram-Schmidt over columns in
// order, skipping columns whose residual falls below tol). Deterministic:
// the identity yields the standard basis.
inline Mat column_space_basis(const Mat& p, double tol = 1e-9) {
  std::vector<Vec> basis;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    Vec v = p.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b.dot(v) * b;
    double n = v.norm();
    if (n > tol) basis.push_back(v / n);
  }
  Mat r(p.rows(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) r.col(static_cast<Eigen::Index>(k)) = basis[k];
  return r;
}

}  // namespace orbi

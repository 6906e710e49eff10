#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orbi/error.hpp"
#include "orbi/expr.hpp"
#include "orbi/matrix.hpp"
#include "orbi/parser.hpp"

namespace orbi {

// Strictly increasing 1-based coordinate indices (i1 < i2 < ...).
using MultiIndex = std::vector<int>;

// A differential form on a chart of dimension dim: sum of coef * dx_I.
// Terms with a literal-zero coefficient are never stored.
class FormExpr {
 public:
  FormExpr() = default;
  FormExpr(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 0 || degree < 0) throw InputError("negative form dimension or degree");
  }

  static FormExpr scalar(int dim, const Expr& f) {
    FormExpr r(dim, 0);
    r.accumulate({}, f);
    return r;
  }
  static FormExpr differential(int dim, int j) {
    if (j < 1 || j > dim) throw InputError("dx" + std::to_string(j) + " outside chart dimension " + std::to_string(dim));
    FormExpr r(dim, 1);
    r.accumulate({j}, Expr(1));
    return r;
  }
  // coef * dx_{i1} ^ ... ^ dx_{ik} for an arbitrary index list; sorted with sign.
  static FormExpr monomial(int dim, const Expr& coef, MultiIndex idx) {
    FormExpr r(dim, static_cast<int>(idx.size()));
    int sign = sort_with_sign(idx);
    if (sign == 0) return r;
    for (int i : idx)
      if (i < 1 || i > dim) throw InputError("form index outside chart dimension");
    r.accumulate(std::move(idx), sign > 0 ? coef : -coef);
    return r;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<MultiIndex, Expr>& terms() const { return terms_; }

  Expr coefficient(const MultiIndex& idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? Expr(0) : it->second;
  }
  // The scalar value of a 0-form.
  Expr scalar_part() const { return coefficient({}); }

  // Numeric coefficients at a point, keyed by multi-index.
  std::map<MultiIndex, double> evaluate(std::span<const double> x) const {
    std::map<MultiIndex, double> r;
    for (const auto& [idx, c] : terms_) r[idx] = c.eval(x);
    return r;
  }
  double max_abs(std::span<const double> x) const {
    double m = 0.0;
    for (const auto& [idx, c] : terms_) m = std::max(m, std::fabs(c.eval(x)));
    return m;
  }

  int max_var() const {
    int v = 0;
    for (const auto& [idx, c] : terms_) v = std::max(v, c.max_var());
    return v;
  }

  FormExpr map_coefficients(const std::function<Expr(const Expr&)>& f) const {
    FormExpr r(dim_, degree_);
    for (const auto& [idx, c] : terms_) r.accumulate(idx, f(c));
    return r;
  }

  friend FormExpr operator+(const FormExpr& a, const FormExpr& b) {
    check_same_dim(a, b);
    if (a.is_zero() && a.degree_ != b.degree_) return b;
    if (b.is_zero() && a.degree_ != b.degree_) return a;
    if (a.degree_ != b.degree_) throw InputError("cannot add forms of different degree");
    FormExpr r = a;
    for (const auto& [idx, c] : b.terms_) r.accumulate(idx, c);
    return r;
  }
  friend FormExpr operator-(const FormExpr& a) {
    return a.map_coefficients([](const Expr& c) { return -c; });
  }
  friend FormExpr operator-(const FormExpr& a, const FormExpr& b) { return a + (-b); }
  friend FormExpr operator*(const Expr& f, const FormExpr& a) {
    return a.map_coefficients([&f](const Expr& c) { return f * c; });
  }

  friend bool operator==(const FormExpr& a, const FormExpr& b) {
    return a.dim_ == b.dim_ && (a.degree_ == b.degree_ || (a.is_zero() && b.is_zero())) && a.terms_ == b.terms_;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [idx, c] : terms_) {
      if (!first) s += " + ";
      first = false;
      s += '(' + c.str() + ')';
      for (int i : idx) s += "*dx" + std::to_string(i);
    }
    return s;
  }

  void accumulate(MultiIndex idx, const Expr& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
      terms_.emplace(std::move(idx), c);
      return;
    }
    Expr s = it->second + c;
    if (s.is_zero()) terms_.erase(it);
    else it->second = s;
  }

  // Sorts idx ascending; returns the permutation sign, or 0 on a repeat.
  static int sort_with_sign(MultiIndex& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
      for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
        if (idx[j - 1] == idx[j]) return 0;
        std::swap(idx[j - 1], idx[j]);
        sign = -sign;
      }
    for (std::size_t i = 1; i < idx.size(); ++i)
      if (idx[i - 1] == idx[i]) return 0;
    return sign;
  }

  static void check_same_dim(const FormExpr& a, const FormExpr& b) {
    if (a.dim_ != b.dim_) throw InputError("forms live on charts of different dimension");
  }

 private:
  int dim_ = 0;
  int degree_ = 0;
  std::map<MultiIndex, Expr> terms_;
};

inline FormExpr wedge(const FormExpr& a, const FormExpr& b) {
  FormExpr::check_same_dim(a, b);
  FormExpr r(a.dim(), a.degree() + b.degree());
  for (const auto& [ia, ca] : a.terms())
    for (const auto& [ib, cb] : b.terms()) {
      MultiIndex idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      int sign = FormExpr::sort_with_sign(idx);
      if (sign == 0) continue;
      Expr c = ca * cb;
      r.accumulate(std::move(idx), sign > 0 ? c : -c);
    }
  return r;
}

// d(f dx_I) = sum_j (df/dx_j) dx_j ^ dx_I
inline FormExpr exterior_derivative(const FormExpr& a) {
  FormExpr r(a.dim(), a.degree() + 1);
  for (const auto& [idx, c] : a.terms())
    for (int j = 1; j <= a.dim(); ++j) {
      if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
      Expr dc = differentiate(c, j);
      if (dc.is_zero()) continue;
      MultiIndex m{j};
      m.insert(m.end(), idx.begin(), idx.end());
      int sign = FormExpr::sort_with_sign(m);
      r.accumulate(std::move(m), sign > 0 ? dc : -dc);
    }
  return r;
}

// Pulls a form back along the chart map y = map(x), where map[i] gives the
// i-th target coordinate as an expression in the source coordinates.
inline FormExpr pullback(const FormExpr& a, std::span<const Expr> map, int source_dim) {
  if (static_cast<int>(map.size()) != a.dim()) throw InputError("pullback map size does not match the form's chart");
  std::vector<FormExpr> dy;
  dy.reserve(map.size());
  for (const auto& m : map) dy.push_back(exterior_derivative(FormExpr::scalar(source_dim, m)));
  FormExpr r(source_dim, a.degree());
  for (const auto& [idx, c] : a.terms()) {
    FormExpr t = FormExpr::scalar(source_dim, substitute(c, map));
    for (int i : idx) {
      t = wedge(t, dy[static_cast<std::size_t>(i - 1)]);
      if (t.is_zero()) break;
    }
    r = r + t;
  }
  if (r.is_zero()) return FormExpr(source_dim, a.degree());
  return r;
}

// Evaluates the coefficient of dx_{i1}^...^dx_{ik} (any order) numerically.
inline double component(const FormExpr& a, MultiIndex idx, std::span<const double> x) {
  int sign = FormExpr::sort_with_sign(idx);
  if (sign == 0) return 0.0;
  return sign * a.coefficient(idx).eval(x);
}

// Parses a form such as "x2*dx1 - x1*dx2" or "(1 + x1^2)*dx1*dx2".
// Products wedge, so dx1*dx2 = -dx2*dx1. Scalar sub-expressions are kept
// verbatim.
inline FormExpr parse_form(std::string_view text, int dim) {
  struct Builder {
    using Value = FormExpr;
    int dim;
    static void need_scalar(const FormExpr& f, const char* what) {
      if (f.degree() != 0 && !f.is_zero()) throw InputError(std::string(what) + " requires a 0-form");
    }
    FormExpr rational(Rational q) const { return FormExpr::scalar(dim, Expr(q)); }
    FormExpr real(double x) const { return FormExpr::scalar(dim, Expr::real(x)); }
    FormExpr variable(int j) const {
      if (j > dim) throw InputError("x" + std::to_string(j) + " outside chart dimension");
      return FormExpr::scalar(dim, Expr::var(j));
    }
    FormExpr differential(int j) const { return FormExpr::differential(dim, j); }
    static bool both_scalar(const FormExpr& a, const FormExpr& b) { return a.degree() == 0 && b.degree() == 0; }
    FormExpr raw(Op op, const FormExpr& a, const FormExpr& b) const {
      return FormExpr::scalar(dim, Expr::raw_binary(op, a.scalar_part(), b.scalar_part()));
    }
    FormExpr add(const FormExpr& a, const FormExpr& b) const { return both_scalar(a, b) ? raw(Op::Add, a, b) : a + b; }
    FormExpr sub(const FormExpr& a, const FormExpr& b) const { return both_scalar(a, b) ? raw(Op::Sub, a, b) : a - b; }
    FormExpr mul(const FormExpr& a, const FormExpr& b) const {
      if (both_scalar(a, b)) return raw(Op::Mul, a, b);
      return wedge(a, b);
    }
    FormExpr div(const FormExpr& a, const FormExpr& b) const {
      need_scalar(b, "division");
      if (a.degree() == 0) return raw(Op::Div, a, b);
      Expr d = b.scalar_part();
      return a.map_coefficients([&d](const Expr& c) { return Expr::raw_binary(Op::Div, c, d); });
    }
    FormExpr neg(const FormExpr& a) const {
      if (a.degree() == 0) return FormExpr::scalar(dim, Expr::raw_unary(Op::Neg, a.scalar_part()));
      return -a;
    }
    FormExpr pow(const FormExpr& a, int k) const {
      need_scalar(a, "'^'");
      return FormExpr::scalar(dim, Expr::raw_pow(a.scalar_part(), k));
    }
    FormExpr func(Op f, const FormExpr& a) const {
      need_scalar(a, "a function");
      return FormExpr::scalar(dim, Expr::raw_unary(f, a.scalar_part()));
    }
  };
  return detail::Parser<Builder>(text, Builder{dim}).parse_all();
}

// Matrix whose entries are forms of one common degree.
class MatrixForm {
 public:
  MatrixForm() = default;
  MatrixForm(int rows, int cols, int dim, int degree)
      : rows_(rows), cols_(cols), degree_(degree), e_(static_cast<std::size_t>(rows * cols), FormExpr(dim, degree)) {}

  static MatrixForm zero(int n, int dim, int degree) { return MatrixForm(n, n, dim, degree); }
  static MatrixForm scalars(const ExprMatrix& m, int dim) {
    MatrixForm r(m.rows(), m.cols(), dim, 0);
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) r.at(i, j) = FormExpr::scalar(dim, m(i, j));
    return r;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int degree() const { return degree_; }
  int dim() const { return e_.empty() ? 0 : e_.front().dim(); }

  FormExpr& at(int i, int j) { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
  const FormExpr& at(int i, int j) const { return e_[static_cast<std::size_t>(i * cols_ + j)]; }

  void set(int i, int j, FormExpr f) {
    if (!f.is_zero() && f.degree() != degree_) throw InputError("matrix form entries must share one degree");
    at(i, j) = std::move(f);
  }

  bool is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](const FormExpr& f) { return f.is_zero(); });
  }

  MatrixForm transposed() const {
    MatrixForm t(cols_, rows_, dim(), degree_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  template <class F>
  MatrixForm map(F&& f, int new_degree) const {
    MatrixForm r(rows_, cols_, dim(), new_degree);
    for (std::size_t k = 0; k < e_.size(); ++k) {
      FormExpr v = f(e_[k]);
      r.e_[k] = v.is_zero() ? FormExpr(v.dim(), new_degree) : v;
    }
    return r;
  }

  friend MatrixForm operator+(const MatrixForm& a, const MatrixForm& b) {
    check_shape(a, b);
    MatrixForm r = a;
    for (std::size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] + b.e_[k];
    r.degree_ = a.is_zero() ? b.degree_ : a.degree_;
    return r;
  }
  friend MatrixForm operator-(const MatrixForm& a) {
    return a.map([](const FormExpr& f) { return -f; }, a.degree_);
  }
  friend MatrixForm operator-(const MatrixForm& a, const MatrixForm& b) { return a + (-b); }

  // Matrix product with wedge multiplication of entries.
  friend MatrixForm wedge(const MatrixForm& a, const MatrixForm& b) {
    if (a.cols_ != b.rows_) throw InputError("matrix form shape mismatch in product");
    MatrixForm r(a.rows_, b.cols_, a.dim(), a.degree_ + b.degree_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) {
        FormExpr s(a.dim(), a.degree_ + b.degree_);
        for (int k = 0; k < a.cols_; ++k) s = s + wedge(a.at(i, k), b.at(k, j));
        r.at(i, j) = s.is_zero() ? FormExpr(a.dim(), a.degree_ + b.degree_) : s;
      }
    return r;
  }

  friend MatrixForm exterior_derivative(const MatrixForm& a) {
    return a.map([](const FormExpr& f) { return exterior_derivative(f); }, a.degree_ + 1);
  }

  friend MatrixForm pullback(const MatrixForm& a, std::span<const Expr> map, int source_dim) {
    MatrixForm r(a.rows_, a.cols_, source_dim, a.degree_);
    for (std::size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = pullback(a.e_[k], map, source_dim);
    return r;
  }

  // Coefficient matrix of the multi-index idx at x.
  Mat evaluate(const MultiIndex& idx, std::span<const double> x) const {
    Mat m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = at(i, j).coefficient(idx).eval(x);
    return m;
  }

  static void check_shape(const MatrixForm& a, const MatrixForm& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InputError("matrix form shape mismatch");
  }

 private:
  int rows_ = 0, cols_ = 0, degree_ = 0;
  std::vector<FormExpr> e_;
};

// All increasing multi-indices of the given degree in dimension dim.
inline std::vector<MultiIndex> multi_indices(int dim, int degree) {
  std::vector<MultiIndex> out;
  MultiIndex cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == degree) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i <= dim; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(1);
  return out;
}

}  // namespace orbi

#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "orbi/error.hpp"
#include "orbi/rational.hpp"

namespace orbi {

enum class Op : std::uint8_t { Rational, Real, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt };

// Immutable expression tree over chart coordinates x1, x2, ...
//
// Constants are exact rationals (or 64-bit floats when entered as decimals).
// The arithmetic operators fold literal subtrees and the trivial identities
// 0+a, 1*a, a^1; the raw_* factories build nodes verbatim and are what the
// parser uses, so print(parse(text)) reproduces the tree exactly.
class Expr {
 public:
  Expr() : Expr(Rational(0)) {}
  Expr(Rational q);       // NOLINT(implicit)
  Expr(std::int64_t n) : Expr(Rational(n)) {}  // NOLINT(implicit)
  Expr(int n) : Expr(Rational(n)) {}           // NOLINT(implicit)

  static Expr real(double x);
  static Expr var(int index);
  static Expr raw_binary(Op op, Expr a, Expr b);
  static Expr raw_unary(Op op, Expr a);
  static Expr raw_pow(Expr base, int exponent);

  Op op() const { return node_->op; }
  const Rational& rational() const { return node_->q; }
  double real_value() const { return node_->x; }
  int index() const { return node_->i; }     // variable index
  int exponent() const { return node_->i; }  // pow exponent
  const Expr& lhs() const { return *node_->a; }
  const Expr& rhs() const { return *node_->b; }
  const Expr& arg() const { return *node_->a; }

  bool is_rational() const { return op() == Op::Rational; }
  bool is_constant() const { return op() == Op::Rational || op() == Op::Real; }
  bool is_zero() const { return (op() == Op::Rational && rational().is_zero()); }
  bool is_one() const { return op() == Op::Rational && rational() == Rational(1); }
  bool is_minus_one() const { return op() == Op::Rational && rational() == Rational(-1); }

  double eval(std::span<const double> x) const;
  double eval() const { return eval(std::span<const double>{}); }

  // Largest variable index appearing in the tree (0 if none).
  int max_var() const;
  std::string str() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Op op;
    Rational q;
    double x = 0.0;
    int i = 0;
    std::shared_ptr<const Expr> a, b;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr sqrt(const Expr& a);

// ---------------------------------------------------------------------------

inline Expr::Expr(Rational q) {
  auto n = std::make_shared<Node>();
  n->op = Op::Rational;
  n->q = q;
  node_ = std::move(n);
}

inline Expr Expr::real(double x) {
  auto n = std::make_shared<Node>();
  n->op = Op::Real;
  n->x = x;
  return Expr(std::move(n));
}

inline Expr Expr::var(int index) {
  if (index < 1) throw InputError("variable index must be >= 1");
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->i = index;
  return Expr(std::move(n));
}

inline Expr Expr::raw_binary(Op op, Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::make_shared<const Expr>(std::move(a));
  n->b = std::make_shared<const Expr>(std::move(b));
  return Expr(std::move(n));
}

inline Expr Expr::raw_unary(Op op, Expr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::make_shared<const Expr>(std::move(a));
  return Expr(std::move(n));
}

inline Expr Expr::raw_pow(Expr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->i = exponent;
  n->a = std::make_shared<const Expr>(std::move(base));
  return Expr(std::move(n));
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Rational:
      return a.rational() == b.rational();
    case Op::Real:
      return std::bit_cast<std::uint64_t>(a.real_value()) == std::bit_cast<std::uint64_t>(b.real_value());
    case Op::Var:
      return a.index() == b.index();
    case Op::Pow:
      return a.exponent() == b.exponent() && a.arg() == b.arg();
    case Op::Neg:
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Sqrt:
      return a.arg() == b.arg();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

namespace detail {

inline double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite value in ") + what);
  return v;
}

inline double const_value(const Expr& e) { return e.is_rational() ? e.rational().to_double() : e.real_value(); }

inline bool perfect_square(std::int64_t v, std::int64_t& root) {
  if (v < 0) return false;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  for (std::int64_t c = r > 0 ? r - 1 : 0; c <= r + 1; ++c) {
    if (c * c == v) {
      root = c;
      return true;
    }
  }
  return false;
}

// Folds op(a, b) for two literal operands; returns false when the result is
// not representable (overflow, division by zero).
inline bool fold_binary(Op op, const Expr& a, const Expr& b, Expr& out) {
  try {
    if (a.is_rational() && b.is_rational()) {
      const Rational &x = a.rational(), &y = b.rational();
      switch (op) {
        case Op::Add: out = Expr(x + y); return true;
        case Op::Sub: out = Expr(x - y); return true;
        case Op::Mul: out = Expr(x * y); return true;
        case Op::Div:
          if (y.is_zero()) return false;
          out = Expr(x / y);
          return true;
        default: return false;
      }
    }
  } catch (const OverflowError&) {
    // fall through to float folding
  }
  if (!a.is_constant() || !b.is_constant()) return false;
  double x = const_value(a), y = const_value(b);
  double r = 0;
  switch (op) {
    case Op::Add: r = x + y; break;
    case Op::Sub: r = x - y; break;
    case Op::Mul: r = x * y; break;
    case Op::Div:
      if (y == 0.0) return false;
      r = x / y;
      break;
    default: return false;
  }
  if (!std::isfinite(r)) return false;
  out = r == 0.0 ? Expr(0) : Expr::real(r);
  return true;
}

inline void append_real(std::string& s, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string t(buf, res.ptr);
  if (t.find_first_of(".en") == std::string::npos) t += ".0";
  s += t;
}

// Printing precedence: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
inline int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Rational: return e.rational() < Rational(0) ? 3 : 5;
    case Op::Real: return std::signbit(e.real_value()) ? 3 : 5;
    default: return 5;
  }
}

inline bool is_nonneg_literal(const Expr& e) { return e.is_constant() && precedence(e) == 5; }

inline void print(const Expr& e, std::string& s);

inline void print_wrapped(const Expr& e, std::string& s, bool wrap) {
  if (wrap) s += '(';
  print(e, s);
  if (wrap) s += ')';
}

inline void print(const Expr& e, std::string& s) {
  switch (e.op()) {
    case Op::Rational:
      s += e.rational().str();
      return;
    case Op::Real:
      if (std::signbit(e.real_value())) s += '-';
      append_real(s, std::fabs(e.real_value()));
      return;
    case Op::Var:
      s += 'x';
      s += std::to_string(e.index());
      return;
    case Op::Add:
    case Op::Sub:
      print(e.lhs(), s);
      s += e.op() == Op::Add ? " + " : " - ";
      print_wrapped(e.rhs(), s, precedence(e.rhs()) <= 1);
      return;
    case Op::Mul:
    case Op::Div:
      print_wrapped(e.lhs(), s, precedence(e.lhs()) < 2);
      s += e.op() == Op::Mul ? '*' : '/';
      // A literal after '/' would lex together with the slash as a rational.
      print_wrapped(e.rhs(), s, precedence(e.rhs()) <= 2 || (e.op() == Op::Div && is_nonneg_literal(e.rhs())));
      return;
    case Op::Neg:
      s += '-';
      // "-3" would re-lex as a negative literal; keep the node explicit.
      print_wrapped(e.arg(), s, precedence(e.arg()) < 3 || is_nonneg_literal(e.arg()));
      return;
    case Op::Pow:
      print_wrapped(e.arg(), s, precedence(e.arg()) < 5 || (e.arg().is_rational() && !e.arg().rational().is_integer()));
      s += '^';
      s += std::to_string(e.exponent());
      return;
    case Op::Sin: s += "sin("; break;
    case Op::Cos: s += "cos("; break;
    case Op::Exp: s += "exp("; break;
    case Op::Sqrt: s += "sqrt("; break;
  }
  print(e.arg(), s);
  s += ')';
}

}  // namespace detail

inline std::string Expr::str() const {
  std::string s;
  detail::print(*this, s);
  return s;
}

inline int Expr::max_var() const {
  switch (op()) {
    case Op::Rational:
    case Op::Real: return 0;
    case Op::Var: return index();
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: return std::max(lhs().max_var(), rhs().max_var());
    default: return arg().max_var();
  }
}

inline double Expr::eval(std::span<const double> x) const {
  switch (op()) {
    case Op::Rational: return rational().to_double();
    case Op::Real: return real_value();
    case Op::Var:
      if (static_cast<std::size_t>(index()) > x.size())
        throw DomainError("variable x" + std::to_string(index()) + " outside the chart dimension");
      return x[static_cast<std::size_t>(index() - 1)];
    case Op::Add: return lhs().eval(x) + rhs().eval(x);
    case Op::Sub: return lhs().eval(x) - rhs().eval(x);
    case Op::Mul: return lhs().eval(x) * rhs().eval(x);
    case Op::Div: {
      double d = rhs().eval(x);
      if (d == 0.0) throw DomainError("division by zero");
      return detail::checked(lhs().eval(x) / d, "division");
    }
    case Op::Pow: {
      double b = arg().eval(x);
      if (b == 0.0 && exponent() < 0) throw DomainError("zero to a negative power");
      return detail::checked(std::pow(b, exponent()), "pow");
    }
    case Op::Neg: return -arg().eval(x);
    case Op::Sin: return std::sin(arg().eval(x));
    case Op::Cos: return std::cos(arg().eval(x));
    case Op::Exp: return detail::checked(std::exp(arg().eval(x)), "exp");
    case Op::Sqrt: {
      double v = arg().eval(x);
      if (v < 0.0) throw DomainError("sqrt of a negative value");
      return std::sqrt(v);
    }
  }
  return 0.0;
}

inline Expr operator+(const Expr& a, const Expr& b) {
  Expr out;
  if (detail::fold_binary(Op::Add, a, b, out)) return out;
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (b.op() == Op::Neg) return a - b.arg();
  if (a.op() == Op::Neg && a.arg() == b) return Expr(0);
  return Expr::raw_binary(Op::Add, a, b);
}

inline Expr operator-(const Expr& a) {
  if (a.is_rational()) return Expr(-a.rational());
  if (a.op() == Op::Real) return Expr::real(-a.real_value());
  if (a.op() == Op::Neg) return a.arg();
  return Expr::raw_unary(Op::Neg, a);
}

inline Expr operator-(const Expr& a, const Expr& b) {
  Expr out;
  if (detail::fold_binary(Op::Sub, a, b, out)) return out;
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (a == b) return Expr(0);
  if (b.op() == Op::Neg) return Expr::raw_binary(Op::Add, a, b.arg());
  return Expr::raw_binary(Op::Sub, a, b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
  Expr out;
  if (detail::fold_binary(Op::Mul, a, b, out)) return out;
  if (a.is_zero() || b.is_zero()) return Expr(0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_minus_one()) return -b;
  if (b.is_minus_one()) return -a;
  if (a.op() == Op::Neg) return -(a.arg() * b);
  if (b.op() == Op::Neg) return -(a * b.arg());
  return Expr::raw_binary(Op::Mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  Expr out;
  if (detail::fold_binary(Op::Div, a, b, out)) return out;
  if (a.is_zero() && !b.is_zero()) return Expr(0);
  if (b.is_one()) return a;
  if (a.op() == Op::Neg) return -(a.arg() / b);
  return Expr::raw_binary(Op::Div, a, b);
}

inline Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  if (base.is_rational() && !(base.rational().is_zero() && exponent < 0)) {
    try {
      return Expr(base.rational().pow(exponent));
    } catch (const OverflowError&) {
    }
  }
  if (base.op() == Op::Pow) {
    long e = static_cast<long>(base.exponent()) * exponent;
    if (e <= INT32_MAX && e >= INT32_MIN) return pow(base.arg(), static_cast<int>(e));
  }
  return Expr::raw_pow(base, exponent);
}

inline Expr sin(const Expr& a) { return a.is_zero() ? Expr(0) : Expr::raw_unary(Op::Sin, a); }
inline Expr cos(const Expr& a) { return a.is_zero() ? Expr(1) : Expr::raw_unary(Op::Cos, a); }
inline Expr exp(const Expr& a) { return a.is_zero() ? Expr(1) : Expr::raw_unary(Op::Exp, a); }
inline Expr sqrt(const Expr& a) {
  if (a.is_rational()) {
    std::int64_t rn = 0, rd = 0;
    if (detail::perfect_square(a.rational().num(), rn) && detail::perfect_square(a.rational().den(), rd))
      return Expr(Rational(rn, rd));
  }
  return Expr::raw_unary(Op::Sqrt, a);
}

// Exact partial derivative d e / d x_j. Only literal folding is applied.
inline Expr differentiate(const Expr& e, int j) {
  switch (e.op()) {
    case Op::Rational:
    case Op::Real: return Expr(0);
    case Op::Var: return Expr(e.index() == j ? 1 : 0);
    case Op::Add: return differentiate(e.lhs(), j) + differentiate(e.rhs(), j);
    case Op::Sub: return differentiate(e.lhs(), j) - differentiate(e.rhs(), j);
    case Op::Mul:
      return differentiate(e.lhs(), j) * e.rhs() + e.lhs() * differentiate(e.rhs(), j);
    case Op::Div: {
      Expr da = differentiate(e.lhs(), j), db = differentiate(e.rhs(), j);
      if (db.is_zero()) return da / e.rhs();
      return (da * e.rhs() - e.lhs() * db) / pow(e.rhs(), 2);
    }
    case Op::Pow:
      return Expr(e.exponent()) * pow(e.arg(), e.exponent() - 1) * differentiate(e.arg(), j);
    case Op::Neg: return -differentiate(e.arg(), j);
    case Op::Sin: return cos(e.arg()) * differentiate(e.arg(), j);
    case Op::Cos: return -(sin(e.arg()) * differentiate(e.arg(), j));
    case Op::Exp: return e * differentiate(e.arg(), j);
    case Op::Sqrt: return differentiate(e.arg(), j) / (Expr(2) * e);
  }
  return Expr(0);
}

// Replaces each variable x_j by image(j), rebuilding with folding.
inline Expr substitute(const Expr& e, const std::function<Expr(int)>& image) {
  switch (e.op()) {
    case Op::Rational:
    case Op::Real: return e;
    case Op::Var: return image(e.index());
    case Op::Add: return substitute(e.lhs(), image) + substitute(e.rhs(), image);
    case Op::Sub: return substitute(e.lhs(), image) - substitute(e.rhs(), image);
    case Op::Mul: return substitute(e.lhs(), image) * substitute(e.rhs(), image);
    case Op::Div: return substitute(e.lhs(), image) / substitute(e.rhs(), image);
    case Op::Pow: return pow(substitute(e.arg(), image), e.exponent());
    case Op::Neg: return -substitute(e.arg(), image);
    case Op::Sin: return sin(substitute(e.arg(), image));
    case Op::Cos: return cos(substitute(e.arg(), image));
    case Op::Exp: return exp(substitute(e.arg(), image));
    case Op::Sqrt: return sqrt(substitute(e.arg(), image));
  }
  return e;
}

// images[j-1] replaces x_j; variables past the end are left alone.
inline Expr substitute(const Expr& e, std::span<const Expr> images) {
  return substitute(e, [images](int j) {
    return static_cast<std::size_t>(j) <= images.size() ? images[static_cast<std::size_t>(j - 1)] : Expr::var(j);
  });
}

inline std::vector<Expr> coordinate_vars(int n, int offset = 0) {
  std::vector<Expr> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) v.push_back(Expr::var(j + offset));
  return v;
}

}  // namespace orbi

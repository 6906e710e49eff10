#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>

#include "orbi/error.hpp"
#include "orbi/expr.hpp"

namespace orbi {

namespace detail {

enum class Tok { End, Number, Var, Differential, Func, Plus, Minus, Star, Slash, Caret, LParen, RParen };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  bool is_real = false;
  Rational q;
  double x = 0.0;
  int index = 0;  // variable / differential index
  Op func = Op::Sin;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  bool digit_at(std::size_t i) const { return i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i])); }

  int read_index(std::size_t& i, std::size_t start) {
    if (!digit_at(i)) throw ParseError(start, "expected an index after '" + std::string(s_.substr(start, i - start)) + "'");
    std::size_t b = i;
    while (digit_at(i)) ++i;
    long v = std::strtol(std::string(s_.substr(b, i - b)).c_str(), nullptr, 10);
    if (v < 1 || v > 1000000) throw ParseError(start, "variable index out of range");
    return static_cast<int>(v);
  }

  void advance() {
    std::size_t i = pos_;
    while (i < s_.size() && std::isspace(static_cast<unsigned char>(s_[i]))) ++i;
    tok_ = Token{};
    tok_.offset = i;
    if (i >= s_.size()) {
      pos_ = i;
      return;
    }
    char c = s_[i];
    auto single = [&](Tok k) {
      tok_.kind = k;
      pos_ = i + 1;
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && digit_at(i + 1))) {
      std::size_t b = i;
      while (digit_at(i)) ++i;
      bool decimal = false;
      if (i < s_.size() && s_[i] == '.') {
        decimal = true;
        ++i;
        while (digit_at(i)) ++i;
      }
      if (i < s_.size() && (s_[i] == 'e' || s_[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
        if (digit_at(j)) {
          decimal = true;
          i = j;
          while (digit_at(i)) ++i;
        }
      }
      tok_.kind = Tok::Number;
      if (decimal) {
        tok_.is_real = true;
        tok_.x = std::strtod(std::string(s_.substr(b, i - b)).c_str(), nullptr);
      } else {
        std::size_t e = i;
        if (i < s_.size() && s_[i] == '/' && digit_at(i + 1)) {
          ++i;
          while (digit_at(i)) ++i;
        }
        try {
          tok_.q = Rational::parse(s_.substr(b, i - b));
        } catch (const std::exception& ex) {
          throw ParseError(b, std::string("bad number: ") + ex.what());
        }
        (void)e;
      }
      pos_ = i;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t b = i;
      if (c == 'x' && digit_at(i + 1)) {
        ++i;
        tok_.kind = Tok::Var;
        tok_.index = read_index(i, b);
        pos_ = i;
        return;
      }
      if (c == 'd' && i + 1 < s_.size() && s_[i + 1] == 'x' && digit_at(i + 2)) {
        i += 2;
        tok_.kind = Tok::Differential;
        tok_.index = read_index(i, b);
        pos_ = i;
        return;
      }
      while (i < s_.size() && std::isalnum(static_cast<unsigned char>(s_[i]))) ++i;
      std::string_view id = s_.substr(b, i - b);
      tok_.kind = Tok::Func;
      if (id == "sin") tok_.func = Op::Sin;
      else if (id == "cos") tok_.func = Op::Cos;
      else if (id == "exp") tok_.func = Op::Exp;
      else if (id == "sqrt") tok_.func = Op::Sqrt;
      else throw ParseError(b, "unknown identifier '" + std::string(id) + "'");
      pos_ = i;
      return;
    }
    throw ParseError(i, std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  Token tok_;
};

// Recursive-descent parser shared by expressions and differential forms.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' '-'? INT)?
//   base   := NUMBER | 'x'INT | 'dx'INT | FUNC '(' expr ')' | '(' expr ')'
//
// Unary minus binds looser than '^', so -x1^2 is -(x1^2). A minus applied
// directly to a bare numeric literal yields a negative literal.
template <class Builder>
class Parser {
 public:
  using Value = typename Builder::Value;

  Parser(std::string_view text, Builder builder) : lex_(text), b_(std::move(builder)) {}

  Value parse_all() {
    Value v = expr();
    if (lex_.peek().kind != Tok::End) throw ParseError(lex_.peek().offset, "unexpected trailing input");
    return v;
  }

 private:
  template <class F>
  Value guarded(std::size_t offset, F&& f) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(offset, e.what());
    }
  }

  Value expr() {
    Value v = term();
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      Token t = lex_.take();
      Value r = term();
      v = guarded(t.offset, [&] { return t.kind == Tok::Plus ? b_.add(v, r) : b_.sub(v, r); });
    }
    return v;
  }

  Value term() {
    Value v = factor().first;
    while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
      Token t = lex_.take();
      Value r = factor().first;
      v = guarded(t.offset, [&] { return t.kind == Tok::Star ? b_.mul(v, r) : b_.div(v, r); });
    }
    return v;
  }

  // Returns the value and whether it is a bare numeric literal.
  std::pair<Value, bool> factor() {
    if (lex_.peek().kind == Tok::Minus) {
      Token t = lex_.take();
      if (lex_.peek().kind == Tok::Number) {
        Token num = lex_.peek();
        auto [inner, bare] = factor();
        if (bare) {
          return {num.is_real ? b_.real(-num.x) : b_.rational(-num.q), false};
        }
        return {guarded(t.offset, [&] { return b_.neg(inner); }), false};
      }
      auto inner = factor().first;
      return {guarded(t.offset, [&] { return b_.neg(inner); }), false};
    }
    auto [v, bare] = base();
    if (lex_.peek().kind == Tok::Caret) {
      Token caret = lex_.take();
      bool neg = false;
      if (lex_.peek().kind == Tok::Minus) {
        lex_.take();
        neg = true;
      }
      Token e = lex_.take();
      if (e.kind != Tok::Number || e.is_real || !e.q.is_integer())
        throw ParseError(e.offset, "non-integer exponent");
      std::int64_t k = neg ? -e.q.num() : e.q.num();
      if (k > 100000 || k < -100000) throw ParseError(e.offset, "exponent out of range");
      Value base_v = v;
      return {guarded(caret.offset, [&] { return b_.pow(base_v, static_cast<int>(k)); }), false};
    }
    return {v, bare};
  }

  std::pair<Value, bool> base() {
    Token t = lex_.take();
    switch (t.kind) {
      case Tok::Number: return {t.is_real ? b_.real(t.x) : b_.rational(t.q), true};
      case Tok::Var: return {b_.variable(t.index), false};
      case Tok::Differential:
        return {guarded(t.offset, [&] { return b_.differential(t.index); }), false};
      case Tok::Func: {
        expect(Tok::LParen, "'(' after function name");
        Value inner = expr();
        expect(Tok::RParen, "')'");
        return {guarded(t.offset, [&] { return b_.func(t.func, inner); }), false};
      }
      case Tok::LParen: {
        Value inner = expr();
        expect(Tok::RParen, "')'");
        return {inner, false};
      }
      case Tok::End: throw ParseError(t.offset, "unexpected end of input");
      default: throw ParseError(t.offset, "unexpected token");
    }
  }

  void expect(Tok k, const char* what) {
    Token t = lex_.take();
    if (t.kind != k) throw ParseError(t.offset, std::string("expected ") + what);
  }

  Lexer lex_;
  Builder b_;
};

struct RawExprBuilder {
  using Value = Expr;
  Expr rational(Rational q) const { return Expr(q); }
  Expr real(double x) const { return Expr::real(x); }
  Expr variable(int j) const { return Expr::var(j); }
  Expr differential(int) const { throw InputError("differentials are not allowed in a scalar expression"); }
  Expr add(const Expr& a, const Expr& b) const { return Expr::raw_binary(Op::Add, a, b); }
  Expr sub(const Expr& a, const Expr& b) const { return Expr::raw_binary(Op::Sub, a, b); }
  Expr mul(const Expr& a, const Expr& b) const { return Expr::raw_binary(Op::Mul, a, b); }
  Expr div(const Expr& a, const Expr& b) const { return Expr::raw_binary(Op::Div, a, b); }
  Expr neg(const Expr& a) const { return Expr::raw_unary(Op::Neg, a); }
  Expr pow(const Expr& a, int k) const { return Expr::raw_pow(a, k); }
  Expr func(Op f, const Expr& a) const { return Expr::raw_unary(f, a); }
};

}  // namespace detail

// Parses text in the expression grammar. The tree is built verbatim (no
// folding), so parse(e.str()) == e for every tree e.
inline Expr parse(std::string_view text) {
  return detail::Parser<detail::RawExprBuilder>(text, {}).parse_all();
}

// Parses and evaluates a constant expression such as "sqrt(3)/2".
inline double parse_constant(std::string_view text) {
  Expr e = parse(text);
  if (e.max_var() != 0) throw InputError("expected a constant, got '" + std::string(text) + "'");
  return e.eval();
}

}  // namespace orbi

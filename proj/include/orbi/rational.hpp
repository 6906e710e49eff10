#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace orbi {

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Exact rational with 64-bit numerator/denominator. Intermediate products are
// formed in 128 bits; a result that does not fit throws OverflowError.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return make(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const {
    if (num_ == INT64_MIN) throw OverflowError("rational negation overflow");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  // Integer power; negative exponents invert.
  Rational pow(int e) const {
    Rational base = e < 0 ? Rational(1) / *this : *this;
    unsigned k = e < 0 ? static_cast<unsigned>(-static_cast<long>(e)) : static_cast<unsigned>(e);
    Rational r(1);
    while (k) {
      if (k & 1u) r *= base;
      k >>= 1u;
      if (k) base *= base;
    }
    return r;
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "a", "-a", "a/b".
  static Rational parse(std::string_view s) {
    auto slash = s.find('/');
    auto to_int = [](std::string_view t) -> std::int64_t {
      if (t.empty()) throw std::invalid_argument("empty integer");
      std::size_t i = 0;
      bool neg = false;
      if (t[0] == '-' || t[0] == '+') {
        neg = t[0] == '-';
        i = 1;
      }
      if (i == t.size()) throw std::invalid_argument("bad integer");
      __int128 v = 0;
      for (; i < t.size(); ++i) {
        if (t[i] < '0' || t[i] > '9') throw std::invalid_argument("bad integer");
        v = v * 10 + (t[i] - '0');
        if (v > static_cast<__int128>(INT64_MAX)) throw OverflowError("integer literal too large");
      }
      return static_cast<std::int64_t>(neg ? -v : v);
    };
    if (slash == std::string_view::npos) return Rational(to_int(s));
    return Rational(to_int(s.substr(0, slash)), to_int(s.substr(slash + 1)));
  }

 private:
  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < -static_cast<__int128>(INT64_MAX) || d > INT64_MAX)
      throw OverflowError("rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  void assign(std::int64_t n, std::int64_t d) { *this = make(n, d); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace orbi

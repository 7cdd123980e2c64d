#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "charvar/bigint.hpp"
#include "charvar/error.hpp"

namespace charvar {

// Integer Laurent polynomial in q; no zero coefficients are stored.
class LaurentPoly {
 public:
  using Terms = std::map<int, BigInt>;

  LaurentPoly() = default;
  LaurentPoly(const BigInt& c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_[0] = c;
  }
  LaurentPoly(int c) : LaurentPoly(BigInt(c)) {}  // NOLINT(google-explicit-constructor)
  explicit LaurentPoly(Terms terms) : terms_(std::move(terms)) { prune(); }

  static LaurentPoly monomial(const BigInt& c, int e) {
    LaurentPoly r;
    if (c != 0) r.terms_[e] = c;
    return r;
  }
  static LaurentPoly q() { return monomial(1, 1); }

  // Coefficients c0 + c1 q + c2 q^2 + ...
  static LaurentPoly from_coeffs(const std::vector<BigInt>& coeffs, int offset = 0) {
    LaurentPoly r;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (coeffs[i] != 0) r.terms_[offset + static_cast<int>(i)] = coeffs[i];
    return r;
  }

  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }
  int min_exp() const { return is_zero() ? 0 : terms_.begin()->first; }
  int max_exp() const { return is_zero() ? 0 : terms_.rbegin()->first; }
  const BigInt& leading() const { return terms_.rbegin()->second; }
  const BigInt& trailing() const { return terms_.begin()->second; }
  BigInt coeff(int e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? BigInt(0) : it->second;
  }
  bool is_constant() const { return is_zero() || (terms_.size() == 1 && terms_.begin()->first == 0); }

  LaurentPoly& operator+=(const LaurentPoly& o) {
    for (const auto& [e, c] : o.terms_) terms_[e] += c;
    prune();
    return *this;
  }
  LaurentPoly& operator-=(const LaurentPoly& o) {
    for (const auto& [e, c] : o.terms_) terms_[e] -= c;
    prune();
    return *this;
  }
  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
  LaurentPoly operator-() const {
    LaurentPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.terms_[ea + eb] += ca * cb;
    r.prune();
    return r;
  }
  LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) { return a.terms_ == b.terms_; }

  LaurentPoly shift(int i) const {
    LaurentPoly r;
    for (const auto& [e, c] : terms_) r.terms_[e + i] = c;
    return r;
  }
  LaurentPoly scale(const BigInt& s) const {
    if (s == 0) return {};
    LaurentPoly r = *this;
    for (auto& [e, c] : r.terms_) c *= s;
    return r;
  }
  // q -> q^k
  LaurentPoly substitute_power(int k) const {
    LaurentPoly r;
    for (const auto& [e, c] : terms_) r.terms_[e * k] = c;
    return r;
  }
  BigInt content() const {
    BigInt g = 0;
    for (const auto& [e, c] : terms_) g = gcd_big(g, c);
    return g;
  }
  // Exact division of every coefficient.
  LaurentPoly divide_exact(const BigInt& d) const {
    LaurentPoly r = *this;
    for (auto& [e, c] : r.terms_) {
      if (c % d != 0) fail(ErrorCode::NonIntegralQuotient, "coefficient not divisible by " + to_decimal(d));
      c /= d;
    }
    return r;
  }

  BigRational evaluate(const BigRational& x) const {
    if (is_zero()) return 0;
    if (x == 0 && min_exp() < 0) fail(ErrorCode::DivisionByZero, "negative power of q evaluated at 0");
    BigRational acc = 0;
    for (const auto& [e, c] : terms_) {
      BigRational term = c;
      const BigRational base = e < 0 ? BigRational(1) / x : x;
      for (int i = 0; i < std::abs(e); ++i) term *= base;
      acc += term;
    }
    return acc;
  }
  BigRational evaluate(const BigInt& x) const { return evaluate(BigRational(x)); }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      BigInt mag = c < 0 ? BigInt(-c) : c;
      if (out.empty()) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      const std::string var = e == 0 ? "" : (e == 1 ? "q" : "q^" + std::to_string(e));
      if (var.empty()) {
        out += to_decimal(mag);
      } else {
        if (mag != 1) out += to_decimal(mag) + "*";
        out += var;
      }
    }
    return out;
  }

 private:
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();) it = it->second == 0 ? terms_.erase(it) : std::next(it);
  }

  Terms terms_;
};

namespace detail {

// Polynomials below have min_exp() >= 0.
inline LaurentPoly primitive_part(const LaurentPoly& a) {
  if (a.is_zero()) return a;
  LaurentPoly r = a.divide_exact(a.content());
  return r.leading() < 0 ? -r : r;
}

inline LaurentPoly pseudo_remainder(LaurentPoly a, const LaurentPoly& b) {
  const int db = b.max_exp();
  const BigInt& lb = b.leading();
  while (!a.is_zero() && a.max_exp() >= db) {
    const LaurentPoly lead = LaurentPoly::monomial(a.leading(), a.max_exp() - db);
    a = a.scale(lb) - lead * b;
  }
  return a;
}

// Primitive gcd of two polynomials with nonnegative exponents.
inline LaurentPoly primitive_gcd(const LaurentPoly& x, const LaurentPoly& y) {
  LaurentPoly a = primitive_part(x), b = primitive_part(y);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.max_exp() < b.max_exp()) std::swap(a, b);
  while (!b.is_zero()) {
    LaurentPoly r = primitive_part(pseudo_remainder(a, b));
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// a / b in Z[q] where b divides a exactly.
inline LaurentPoly poly_divide_exact(LaurentPoly a, const LaurentPoly& b) {
  LaurentPoly quotient;
  const int db = b.max_exp();
  while (!a.is_zero()) {
    if (a.max_exp() < db || a.leading() % b.leading() != 0)
      fail(ErrorCode::NonIntegralQuotient, "polynomial division is not exact");
    const LaurentPoly t = LaurentPoly::monomial(a.leading() / b.leading(), a.max_exp() - db);
    quotient += t;
    a -= t * b;
  }
  return quotient;
}

}  // namespace detail

// Reduced quotient of Laurent polynomials. The denominator has min exponent 0,
// positive leading coefficient, and shares no integer or polynomial factor with
// the numerator.
class RatFunc {
 public:
  RatFunc() : den_(1) {}
  RatFunc(const LaurentPoly& num) : num_(num), den_(1) { normalize(); }  // NOLINT(google-explicit-constructor)
  RatFunc(const BigInt& c) : RatFunc(LaurentPoly(c)) {}                  // NOLINT(google-explicit-constructor)
  RatFunc(int c) : RatFunc(LaurentPoly(c)) {}                            // NOLINT(google-explicit-constructor)
  RatFunc(const BigRational& c)                                          // NOLINT(google-explicit-constructor)
      : num_(numerator_of(c)), den_(denominator_of(c)) {}
  RatFunc(LaurentPoly num, LaurentPoly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  static RatFunc q() { return RatFunc(LaurentPoly::q()); }

  const LaurentPoly& numerator() const { return num_; }
  const LaurentPoly& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_ == LaurentPoly(1); }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
  RatFunc operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) fail(ErrorCode::DivisionByZero, "division by the zero rational function");
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
  }
  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
  RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }
  friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  RatFunc shift(int i) const {
    RatFunc r = *this;
    r.num_ = r.num_.shift(i);
    return r;
  }
  // q -> q^k
  RatFunc adams(int k) const { return RatFunc(num_.substitute_power(k), den_.substitute_power(k)); }

  BigRational evaluate(const BigRational& x) const {
    const BigRational d = den_.evaluate(x);
    if (d == 0) fail(ErrorCode::DivisionByZero, "denominator vanishes at q = " + to_decimal(x));
    return num_.evaluate(x) / d;
  }
  BigRational evaluate(const BigInt& x) const { return evaluate(BigRational(x)); }

  std::string to_string() const {
    if (is_polynomial()) return num_.to_string();
    return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
  }

 private:
  void normalize() {
    if (den_.is_zero()) fail(ErrorCode::DivisionByZero, "zero denominator");
    if (num_.is_zero()) {
      den_ = LaurentPoly(1);
      return;
    }
    const int s = num_.min_exp() - den_.min_exp();
    LaurentPoly n = num_.shift(-num_.min_exp());
    LaurentPoly d = den_.shift(-den_.min_exp());
    if (d.max_exp() > 0 && n.max_exp() > 0) {
      const LaurentPoly g = detail::primitive_gcd(n, d);
      if (g.max_exp() > 0) {
        n = detail::poly_divide_exact(n, g);
        d = detail::poly_divide_exact(d, g);
      }
    }
    const BigInt c = gcd_big(n.content(), d.content());
    if (c != 1) {
      n = n.divide_exact(c);
      d = d.divide_exact(c);
    }
    if (d.leading() < 0) {
      n = -n;
      d = -d;
    }
    num_ = n.shift(s);
    den_ = d;
  }

  LaurentPoly num_;
  LaurentPoly den_;
};

// |GL_n(F_q)| as a polynomial in q.
inline LaurentPoly gl_order_poly(int n) {
  LaurentPoly r(1);
  for (int i = 0; i < n; ++i) r *= LaurentPoly::monomial(1, n) - LaurentPoly::monomial(1, i);
  return r;
}

struct Sample {
  BigInt q;
  BigInt count;
};

struct InterpolationProblem {
  std::vector<Sample> samples;
  int degree_bound = 0;
  std::optional<Sample> holdout;
};

inline int degree_bound_for(int n, int g) { return 2 * g * n * n; }

// Lagrange interpolation over the rationals through the first degree_bound + 1
// samples; every remaining sample and the holdout must agree.
inline LaurentPoly interpolate(const InterpolationProblem& problem) {
  const int bound = problem.degree_bound;
  if (bound < 0) fail(ErrorCode::InvalidArgument, "degree bound must be nonnegative");
  std::set<BigInt> distinct;
  for (const auto& s : problem.samples)
    if (!distinct.insert(s.q).second) fail(ErrorCode::InvalidArgument, "repeated sample point q = " + to_decimal(s.q));
  if (problem.holdout && distinct.count(problem.holdout->q))
    fail(ErrorCode::InvalidArgument, "holdout point repeats a sample");
  const std::size_t need = static_cast<std::size_t>(bound) + 1;
  if (problem.samples.size() < need)
    fail(ErrorCode::InsufficientSamples, "degree bound " + std::to_string(bound) + " needs " + std::to_string(need) +
                                             " samples, got " + std::to_string(problem.samples.size()));

  // Newton divided differences.
  std::vector<BigRational> xs, dd;
  for (std::size_t i = 0; i < need; ++i) {
    xs.emplace_back(problem.samples[i].q);
    dd.emplace_back(problem.samples[i].count);
  }
  for (std::size_t level = 1; level < need; ++level)
    for (std::size_t i = need - 1; i >= level; --i) dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);

  // Expand nested Newton form into monomial coefficients.
  std::vector<BigRational> coeffs{dd[need - 1]};
  for (std::size_t i = need - 1; i-- > 0;) {
    std::vector<BigRational> next(coeffs.size() + 1, 0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      next[j + 1] += coeffs[j];
      next[j] -= coeffs[j] * xs[i];
    }
    next[0] += dd[i];
    coeffs = std::move(next);
  }

  auto eval = [&](const BigInt& x) {
    BigRational acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * BigRational(x) + coeffs[i];
    return acc;
  };
  auto check = [&](const Sample& s, const char* what) {
    const BigRational got = eval(s.q);
    if (got != BigRational(s.count))
      fail(ErrorCode::HoldoutMismatch, std::string(what) + " at q = " + to_decimal(s.q) + ": interpolant gives " +
                                           to_decimal(got) + ", count is " + to_decimal(s.count));
  };
  for (std::size_t i = need; i < problem.samples.size(); ++i) check(problem.samples[i], "extra sample");
  if (problem.holdout) check(*problem.holdout, "holdout");

  std::vector<BigInt> ints;
  for (const auto& c : coeffs) {
    if (!is_integer(c)) fail(ErrorCode::NonIntegerCoefficients, "interpolated coefficient " + to_decimal(c));
    ints.push_back(numerator_of(c));
  }
  return LaurentPoly::from_coeffs(ints);
}

}  // namespace charvar

#pragma once

// Exact arithmetic in GF(p^k), polynomials and small dense matrices over it,
// streaming enumeration of GL_n(F_q) and rational-canonical-form keys.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "charvar/bigint.hpp"
#include "charvar/config.hpp"
#include "charvar/error.hpp"

namespace charvar {

// Elements are stored as integer codes: the coefficient vector (c_0, ..., c_{k-1})
// of the polynomial representative is encoded as sum c_i p^i. Code 0 is zero and
// code 1 is one. Ordering elements by code is the lexicographic order on
// (c_{k-1}, ..., c_0).
using Code = std::uint16_t;

struct FieldElement {
  std::uint32_t code = 0;
  auto operator<=>(const FieldElement&) const = default;
};

namespace detail {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

struct FieldTables {
  std::uint32_t p = 0;
  std::uint32_t k = 0;
  std::uint32_t q = 0;
  std::vector<std::uint32_t> modulus;   // low -> high including the leading 1; empty for k = 1
  std::vector<std::uint32_t> exp;       // exp[i] = g^i for i in [0, 2(q-1))
  std::vector<std::uint32_t> log;       // log[x] for x != 0
  std::vector<std::uint16_t> add;       // q*q table for small extension fields
  std::vector<std::uint32_t> neg;
  std::uint32_t generator = 0;
};

}  // namespace detail

class FiniteField;

// Dense polynomials over GF(q), coefficients low -> high, no trailing zeros.
// The zero polynomial is the empty vector.
using FieldPoly = std::vector<std::uint32_t>;

class FiniteField {
 public:
  static constexpr std::uint32_t kMaxOrder = 65536;

  static FiniteField create(std::uint32_t p, std::uint32_t k = 1);

  std::uint32_t p() const { return t_->p; }
  std::uint32_t k() const { return t_->k; }
  std::uint32_t q() const { return t_->q; }
  const std::vector<std::uint32_t>& modulus() const { return t_->modulus; }

  FieldElement zero() const { return {0}; }
  FieldElement one() const { return {1}; }
  FieldElement generator() const { return {t_->generator}; }

  // Image of an integer under Z -> GF(p) -> GF(q).
  FieldElement element(std::int64_t value) const {
    const std::int64_t p = t_->p;
    return {static_cast<std::uint32_t>(((value % p) + p) % p)};
  }

  FieldElement from_coeffs(const std::vector<std::uint32_t>& coeffs) const {
    std::uint32_t code = 0;
    std::uint32_t scale = 1;
    for (std::size_t i = 0; i < coeffs.size() && i < t_->k; ++i) {
      code += (coeffs[i] % t_->p) * scale;
      scale *= t_->p;
    }
    return {code};
  }

  std::vector<std::uint32_t> coeffs(FieldElement e) const {
    std::vector<std::uint32_t> out(t_->k);
    std::uint32_t c = e.code;
    for (auto& digit : out) {
      digit = c % t_->p;
      c /= t_->p;
    }
    return out;
  }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    if (t_->k == 1) {
      const std::uint32_t s = a + b;
      return s >= t_->p ? s - t_->p : s;
    }
    if (!t_->add.empty()) return t_->add[a * t_->q + b];
    return add_digits(a, b);
  }
  std::uint32_t neg(std::uint32_t a) const { return t_->neg[a]; }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    return t_->exp[t_->log[a] + t_->log[b]];
  }
  std::uint32_t inv(std::uint32_t a) const {
    if (a == 0) fail(ErrorCode::DivisionByZero, "inverse of zero in GF(" + std::to_string(q()) + ")");
    return t_->exp[(t_->q - 1 - t_->log[a]) % (t_->q - 1)];
  }
  std::uint32_t div(std::uint32_t a, std::uint32_t b) const { return mul(a, inv(b)); }
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    const std::uint64_t order = t_->q - 1;
    return t_->exp[(static_cast<std::uint64_t>(t_->log[a]) * (e % order)) % order];
  }
  // Discrete log to the base generator(); a must be nonzero.
  std::uint32_t log(std::uint32_t a) const { return t_->log[a]; }

  FieldElement add(FieldElement a, FieldElement b) const { return {add(a.code, b.code)}; }
  FieldElement sub(FieldElement a, FieldElement b) const { return {sub(a.code, b.code)}; }
  FieldElement neg(FieldElement a) const { return {neg(a.code)}; }
  FieldElement mul(FieldElement a, FieldElement b) const { return {mul(a.code, b.code)}; }
  FieldElement inv(FieldElement a) const { return {inv(a.code)}; }
  FieldElement pow(FieldElement a, std::uint64_t e) const { return {pow(a.code, e)}; }

  // Multiplicative order of a nonzero element.
  std::uint64_t order(FieldElement a) const {
    if (a.code == 0) fail(ErrorCode::InvalidArgument, "zero has no multiplicative order");
    const std::uint64_t m = t_->q - 1;
    return m / std::gcd<std::uint64_t>(t_->log[a.code], m);
  }

  std::string to_string(FieldElement e) const {
    if (t_->k == 1) return std::to_string(e.code);
    std::ostringstream os;
    os << '[';
    const auto c = coeffs(e);
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << ']';
    return os.str();
  }

  std::string name() const {
    return "GF(" + std::to_string(p()) + (k() > 1 ? "^" + std::to_string(k()) : "") + ")";
  }

  bool operator==(const FiniteField& other) const {
    return t_ == other.t_ || (t_->p == other.t_->p && t_->k == other.t_->k);
  }

 private:
  explicit FiniteField(std::shared_ptr<const detail::FieldTables> t) : t_(std::move(t)) {}

  std::uint32_t add_digits(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t out = 0;
    std::uint32_t scale = 1;
    for (std::uint32_t i = 0; i < t_->k; ++i) {
      const std::uint32_t d = (a % t_->p + b % t_->p) % t_->p;
      out += d * scale;
      a /= t_->p;
      b /= t_->p;
      scale *= t_->p;
    }
    return out;
  }

  std::shared_ptr<const detail::FieldTables> t_;
};

// ---------------------------------------------------------------------------
// Polynomials over a field.

namespace poly {

inline void trim(FieldPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const FieldPoly& a) { return static_cast<int>(a.size()) - 1; }

inline FieldPoly add(const FiniteField& F, const FieldPoly& a, const FieldPoly& b) {
  FieldPoly out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = F.add(i < a.size() ? a[i] : 0u, i < b.size() ? b[i] : 0u);
  }
  trim(out);
  return out;
}

inline FieldPoly sub(const FiniteField& F, const FieldPoly& a, const FieldPoly& b) {
  FieldPoly out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = F.sub(i < a.size() ? a[i] : 0u, i < b.size() ? b[i] : 0u);
  }
  trim(out);
  return out;
}

inline FieldPoly mul(const FiniteField& F, const FieldPoly& a, const FieldPoly& b) {
  if (a.empty() || b.empty()) return {};
  FieldPoly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] = F.add(out[i + j], F.mul(a[i], b[j]));
    }
  }
  trim(out);
  return out;
}

inline FieldPoly scale(const FiniteField& F, const FieldPoly& a, std::uint32_t c) {
  FieldPoly out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = F.mul(a[i], c);
  trim(out);
  return out;
}

// Returns (quotient, remainder); b must be nonzero.
inline std::pair<FieldPoly, FieldPoly> divmod(const FiniteField& F, FieldPoly a, const FieldPoly& b) {
  if (b.empty()) fail(ErrorCode::DivisionByZero, "polynomial division by zero");
  if (a.size() < b.size()) return {{}, std::move(a)};
  const std::uint32_t lead_inv = F.inv(b.back());
  FieldPoly quot(a.size() - b.size() + 1, 0);
  for (int i = degree(a) - degree(b); i >= 0; --i) {
    const std::uint32_t c = F.mul(a[i + b.size() - 1], lead_inv);
    quot[i] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      a[i + j] = F.sub(a[i + j], F.mul(c, b[j]));
    }
  }
  trim(a);
  trim(quot);
  return {std::move(quot), std::move(a)};
}

inline FieldPoly mod(const FiniteField& F, const FieldPoly& a, const FieldPoly& b) {
  return divmod(F, a, b).second;
}

inline FieldPoly monic(const FiniteField& F, const FieldPoly& a) {
  if (a.empty()) return a;
  return scale(F, a, F.inv(a.back()));
}

inline FieldPoly gcd(const FiniteField& F, FieldPoly a, FieldPoly b) {
  while (!b.empty()) {
    FieldPoly r = mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(F, a);
}

inline FieldPoly powmod(const FiniteField& F, FieldPoly base, std::uint64_t e, const FieldPoly& m) {
  FieldPoly result{1};
  base = mod(F, base, m);
  while (e > 0) {
    if (e & 1) result = mod(F, mul(F, result, base), m);
    e >>= 1;
    if (e) base = mod(F, mul(F, base, base), m);
  }
  return result;
}

// Ben-Or: f of degree d is irreducible iff gcd(f, x^{q^i} - x) = 1 for i <= d/2.
inline bool is_irreducible(const FiniteField& F, const FieldPoly& f) {
  const int d = degree(f);
  if (d < 1) return false;
  if (d == 1) return true;
  const FieldPoly x{0, 1};
  FieldPoly xq = x;
  for (int i = 1; i <= d / 2; ++i) {
    xq = powmod(F, xq, F.q(), f);
    const FieldPoly g = gcd(F, f, sub(F, xq, x));
    if (degree(g) > 0) return false;
  }
  return true;
}

// All monic polynomials of degree d, in ascending code order of (c_0..c_{d-1})
// read as a base-q number with c_{d-1} most significant.
template <typename Fn>
void for_each_monic(const FiniteField& F, int d, Fn&& fn) {
  const std::uint64_t q = F.q();
  std::uint64_t total = 1;
  for (int i = 0; i < d; ++i) total *= q;
  FieldPoly f(d + 1, 0);
  f[d] = 1;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t c = idx;
    for (int i = 0; i < d; ++i) {
      f[i] = static_cast<std::uint32_t>(c % q);
      c /= q;
    }
    fn(f);
  }
}

// Monic irreducible polynomials of degree d other than x.
inline std::vector<FieldPoly> irreducibles(const FiniteField& F, int d) {
  std::vector<FieldPoly> out;
  for_each_monic(F, d, [&](const FieldPoly& f) {
    if (f[0] != 0 && is_irreducible(F, f)) out.push_back(f);
  });
  return out;
}

inline std::string to_string(const FiniteField& F, const FieldPoly& a, char var = 'x') {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(a); i >= 0; --i) {
    if (a[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    const bool unit = a[i] == 1;
    if (!unit || i == 0) os << F.to_string({a[i]});
    if (i > 0) {
      os << var;
      if (i > 1) os << '^' << i;
    }
  }
  return os.str();
}

}  // namespace poly

// ---------------------------------------------------------------------------
// Field construction.

inline FiniteField FiniteField::create(std::uint32_t p, std::uint32_t k) {
  if (k == 0) fail(ErrorCode::DegreeZero, "extension degree must be at least 1");
  if (!detail::is_prime(p)) fail(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    q *= p;
    if (q > kMaxOrder) {
      fail(ErrorCode::FieldTooLarge, "GF(" + std::to_string(p) + "^" + std::to_string(k) +
                                         ") exceeds the supported order " + std::to_string(kMaxOrder));
    }
  }

  auto t = std::make_shared<detail::FieldTables>();
  t->p = p;
  t->k = k;
  t->q = static_cast<std::uint32_t>(q);

  // Multiplication of codes before the log tables exist.
  std::function<std::uint32_t(std::uint32_t, std::uint32_t)> slow_mul;
  if (k == 1) {
    slow_mul = [p](std::uint32_t a, std::uint32_t b) {
      return static_cast<std::uint32_t>((std::uint64_t{a} * b) % p);
    };
  } else {
    const FiniteField prime = create(p, 1);
    FieldPoly chosen;
    poly::for_each_monic(prime, static_cast<int>(k), [&](const FieldPoly& f) {
      if (chosen.empty() && poly::is_irreducible(prime, f)) chosen = f;
    });
    t->modulus = chosen;
    slow_mul = [prime, chosen, p, k](std::uint32_t a, std::uint32_t b) {
      FieldPoly pa(k), pb(k);
      for (std::uint32_t i = 0; i < k; ++i) {
        pa[i] = a % p;
        a /= p;
        pb[i] = b % p;
        b /= p;
      }
      poly::trim(pa);
      poly::trim(pb);
      const FieldPoly r = poly::mod(prime, poly::mul(prime, pa, pb), chosen);
      std::uint32_t code = 0, scale = 1;
      for (std::uint32_t c : r) {
        code += c * scale;
        scale *= p;
      }
      return code;
    };
    if (q <= 1024) {
      t->add.resize(q * q);
      for (std::uint32_t a = 0; a < q; ++a) {
        for (std::uint32_t b = 0; b < q; ++b) {
          std::uint32_t x = a, y = b, out = 0, scale = 1;
          for (std::uint32_t i = 0; i < k; ++i) {
            out += ((x % p + y % p) % p) * scale;
            x /= p;
            y /= p;
            scale *= p;
          }
          t->add[a * q + b] = static_cast<std::uint16_t>(out);
        }
      }
    }
  }

  const std::uint32_t m = t->q - 1;
  for (std::uint32_t cand = 1; cand < t->q; ++cand) {
    std::uint32_t x = 1;
    std::uint32_t ord = 0;
    do {
      x = slow_mul(x, cand);
      ++ord;
    } while (x != 1 && ord <= m);
    if (ord == m) {
      t->generator = cand;
      break;
    }
  }
  t->exp.assign(2 * static_cast<std::size_t>(m) + 1, 0);
  t->log.assign(t->q, 0);
  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i < 2 * m + 1; ++i) {
    t->exp[i] = x;
    if (i < m) t->log[x] = i;
    x = slow_mul(x, t->generator);
  }

  t->neg.resize(t->q);
  for (std::uint32_t a = 0; a < t->q; ++a) {
    std::uint32_t c = a, out = 0, scale = 1;
    for (std::uint32_t i = 0; i < k; ++i) {
      out += ((p - c % p) % p) * scale;
      c /= p;
      scale *= p;
    }
    t->neg[a] = out;
  }
  return FiniteField(std::move(t));
}

inline FiniteField field_create(std::uint32_t p, std::uint32_t k = 1) { return FiniteField::create(p, k); }

struct RootOfUnity {
  FieldElement element;
  unsigned order = 1;
};

// All elements of exact multiplicative order n, ascending by code.
inline std::vector<RootOfUnity> primitive_roots_of_unity(const FiniteField& F, unsigned n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "root of unity order must be at least 1");
  if ((F.q() - 1) % n != 0) {
    fail(ErrorCode::NoRootOfUnity,
         std::to_string(n) + " does not divide " + std::to_string(F.q() - 1) + " in " + F.name());
  }
  std::vector<RootOfUnity> out;
  for (std::uint32_t c = 1; c < F.q(); ++c) {
    if (F.order({c}) == n) out.push_back({{c}, n});
  }
  return out;
}

inline RootOfUnity primitive_root_of_unity(const FiniteField& F, unsigned n) {
  return primitive_roots_of_unity(F, n).front();
}

// ---------------------------------------------------------------------------
// Matrices.

class Matrix {
 public:
  static constexpr int kMaxDim = 4;

  Matrix() = default;
  Matrix(int rows, int cols) : rows_(static_cast<std::uint8_t>(rows)), cols_(static_cast<std::uint8_t>(cols)) {
    if (rows < 0 || cols < 0 || rows > kMaxDim || cols > kMaxDim) {
      fail(ErrorCode::InvalidArgument, "matrix dimensions must lie in [0, 4]");
    }
  }

  static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }
  static Matrix scalar(int n, FieldElement c) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = static_cast<Code>(c.code);
    return m;
  }
  static Matrix identity(int n) { return scalar(n, {1}); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Code operator()(int r, int c) const { return a_[r * kMaxDim + c]; }
  Code& operator()(int r, int c) { return a_[r * kMaxDim + c]; }

  bool is_zero() const {
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c)
        if ((*this)(r, c) != 0) return false;
    return true;
  }

  // Scalar matrices c * Id; returns c.
  std::optional<FieldElement> scalar_value() const {
    if (!square()) return std::nullopt;
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c)
        if ((r == c ? (*this)(r, c) != (*this)(0, 0) : (*this)(r, c) != 0)) return std::nullopt;
    if (rows_ == 0) return std::nullopt;
    return FieldElement{(*this)(0, 0)};
  }

  bool operator==(const Matrix& o) const = default;

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ull ^ (rows_ * 31u + cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) h = (h ^ (*this)(r, c)) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }

 private:
  std::uint8_t rows_ = 0;
  std::uint8_t cols_ = 0;
  std::array<Code, kMaxDim * kMaxDim> a_{};
};

struct MatrixHash {
  std::size_t operator()(const Matrix& m) const { return m.hash(); }
};

namespace mat {

inline Matrix mul(const FiniteField& F, const Matrix& A, const Matrix& B) {
  Matrix C(A.rows(), B.cols());
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < B.cols(); ++j) {
      std::uint32_t s = 0;
      for (int l = 0; l < A.cols(); ++l) s = F.add(s, F.mul(A(i, l), B(l, j)));
      C(i, j) = static_cast<Code>(s);
    }
  }
  return C;
}

inline Matrix add(const FiniteField& F, const Matrix& A, const Matrix& B) {
  Matrix C(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C(i, j) = static_cast<Code>(F.add(A(i, j), B(i, j)));
  return C;
}

inline Matrix sub(const FiniteField& F, const Matrix& A, const Matrix& B) {
  Matrix C(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C(i, j) = static_cast<Code>(F.sub(A(i, j), B(i, j)));
  return C;
}

inline Matrix scale(const FiniteField& F, FieldElement c, const Matrix& A) {
  Matrix C(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) C(i, j) = static_cast<Code>(F.mul(c.code, A(i, j)));
  return C;
}

inline FieldElement trace(const FiniteField& F, const Matrix& A) {
  std::uint32_t s = 0;
  for (int i = 0; i < A.rows(); ++i) s = F.add(s, A(i, i));
  return {s};
}

// Gaussian elimination; returns rank and, for square input, the determinant.
inline std::pair<int, FieldElement> rank_det(const FiniteField& F, Matrix A) {
  const int rows = A.rows(), cols = A.cols();
  int rank = 0;
  std::uint32_t det = 1;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r) {
      if (A(r, c) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) {
      det = 0;
      continue;
    }
    if (pivot != rank) {
      for (int j = 0; j < cols; ++j) std::swap(A(pivot, j), A(rank, j));
      det = F.neg(det);
    }
    const std::uint32_t pv = A(rank, c);
    det = F.mul(det, pv);
    const std::uint32_t pinv = F.inv(pv);
    for (int r = rank + 1; r < rows; ++r) {
      if (A(r, c) == 0) continue;
      const std::uint32_t f = F.mul(A(r, c), pinv);
      for (int j = c; j < cols; ++j) A(r, j) = static_cast<Code>(F.sub(A(r, j), F.mul(f, A(rank, j))));
    }
    ++rank;
  }
  if (rows != cols || rank < rows) det = 0;
  return {rank, {det}};
}

inline int rank(const FiniteField& F, const Matrix& A) { return rank_det(F, A).first; }
inline FieldElement det(const FiniteField& F, const Matrix& A) { return rank_det(F, A).second; }

inline std::optional<Matrix> inverse(const FiniteField& F, const Matrix& A) {
  const int n = A.rows();
  if (n != A.cols()) return std::nullopt;
  Matrix L = A;
  Matrix R = Matrix::identity(n);
  for (int c = 0; c < n; ++c) {
    int pivot = -1;
    for (int r = c; r < n; ++r) {
      if (L(r, c) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return std::nullopt;
    for (int j = 0; j < n; ++j) {
      std::swap(L(pivot, j), L(c, j));
      std::swap(R(pivot, j), R(c, j));
    }
    const std::uint32_t pinv = F.inv(L(c, c));
    for (int j = 0; j < n; ++j) {
      L(c, j) = static_cast<Code>(F.mul(L(c, j), pinv));
      R(c, j) = static_cast<Code>(F.mul(R(c, j), pinv));
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || L(r, c) == 0) continue;
      const std::uint32_t f = L(r, c);
      for (int j = 0; j < n; ++j) {
        L(r, j) = static_cast<Code>(F.sub(L(r, j), F.mul(f, L(c, j))));
        R(r, j) = static_cast<Code>(F.sub(R(r, j), F.mul(f, R(c, j))));
      }
    }
  }
  return R;
}

inline Matrix inverse_or_throw(const FiniteField& F, const Matrix& A) {
  auto inv = inverse(F, A);
  if (!inv) fail(ErrorCode::SingularTarget, "matrix is not invertible");
  return *inv;
}

// A B A^{-1} B^{-1} given the inverses.
inline Matrix commutator(const FiniteField& F, const Matrix& A, const Matrix& B, const Matrix& Ainv,
                         const Matrix& Binv) {
  return mul(F, mul(F, mul(F, A, B), Ainv), Binv);
}

// Additive commutator AB - BA.
inline Matrix lie_bracket(const FiniteField& F, const Matrix& A, const Matrix& B) {
  return sub(F, mul(F, A, B), mul(F, B, A));
}

inline Matrix companion(const FiniteField& F, const FieldPoly& f) {
  const int d = poly::degree(f);
  Matrix C(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1;
  for (int i = 0; i < d; ++i) C(i, d - 1) = static_cast<Code>(F.neg(f[i]));
  return C;
}

inline Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  int n = 0;
  for (const auto& b : blocks) n += b.rows();
  Matrix M(n, n);
  int off = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) M(off + i, off + j) = b(i, j);
    off += b.rows();
  }
  return M;
}

inline std::string to_string(const FiniteField& F, const Matrix& A) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < A.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < A.cols(); ++j) os << (j ? ", " : "") << F.to_string({A(i, j)});
    os << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace mat

// ---------------------------------------------------------------------------
// Group orders and enumeration.

inline BigInt gl_order(int n, const FiniteField& F) {
  const BigInt q = F.q();
  const BigInt qn = pow_big(q, static_cast<unsigned>(n));
  BigInt out = 1;
  for (int i = 0; i < n; ++i) out *= qn - pow_big(q, static_cast<unsigned>(i));
  return out;
}

inline BigInt gl_order(int n, const BigInt& q) {
  const BigInt qn = pow_big(q, static_cast<unsigned>(n));
  BigInt out = 1;
  for (int i = 0; i < n; ++i) out *= qn - pow_big(q, static_cast<unsigned>(i));
  return out;
}

// Streams GL_n(F_q) in row-major lexicographic order (rows compared as base-q
// numbers with the first entry most significant), skipping singular matrices.
// The stream is partitioned by the first row: index i in [0, q^n - 1) selects
// first-row code i + 1, so disjoint index ranges give disjoint sub-streams.
class GlEnumeration {
 public:
  GlEnumeration(int n, FiniteField F, std::uint64_t limit = Limits{}.max_group_order)
      : n_(n), F_(std::move(F)), order_(gl_order(n, F_)) {
    if (n < 1 || n > Matrix::kMaxDim) fail(ErrorCode::InvalidArgument, "GL_n needs 1 <= n <= 4");
    require_within(order_, limit, "enumerating GL_" + std::to_string(n) + "(" + F_.name() + ")");
    row_count_ = 1;
    for (int i = 0; i < n; ++i) row_count_ *= F_.q();
  }

  int n() const { return n_; }
  const FiniteField& field() const { return F_; }
  const BigInt& order() const { return order_; }
  std::uint64_t order_u64() const { return order_.convert_to<std::uint64_t>(); }
  std::uint64_t partition_count() const { return row_count_ - 1; }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for_each_in_range(0, partition_count(), fn);
  }

  template <typename Fn>
  void for_each_in_range(std::uint64_t begin, std::uint64_t end, Fn&& fn) const {
    Matrix M(n_, n_);
    std::vector<Row> basis;
    basis.reserve(n_);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      const Row row = decode(idx + 1);
      basis.clear();
      insert(basis, row);
      write_row(M, 0, row);
      recurse(1, M, basis, fn);
    }
  }

  std::vector<Matrix> materialize() const {
    std::vector<Matrix> out;
    out.reserve(order_u64());
    for_each([&](const Matrix& m) { out.push_back(m); });
    return out;
  }

 private:
  using Row = std::array<std::uint32_t, Matrix::kMaxDim>;

  Row decode(std::uint64_t code) const {
    Row r{};
    for (int j = n_ - 1; j >= 0; --j) {
      r[j] = static_cast<std::uint32_t>(code % F_.q());
      code /= F_.q();
    }
    return r;
  }

  static void write_row(Matrix& M, int i, const Row& r) {
    for (int j = 0; j < M.cols(); ++j) M(i, j) = static_cast<Code>(r[j]);
  }

  // basis is kept in reduced echelon form with unit pivots.
  bool reduce(const std::vector<Row>& basis, Row& v) const {
    for (const Row& b : basis) {
      int pc = 0;
      while (b[pc] == 0) ++pc;
      const std::uint32_t f = v[pc];
      if (f == 0) continue;
      for (int j = 0; j < n_; ++j) v[j] = F_.sub(v[j], F_.mul(f, b[j]));
    }
    for (int j = 0; j < n_; ++j)
      if (v[j] != 0) return true;
    return false;
  }

  void insert(std::vector<Row>& basis, Row v) const {
    reduce(basis, v);
    int pc = 0;
    while (v[pc] == 0) ++pc;
    const std::uint32_t inv = F_.inv(v[pc]);
    for (int j = 0; j < n_; ++j) v[j] = F_.mul(v[j], inv);
    for (Row& b : basis) {
      const std::uint32_t f = b[pc];
      if (f == 0) continue;
      for (int j = 0; j < n_; ++j) b[j] = F_.sub(b[j], F_.mul(f, v[j]));
    }
    basis.push_back(v);
  }

  template <typename Fn>
  void recurse(int level, Matrix& M, std::vector<Row>& basis, Fn& fn) const {
    if (level == n_) {
      fn(static_cast<const Matrix&>(M));
      return;
    }
    for (std::uint64_t code = 0; code < row_count_; ++code) {
      const Row row = decode(code);
      Row probe = row;
      if (!reduce(basis, probe)) continue;
      std::vector<Row> next = basis;
      insert(next, row);
      write_row(M, level, row);
      recurse(level + 1, M, next, fn);
    }
  }

  int n_;
  FiniteField F_;
  BigInt order_;
  std::uint64_t row_count_ = 1;
};

inline std::vector<Matrix> enumerate_gl(int n, const FiniteField& F,
                                        std::uint64_t limit = Limits{}.max_group_order) {
  return GlEnumeration(n, F, limit).materialize();
}

// All rows x cols matrices, indexed by [0, q^(rows*cols)) in row-major
// lexicographic order.
class MatrixSpace {
 public:
  MatrixSpace(int rows, int cols, FiniteField F) : rows_(rows), cols_(cols), F_(std::move(F)) {
    size_ = pow_big(BigInt(F_.q()), static_cast<unsigned>(rows * cols));
  }

  const BigInt& size() const { return size_; }

  Matrix at(std::uint64_t index) const {
    Matrix M(rows_, cols_);
    for (int i = rows_ - 1; i >= 0; --i) {
      for (int j = cols_ - 1; j >= 0; --j) {
        M(i, j) = static_cast<Code>(index % F_.q());
        index /= F_.q();
      }
    }
    return M;
  }

  std::vector<Matrix> materialize(std::uint64_t limit) const {
    require_within(size_, limit, "materializing a matrix space");
    const auto n = size_.convert_to<std::uint64_t>();
    std::vector<Matrix> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(at(i));
    return out;
  }

 private:
  int rows_, cols_;
  FiniteField F_;
  BigInt size_;
};

// ---------------------------------------------------------------------------
// Rational canonical form keys.

// Invariant factors f_1 | f_2 | ... of a square matrix, non-unit ones only,
// packed as [deg, c_0, ..., c_{deg-1}] per factor (monic leading 1 omitted).
class RcfKey {
 public:
  static constexpr int kCapacity = 2 * Matrix::kMaxDim;

  RcfKey() = default;

  explicit RcfKey(const std::vector<FieldPoly>& factors) {
    for (const auto& f : factors) {
      push(static_cast<Code>(poly::degree(f)));
      for (int i = 0; i < poly::degree(f); ++i) push(static_cast<Code>(f[i]));
    }
  }

  std::vector<FieldPoly> factors() const {
    std::vector<FieldPoly> out;
    for (int i = 0; i < size_;) {
      const int d = data_[i++];
      FieldPoly f(d + 1, 1);
      for (int j = 0; j < d; ++j) f[j] = data_[i++];
      out.push_back(std::move(f));
    }
    return out;
  }

  bool operator==(const RcfKey& o) const = default;
  auto operator<=>(const RcfKey& o) const = default;

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ull ^ size_;
    for (int i = 0; i < size_; ++i) h = (h ^ data_[i]) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }

  std::string to_string(const FiniteField& F) const {
    std::string out = "[";
    const auto fs = factors();
    for (std::size_t i = 0; i < fs.size(); ++i) out += (i ? ", " : "") + poly::to_string(F, fs[i]);
    return out + "]";
  }

 private:
  void push(Code c) {
    if (size_ >= kCapacity) fail(ErrorCode::InvalidArgument, "rcf key overflow");
    data_[size_++] = c;
  }

  std::uint8_t size_ = 0;
  std::array<Code, kCapacity> data_{};
};

struct RcfKeyHash {
  std::size_t operator()(const RcfKey& k) const { return k.hash(); }
};

namespace detail {

// Smith normal form of xI - M over F_q[x]; returns the non-unit monic diagonal.
inline std::vector<FieldPoly> smith_invariant_factors(const FiniteField& F, const Matrix& M) {
  const int n = M.rows();
  std::vector<std::vector<FieldPoly>> A(n, std::vector<FieldPoly>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      FieldPoly e{F.neg(M(i, j))};
      if (i == j) e.push_back(1);
      poly::trim(e);
      A[i][j] = std::move(e);
    }
  }
  auto row_axpy = [&](int dst, int src, const FieldPoly& factor, int from) {
    for (int c = from; c < n; ++c) A[dst][c] = poly::sub(F, A[dst][c], poly::mul(F, factor, A[src][c]));
  };
  auto col_axpy = [&](int dst, int src, const FieldPoly& factor, int from) {
    for (int r = from; r < n; ++r) A[r][dst] = poly::sub(F, A[r][dst], poly::mul(F, factor, A[r][src]));
  };

  for (int k = 0; k < n; ++k) {
    while (true) {
      int bi = -1, bj = -1;
      for (int i = k; i < n; ++i)
        for (int j = k; j < n; ++j)
          if (!A[i][j].empty() && (bi < 0 || A[i][j].size() < A[bi][bj].size())) {
            bi = i;
            bj = j;
          }
      if (bi < 0) break;
      std::swap(A[k], A[bi]);
      for (int r = 0; r < n; ++r) std::swap(A[r][k], A[r][bj]);

      bool clean = true;
      for (int i = k + 1; i < n; ++i) {
        if (A[i][k].empty()) continue;
        auto [quot, rem] = poly::divmod(F, A[i][k], A[k][k]);
        row_axpy(i, k, quot, k);
        if (!rem.empty()) clean = false;
      }
      for (int j = k + 1; j < n; ++j) {
        if (A[k][j].empty()) continue;
        auto [quot, rem] = poly::divmod(F, A[k][j], A[k][k]);
        col_axpy(j, k, quot, k);
        if (!rem.empty()) clean = false;
      }
      if (!clean) continue;

      int bad = -1;
      for (int i = k + 1; i < n && bad < 0; ++i)
        for (int j = k + 1; j < n; ++j)
          if (!poly::mod(F, A[i][j], A[k][k]).empty()) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      for (int c = k; c < n; ++c) A[k][c] = poly::add(F, A[k][c], A[bad][c]);
    }
  }

  std::vector<FieldPoly> out;
  for (int k = 0; k < n; ++k) {
    FieldPoly d = poly::monic(F, A[k][k]);
    if (poly::degree(d) >= 1) out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const FieldPoly& a, const FieldPoly& b) { return a.size() < b.size(); });
  return out;
}

}  // namespace detail

inline std::vector<FieldPoly> invariant_factors(const FiniteField& F, const Matrix& M) {
  if (!M.square()) fail(ErrorCode::InvalidArgument, "invariant factors need a square matrix");
  const int n = M.rows();
  if (n == 1) return {FieldPoly{F.neg(M(0, 0)), 1}};
  if (n == 2) {
    if (M(0, 1) == 0 && M(1, 0) == 0 && M(0, 0) == M(1, 1)) {
      const FieldPoly lin{F.neg(M(0, 0)), 1};
      return {lin, lin};
    }
    const std::uint32_t tr = F.add(M(0, 0), M(1, 1));
    const std::uint32_t dt = F.sub(F.mul(M(0, 0), M(1, 1)), F.mul(M(0, 1), M(1, 0)));
    return {FieldPoly{dt, F.neg(tr), 1}};
  }
  return detail::smith_invariant_factors(F, M);
}

// Conjugacy invariant: two matrices are conjugate in GL_n iff their keys agree.
inline RcfKey rcf_key(const FiniteField& F, const Matrix& M) { return RcfKey(invariant_factors(F, M)); }

// The rational canonical form built from invariant factors.
inline Matrix rational_canonical_form(const FiniteField& F, const std::vector<FieldPoly>& factors) {
  std::vector<Matrix> blocks;
  for (const auto& f : factors) blocks.push_back(mat::companion(F, f));
  return mat::block_diagonal(blocks);
}

}  // namespace charvar

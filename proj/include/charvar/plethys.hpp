#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "charvar/charcount.hpp"
#include "charvar/exactq.hpp"

namespace charvar {

// Values of a q-dependent coefficient at q = p, p^2, ..., p^J. A constant
// tower carries one value valid at every depth.
class NumericTower {
 public:
  NumericTower() : NumericTower(BigRational(0)) {}
  NumericTower(int c) : NumericTower(BigRational(c)) {}  // NOLINT(google-explicit-constructor)
  NumericTower(const BigRational& c) : values_{c}, constant_(true) {}  // NOLINT(google-explicit-constructor)
  NumericTower(BigInt p, std::vector<BigRational> values) : p_(std::move(p)), values_(std::move(values)) {
    if (values_.empty()) fail(ErrorCode::InvalidArgument, "numeric tower needs at least one value");
  }

  bool is_constant() const { return constant_; }
  const BigInt& p() const { return p_; }
  int depth() const { return constant_ ? INT_MAX : static_cast<int>(values_.size()); }
  const std::vector<BigRational>& values() const { return values_; }

  // Value at q = p^j.
  const BigRational& at(int j) const {
    if (constant_) return values_.front();
    if (j < 1 || j > depth()) fail(ErrorCode::TowerTooShallow, "tower has no value at q = p^" + std::to_string(j));
    return values_[static_cast<std::size_t>(j - 1)];
  }
  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](const BigRational& v) { return v == 0; });
  }

  // psi_k: the value at q = p^j becomes the old value at p^{kj}, for j <= depth.
  NumericTower adams(int k, int target_depth) const {
    if (constant_) return *this;
    if (static_cast<long long>(k) * target_depth > depth())
      fail(ErrorCode::TowerTooShallow, "Adams operation psi_" + std::to_string(k) + " to depth " +
                                           std::to_string(target_depth) + " needs q = p^" +
                                           std::to_string(k * target_depth) + " but the tower stops at p^" +
                                           std::to_string(depth()));
    std::vector<BigRational> out;
    for (int j = 1; j <= target_depth; ++j) out.push_back(at(k * j));
    return NumericTower(p_, std::move(out));
  }

  friend NumericTower operator+(const NumericTower& a, const NumericTower& b) {
    return combine(a, b, [](const BigRational& x, const BigRational& y) { return x + y; });
  }
  friend NumericTower operator-(const NumericTower& a, const NumericTower& b) {
    return combine(a, b, [](const BigRational& x, const BigRational& y) { return x - y; });
  }
  friend NumericTower operator*(const NumericTower& a, const NumericTower& b) {
    return combine(a, b, [](const BigRational& x, const BigRational& y) { return x * y; });
  }
  NumericTower operator-() const {
    NumericTower r = *this;
    for (auto& v : r.values_) v = -v;
    return r;
  }
  NumericTower& operator+=(const NumericTower& o) { return *this = *this + o; }
  NumericTower& operator-=(const NumericTower& o) { return *this = *this - o; }
  NumericTower& operator*=(const NumericTower& o) { return *this = *this * o; }

  // Equal on every depth both towers carry.
  friend bool operator==(const NumericTower& a, const NumericTower& b) {
    if (a.constant_ && b.constant_) return a.values_.front() == b.values_.front();
    const int d = std::min(a.depth(), b.depth());
    if (!a.constant_ && !b.constant_ && a.p_ != b.p_) return false;
    for (int j = 1; j <= d; ++j)
      if (a.at(j) != b.at(j)) return false;
    return true;
  }

  std::string to_string() const {
    if (constant_) return to_decimal(values_.front());
    std::string out = "[";
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) out += ", ";
      out += "q=" + to_decimal(pow_big(p_, static_cast<unsigned>(i + 1))) + ": " + to_decimal(values_[i]);
    }
    return out + "]";
  }

 private:
  template <typename Op>
  static NumericTower combine(const NumericTower& a, const NumericTower& b, Op op) {
    if (a.constant_ && b.constant_) return NumericTower(op(a.values_.front(), b.values_.front()));
    if (!a.constant_ && !b.constant_ && a.p_ != b.p_)
      fail(ErrorCode::InvalidArgument, "numeric towers over different primes");
    const int d = std::min(a.depth(), b.depth());
    std::vector<BigRational> out;
    for (int j = 1; j <= d; ++j) out.push_back(op(a.at(j), b.at(j)));
    return NumericTower(a.constant_ ? b.p_ : a.p_, std::move(out));
  }

  BigInt p_ = 0;
  std::vector<BigRational> values_;
  bool constant_ = false;
};

inline RatFunc adams_coefficient(const RatFunc& c, int k, int /*depth*/) { return c.adams(k); }
inline NumericTower adams_coefficient(const NumericTower& c, int k, int depth) { return c.adams(k, depth); }
inline bool coefficient_is_zero(const RatFunc& c) { return c.is_zero(); }
inline bool coefficient_is_zero(const NumericTower& c) { return c.is_zero(); }
inline std::string coefficient_string(const RatFunc& c) { return c.to_string(); }
inline std::string coefficient_string(const NumericTower& c) { return c.to_string(); }

// Power series in x truncated after x^N.
template <typename C>
class TruncSeries {
 public:
  explicit TruncSeries(int N) : coeffs_(static_cast<std::size_t>(check(N)) + 1, C(0)) {}
  TruncSeries(int N, std::vector<C> coeffs) : TruncSeries(N) {
    for (std::size_t i = 0; i < coeffs.size() && i < coeffs_.size(); ++i) coeffs_[i] = std::move(coeffs[i]);
  }

  static TruncSeries one(int N) {
    TruncSeries r(N);
    r[0] = C(1);
    return r;
  }
  static TruncSeries monomial(int N, int degree, C c) {
    TruncSeries r(N);
    if (degree <= N) r[degree] = std::move(c);
    return r;
  }

  int truncation() const { return static_cast<int>(coeffs_.size()) - 1; }
  C& operator[](int n) { return coeffs_.at(static_cast<std::size_t>(n)); }
  const C& operator[](int n) const { return coeffs_.at(static_cast<std::size_t>(n)); }
  const std::vector<C>& coeffs() const { return coeffs_; }

  friend TruncSeries operator+(TruncSeries a, const TruncSeries& b) {
    same_truncation(a, b);
    for (int i = 0; i <= a.truncation(); ++i) a[i] = a[i] + b[i];
    return a;
  }
  friend TruncSeries operator-(TruncSeries a, const TruncSeries& b) {
    same_truncation(a, b);
    for (int i = 0; i <= a.truncation(); ++i) a[i] = a[i] - b[i];
    return a;
  }
  friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
    same_truncation(a, b);
    const int N = a.truncation();
    TruncSeries r(N);
    for (int i = 0; i <= N; ++i) {
      if (coefficient_is_zero(a[i])) continue;
      for (int j = 0; i + j <= N; ++j)
        if (!coefficient_is_zero(b[j])) r[i + j] = r[i + j] + a[i] * b[j];
    }
    return r;
  }
  TruncSeries scale(const C& c) const {
    TruncSeries r = *this;
    for (auto& v : r.coeffs_) v = v * c;
    return r;
  }
  friend bool operator==(const TruncSeries& a, const TruncSeries& b) { return a.coeffs_ == b.coeffs_; }

  std::string to_string() const {
    std::string out;
    for (int i = 0; i <= truncation(); ++i) {
      if (coefficient_is_zero(coeffs_[i])) continue;
      if (!out.empty()) out += " + ";
      out += "(" + coefficient_string(coeffs_[i]) + ")";
      if (i > 0) out += i == 1 ? "*x" : "*x^" + std::to_string(i);
    }
    return out.empty() ? "0" : out + " + O(x^" + std::to_string(truncation() + 1) + ")";
  }

 private:
  static int check(int N) {
    if (N < 0) fail(ErrorCode::InvalidArgument, "truncation must be nonnegative");
    return N;
  }
  static void same_truncation(const TruncSeries& a, const TruncSeries& b) {
    if (a.truncation() != b.truncation()) fail(ErrorCode::InvalidArgument, "series truncated at different orders");
  }

  std::vector<C> coeffs_;
};

// x^d -> x^{kd}, q -> q^k.
template <typename C>
TruncSeries<C> adams(const TruncSeries<C>& f, int k) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "Adams index must be at least 1");
  const int N = f.truncation();
  TruncSeries<C> r(N);
  if (!coefficient_is_zero(f[0])) r[0] = adams_coefficient(f[0], k, 1);
  for (int d = 1; k * d <= N; ++d)
    if (!coefficient_is_zero(f[d])) r[k * d] = adams_coefficient(f[d], k, N / (k * d));
  return r;
}

namespace detail {

inline int mobius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    result = -result;
  }
  return n > 1 ? -result : result;
}

template <typename C>
C rational_coefficient(const BigRational& r) {
  return C(r);
}

// exp of a series with zero constant term: n E_n = sum_m m P_m E_{n-m}.
template <typename C>
TruncSeries<C> series_exp(const TruncSeries<C>& P) {
  const int N = P.truncation();
  TruncSeries<C> E = TruncSeries<C>::one(N);
  for (int n = 1; n <= N; ++n) {
    C acc(0);
    for (int m = 1; m <= n; ++m)
      if (!coefficient_is_zero(P[m])) acc = acc + P[m] * E[n - m] * C(m);
    E[n] = acc * rational_coefficient<C>(BigRational(1, n));
  }
  return E;
}

// log of a series with constant term 1: n L_n = n f_n - sum_{m<n} m L_m f_{n-m}.
template <typename C>
TruncSeries<C> series_log(const TruncSeries<C>& f) {
  const int N = f.truncation();
  TruncSeries<C> L(N);
  for (int n = 1; n <= N; ++n) {
    C acc = f[n] * C(n);
    for (int m = 1; m < n; ++m)
      if (!coefficient_is_zero(L[m])) acc = acc - L[m] * f[n - m] * C(m);
    L[n] = acc * rational_coefficient<C>(BigRational(1, n));
  }
  return L;
}

}  // namespace detail

// Exp(f) = exp(sum_k psi_k(f) / k).
template <typename C>
TruncSeries<C> pleth_exp(const TruncSeries<C>& f) {
  if (!coefficient_is_zero(f[0])) fail(ErrorCode::NonzeroConstantTerm, "Exp needs a series without constant term");
  const int N = f.truncation();
  TruncSeries<C> P(N);
  for (int k = 1; k <= N; ++k) P = P + adams(f, k).scale(detail::rational_coefficient<C>(BigRational(1, k)));
  return detail::series_exp(P);
}

// Inverse of Exp: sum_k mu(k)/k psi_k(log f).
template <typename C>
TruncSeries<C> pleth_log(const TruncSeries<C>& f) {
  if (!(f[0] == C(1))) fail(ErrorCode::BadConstantTerm, "Log needs a series with constant term 1");
  const int N = f.truncation();
  const TruncSeries<C> L = detail::series_log(f);
  TruncSeries<C> out(N);
  for (int k = 1; k <= N; ++k) {
    const int mu = detail::mobius(k);
    if (mu == 0) continue;
    out = out + adams(L, k).scale(detail::rational_coefficient<C>(BigRational(mu, k)));
  }
  return out;
}

enum class Side { Twisted, Untwisted };

inline std::string_view to_string(Side s) { return s == Side::Twisted ? "twisted" : "untwisted"; }

template <typename C>
struct ESeries {
  int g = 1;
  Side side = Side::Twisted;
  TruncSeries<C> terms{0};
};

// Solution counts T_n (twisted) or U_n (untwisted) as polynomials in q.
using PolynomialCounts = std::map<int, LaurentPoly>;

// Solution counts over GF(p^j), keyed by (n, j).
struct TowerCounts {
  std::uint32_t p = 2;
  std::map<std::pair<int, int>, BigInt> counts;
};

// a_n = q^{(1-g) n^2} T_n / |GL_n|, b_0 = 1.
inline ESeries<RatFunc> assemble_eseries(Side side, int g, int N, const PolynomialCounts& counts) {
  ESeries<RatFunc> e{g, side, TruncSeries<RatFunc>(N)};
  if (side == Side::Untwisted) e.terms[0] = RatFunc(1);
  for (int n = 1; n <= N; ++n) {
    auto it = counts.find(n);
    if (it == counts.end()) fail(ErrorCode::MissingCounts, "no count polynomial for n = " + std::to_string(n));
    e.terms[n] = RatFunc(it->second.shift((1 - g) * n * n), gl_order_poly(n));
  }
  return e;
}

inline ESeries<NumericTower> assemble_eseries(Side side, int g, int N, const TowerCounts& counts) {
  ESeries<NumericTower> e{g, side, TruncSeries<NumericTower>(N)};
  if (side == Side::Untwisted) e.terms[0] = NumericTower(1);
  const BigInt p = counts.p;
  for (int n = 1; n <= N; ++n) {
    std::vector<BigRational> values;
    for (int j = 1; j <= N / n; ++j) {
      auto it = counts.counts.find({n, j});
      if (it == counts.counts.end())
        fail(ErrorCode::MissingCounts, "no count for n = " + std::to_string(n) + " over GF(p^" + std::to_string(j) + ")");
      const BigInt q = pow_big(p, static_cast<unsigned>(j));
      const int shift = (1 - g) * n * n;
      const BigRational weight = shift >= 0 ? BigRational(pow_big(q, static_cast<unsigned>(shift)))
                                            : BigRational(1) / BigRational(pow_big(q, static_cast<unsigned>(-shift)));
      values.push_back(weight * BigRational(it->second) / BigRational(gl_order(n, q)));
    }
    e.terms[n] = NumericTower(p, std::move(values));
  }
  return e;
}

struct LabeledValue {
  std::string at;  // empty for symbolic values, otherwise the q value
  std::string value;
};

struct DegreeCheck {
  int degree = 0;
  std::vector<LabeledValue> lhs;
  std::vector<LabeledValue> rhs;
  bool pass = false;
};

struct VerificationReport {
  int g = 1;
  int N = 0;
  std::string mode;
  std::vector<DegreeCheck> degrees;

  bool pass() const {
    return std::all_of(degrees.begin(), degrees.end(), [](const DegreeCheck& d) { return d.pass; });
  }
};

namespace detail {

inline std::vector<LabeledValue> labeled(const RatFunc& c) { return {{"", c.to_string()}}; }

inline std::vector<LabeledValue> labeled(const NumericTower& c, int depth) {
  if (c.is_constant()) {
    std::vector<LabeledValue> out;
    for (int j = 1; j <= depth; ++j) out.push_back({"p^" + std::to_string(j), to_decimal(c.at(1))});
    return out;
  }
  std::vector<LabeledValue> out;
  for (int j = 1; j <= std::min(depth, c.depth()); ++j)
    out.push_back({to_decimal(pow_big(c.p(), static_cast<unsigned>(j))), to_decimal(c.at(j))});
  return out;
}

}  // namespace detail

// Compares Exp(sum a_n x^n) with 1 + sum b_n x^n degree by degree.
template <typename C>
VerificationReport verify_exp_identity(const ESeries<C>& twisted, const ESeries<C>& untwisted) {
  if (twisted.side != Side::Twisted || untwisted.side != Side::Untwisted)
    fail(ErrorCode::InvalidArgument, "verify_exp_identity takes a twisted and an untwisted series");
  if (twisted.g != untwisted.g) fail(ErrorCode::InvalidArgument, "series of different genus");
  const int N = twisted.terms.truncation();
  const TruncSeries<C> lhs = pleth_exp(twisted.terms);
  VerificationReport report;
  report.g = twisted.g;
  report.N = N;
  for (int n = 0; n <= N; ++n) {
    DegreeCheck d;
    d.degree = n;
    d.pass = lhs[n] == untwisted.terms[n];
    if constexpr (std::is_same_v<C, NumericTower>) {
      const int depth = n == 0 ? 1 : N / n;
      d.lhs = detail::labeled(lhs[n], depth);
      d.rhs = detail::labeled(untwisted.terms[n], depth);
    } else {
      d.lhs = detail::labeled(lhs[n]);
      d.rhs = detail::labeled(untwisted.terms[n]);
    }
    report.degrees.push_back(std::move(d));
  }
  return report;
}

namespace detail {

inline RootOfUnity pick_root(const FiniteField& F, int n, std::size_t root_index) {
  const auto roots = primitive_roots_of_unity(F, static_cast<unsigned>(n));
  if (roots.empty())
    fail(ErrorCode::NoRootOfUnity, F.name() + " has no primitive " + std::to_string(n) + "-th root of unity");
  return roots[root_index % roots.size()];
}

}  // namespace detail

struct PolynomialModeOptions {
  std::vector<std::uint32_t> primes;
  std::optional<std::uint32_t> holdout;
  std::size_t root_index = 0;
  Limits limits;
};

struct PolynomialModeResult {
  PolynomialCounts twisted;
  PolynomialCounts untwisted;
  ESeries<RatFunc> a;
  ESeries<RatFunc> b;
  VerificationReport report;
};

// Interpolates T_n and U_n from counts at the given primes, then verifies.
inline PolynomialModeResult verify_exp_identity_polynomial(int g, int N, const PolynomialModeOptions& opts) {
  PolynomialModeResult out;
  for (int n = 1; n <= N; ++n) {
    InterpolationProblem tw, un;
    tw.degree_bound = un.degree_bound = degree_bound_for(n, g);
    for (std::uint32_t p : opts.primes) {
      const auto F = field_create(p);
      tw.samples.push_back(
          {p, numerator_of(twisted_count(n, g, F, opts.limits, detail::pick_root(F, n, opts.root_index)).value)});
      un.samples.push_back({p, numerator_of(untwisted_count(n, g, F, opts.limits).value)});
    }
    if (opts.holdout) {
      const auto F = field_create(*opts.holdout);
      tw.holdout = Sample{
          *opts.holdout, numerator_of(twisted_count(n, g, F, opts.limits, detail::pick_root(F, n, opts.root_index)).value)};
      un.holdout = Sample{*opts.holdout, numerator_of(untwisted_count(n, g, F, opts.limits).value)};
    }
    out.twisted[n] = interpolate(tw);
    out.untwisted[n] = interpolate(un);
  }
  out.a = assemble_eseries(Side::Twisted, g, N, out.twisted);
  out.b = assemble_eseries(Side::Untwisted, g, N, out.untwisted);
  out.report = verify_exp_identity(out.a, out.b);
  out.report.mode = "polynomial";
  return out;
}

struct NumericModeOptions {
  std::uint32_t p = 3;
  std::size_t root_index = 0;
  Limits limits;
};

struct NumericModeResult {
  TowerCounts twisted;
  TowerCounts untwisted;
  ESeries<NumericTower> a;
  ESeries<NumericTower> b;
  VerificationReport report;
};

// Counts over GF(p^j) for every n j <= N, then verifies.
inline NumericModeResult verify_exp_identity_numeric(int g, int N, const NumericModeOptions& opts) {
  NumericModeResult out;
  out.twisted.p = out.untwisted.p = opts.p;
  for (int n = 1; n <= N; ++n)
    for (int j = 1; n * j <= N; ++j) {
      const auto F = field_create(opts.p, static_cast<std::uint32_t>(j));
      out.twisted.counts[{n, j}] =
          numerator_of(twisted_count(n, g, F, opts.limits, detail::pick_root(F, n, opts.root_index)).value);
      out.untwisted.counts[{n, j}] = numerator_of(untwisted_count(n, g, F, opts.limits).value);
    }
  out.a = assemble_eseries(Side::Twisted, g, N, out.twisted);
  out.b = assemble_eseries(Side::Untwisted, g, N, out.untwisted);
  out.report = verify_exp_identity(out.a, out.b);
  out.report.mode = "numeric";
  return out;
}

}  // namespace charvar

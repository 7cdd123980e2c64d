#pragma once

// Conjugacy-class tables of GL_n(F_q) and integer-valued class functions.
//
// Class functions are stored per representative. Counting the equation
// prod [A_i, B_i] = z reduces to g-fold convolution of the commutator
// distribution f_1(z) = #{(A, B) : A B A^-1 B^-1 = z}.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "charvar/bigint.hpp"
#include "charvar/config.hpp"
#include "charvar/error.hpp"
#include "charvar/ffield.hpp"

namespace charvar {

struct ConjClass {
  Matrix representative;
  RcfKey key;
  BigInt size;
  BigInt centralizer_order;
};

class ConjClassTable {
 public:
  ConjClassTable(int n, FiniteField F) : n_(n), F_(std::move(F)), group_order_(gl_order(n, F_)) {}

  int n() const { return n_; }
  const FiniteField& field() const { return F_; }
  const BigInt& group_order() const { return group_order_; }
  const std::vector<ConjClass>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }

  std::optional<std::size_t> find(const RcfKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t class_of(const Matrix& M) const {
    auto idx = find(rcf_key(F_, M));
    if (!idx) fail(ErrorCode::InvalidArgument, "matrix is not in any class of the table");
    return *idx;
  }

  std::size_t add_class(ConjClass c) {
    const std::size_t idx = classes_.size();
    index_.emplace(c.key, idx);
    classes_.push_back(std::move(c));
    return idx;
  }

  ConjClass& at(std::size_t i) { return classes_[i]; }

 private:
  int n_;
  FiniteField F_;
  BigInt group_order_;
  std::vector<ConjClass> classes_;
  std::unordered_map<RcfKey, std::size_t, RcfKeyHash> index_;
};

using ClassTablePtr = std::shared_ptr<const ConjClassTable>;

class ClassFunction {
 public:
  ClassFunction(ClassTablePtr table, std::vector<BigInt> values) : table_(std::move(table)), values_(std::move(values)) {
    if (values_.size() != table_->size()) fail(ErrorCode::TableMismatch, "class function length differs from table");
  }

  static ClassFunction constant(ClassTablePtr table, const BigInt& v) {
    const std::size_t n = table->size();
    return ClassFunction(std::move(table), std::vector<BigInt>(n, v));
  }

  // 1 on the class of the identity, 0 elsewhere.
  static ClassFunction delta_identity(ClassTablePtr table) {
    std::vector<BigInt> v(table->size(), 0);
    v[table->class_of(Matrix::identity(table->n()))] = 1;
    return ClassFunction(std::move(table), std::move(v));
  }

  const ClassTablePtr& table() const { return table_; }
  const std::vector<BigInt>& values() const { return values_; }
  const BigInt& operator[](std::size_t i) const { return values_[i]; }
  const BigInt& at(const Matrix& M) const { return values_[table_->class_of(M)]; }

  // Sum over all group elements (per-representative value times class size).
  BigInt total() const {
    BigInt s = 0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * table_->classes()[i].size;
    return s;
  }

  bool operator==(const ClassFunction& o) const { return values_ == o.values_; }

 private:
  ClassTablePtr table_;
  std::vector<BigInt> values_;
};

// Single pass over GL_n(F_q): bucket by rcf key, first-seen element represents
// its class.
inline ClassTablePtr build_class_table(int n, const FiniteField& F, const Limits& limits = {}) {
  const GlEnumeration group(n, F, limits.max_group_order);
  auto table = std::make_shared<ConjClassTable>(n, F);
  std::vector<std::uint64_t> sizes;
  group.for_each([&](const Matrix& M) {
    const RcfKey key = rcf_key(F, M);
    if (auto idx = table->find(key)) {
      ++sizes[*idx];
    } else {
      table->add_class({M, key, 0, 0});
      sizes.push_back(1);
    }
  });
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    table->at(i).size = sizes[i];
    table->at(i).centralizer_order = group.order() / sizes[i];
  }
  return table;
}

namespace detail {

inline std::vector<std::vector<int>> partitions_of(int s) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      cur.push_back(part);
      self(self, remaining - part, part);
      cur.pop_back();
    }
  };
  rec(rec, s, s);
  return out;
}

// |centralizer| of the unipotent-type block with partition lambda over a field
// of order Q: Q^{sum (lambda'_i)^2 - sum_i m_i(m_i+1)/2} prod_i prod_{k<=m_i} (Q^k - 1).
inline BigInt centralizer_factor(const std::vector<int>& lambda, const BigInt& Q) {
  std::vector<int> conj(lambda.empty() ? 0 : lambda.front(), 0);
  std::unordered_map<int, int> mult;
  for (int part : lambda) {
    ++mult[part];
    for (int i = 0; i < part; ++i) ++conj[i];
  }
  long exponent = 0;
  for (int c : conj) exponent += static_cast<long>(c) * c;
  BigInt prod = 1;
  for (const auto& [part, m] : mult) {
    exponent -= static_cast<long>(m) * (m + 1) / 2;
    for (int k = 1; k <= m; ++k) prod *= pow_big(Q, static_cast<unsigned>(k)) - 1;
  }
  return pow_big(Q, static_cast<unsigned>(exponent)) * prod;
}

}  // namespace detail

// Builds the same table without touching group elements: classes are indexed
// by assignments of partitions to monic irreducibles phi != x with
// sum deg(phi) |lambda_phi| = n; representatives are rational canonical forms.
inline ClassTablePtr class_table_from_types(int n, const FiniteField& F) {
  if (n < 1 || n > Matrix::kMaxDim) fail(ErrorCode::InvalidArgument, "GL_n needs 1 <= n <= 4");
  struct Irr {
    FieldPoly poly;
    int degree;
  };
  std::vector<Irr> irr;
  for (int d = 1; d <= n; ++d)
    for (auto& f : poly::irreducibles(F, d)) irr.push_back({std::move(f), d});

  std::vector<std::vector<std::vector<int>>> parts(n + 1);
  for (int s = 1; s <= n; ++s) parts[s] = detail::partitions_of(s);

  auto table = std::make_shared<ConjClassTable>(n, F);
  const BigInt q = F.q();
  std::vector<std::pair<std::size_t, const std::vector<int>*>> chosen;

  auto emit = [&] {
    std::size_t depth = 0;
    for (const auto& [i, lambda] : chosen) depth = std::max(depth, lambda->size());
    std::vector<FieldPoly> factors(depth, FieldPoly{1});
    BigInt centralizer = 1;
    for (const auto& [i, lambda] : chosen) {
      for (std::size_t r = 0; r < lambda->size(); ++r) {
        FieldPoly power{1};
        for (int e = 0; e < (*lambda)[r]; ++e) power = poly::mul(F, power, irr[i].poly);
        // Largest parts go to the last invariant factor.
        factors[depth - 1 - r] = poly::mul(F, factors[depth - 1 - r], power);
      }
      centralizer *= detail::centralizer_factor(*lambda, pow_big(q, static_cast<unsigned>(irr[i].degree)));
    }
    const Matrix rep = rational_canonical_form(F, factors);
    table->add_class({rep, RcfKey(factors), table->group_order() / centralizer, centralizer});
  };

  auto rec = [&](auto&& self, std::size_t start, int remaining) -> void {
    if (remaining == 0) {
      emit();
      return;
    }
    for (std::size_t i = start; i < irr.size(); ++i) {
      const int d = irr[i].degree;
      for (int s = 1; s * d <= remaining; ++s) {
        for (const auto& lambda : parts[s]) {
          chosen.emplace_back(i, &lambda);
          self(self, i + 1, remaining - s * d);
          chosen.pop_back();
        }
      }
    }
  };
  rec(rec, 0, n);
  return table;
}

namespace detail {

template <typename PerElement>
BigInt sum_over_group(const ConjClassTable& T, const Limits& limits, PerElement per_element) {
  const GlEnumeration group(T.n(), T.field(), limits.max_group_order);
  auto partial = parallel_chunks<BigInt>(group.partition_count(), limits.workers,
                                         [&](std::uint64_t begin, std::uint64_t end) {
                                           BigInt acc = 0;
                                           group.for_each_in_range(begin, end, [&](const Matrix& x) {
                                             per_element(x, acc);
                                           });
                                           return acc;
                                         });
  BigInt total = 0;
  for (auto& v : partial) total += v;
  return total;
}

// f_1(z) = sum over A with A z conjugate to A of |C_G(A)|.
inline BigInt commutator_value(const ConjClassTable& T, const Matrix& z, const Limits& limits) {
  const FiniteField& F = T.field();
  return sum_over_group(T, limits, [&](const Matrix& A, BigInt& acc) {
    const RcfKey key = rcf_key(F, A);
    if (rcf_key(F, mat::mul(F, A, z)) == key) acc += T.classes()[*T.find(key)].centralizer_order;
  });
}

inline BigInt convolution_value(const ClassFunction& f, const ClassFunction& h, const Matrix& z,
                                const Limits& limits) {
  const ConjClassTable& T = *f.table();
  const FiniteField& F = T.field();
  return sum_over_group(T, limits, [&](const Matrix& x, BigInt& acc) {
    const BigInt& fx = f[T.class_of(x)];
    if (fx == 0) return;
    const Matrix rest = mat::mul(F, mat::inverse_or_throw(F, x), z);
    const BigInt& hr = h[T.class_of(rest)];
    if (hr != 0) acc += fx * hr;
  });
}

inline void require_same_table(const ClassFunction& f, const ClassFunction& h) {
  if (f.table() != h.table() &&
      !(f.table()->n() == h.table()->n() && f.table()->field() == h.table()->field() &&
        f.table()->size() == h.table()->size())) {
    fail(ErrorCode::TableMismatch, "class functions live on different class tables");
  }
}

inline Matrix checked_target(const ConjClassTable& T, const Matrix& z) {
  if (z.rows() != T.n() || z.cols() != T.n() || mat::det(T.field(), z).code == 0) {
    fail(ErrorCode::SingularTarget, "target must be an invertible " + std::to_string(T.n()) + "x" +
                                        std::to_string(T.n()) + " matrix");
  }
  return z;
}

}  // namespace detail

// f_1 on every class representative; O(|G| * #classes) canonical forms.
inline ClassFunction commutator_distribution(const ClassTablePtr& T, const Limits& limits = {}) {
  std::vector<BigInt> values;
  values.reserve(T->size());
  for (const auto& c : T->classes()) values.push_back(detail::commutator_value(*T, c.representative, limits));
  return ClassFunction(T, std::move(values));
}

// (f * h)(z) = sum_x f(x) h(x^-1 z) on every class representative.
inline ClassFunction class_convolve(const ClassFunction& f, const ClassFunction& h, const Limits& limits = {}) {
  detail::require_same_table(f, h);
  const auto& T = f.table();
  std::vector<BigInt> values;
  values.reserve(T->size());
  for (const auto& c : T->classes()) values.push_back(detail::convolution_value(f, h, c.representative, limits));
  return ClassFunction(T, std::move(values));
}

// Number of classes C with z C = C, for central z. Only needs the table.
inline std::size_t classes_fixed_by_central(const ConjClassTable& T, FieldElement scalar) {
  const FiniteField& F = T.field();
  std::size_t fixed = 0;
  for (const auto& c : T.classes()) {
    if (rcf_key(F, mat::scale(F, scalar, c.representative)) == c.key) ++fixed;
  }
  return fixed;
}

// #{(A_1, B_1, ..., A_g, B_g) in G^{2g} : prod [A_i, B_i] = z}.
//
// For g = 1 and central z the count is |G| times the number of classes fixed
// by multiplication with z, so no pass over the group is needed; for other
// g = 1 targets a single pass evaluates f_1(z). Higher genus convolves f_1
// (g - 1) times, evaluating the last convolution at z only.
inline BigInt genus_count(const ClassTablePtr& T, int g, const Matrix& z, const Limits& limits = {}) {
  if (g < 1) fail(ErrorCode::InvalidArgument, "genus must be at least 1");
  detail::checked_target(*T, z);
  if (g == 1) {
    if (auto s = z.scalar_value()) return T->group_order() * classes_fixed_by_central(*T, *s);
    return detail::commutator_value(*T, z, limits);
  }
  const ClassFunction f1 = commutator_distribution(T, limits);
  ClassFunction acc = f1;
  for (int i = 2; i < g; ++i) acc = class_convolve(acc, f1, limits);
  return detail::convolution_value(acc, f1, z, limits);
}

}  // namespace charvar

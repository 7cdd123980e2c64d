#pragma once

// Point counts of twisted/untwisted character varieties and stacks over F_q,
// the additive moment-map fibre, the surface-times-circle stack and the
// brute-force oracle that all of them are checked against.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "charvar/bigint.hpp"
#include "charvar/classdata.hpp"
#include "charvar/config.hpp"
#include "charvar/error.hpp"
#include "charvar/ffield.hpp"

namespace charvar {

enum class CountKind {
  TwistedSolutions,
  UntwistedSolutions,
  TwistedVariety,
  TwistedStack,
  UntwistedStack,
  AdditiveMuStack,
  SurfaceCircleStack,
};

inline std::string_view to_string(CountKind kind) {
  switch (kind) {
    case CountKind::TwistedSolutions: return "twisted-solutions";
    case CountKind::UntwistedSolutions: return "untwisted-solutions";
    case CountKind::TwistedVariety: return "twisted-variety";
    case CountKind::TwistedStack: return "twisted-stack";
    case CountKind::UntwistedStack: return "untwisted-stack";
    case CountKind::AdditiveMuStack: return "additive-mu-stack";
    case CountKind::SurfaceCircleStack: return "surface-circle-stack";
  }
  return "unknown";
}

inline std::optional<CountKind> parse_count_kind(std::string_view s) {
  for (auto k : {CountKind::TwistedSolutions, CountKind::UntwistedSolutions, CountKind::TwistedVariety,
                 CountKind::TwistedStack, CountKind::UntwistedStack, CountKind::AdditiveMuStack,
                 CountKind::SurfaceCircleStack}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

struct CountRecord {
  int n = 1;
  int g = 1;
  std::uint32_t p = 2;
  std::uint32_t k = 1;
  CountKind kind = CountKind::UntwistedSolutions;
  BigRational value;

  bool is_solutions() const {
    return kind == CountKind::TwistedSolutions || kind == CountKind::UntwistedSolutions;
  }
};

namespace detail {

inline CountRecord make_record(int n, int g, const FiniteField& F, CountKind kind, BigRational value) {
  return CountRecord{n, g, F.p(), F.k(), kind, std::move(value)};
}

inline void check_shape(int n, int g) {
  if (n < 1 || n > Matrix::kMaxDim) fail(ErrorCode::InvalidArgument, "rank n must lie in [1, 4]");
  if (g < 1) fail(ErrorCode::InvalidArgument, "genus must be at least 1");
}

// Genus-one targets never need the group itself; higher genus convolves over it.
inline ClassTablePtr table_for(int n, int g, const FiniteField& F, const Limits& limits) {
  return g == 1 ? class_table_from_types(n, F) : build_class_table(n, F, limits);
}

}  // namespace detail

// #{(A_i, B_i) in GL_n(F_q)^{2g} : prod [A_i, B_i] = zeta Id} for a primitive
// n-th root zeta; the smallest one by default.
inline CountRecord twisted_count(int n, int g, const FiniteField& F, const Limits& limits = {},
                                 std::optional<RootOfUnity> root = std::nullopt) {
  detail::check_shape(n, g);
  const RootOfUnity zeta = root ? *root : primitive_root_of_unity(F, static_cast<unsigned>(n));
  if (zeta.order != static_cast<unsigned>(n) || F.order(zeta.element) != static_cast<std::uint64_t>(n)) {
    fail(ErrorCode::InvalidArgument, "twisting root must have exact order n");
  }
  const auto table = detail::table_for(n, g, F, limits);
  const BigInt value = genus_count(table, g, Matrix::scalar(n, zeta.element), limits);
  return detail::make_record(n, g, F, CountKind::TwistedSolutions, BigRational(value));
}

inline CountRecord untwisted_count(int n, int g, const FiniteField& F, const Limits& limits = {}) {
  detail::check_shape(n, g);
  const auto table = detail::table_for(n, g, F, limits);
  const BigInt value = genus_count(table, g, Matrix::identity(n), limits);
  return detail::make_record(n, g, F, CountKind::UntwistedSolutions, BigRational(value));
}

// PGL_n acts freely on the twisted solutions, so the quotient count is exact.
inline CountRecord twisted_variety_count(int n, int g, const FiniteField& F, const Limits& limits = {},
                                         std::optional<RootOfUnity> root = std::nullopt) {
  const CountRecord sol = twisted_count(n, g, F, limits, root);
  const BigInt pgl = gl_order(n, F) / (F.q() - 1);
  const BigInt num = numerator_of(sol.value);
  if (num % pgl != 0) {
    fail(ErrorCode::NonIntegralQuotient, "twisted solutions " + num.str() + " not divisible by |PGL_" +
                                             std::to_string(n) + "| = " + pgl.str());
  }
  return detail::make_record(n, g, F, CountKind::TwistedVariety, BigRational(num / pgl));
}

inline CountRecord stack_count(const CountRecord& solutions) {
  if (!solutions.is_solutions()) fail(ErrorCode::InvalidArgument, "stack_count needs a solutions record");
  const FiniteField F = field_create(solutions.p, solutions.k);
  CountRecord out = solutions;
  out.kind = solutions.kind == CountKind::TwistedSolutions ? CountKind::TwistedStack : CountKind::UntwistedStack;
  out.value = solutions.value / BigRational(gl_order(solutions.n, F));
  return out;
}

struct AdditiveTarget {};
using BruteTarget = std::variant<Matrix, AdditiveTarget>;

namespace detail {

struct GroupCache {
  std::vector<Matrix> elems;
  std::vector<Matrix> inverses;
};

inline GroupCache cache_group(int n, const FiniteField& F, const Limits& limits) {
  GroupCache c;
  c.elems = GlEnumeration(n, F, limits.max_group_order).materialize();
  c.inverses.reserve(c.elems.size());
  for (const auto& M : c.elems) c.inverses.push_back(*mat::inverse(F, M));
  return c;
}

// Walks all (A_1, B_1, ..., A_g, B_g) drawn from `pool`, with A_1 restricted to
// pool[begin, end), calling sink(product of commutators).
template <typename Sink>
void walk_commutators(const FiniteField& F, const std::vector<Matrix>& pool, const std::vector<Matrix>& inv,
                      int g, std::uint64_t begin, std::uint64_t end, const Matrix& start, Sink& sink) {
  auto rec = [&](auto&& self, int level, const Matrix& prefix, std::uint64_t lo, std::uint64_t hi) -> void {
    if (level == g) {
      sink(prefix);
      return;
    }
    for (std::uint64_t a = lo; a < hi; ++a) {
      const Matrix pa = mat::mul(F, prefix, pool[a]);
      for (std::uint64_t b = 0; b < pool.size(); ++b) {
        const Matrix next = mat::mul(F, mat::mul(F, mat::mul(F, pa, pool[b]), inv[a]), inv[b]);
        self(self, level + 1, next, 0, pool.size());
      }
    }
  };
  rec(rec, 0, start, begin, end);
}

}  // namespace detail

// Direct nested enumeration; the permanent oracle for every counter above.
inline BigInt brute_force_count(int n, int g, const FiniteField& F, const BruteTarget& target,
                                const Limits& limits = {}) {
  detail::check_shape(n, g);
  if (std::holds_alternative<AdditiveTarget>(target)) {
    const MatrixSpace space(n, n, F);
    require_within(pow_big(space.size(), static_cast<unsigned>(2 * g)), limits.max_iterations,
                   "brute-force additive count");
    const auto all = space.materialize(limits.max_iterations);
    const Matrix zero = Matrix::zero(n, n);
    auto partial = parallel_chunks<std::uint64_t>(all.size(), limits.workers, [&](std::uint64_t begin,
                                                                                    std::uint64_t end) {
      std::uint64_t hits = 0;
      auto rec = [&](auto&& self, int level, const Matrix& acc, std::uint64_t lo, std::uint64_t hi) -> void {
        if (level == g) {
          if (acc == zero) ++hits;
          return;
        }
        for (std::uint64_t a = lo; a < hi; ++a)
          for (const auto& B : all) self(self, level + 1, mat::add(F, acc, mat::lie_bracket(F, all[a], B)), 0, all.size());
      };
      rec(rec, 0, zero, begin, end);
      return hits;
    });
    BigInt total = 0;
    for (auto v : partial) total += v;
    return total;
  }

  const Matrix& z = std::get<Matrix>(target);
  require_within(pow_big(gl_order(n, F), static_cast<unsigned>(2 * g)), limits.max_iterations,
                 "brute-force commutator count");
  const auto group = detail::cache_group(n, F, limits);
  auto partial = parallel_chunks<std::uint64_t>(group.elems.size(), limits.workers, [&](std::uint64_t begin,
                                                                                          std::uint64_t end) {
    std::uint64_t hits = 0;
    auto sink = [&](const Matrix& prod) {
      if (prod == z) ++hits;
    };
    detail::walk_commutators(F, group.elems, group.inverses, g, begin, end, Matrix::identity(n), sink);
    return hits;
  });
  BigInt total = 0;
  for (auto v : partial) total += v;
  return total;
}

// Brute-force tally of prod [A_i, B_i] over all of G^{2g}, keyed by the product.
inline std::unordered_map<Matrix, std::uint64_t, MatrixHash> brute_force_distribution(int n, int g,
                                                                                      const FiniteField& F,
                                                                                      const Limits& limits = {}) {
  detail::check_shape(n, g);
  require_within(pow_big(gl_order(n, F), static_cast<unsigned>(2 * g)), limits.max_iterations,
                 "brute-force commutator distribution");
  const auto group = detail::cache_group(n, F, limits);
  using Tally = std::unordered_map<Matrix, std::uint64_t, MatrixHash>;
  auto partial = parallel_chunks<Tally>(group.elems.size(), limits.workers, [&](std::uint64_t begin,
                                                                                  std::uint64_t end) {
    Tally tally;
    auto sink = [&](const Matrix& prod) { ++tally[prod]; };
    detail::walk_commutators(F, group.elems, group.inverses, g, begin, end, Matrix::identity(n), sink);
    return tally;
  });
  Tally total;
  for (auto& t : partial)
    for (auto& [m, c] : t) total[m] += c;
  return total;
}

// #{(A_j, B_j) in Mat_n(F_q)^{2g} : sum [A_j, B_j] = 0} / |GL_n(F_q)|.
inline CountRecord additive_mu_stack_count(int n, int g, const FiniteField& F, const Limits& limits = {}) {
  const BigInt raw = brute_force_count(n, g, F, AdditiveTarget{}, limits);
  return detail::make_record(n, g, F, CountKind::AdditiveMuStack, BigRational(raw) / BigRational(gl_order(n, F)));
}

// Rank-n points of the surface-times-circle group: (A_i, B_i, C) in GL_n with
// prod [A_i, B_i] = 1 and C commuting with every A_i, B_i, divided by |GL_n|.
// Enumerates C first and restricts the A_i, B_i to its centralizer.
inline CountRecord surface_circle_stack_count(int n, int g, const FiniteField& F, const Limits& limits = {}) {
  detail::check_shape(n, g);
  const auto group = detail::cache_group(n, F, limits);
  const std::uint64_t order = group.elems.size();
  require_within(BigInt(order) * order, limits.max_iterations, "centralizer scan");

  std::vector<std::vector<std::uint32_t>> centralizers(order);
  BigInt iterations = 0;
  for (std::uint64_t c = 0; c < order; ++c) {
    const Matrix& C = group.elems[c];
    for (std::uint64_t a = 0; a < order; ++a) {
      if (mat::mul(F, C, group.elems[a]) == mat::mul(F, group.elems[a], C)) {
        centralizers[c].push_back(static_cast<std::uint32_t>(a));
      }
    }
    iterations += pow_big(BigInt(centralizers[c].size()), static_cast<unsigned>(2 * g));
  }
  require_within(iterations, limits.max_iterations, "surface-circle count");

  const Matrix id = Matrix::identity(n);
  auto partial = parallel_chunks<std::uint64_t>(order, limits.workers, [&](std::uint64_t begin, std::uint64_t end) {
    std::uint64_t hits = 0;
    for (std::uint64_t c = begin; c < end; ++c) {
      std::vector<Matrix> pool, inv;
      for (auto idx : centralizers[c]) {
        pool.push_back(group.elems[idx]);
        inv.push_back(group.inverses[idx]);
      }
      auto sink = [&](const Matrix& prod) {
        if (prod == id) ++hits;
      };
      detail::walk_commutators(F, pool, inv, g, 0, pool.size(), id, sink);
    }
    return hits;
  });
  BigInt raw = 0;
  for (auto v : partial) raw += v;
  return detail::make_record(n, g, F, CountKind::SurfaceCircleStack, BigRational(raw) / BigRational(gl_order(n, F)));
}

// Dispatch on kind; stack and variety kinds derive from the solution counters.
inline CountRecord count(CountKind kind, int n, int g, const FiniteField& F, const Limits& limits = {}) {
  switch (kind) {
    case CountKind::TwistedSolutions: return twisted_count(n, g, F, limits);
    case CountKind::UntwistedSolutions: return untwisted_count(n, g, F, limits);
    case CountKind::TwistedVariety: return twisted_variety_count(n, g, F, limits);
    case CountKind::TwistedStack: return stack_count(twisted_count(n, g, F, limits));
    case CountKind::UntwistedStack: return stack_count(untwisted_count(n, g, F, limits));
    case CountKind::AdditiveMuStack: return additive_mu_stack_count(n, g, F, limits);
    case CountKind::SurfaceCircleStack: return surface_circle_stack_count(n, g, F, limits);
  }
  fail(ErrorCode::InvalidArgument, "unknown count kind");
}

}  // namespace charvar

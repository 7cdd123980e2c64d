#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "charvar/charcount.hpp"
#include "charvar/config.hpp"
#include "charvar/tileforge.hpp"

namespace charvar {

struct RepProblem {
  Quiver quiver;
  std::vector<int> arrows;              // arrows carrying a matrix
  std::vector<Relation> relations;      // imposed as matrix equations
  std::optional<Potential> trace_zero;  // keep only points with tr W = 0
  std::vector<int> gamma;
  FiniteField field = field_create(2);
};

struct AtlasCount {
  BigInt raw;
  BigInt group_order;
  BigRational stack_value;
};

inline RepProblem rep_problem(const Presentation& P, std::vector<int> gamma, const FiniteField& F,
                              bool impose_relations = true) {
  RepProblem r{P.quiver, P.generators, impose_relations ? P.relations : std::vector<Relation>{}, std::nullopt,
               std::move(gamma), F};
  return r;
}

// Atlas dimension sum_a gamma_s gamma_t and stack dimension atlas - sum gamma_i^2.
inline std::pair<int, int> rep_space_dims(const Quiver& Q, const std::vector<int>& gamma) {
  if (gamma.size() != static_cast<std::size_t>(Q.vertices))
    fail(ErrorCode::InvalidArgument, "dimension vector has the wrong length");
  int atlas = 0, gauge = 0;
  for (const auto& a : Q.arrows) atlas += gamma[a.source] * gamma[a.target];
  for (int g : gamma) gauge += g * g;
  return {atlas, atlas - gauge};
}

// -dim/2 of the stack; the shift must be integral.
inline int half_stack_dim(const Quiver& Q, const std::vector<int>& gamma) {
  const int d = rep_space_dims(Q, gamma).second;
  if (d % 2 != 0) fail(ErrorCode::AuditFailure, "stack dimension " + std::to_string(d) + " is odd");
  return -d / 2;
}

namespace detail {

inline Matrix path_matrix(const FiniteField& F, const std::vector<int>& gamma, const std::vector<const Matrix*>& rho,
                          const Word& w, int start) {
  if (w.empty()) return Matrix::identity(gamma[start]);
  Matrix M = *rho[w.front()];
  for (std::size_t i = 1; i < w.size(); ++i) M = mat::mul(F, *rho[w[i]], M);
  return M;
}

inline bool relation_holds(const FiniteField& F, const Quiver& Q, const std::vector<int>& gamma,
                           const std::vector<const Matrix*>& rho, const Relation& r) {
  const Arrow& a = Q.arrows[r.arrow];
  Matrix acc(gamma[a.source], gamma[a.target]);
  for (const auto& t : r.sum) {
    const Matrix M = path_matrix(F, gamma, rho, t.word, a.target);
    const BigInt c = t.coeff % F.p();
    const FieldElement k = F.element(c.convert_to<std::int64_t>());
    acc = mat::add(F, acc, mat::scale(F, k, M));
  }
  return acc.is_zero();
}

inline FieldElement potential_trace(const FiniteField& F, const Quiver& Q, const std::vector<int>& gamma,
                                    const std::vector<const Matrix*>& rho, const Potential& W) {
  std::uint32_t total = 0;
  for (const auto& t : W) {
    if (t.word.empty()) continue;
    const Matrix M = path_matrix(F, gamma, rho, t.word, Q.arrows[t.word.front()].source);
    const std::uint32_t tr = mat::trace(F, M).code;
    total = t.sign > 0 ? F.add(total, tr) : F.sub(total, tr);
  }
  return {total};
}

inline std::vector<Matrix> choices_for(const RepProblem& P, int a, const Limits& limits) {
  const Arrow& arr = P.quiver.arrows[a];
  const int rows = P.gamma[arr.target], cols = P.gamma[arr.source];
  if (P.quiver.invertible[a]) {
    if (rows != cols)
      fail(ErrorCode::InvalidArgument, "localized arrow " + arr.name + " joins vertices of different dimension");
    if (rows == 0) return {Matrix(0, 0)};
    return enumerate_gl(rows, P.field, limits.max_iterations);
  }
  return MatrixSpace(rows, cols, P.field).materialize(limits.max_iterations);
}

}  // namespace detail

inline AtlasCount count_reps(const RepProblem& P, const Limits& limits = {}) {
  const Quiver& Q = P.quiver;
  if (P.gamma.size() != static_cast<std::size_t>(Q.vertices))
    fail(ErrorCode::InvalidArgument, "dimension vector has the wrong length");
  for (int g : P.gamma)
    if (g < 0 || g > Matrix::kMaxDim) fail(ErrorCode::InvalidArgument, "dimensions must lie in [0, 4]");

  std::vector<bool> present(static_cast<std::size_t>(Q.arrow_count()), false);
  for (int a : P.arrows) present.at(static_cast<std::size_t>(a)) = true;
  auto check_word = [&](const Word& w) {
    for (int a : w)
      if (!present[a]) fail(ErrorCode::InvalidArgument, "relation uses arrow " + Q.arrows[a].name + " without a matrix");
  };
  for (const auto& r : P.relations)
    for (const auto& t : r.sum) check_word(t.word);
  if (P.trace_zero)
    for (const auto& t : *P.trace_zero) check_word(t.word);

  BigInt total = 1;
  for (int a : P.arrows) {
    const Arrow& arr = Q.arrows[a];
    const int rows = P.gamma[arr.target], cols = P.gamma[arr.source];
    total *= Q.invertible[a] ? (rows == cols ? gl_order(rows, BigInt(P.field.q())) : BigInt(0))
                             : pow_big(BigInt(P.field.q()), static_cast<unsigned>(rows * cols));
  }
  require_within(total, limits.max_iterations, "representation space enumeration");

  std::vector<std::vector<Matrix>> choices;
  for (int a : P.arrows) choices.push_back(detail::choices_for(P, a, limits));
  const std::uint64_t count = total.convert_to<std::uint64_t>();
  const FiniteField& F = P.field;

  const auto parts = parallel_chunks<std::uint64_t>(count, limits.workers, [&](std::uint64_t begin, std::uint64_t end) {
    std::uint64_t hits = 0;
    if (begin >= end) return hits;
    const std::size_t k = choices.size();
    std::vector<std::size_t> digit(k, 0);
    std::uint64_t rest = begin;
    for (std::size_t i = k; i-- > 0;) {
      digit[i] = rest % choices[i].size();
      rest /= choices[i].size();
    }
    std::vector<const Matrix*> rho(static_cast<std::size_t>(Q.arrow_count()), nullptr);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      for (std::size_t i = 0; i < k; ++i) rho[P.arrows[i]] = &choices[i][digit[i]];
      bool ok = true;
      for (const auto& r : P.relations)
        if (!detail::relation_holds(F, Q, P.gamma, rho, r)) {
          ok = false;
          break;
        }
      if (ok && P.trace_zero) ok = detail::potential_trace(F, Q, P.gamma, rho, *P.trace_zero).code == 0;
      if (ok) ++hits;
      for (std::size_t i = k; i-- > 0;) {
        if (++digit[i] < choices[i].size()) break;
        digit[i] = 0;
      }
    }
    return hits;
  });

  AtlasCount out;
  out.raw = 0;
  for (auto h : parts) out.raw += h;
  out.group_order = 1;
  for (int g : P.gamma) out.group_order *= gl_order(g, BigInt(F.q()));
  out.stack_value = BigRational(out.raw) / BigRational(out.group_order);
  return out;
}

struct CheckReport {
  std::string check;
  nlohmann::json inputs;
  BigRational lhs;
  BigRational rhs;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();
};

inline void require_pass(const CheckReport& r) {
  if (!r.pass)
    fail(ErrorCode::IdentityFailure, r.check + ": lhs " + to_decimal(r.lhs) + " != rhs " + to_decimal(r.rhs));
}

// #{tr W = 0} = q^{d-1} #Y + q^{d-1} (q - 1) #Z with Y the localized non-cut atlas and
// Z its subset where every cut derivative vanishes.
inline CheckReport dimred_count_check(const Quiver& Q, const Potential& W, const Cut& cut, const std::vector<int>& gamma,
                                      const FiniteField& F, const Limits& limits = {}) {
  const Quiver loc = localize_except(Q, cut);
  const Presentation twod = two_dim_jacobi(loc, W, cut);

  RepProblem full{loc, {}, {}, W, gamma, F};
  for (int a = 0; a < Q.arrow_count(); ++a) full.arrows.push_back(a);
  const BigInt f_zero = count_reps(full, limits).raw;
  const BigInt Y = count_reps(rep_problem(twod, gamma, F, false), limits).raw;
  const BigInt Z = count_reps(rep_problem(twod, gamma, F, true), limits).raw;

  int d = 0;
  for (int a : cut.arrows) d += gamma[Q.arrows[a].source] * gamma[Q.arrows[a].target];
  const BigInt q = F.q();
  BigRational rhs;
  if (d == 0) {
    rhs = BigRational(Y);
  } else {
    const BigInt scale = pow_big(q, static_cast<unsigned>(d - 1));
    rhs = BigRational(scale * Y + scale * (q - 1) * Z);
  }

  CheckReport r;
  r.check = "dimred";
  std::vector<std::string> cut_names;
  for (int a : cut.arrows) cut_names.push_back(Q.arrows[a].name);
  r.inputs = {{"cut", cut_names}, {"gamma", gamma}, {"field", F.name()}};
  r.lhs = BigRational(f_zero);
  r.rhs = rhs;
  r.pass = r.lhs == r.rhs;
  r.details = {{"d", d}, {"Y", to_decimal(Y)}, {"Z", to_decimal(Z)}};
  return r;
}

inline Cut first_cut(const Quiver& Q, const Potential& W) {
  const auto cuts = find_cuts(Q, W);
  if (cuts.empty()) fail(ErrorCode::NoCut, "the potential has no cut");
  return cuts.front();
}

// Stack count of the 2d Jacobi algebra at (n, ..., n) against U_{g,n} / |GL_n|.
inline CheckReport morita_count_check(const BraneTiling& T, int n, const FiniteField& F, const Limits& limits = {}) {
  const Quiver Q = dual_quiver(T);
  const Potential W = potential_of(T);
  const Cut cut = first_cut(Q, W);
  const Presentation twod = two_dim_jacobi(localize_except(Q, cut), W, cut);
  const AtlasCount lhs = count_reps(rep_problem(twod, std::vector<int>(static_cast<std::size_t>(Q.vertices), n), F), limits);
  const CountRecord rhs = stack_count(untwisted_count(n, T.genus, F, limits));

  CheckReport r;
  r.check = "morita";
  std::vector<std::string> cut_names;
  for (int a : cut.arrows) cut_names.push_back(Q.arrows[a].name);
  r.inputs = {{"tiling", T.name}, {"n", n}, {"field", F.name()}, {"genus", T.genus}, {"cut", cut_names}};
  r.lhs = lhs.stack_value;
  r.rhs = rhs.value;
  r.pass = r.lhs == r.rhs;
  r.details = {{"raw", to_decimal(lhs.raw)}, {"group_order", to_decimal(lhs.group_order)}};
  return r;
}

// Stack count of the fully localized Jacobi algebra against the surface-times-circle count.
inline CheckReport gtrue_count_check(const BraneTiling& T, int n, const FiniteField& F, const Limits& limits = {}) {
  const Quiver Q = dual_quiver(T);
  const Presentation P = jacobi_presentation(Q, potential_of(T));
  const AtlasCount lhs = count_reps(rep_problem(P, std::vector<int>(static_cast<std::size_t>(Q.vertices), n), F), limits);
  const CountRecord rhs = surface_circle_stack_count(n, T.genus, F, limits);

  CheckReport r;
  r.check = "gtrue";
  r.inputs = {{"tiling", T.name}, {"n", n}, {"field", F.name()}, {"genus", T.genus}};
  r.lhs = lhs.stack_value;
  r.rhs = rhs.value;
  r.pass = r.lhs == r.rhs;
  r.details = {{"raw", to_decimal(lhs.raw)}, {"group_order", to_decimal(lhs.group_order)}};
  return r;
}

}  // namespace charvar

#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "charvar/repscan.hpp"

using namespace charvar;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

bool commute(const FiniteField& F, const Matrix& a, const Matrix& b) { return mat::mul(F, a, b) == mat::mul(F, b, a); }

Quiver non_localized(Quiver Q) {
  std::fill(Q.invertible.begin(), Q.invertible.end(), false);
  return Q;
}

RepProblem bare(const Quiver& Q, std::vector<int> gamma, const FiniteField& F) {
  RepProblem P{Q, {}, {}, std::nullopt, std::move(gamma), F};
  for (int a = 0; a < Q.arrow_count(); ++a) P.arrows.push_back(a);
  return P;
}

}  // namespace

TEST_CASE("count_reps on the three-loop quiver", "[repscan]") {
  const auto hex = corpus::hex_torus();
  const Quiver Q = dual_quiver(hex);
  const auto P = jacobi_presentation(Q, potential_of(hex));
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto F = field_create(q);
    const BigInt cube = pow_big(BigInt(q - 1), 3);
    CHECK(count_reps(rep_problem(P, {1}, F, false)).raw == cube);
    CHECK(count_reps(rep_problem(P, {1}, F, true)).raw == cube);
    CHECK(count_reps(rep_problem(P, {1}, F, true)).stack_value == BigRational(cube, q - 1));
  }

  // Pairwise commuting invertible triples, by plain loops.
  const auto F2 = field_create(2);
  const auto G = enumerate_gl(2, F2);
  std::uint64_t triples = 0;
  for (const auto& x : G)
    for (const auto& y : G)
      for (const auto& z : G)
        if (commute(F2, x, y) && commute(F2, y, z) && commute(F2, z, x)) ++triples;
  const auto c = count_reps(rep_problem(P, {2}, F2));
  CHECK(c.raw == triples);
  CHECK(c.group_order == 6);
}

TEST_CASE("rep_space_dims", "[repscan]") {
  const Quiver three = dual_quiver(corpus::hex_torus());
  for (int n = 0; n <= 3; ++n) CHECK(rep_space_dims(three, {n}) == std::pair<int, int>{3 * n * n, 2 * n * n});
  const Quiver sq = dual_quiver(corpus::square_torus());
  for (int n = 0; n <= 3; ++n) CHECK(rep_space_dims(sq, {n, n}) == std::pair<int, int>{4 * n * n, 2 * n * n});
  CHECK(rep_space_dims(dual_quiver(corpus::genus2()), {0, 0}) == std::pair<int, int>{0, 0});
  CHECK(half_stack_dim(three, {3}) == -9);
  CHECK(code_of([&] { rep_space_dims(sq, {1}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("unconstrained counts match closed forms", "[repscan][property]") {
  const Quiver sq = dual_quiver(corpus::square_torus());
  const Quiver three = dual_quiver(corpus::hex_torus());
  for (std::uint32_t q : {2u, 3u}) {
    const auto F = field_create(q);
    // Smooth affine atlas: q^{atlas_dim}.
    for (auto gamma : std::vector<std::vector<int>>{{0, 0}, {1, 0}, {1, 1}, {2, 1}, {1, 2}}) {
      const int dim = rep_space_dims(sq, gamma).first;
      CHECK(count_reps(bare(non_localized(sq), gamma, F)).raw == pow_big(BigInt(q), static_cast<unsigned>(dim)));
    }
    CHECK(count_reps(bare(non_localized(three), {1}, F)).raw == pow_big(BigInt(q), 3));
    // Fully localized: product of |GL| factors.
    for (int n : {0, 1, 2}) {
      if (q == 3 && n == 2) continue;
      CHECK(count_reps(bare(sq, {n, n}, F)).raw == pow_big(gl_order(n, BigInt(q)), 4));
    }
    CHECK(count_reps(bare(three, {2}, F)).raw == pow_big(gl_order(2, BigInt(q)), 3));
    // Mixed: one localized arrow, the rest free.
    Quiver mixed = non_localized(sq);
    mixed.invertible[0] = true;
    CHECK(count_reps(bare(mixed, {2, 2}, F)).raw ==
          gl_order(2, BigInt(q)) * pow_big(BigInt(q), 12));
  }
  CHECK(code_of([&] { count_reps(bare(sq, {1, 2}, field_create(2))); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("count_reps honours limits and workers", "[repscan]") {
  const auto hex = corpus::hex_torus();
  const auto P = jacobi_presentation(dual_quiver(hex), potential_of(hex));
  Limits tight;
  tight.max_iterations = 1000;
  CHECK(code_of([&] { count_reps(rep_problem(P, {2}, field_create(3)), tight); }) == ErrorCode::EnumerationTooLarge);
  Limits four;
  four.workers = 4;
  CHECK(count_reps(rep_problem(P, {2}, field_create(3)), four).raw ==
        count_reps(rep_problem(P, {2}, field_create(3))).raw);
}

TEST_CASE("dimred_count_check", "[repscan]") {
  const auto hex = corpus::hex_torus();
  const Quiver Q = dual_quiver(hex);
  const Potential W = potential_of(hex);
  const Cut E{{*Q.arrow_named("z")}};
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto F = field_create(q);
    const auto r = dimred_count_check(Q, W, E, {1}, F);
    const BigInt sq = BigInt(q - 1) * (q - 1);
    CHECK(r.lhs == BigRational(q * sq));
    CHECK(r.details["Y"] == to_decimal(sq));
    CHECK(r.details["Z"] == to_decimal(sq));
    CHECK(r.pass);
  }

  // gamma = 2 over GF(2): direct count of tr W = 0.
  const auto F2 = field_create(2);
  const auto G = enumerate_gl(2, F2);
  const auto all = MatrixSpace(2, 2, F2).materialize(1000);
  std::uint64_t zeros = 0, commuting = 0;
  for (const auto& x : G)
    for (const auto& y : G) {
      if (commute(F2, x, y)) ++commuting;
      for (const auto& z : all) {
        const Matrix xyz = mat::mul(F2, mat::mul(F2, x, y), z);
        const Matrix xzy = mat::mul(F2, mat::mul(F2, x, z), y);
        if (F2.sub(mat::trace(F2, xyz).code, mat::trace(F2, xzy).code) == 0) ++zeros;
      }
    }
  const auto r2 = dimred_count_check(Q, W, E, {2}, F2);
  CHECK(r2.lhs == BigRational(zeros));
  CHECK(r2.details["Z"] == std::to_string(commuting));
  CHECK(r2.details["d"] == 4);
  CHECK(r2.pass);

  const auto sq = corpus::square_torus();
  const Quiver Qs = dual_quiver(sq);
  const Potential Ws = potential_of(sq);
  for (const auto& cut : find_cuts(Qs, Ws))
    for (std::uint32_t q : {2u, 3u}) CHECK(dimred_count_check(Qs, Ws, cut, {1, 1}, field_create(q)).pass);
}

TEST_CASE("dimred identity across the grid", "[repscan][property]") {
  for (const auto& T : corpus::all()) {
    const Quiver Q = dual_quiver(T);
    const Potential W = potential_of(T);
    for (const auto& cut : find_cuts(Q, W))
      for (std::uint32_t q : {2u, 3u}) {
        const std::vector<int> ones(static_cast<std::size_t>(Q.vertices), 1);
        CHECK(dimred_count_check(Q, W, cut, ones, field_create(q)).pass);
      }
  }
}

TEST_CASE("morita_count_check", "[repscan]") {
  const auto hex = corpus::hex_torus();
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto r = morita_count_check(hex, 1, field_create(q));
    CHECK(r.lhs == q - 1);
    CHECK(r.pass);
  }
  const auto r = morita_count_check(hex, 2, field_create(3));
  CHECK(r.details["raw"] == "384");
  CHECK(r.lhs == 8);
  CHECK(r.rhs == 8);
  CHECK(r.pass);

  const auto sq = corpus::square_torus();
  for (std::uint32_t q : {2u, 3u}) CHECK(morita_count_check(sq, 1, field_create(q)).pass);
  CHECK(morita_count_check(sq, 2, field_create(2)).pass);

  // No cut: a single quadratic term x x.
  BraneTiling fake = hex;
  CHECK(code_of([&] { first_cut(dual_quiver(fake), Potential{{1, {0, 0}}}); }) == ErrorCode::NoCut);
}

TEST_CASE("gtrue_count_check", "[repscan]") {
  const auto hex = corpus::hex_torus();
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto r = gtrue_count_check(hex, 1, field_create(q));
    CHECK(r.lhs == BigRational(BigInt(q - 1) * (q - 1)));
    CHECK(r.pass);
  }
  CHECK(gtrue_count_check(hex, 2, field_create(2)).pass);
  const auto sq = corpus::square_torus();
  CHECK(gtrue_count_check(sq, 1, field_create(3)).pass);
  CHECK(gtrue_count_check(sq, 1, field_create(2)).pass);
}

TEST_CASE("dimension bookkeeping matches the shift audit", "[repscan][property]") {
  for (const auto& T : corpus::all()) {
    const Quiver Q = dual_quiver(T);
    const Potential W = potential_of(T);
    for (int n = 1; n <= 3; ++n) {
      const std::vector<int> gamma(static_cast<std::size_t>(Q.vertices), n);
      const auto [atlas, stack] = rep_space_dims(Q, gamma);
      int gauge = 0;
      for (int g : gamma) gauge += g * g;
      const auto audit = shift_audit(T, n);
      for (const auto& cut : find_cuts(Q, W)) {
        const int value = atlas - gauge + T.V() * n * n - 2 * static_cast<int>(cut.arrows.size()) * n * n;
        CHECK(value == audit.arrow_term);
        CHECK(value == T.V() * n * n - (2 - 2 * T.genus) * n * n);
      }
      CHECK(stack == atlas - gauge);
    }
  }
}

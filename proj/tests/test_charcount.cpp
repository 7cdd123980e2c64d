#include <catch2/catch_amalgamated.hpp>

#include "charvar/charcount.hpp"

using namespace charvar;

namespace {

// Pairs (A, B) of arbitrary matrices with AB = BA, by plain loops.
std::uint64_t commuting_matrix_pairs(const FiniteField& F, int n) {
  const MatrixSpace space(n, n, F);
  const auto all = space.materialize(1u << 20);
  std::uint64_t hits = 0;
  for (const auto& A : all)
    for (const auto& B : all)
      if (mat::mul(F, A, B) == mat::mul(F, B, A)) ++hits;
  return hits;
}

// (A, B, C) in GL_n^3 with [A, B] = 1 and C commuting with both.
std::uint64_t commuting_triples(const FiniteField& F, int n) {
  const auto G = enumerate_gl(n, F);
  auto commute = [&](const Matrix& x, const Matrix& y) { return mat::mul(F, x, y) == mat::mul(F, y, x); };
  std::uint64_t hits = 0;
  for (const auto& A : G)
    for (const auto& B : G) {
      if (!commute(A, B)) continue;
      for (const auto& C : G)
        if (commute(A, C) && commute(B, C)) ++hits;
    }
  return hits;
}

BigRational rat(const BigInt& num, const BigInt& den = 1) { return BigRational(num) / BigRational(den); }

}  // namespace

TEST_CASE("twisted_count", "[charcount]") {
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto F = field_create(q);
    CHECK(twisted_count(1, 1, F).value == rat(BigInt(q - 1) * (q - 1)));
  }
  const auto F3 = field_create(3);
  CHECK(twisted_count(2, 1, F3).value == 96);
  CHECK(twisted_count(2, 1, F3).value == rat(brute_force_count(2, 1, F3, Matrix::scalar(2, F3.element(-1)))));
  try {
    twisted_count(2, 1, field_create(2, 2));
    FAIL("expected NoRootOfUnity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoRootOfUnity);
  }
}

TEST_CASE("untwisted_count", "[charcount]") {
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const auto F = q == 4 ? field_create(2, 2) : field_create(q);
    CHECK(untwisted_count(1, 2, F).value == rat(pow_big(BigInt(q - 1), 4)));
  }
  const auto F3 = field_create(3);
  CHECK(untwisted_count(2, 1, F3).value == 384);
  CHECK(untwisted_count(2, 1, F3).value == rat(brute_force_count(2, 1, F3, Matrix::identity(2))));
  CHECK(untwisted_count(2, 1, field_create(2)).value == 18);
}

TEST_CASE("twisted_variety_count", "[charcount]") {
  for (std::uint32_t q : {2u, 3u, 7u}) {
    const auto F = field_create(q);
    CHECK(twisted_variety_count(1, 1, F).value == rat(BigInt(q - 1) * (q - 1)));
  }
  CHECK(twisted_variety_count(2, 1, field_create(3)).value == 4);

  const auto F5 = field_create(5);
  const BigInt brute = brute_force_count(2, 1, F5, Matrix::scalar(2, F5.element(-1)));
  const BigInt pgl = gl_order(2, F5) / 4;
  REQUIRE(brute % pgl == 0);
  const auto rec = twisted_variety_count(2, 1, F5);
  CHECK(rec.kind == CountKind::TwistedVariety);
  CHECK(rec.value == rat(brute / pgl));
}

TEST_CASE("stack_count", "[charcount]") {
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto F = field_create(q);
    CHECK(stack_count(untwisted_count(1, 1, F)).value == q - 1);
  }
  const auto tw = stack_count(twisted_count(2, 1, field_create(3)));
  CHECK(tw.kind == CountKind::TwistedStack);
  CHECK(tw.value == 2);
  CHECK(stack_count(untwisted_count(2, 1, field_create(2))).value == 3);
  // Twisted stack = variety / (q - 1).
  const auto F5 = field_create(5);
  CHECK(stack_count(twisted_count(2, 1, F5)).value == twisted_variety_count(2, 1, F5).value / 4);
  CHECK_THROWS_AS(stack_count(tw), Error);
}

TEST_CASE("additive_mu_stack_count", "[charcount]") {
  for (std::uint32_t q : {2u, 3u, 5u})
    for (int g : {1, 2}) {
      const auto F = field_create(q);
      CHECK(additive_mu_stack_count(1, g, F).value == rat(pow_big(BigInt(q), 2 * g), q - 1));
    }
  const auto F2 = field_create(2);
  CHECK(additive_mu_stack_count(2, 1, F2).value == rat(commuting_matrix_pairs(F2, 2), 6));
  const auto F3 = field_create(3);
  CHECK(additive_mu_stack_count(2, 1, F3).value == rat(commuting_matrix_pairs(F3, 2), 48));
}

TEST_CASE("surface_circle_stack_count", "[charcount]") {
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto F = field_create(q);
    CHECK(surface_circle_stack_count(1, 1, F).value == rat(BigInt(q - 1) * (q - 1)));
  }
  const auto F2 = field_create(2);
  CHECK(surface_circle_stack_count(2, 1, F2).value == rat(commuting_triples(F2, 2), 6));
  const auto F3 = field_create(3);
  CHECK(surface_circle_stack_count(2, 1, F3).value == rat(commuting_triples(F3, 2), 48));
  CHECK(surface_circle_stack_count(1, 2, F3).value == 16);
}

TEST_CASE("brute_force_count", "[charcount]") {
  const auto F3 = field_create(3);
  CHECK(brute_force_count(1, 1, F3, Matrix::identity(1)) == 4);

  const auto F2 = field_create(2);
  // Cross-check: commuting pairs = sum over A of |C(A)|.
  const auto G = enumerate_gl(2, F2);
  std::uint64_t centralizer_sum = 0;
  for (const auto& A : G)
    for (const auto& B : G)
      if (mat::mul(F2, A, B) == mat::mul(F2, B, A)) ++centralizer_sum;
  CHECK(brute_force_count(2, 1, F2, Matrix::identity(2)) == 18);
  CHECK(brute_force_count(2, 1, F2, Matrix::identity(2)) == centralizer_sum);

  CHECK(brute_force_count(2, 2, F2, Matrix::identity(2)) == genus_count(build_class_table(2, F2), 2, Matrix::identity(2)));

  Limits tight;
  tight.max_iterations = 1000;
  try {
    brute_force_count(2, 2, F3, Matrix::identity(2), tight);
    FAIL("expected EnumerationTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EnumerationTooLarge);
  }
}

TEST_CASE("brute force is identical across worker counts", "[charcount][property]") {
  const auto F3 = field_create(3);
  Limits one, four;
  four.workers = 4;
  CHECK(brute_force_count(2, 1, F3, Matrix::identity(2), one) == brute_force_count(2, 1, F3, Matrix::identity(2), four));
  CHECK(brute_force_distribution(2, 1, F3, one) == brute_force_distribution(2, 1, F3, four));
  CHECK(twisted_count(2, 2, F3, one).value == twisted_count(2, 2, F3, four).value);
}

TEST_CASE("convolution counts equal brute force", "[charcount][property]") {
  for (auto [p, k, n, g] : std::vector<std::tuple<int, int, int, int>>{
           {2, 1, 1, 1}, {3, 1, 1, 2}, {2, 1, 2, 1}, {2, 1, 2, 2}, {3, 1, 2, 1}, {2, 2, 2, 1}, {5, 1, 2, 1}, {2, 1, 3, 1}}) {
    const auto F = field_create(p, k);
    const auto T = build_class_table(n, F);
    const auto dist = brute_force_distribution(n, g, F);
    CAPTURE(p, k, n, g);
    for (const auto& c : T->classes()) {
      auto it = dist.find(c.representative);
      const std::uint64_t brute = it == dist.end() ? 0 : it->second;
      CHECK(genus_count(T, g, c.representative) == brute);
    }
  }
}

TEST_CASE("twisted counts do not depend on the root", "[charcount][property]") {
  for (auto [q, n] : std::vector<std::pair<int, int>>{{3, 2}, {5, 2}, {7, 2}, {7, 3}, {5, 4}}) {
    const auto F = field_create(q);
    std::vector<BigRational> values;
    for (const auto& r : primitive_roots_of_unity(F, n)) values.push_back(twisted_count(n, 1, F, {}, r).value);
    CAPTURE(q, n);
    for (const auto& v : values) CHECK(v == values.front());
  }
}

TEST_CASE("twisted solutions are divisible by |PGL_n|", "[charcount][property]") {
  for (auto [p, k, n, g] : std::vector<std::tuple<int, int, int, int>>{
           {3, 1, 2, 1}, {5, 1, 2, 1}, {7, 1, 2, 1}, {3, 2, 2, 1}, {3, 1, 2, 2}, {5, 1, 2, 2}, {7, 1, 3, 1}, {5, 1, 4, 1}}) {
    const auto F = field_create(p, k);
    CHECK_NOTHROW(twisted_variety_count(n, g, F));
  }
}

TEST_CASE("rank one counts match closed forms", "[charcount][property]") {
  for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}}) {
    const auto F = field_create(p, k);
    const BigInt q = F.q();
    for (int g : {1, 2}) {
      const BigInt solutions = pow_big(q - 1, 2 * g);
      CHECK(count(CountKind::TwistedSolutions, 1, g, F).value == rat(solutions));
      CHECK(count(CountKind::UntwistedSolutions, 1, g, F).value == rat(solutions));
      CHECK(count(CountKind::TwistedVariety, 1, g, F).value == rat(solutions));
      CHECK(count(CountKind::TwistedStack, 1, g, F).value == rat(solutions, q - 1));
      CHECK(count(CountKind::UntwistedStack, 1, g, F).value == rat(solutions, q - 1));
      CHECK(count(CountKind::AdditiveMuStack, 1, g, F).value == rat(pow_big(q, 2 * g), q - 1));
      CHECK(count(CountKind::SurfaceCircleStack, 1, g, F).value == rat(pow_big(q - 1, 2 * g + 1), q - 1));
    }
  }
}

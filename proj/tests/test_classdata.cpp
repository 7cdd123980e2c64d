#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "charvar/classdata.hpp"

using namespace charvar;

namespace {

// Conjugation orbits by direct conjugation with every group element.
std::vector<std::size_t> brute_orbit_sizes(const FiniteField& F, int n) {
  const auto G = enumerate_gl(n, F);
  std::vector<Matrix> inv;
  for (const auto& g : G) inv.push_back(*mat::inverse(F, g));
  std::unordered_set<Matrix, MatrixHash> seen;
  std::vector<std::size_t> sizes;
  for (const auto& x : G) {
    if (seen.count(x)) continue;
    std::unordered_set<Matrix, MatrixHash> orbit;
    for (std::size_t i = 0; i < G.size(); ++i) orbit.insert(mat::mul(F, mat::mul(F, G[i], x), inv[i]));
    seen.insert(orbit.begin(), orbit.end());
    sizes.push_back(orbit.size());
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

// #{(A, B) : A B A^-1 B^-1 = z} by looping over pairs.
std::uint64_t brute_commutator(const FiniteField& F, int n, const Matrix& z) {
  const auto G = enumerate_gl(n, F);
  std::vector<Matrix> inv;
  for (const auto& g : G) inv.push_back(*mat::inverse(F, g));
  std::uint64_t hits = 0;
  for (std::size_t a = 0; a < G.size(); ++a)
    for (std::size_t b = 0; b < G.size(); ++b)
      if (mat::mul(F, mat::mul(F, mat::mul(F, G[a], G[b]), inv[a]), inv[b]) == z) ++hits;
  return hits;
}

std::vector<std::size_t> table_sizes(const ConjClassTable& T) {
  std::vector<std::size_t> out;
  for (const auto& c : T.classes()) out.push_back(c.size.convert_to<std::size_t>());
  std::sort(out.begin(), out.end());
  return out;
}

ClassFunction random_function(const ClassTablePtr& T, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(-5, 5);
  std::vector<BigInt> v;
  for (std::size_t i = 0; i < T->size(); ++i) v.push_back(d(rng));
  return ClassFunction(T, v);
}

}  // namespace

TEST_CASE("build_class_table examples", "[classdata]") {
  const auto t15 = build_class_table(1, field_create(5));
  CHECK(t15->size() == 4);
  for (const auto& c : t15->classes()) CHECK(c.size == 1);

  const auto F2 = field_create(2);
  const auto t22 = build_class_table(2, F2);
  CHECK(table_sizes(*t22) == std::vector<std::size_t>{1, 2, 3});
  CHECK(table_sizes(*t22) == brute_orbit_sizes(F2, 2));

  const auto F3 = field_create(3);
  const auto t23 = build_class_table(2, F3);
  CHECK(t23->size() == 8);
  CHECK(table_sizes(*t23) == brute_orbit_sizes(F3, 2));
}

TEST_CASE("class tables satisfy their invariants", "[classdata][property]") {
  for (auto [p, k, n] : std::vector<std::tuple<int, int, int>>{{2, 1, 3}, {3, 1, 3}, {2, 2, 2}, {5, 1, 2}, {3, 2, 2}}) {
    const auto F = field_create(p, k);
    const auto T = build_class_table(n, F);
    BigInt total = 0;
    for (const auto& c : T->classes()) {
      total += c.size;
      CHECK(T->group_order() % c.size == 0);
      CHECK(c.centralizer_order * c.size == T->group_order());
    }
    CHECK(total == T->group_order());
    std::unordered_set<RcfKey, RcfKeyHash> keys;
    for (const auto& c : T->classes()) keys.insert(c.key);
    CHECK(keys.size() == T->size());
  }
}

TEST_CASE("type-built tables match enumeration-built tables", "[classdata]") {
  for (auto [p, k, n] : std::vector<std::tuple<int, int, int>>{
           {2, 1, 1}, {5, 1, 1}, {2, 1, 2}, {3, 1, 2}, {2, 2, 2}, {5, 1, 2}, {3, 2, 2}, {2, 1, 3}, {3, 1, 3}, {2, 1, 4}}) {
    const auto F = field_create(p, k);
    const auto enumerated = build_class_table(n, F);
    const auto typed = class_table_from_types(n, F);
    CAPTURE(p, k, n);
    REQUIRE(typed->size() == enumerated->size());
    for (const auto& c : typed->classes()) {
      const auto idx = enumerated->find(c.key);
      REQUIRE(idx);
      CHECK(enumerated->classes()[*idx].size == c.size);
      CHECK(rcf_key(F, c.representative) == c.key);
    }
  }
  // Larger groups: sizes must still add up to |G| and class counts follow q^2 - 1 for GL_2.
  for (auto [p, k, n] : std::vector<std::tuple<int, int, int>>{{31, 1, 2}, {7, 1, 3}, {5, 1, 4}, {3, 2, 3}}) {
    const auto F = field_create(p, k);
    const auto T = class_table_from_types(n, F);
    BigInt total = 0;
    for (const auto& c : T->classes()) total += c.size;
    CHECK(total == T->group_order());
    if (n == 2) CHECK(T->size() == F.q() * F.q() - 1);
  }
}

TEST_CASE("commutator_distribution examples", "[classdata]") {
  const auto F2 = field_create(2);
  const auto t22 = build_class_table(2, F2);
  const auto f1 = commutator_distribution(t22);
  CHECK(f1.at(Matrix::identity(2)) == 18);
  CHECK(f1.at(Matrix::identity(2)) == brute_commutator(F2, 2, Matrix::identity(2)));

  const auto F3 = field_create(3);
  const auto t23 = build_class_table(2, F3);
  const auto g1 = commutator_distribution(t23);
  const Matrix minus_id = Matrix::scalar(2, F3.element(-1));
  CHECK(g1.at(minus_id) == 96);
  CHECK(g1.at(minus_id) == brute_commutator(F3, 2, minus_id));
  for (const auto& c : t23->classes()) CHECK(g1.at(c.representative) == brute_commutator(F3, 2, c.representative));

  for (std::uint32_t q : {2u, 3u, 5u, 7u}) {
    const auto F = field_create(q);
    const auto t = build_class_table(1, F);
    const auto f = commutator_distribution(t);
    CHECK(f.at(Matrix::identity(1)) == BigInt(q - 1) * (q - 1));
  }
}

TEST_CASE("commutator distribution totals |G|^2", "[classdata][property]") {
  for (auto [q, n] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
    const auto T = build_class_table(n, field_create(q));
    const auto f1 = commutator_distribution(T);
    CHECK(f1.total() == T->group_order() * T->group_order());
  }
}

TEST_CASE("class_convolve", "[classdata]") {
  const auto F2 = field_create(2);
  const auto T = build_class_table(2, F2);
  const auto f1 = commutator_distribution(T);

  CHECK(class_convolve(f1, ClassFunction::delta_identity(T)) == f1);

  const auto one = ClassFunction::constant(T, 1);
  const auto square = class_convolve(one, one);
  for (const auto& v : square.values()) CHECK(v == T->group_order());

  // Brute force over 6^4 tuples.
  const auto G = enumerate_gl(2, F2);
  std::uint64_t hits = 0;
  for (const auto& a1 : G)
    for (const auto& b1 : G)
      for (const auto& a2 : G)
        for (const auto& b2 : G) {
          const Matrix c1 = mat::commutator(F2, a1, b1, *mat::inverse(F2, a1), *mat::inverse(F2, b1));
          const Matrix c2 = mat::commutator(F2, a2, b2, *mat::inverse(F2, a2), *mat::inverse(F2, b2));
          if (mat::mul(F2, c1, c2) == Matrix::identity(2)) ++hits;
        }
  CHECK(class_convolve(f1, f1).at(Matrix::identity(2)) == hits);

  const auto T3 = build_class_table(1, field_create(3));
  CHECK_THROWS_AS(class_convolve(f1, ClassFunction::constant(T3, 1)), Error);
}

TEST_CASE("class convolution is associative and commutative", "[classdata][property]") {
  std::mt19937 rng(5);
  for (std::uint32_t q : {2u, 3u}) {
    const auto T = build_class_table(2, field_create(q));
    for (int trial = 0; trial < 4; ++trial) {
      const auto a = random_function(T, rng), b = random_function(T, rng), c = random_function(T, rng);
      CHECK(class_convolve(a, b) == class_convolve(b, a));
      CHECK(class_convolve(class_convolve(a, b), c) == class_convolve(a, class_convolve(b, c)));
    }
  }
}

TEST_CASE("genus_count", "[classdata]") {
  const auto F2 = field_create(2);
  CHECK(genus_count(build_class_table(2, F2), 1, Matrix::identity(2)) == 18);
  for (std::uint32_t q : {2u, 3u, 5u})
    for (int g : {1, 2, 3}) {
      const auto F = field_create(q);
      CHECK(genus_count(build_class_table(1, F), g, Matrix::identity(1)) == pow_big(BigInt(q - 1), 2 * g));
    }
  const auto F3 = field_create(3);
  CHECK(genus_count(build_class_table(2, F3), 1, Matrix::scalar(2, F3.element(-1))) == 96);

  try {
    genus_count(build_class_table(2, F3), 1, Matrix::zero(2, 2));
    FAIL("expected SingularTarget");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularTarget);
  }
}

TEST_CASE("genus_count depends only on the class of the target", "[classdata][property]") {
  std::mt19937 rng(3);
  const auto F = field_create(3);
  const auto T = build_class_table(2, F);
  const auto G = enumerate_gl(2, F);
  std::uniform_int_distribution<std::size_t> pick(0, G.size() - 1);
  for (const auto& c : T->classes()) {
    const Matrix& P = G[pick(rng)];
    const Matrix z = mat::mul(F, mat::mul(F, P, c.representative), *mat::inverse(F, P));
    CHECK(genus_count(T, 1, z) == genus_count(T, 1, c.representative));
    CHECK(genus_count(T, 2, z) == genus_count(T, 2, c.representative));
  }
}

TEST_CASE("genus_count is independent of the primitive root", "[classdata][property]") {
  for (std::uint32_t q : {3u, 5u, 7u}) {
    const auto F = field_create(q);
    const auto T = build_class_table(2, F);
    std::vector<BigInt> counts;
    for (const auto& r : primitive_roots_of_unity(F, 2)) counts.push_back(genus_count(T, 1, Matrix::scalar(2, r.element)));
    CHECK(std::adjacent_find(counts.begin(), counts.end(), std::not_equal_to<>()) == counts.end());
  }
  const auto F7 = field_create(7);
  const auto T3 = class_table_from_types(3, F7);
  const auto roots = primitive_roots_of_unity(F7, 3);
  REQUIRE(roots.size() == 2);
  CHECK(genus_count(T3, 1, Matrix::scalar(3, roots[0].element)) ==
        genus_count(T3, 1, Matrix::scalar(3, roots[1].element)));
}

TEST_CASE("central genus-one shortcut agrees with the group pass", "[classdata]") {
  for (auto [p, k, n] : std::vector<std::tuple<int, int, int>>{{3, 1, 2}, {5, 1, 2}, {2, 2, 2}, {7, 1, 2}, {3, 1, 3}}) {
    const auto F = field_create(p, k);
    const auto T = build_class_table(n, F);
    for (std::uint32_t c = 1; c < F.q(); ++c) {
      const Matrix z = Matrix::scalar(n, {c});
      CHECK(genus_count(T, 1, z) == detail::commutator_value(*T, z, Limits{}));
    }
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "charvar/plethys.hpp"

using namespace charvar;

namespace {

const RatFunc Q = RatFunc::q();

using Series = TruncSeries<RatFunc>;

RatFunc random_ratfunc(std::mt19937& rng) {
  std::uniform_int_distribution<int> coef(-4, 4), deg(0, 2), pick(0, 3);
  auto poly = [&] {
    std::vector<BigInt> c;
    const int d = deg(rng);
    for (int i = 0; i <= d; ++i) c.emplace_back(coef(rng));
    return LaurentPoly::from_coeffs(c);
  };
  const LaurentPoly num = poly();
  switch (pick(rng)) {
    case 0:
      return RatFunc(num);
    case 1:
      return RatFunc(num, LaurentPoly::q() - 1);
    case 2:
      return RatFunc(num, LaurentPoly::monomial(1, 1));
    default:
      return RatFunc(num, LaurentPoly::monomial(1, 2) - 1).shift(-1);
  }
}

Series random_series(std::mt19937& rng, int N, double density = 0.6) {
  std::bernoulli_distribution keep(density);
  Series f(N);
  for (int n = 1; n <= N; ++n)
    if (keep(rng)) f[n] = random_ratfunc(rng);
  return f;
}

// Number of degree-d monomials in m variables.
BigInt monomial_count(int m, int d) {
  std::function<BigInt(int, int)> rec = [&](int vars, int left) -> BigInt {
    if (vars == 1) return 1;
    BigInt total = 0;
    for (int e = 0; e <= left; ++e) total += rec(vars - 1, left - e);
    return total;
  };
  return m == 0 ? BigInt(d == 0 ? 1 : 0) : rec(m, d);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("adams examples", "[plethys]") {
  const Series f = Series::monomial(4, 2, Q);
  CHECK(adams(f, 2) == Series::monomial(4, 4, Q * Q));
  CHECK(adams(Series::monomial(3, 1, RatFunc(1)), 3) == Series::monomial(3, 3, RatFunc(1)));
  CHECK(adams(f, 3) == Series(4));

  // Degree-2 tower over p = 3 with J = 2; psi_2 needs q = 3^4.
  TruncSeries<NumericTower> t(8);
  t[2] = NumericTower(3, {BigRational(1), BigRational(2)});
  CHECK(code_of([&] { adams(t, 2); }) == ErrorCode::TowerTooShallow);
  t[2] = NumericTower(3, {1, 2, 3, 4});
  const auto r = adams(t, 2);
  CHECK(r[4].at(1) == 2);
  CHECK(r[4].at(2) == 4);
  CHECK(code_of([] { adams(Series(2), 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("pleth_exp examples", "[plethys]") {
  const Series e = pleth_exp(Series::monomial(3, 1, RatFunc(1)));
  CHECK(e == Series(3, {1, 1, 1, 1}));

  const Series eq = pleth_exp(Series::monomial(2, 1, Q - 1));
  CHECK(eq[2] == Q * Q - Q);
  CHECK(eq[2] == ((Q - 1) * (Q - 1) + (Q * Q - 1)) / RatFunc(2));
  // Symmetric powers of an m-dimensional space.
  for (int m = 0; m <= 6; ++m) {
    const Series em = pleth_exp(Series::monomial(3, 1, RatFunc(m)));
    for (int d = 0; d <= 3; ++d) CHECK(em[d] == RatFunc(monomial_count(m, d)));
  }
  // Exp((q - 1) x) counts monic polynomials over F_q with nonzero constant term.
  const Series e3 = pleth_exp(Series::monomial(3, 1, Q - 1));
  for (int qv : {2, 3, 5})
    for (int d = 1; d <= 3; ++d) {
      int total = 1;
      for (int i = 0; i < d; ++i) total *= qv;
      int hits = 0;
      for (int code = 0; code < total; ++code)
        if (code % qv != 0) ++hits;  // lowest digit is the constant coefficient
      CHECK(e3[d].evaluate(BigInt(qv)) == hits);
    }

  CHECK(pleth_exp(Series::monomial(2, 1, RatFunc(2))) == Series(2, {1, 2, 3}));
  CHECK(code_of([] { pleth_exp(Series::one(2)); }) == ErrorCode::NonzeroConstantTerm);
}

TEST_CASE("pleth_log examples", "[plethys]") {
  CHECK(pleth_log(Series(4, {1, 1, 1, 1, 1})) == Series::monomial(4, 1, RatFunc(1)));
  CHECK(pleth_log(Series::one(5)) == Series(5));
  CHECK(code_of([] { pleth_log(Series(3)); }) == ErrorCode::BadConstantTerm);
  CHECK(code_of([] { pleth_log(Series(3, {2})); }) == ErrorCode::BadConstantTerm);

  std::mt19937 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Series f = random_series(rng, 6, 0.4);
    CHECK(pleth_log(pleth_exp(f)) == f);
  }
}

TEST_CASE("Exp and Log are mutually inverse", "[plethys][property]") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Series f = random_series(rng, 6);
    const Series e = pleth_exp(f);
    CHECK(pleth_log(e) == f);
    CHECK(pleth_exp(pleth_log(e)) == e);
  }
}

TEST_CASE("Exp turns sums into products", "[plethys][property]") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Series f = random_series(rng, 5), h = random_series(rng, 5);
    CHECK(pleth_exp(f + h) == pleth_exp(f) * pleth_exp(h));
  }
}

TEST_CASE("Adams operations compose", "[plethys][property]") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Series f = random_series(rng, 8);
    for (int a = 1; a <= 3; ++a)
      for (int b = 1; b <= 3; ++b) CHECK(adams(adams(f, a), b) == adams(f, a * b));
  }
  // Same law on numeric towers deep enough for every step.
  TruncSeries<NumericTower> t(6);
  t[1] = NumericTower(2, {1, 2, 3, 4, 5, 6});
  t[2] = NumericTower(2, {7, 8, 9});
  CHECK(adams(adams(t, 2), 3) == adams(t, 6));
}

TEST_CASE("numeric towers follow polynomial evaluation", "[plethys][property]") {
  // Exp computed on towers equals Exp computed symbolically, evaluated at p^j.
  std::mt19937 rng(10);
  const int N = 4;
  const BigInt p = 3;
  for (int trial = 0; trial < 10; ++trial) {
    const Series f = random_series(rng, N);
    TruncSeries<NumericTower> t(N);
    for (int n = 1; n <= N; ++n) {
      std::vector<BigRational> v;
      for (int j = 1; j <= N / n; ++j) v.push_back(f[n].evaluate(pow_big(p, static_cast<unsigned>(j))));
      t[n] = NumericTower(p, v);
    }
    const Series e = pleth_exp(f);
    const auto et = pleth_exp(t);
    for (int n = 1; n <= N; ++n)
      for (int j = 1; j <= N / n; ++j) CHECK(et[n].at(j) == e[n].evaluate(pow_big(p, static_cast<unsigned>(j))));
    CHECK(pleth_log(et) == t);
  }
}

TEST_CASE("assemble_eseries examples", "[plethys]") {
  const LaurentPoly q = LaurentPoly::q();
  const auto a = assemble_eseries(Side::Twisted, 1, 1, PolynomialCounts{{1, (q - 1) * (q - 1)}});
  CHECK(a.terms[0].is_zero());
  CHECK(a.terms[1] == Q - 1);

  TowerCounts tc;
  tc.p = 3;
  tc.counts[{1, 1}] = 4;
  tc.counts[{1, 2}] = 64;
  tc.counts[{2, 1}] = 96;
  const auto a2 = assemble_eseries(Side::Twisted, 1, 2, tc);
  CHECK(a2.terms[2].at(1) == 2);
  CHECK(a2.terms[1].at(2) == 8);

  const auto g2 = assemble_eseries(Side::Twisted, 2, 1, PolynomialCounts{{1, (q - 1) * (q - 1) * (q - 1) * (q - 1)}});
  CHECK(g2.terms[1] == (Q - 1) * (Q - 1) * (Q - 1) / Q);

  const auto b = assemble_eseries(Side::Untwisted, 1, 1, PolynomialCounts{{1, (q - 1) * (q - 1)}});
  CHECK(b.terms[0] == RatFunc(1));
  CHECK(code_of([] { assemble_eseries(Side::Twisted, 1, 2, PolynomialCounts{{1, LaurentPoly(1)}}); }) ==
        ErrorCode::MissingCounts);
  tc.counts.erase({1, 2});
  CHECK(code_of([&] { assemble_eseries(Side::Twisted, 1, 2, tc); }) == ErrorCode::MissingCounts);
}

TEST_CASE("verify_exp_identity genus one", "[plethys]") {
  const LaurentPoly q = LaurentPoly::q();
  // Degree one: a_1 = b_1 = q - 1.
  const auto a1 = assemble_eseries(Side::Twisted, 1, 1, PolynomialCounts{{1, (q - 1) * (q - 1)}});
  const auto b1 = assemble_eseries(Side::Untwisted, 1, 1, PolynomialCounts{{1, (q - 1) * (q - 1)}});
  CHECK(verify_exp_identity(a1, b1).pass());

  PolynomialModeOptions opts;
  opts.primes = {3, 5, 7, 11, 13, 17, 19, 23, 29};
  opts.holdout = 31;
  const auto res = verify_exp_identity_polynomial(1, 2, opts);
  CHECK(res.report.pass());
  CHECK(res.report.degrees.size() == 3);
  CHECK(res.a.terms[1] == Q - 1);
  CHECK(res.b.terms[2] - res.a.terms[2] == Q * Q - Q);
  CHECK(res.twisted.at(2) == (q - 1) * gl_order_poly(2));
  CHECK(res.b.terms[2] == Q * Q - 1);

  // A wrong twisted count is caught.
  PolynomialCounts broken = res.twisted;
  broken[2] = broken[2] + gl_order_poly(2);
  const auto bad = verify_exp_identity(assemble_eseries(Side::Twisted, 1, 2, broken), res.b);
  CHECK_FALSE(bad.pass());
  CHECK(bad.degrees[1].pass);
  CHECK_FALSE(bad.degrees[2].pass);
}

TEST_CASE("verify_exp_identity numeric mode", "[plethys]") {
  for (std::uint32_t p : {3u, 5u}) {
    const auto g1 = verify_exp_identity_numeric(1, 2, {p, 0, {}});
    CHECK(g1.report.pass());
    const auto g2 = verify_exp_identity_numeric(2, 2, {p, 0, {}});
    CHECK(g2.report.pass());
    CHECK(g2.report.mode == "numeric");
  }
  const auto n3 = verify_exp_identity_numeric(1, 3, {7, 0, {}});
  CHECK(n3.report.pass());
}

TEST_CASE("polynomial and numeric modes agree", "[plethys][property]") {
  PolynomialModeOptions opts;
  opts.primes = {3, 5, 7, 11, 13, 17, 19, 23, 29};
  const auto poly = verify_exp_identity_polynomial(1, 2, opts);
  for (std::uint32_t p : {3u, 5u}) {
    const auto num = verify_exp_identity_numeric(1, 2, {p, 0, {}});
    CHECK(num.report.pass() == poly.report.pass());
    for (int n = 1; n <= 2; ++n)
      for (int j = 1; j <= 2 / n; ++j) {
        const BigInt q = pow_big(BigInt(p), static_cast<unsigned>(j));
        CHECK(num.a.terms[n].at(j) == poly.a.terms[n].evaluate(q));
        CHECK(num.b.terms[n].at(j) == poly.b.terms[n].evaluate(q));
      }
  }
}

TEST_CASE("verification does not depend on the root", "[plethys][property]") {
  for (std::size_t idx : {0u, 1u}) {
    const auto r = verify_exp_identity_numeric(1, 3, {7, idx, {}});
    CHECK(r.report.pass());
  }
  const auto r0 = verify_exp_identity_numeric(1, 3, {7, 0, {}});
  const auto r1 = verify_exp_identity_numeric(1, 3, {7, 1, {}});
  CHECK(r0.twisted.counts == r1.twisted.counts);
}

#pragma once

#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "charvar/charcount.hpp"
#include "charvar/classdata.hpp"
#include "charvar/exactq.hpp"
#include "charvar/plethys.hpp"
#include "charvar/repscan.hpp"
#include "charvar/tileforge.hpp"

namespace charvar::audit {

struct Outcome {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome(const Limits&)> run;
};

namespace detail {

// Accumulates sub-checks; the first few failures are kept for the detail line.
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_.push_back(what);
  }
  void note(const std::string& s) { extra_.push_back(s); }

  Outcome finish(int id, const std::string& title) const {
    std::ostringstream out;
    out << (checks_ - failures_) << "/" << checks_ << " checks";
    for (const auto& s : extra_) out << "; " << s;
    for (const auto& s : notes_) out << "; FAILED " << s;
    return {id, title, failures_ == 0 && checks_ > 0, out.str(), 0};
  }

 private:
  int checks_ = 0;
  int failures_ = 0;
  std::vector<std::string> notes_;
  std::vector<std::string> extra_;
};

inline Matrix scalar(const FiniteField& F, int n, FieldElement c) { return mat::scale(F, c, Matrix::identity(n)); }

inline std::string label(std::initializer_list<std::pair<const char*, long long>> kv) {
  std::ostringstream out;
  out << "(";
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) out << ",";
    out << k << "=" << v;
    first = false;
  }
  out << ")";
  return out.str();
}

inline RatFunc random_ratfunc(std::mt19937& rng) {
  std::uniform_int_distribution<int> coef(-4, 4), deg(0, 2), pick(0, 3);
  std::vector<BigInt> c;
  const int d = deg(rng);
  for (int i = 0; i <= d; ++i) c.emplace_back(coef(rng));
  const LaurentPoly num = LaurentPoly::from_coeffs(c);
  switch (pick(rng)) {
    case 0: return RatFunc(num);
    case 1: return RatFunc(num, LaurentPoly::q() - 1);
    case 2: return RatFunc(num, LaurentPoly::q());
    default: return RatFunc(num, LaurentPoly::monomial(1, 2) - 1).shift(-1);
  }
}

inline TruncSeries<RatFunc> random_series(std::mt19937& rng, int N, double density = 0.6) {
  std::bernoulli_distribution keep(density);
  TruncSeries<RatFunc> f(N);
  for (int n = 1; n <= N; ++n)
    if (keep(rng)) f[n] = random_ratfunc(rng);
  return f;
}

}  // namespace detail

inline Outcome exp_identity_genus_one(const Limits& limits) {
  detail::Tally t;
  PolynomialModeOptions opts;
  opts.primes = {3, 5, 7, 11, 13, 17, 19, 23, 29};
  opts.holdout = 31;
  opts.limits = limits;
  const auto r = verify_exp_identity_polynomial(1, 2, opts);
  for (const auto& d : r.report.degrees) t.expect(d.pass, "x^" + std::to_string(d.degree));

  const LaurentPoly q = LaurentPoly::q();
  t.expect(r.a.terms[1] == RatFunc(q - 1), "a_1 = q - 1");
  t.expect(r.b.terms[2] - r.a.terms[2] == RatFunc(q * q - q), "b_2 - a_2 = q^2 - q");

  for (std::uint32_t p : {3u, 5u, 7u}) {
    const auto F = field_create(p);
    for (int n = 1; n <= 2; ++n) {
      const auto zeta = primitive_root_of_unity(F, static_cast<unsigned>(n));
      const BigInt tw = brute_force_count(n, 1, F, detail::scalar(F, n, zeta.element), limits);
      const BigInt un = brute_force_count(n, 1, F, Matrix::identity(n), limits);
      t.expect(r.twisted.at(n).evaluate(BigInt(p)) == BigRational(tw), "T_" + std::to_string(n) + " brute p=" +
                                                                           std::to_string(p));
      t.expect(r.untwisted.at(n).evaluate(BigInt(p)) == BigRational(un), "U_" + std::to_string(n) + " brute p=" +
                                                                             std::to_string(p));
    }
  }
  t.note("T_2 = " + r.twisted.at(2).to_string());
  return t.finish(1, "Exp identity, g=1 N=2, polynomial mode");
}

inline Outcome exp_identity_genus_two(const Limits& limits) {
  detail::Tally t;
  for (std::uint32_t p : {3u, 5u}) {
    NumericModeOptions opts;
    opts.p = p;
    opts.limits = limits;
    const auto r = verify_exp_identity_numeric(2, 2, opts);
    for (const auto& d : r.report.degrees)
      t.expect(d.pass, "p=" + std::to_string(p) + " x^" + std::to_string(d.degree));
  }
  return t.finish(2, "Exp identity, g=2 N=2, numeric mode p=3,5");
}

inline Outcome oracle_equivalence(const Limits& limits) {
  detail::Tally t;
  for (auto [n, q, g] : std::vector<std::tuple<int, std::uint32_t, int>>{{2, 2, 1}, {2, 2, 2}, {2, 3, 1}, {2, 3, 2}}) {
    const auto F = field_create(q);
    const auto T = build_class_table(n, F, limits);
    const auto dist = brute_force_distribution(n, g, F, limits);
    for (const auto& c : T->classes()) {
      const auto it = dist.find(c.representative);
      const BigInt brute = it == dist.end() ? BigInt(0) : BigInt(it->second);
      t.expect(genus_count(T, g, c.representative, limits) == brute,
               detail::label({{"n", n}, {"q", q}, {"g", g}}) + " class " + mat::to_string(F, c.representative));
    }
  }
  return t.finish(3, "Convolution equals brute force on every class");
}

inline Outcome dimred_identity(const Limits& limits) {
  detail::Tally t;
  const auto hex = corpus::hex_torus();
  const Quiver Q = dual_quiver(hex);
  const Potential W = potential_of(hex);
  const Cut z{{*Q.arrow_named("z")}};
  for (int gamma : {1, 2})
    for (std::uint32_t q : {2u, 3u})
      t.expect(dimred_count_check(Q, W, z, {gamma}, field_create(q), limits).pass,
               "three-loop " + detail::label({{"gamma", gamma}, {"q", q}}));
  const auto sq = corpus::square_torus();
  const Quiver Qs = dual_quiver(sq);
  const Potential Ws = potential_of(sq);
  for (const auto& cut : find_cuts(Qs, Ws))
    for (std::uint32_t q : {2u, 3u})
      t.expect(dimred_count_check(Qs, Ws, cut, {1, 1}, field_create(q), limits).pass,
               "square " + detail::label({{"q", q}}));
  return t.finish(4, "Dimensional-reduction count identity");
}

inline Outcome morita_identity(const Limits& limits) {
  detail::Tally t;
  for (const auto& T : {corpus::hex_torus(), corpus::square_torus()})
    for (int n : {1, 2})
      for (std::uint32_t q : {2u, 3u}) {
        const auto r = morita_count_check(T, n, field_create(q), limits);
        t.expect(r.pass, T.name + " " + detail::label({{"n", n}, {"q", q}}));
        if (T.name == "hex-torus" && n == 2 && q == 3) {
          t.expect(r.details.value("raw", "") == "384" && r.lhs == 8 && r.rhs == 8, "384/48 = 8");
          t.note("hex-torus (n=2,q=3): " + to_decimal(r.lhs) + " = " + to_decimal(r.rhs));
        }
      }
  return t.finish(5, "Morita / 2d-Jacobi stack counts");
}

inline Outcome gtrue_identity(const Limits& limits) {
  detail::Tally t;
  for (const auto& T : {corpus::hex_torus(), corpus::square_torus()})
    for (int n : {1, 2})
      for (std::uint32_t q : {2u, 3u})
        t.expect(gtrue_count_check(T, n, field_create(q), limits).pass, T.name + " " + detail::label({{"n", n}, {"q", q}}));
  return t.finish(6, "Jacobi algebra vs surface-group stack counts");
}

inline Outcome symbolic_suite(const Limits&) {
  detail::Tally t;
  const auto hex = corpus::hex_torus();
  const Quiver Q = dual_quiver(hex);
  const Potential W = potential_of(hex);
  const int x = *Q.arrow_named("x"), y = *Q.arrow_named("y"), z = *Q.arrow_named("z");
  auto bracket = [](int a, int b) { return simplify(PathSum{{1, {a, b}}, {-1, {b, a}}}); };
  const std::vector<std::pair<int, PathSum>> expected{{x, bracket(y, z)}, {y, bracket(z, x)}, {z, bracket(x, y)}};
  for (const auto& [a, want] : expected) {
    const PathSum got = simplify(cyclic_derivative(W, a));
    t.expect(path_sum_string(Q, got) == path_sum_string(Q, want),
             "d/d" + Q.arrows[static_cast<std::size_t>(a)].name + " = " + path_sum_string(Q, got));
  }

  std::vector<std::vector<int>> cuts;
  for (const auto& c : find_cuts(Q, W)) cuts.push_back(c.arrows);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::vector<int>> want_cuts{{x}, {y}, {z}};
  std::sort(want_cuts.begin(), want_cuts.end());
  t.expect(cuts == want_cuts, "cuts {x},{y},{z}");

  const Presentation P = two_dim_jacobi(localize_except(Q, Cut{{z}}), W, Cut{{z}});
  std::vector<int> gens = P.generators;
  std::sort(gens.begin(), gens.end());
  std::vector<int> want_gens{x, y};
  std::sort(want_gens.begin(), want_gens.end());
  t.expect(gens == want_gens, "generators x, y");
  t.expect(P.quiver.invertible[static_cast<std::size_t>(x)] && P.quiver.invertible[static_cast<std::size_t>(y)],
           "x, y inverted");
  t.expect(P.relations.size() == 1 && path_sum_string(Q, P.relations.front().sum) == path_sum_string(Q, bracket(x, y)),
           "relation xy - yx");
  return t.finish(7, "Symbolic suite for x[y,z]");
}

inline Outcome shift_audit_suite(const Limits&) {
  detail::Tally t;
  std::vector<int> genera;
  for (const auto& T : corpus::all()) {
    genera.push_back(T.genus);
    const Quiver Q = dual_quiver(T);
    for (const auto& cut : find_cuts(Q, potential_of(T)))
      t.expect(2 * static_cast<int>(cut.arrows.size()) == T.V(), T.name + " |cut| = V/2");
    for (int n = 1; n <= 3; ++n) {
      const auto s = shift_audit(T, n);
      t.expect(s.difference == BigInt(2 - 2 * T.genus) * n * n, T.name + " n=" + std::to_string(n));
    }
  }
  std::sort(genera.begin(), genera.end());
  t.expect(genera == std::vector<int>{1, 1, 2}, "corpus genera 1, 1, 2");
  return t.finish(8, "Euler / shift audit over the corpus");
}

inline Outcome plethystic_suite(const Limits&) {
  detail::Tally t;
  using Series = TruncSeries<RatFunc>;
  std::mt19937 rng(20241);
  for (int trial = 0; trial < 100; ++trial) {
    const Series f = detail::random_series(rng, 6);
    t.expect(pleth_log(pleth_exp(f)) == f, "roundtrip " + std::to_string(trial));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const Series f = detail::random_series(rng, 5), h = detail::random_series(rng, 5);
    t.expect(pleth_exp(f + h) == pleth_exp(f) * pleth_exp(h), "additivity " + std::to_string(trial));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const Series f = detail::random_series(rng, 8);
    for (int a = 1; a <= 3; ++a)
      for (int b = 1; b <= 3; ++b) t.expect(adams(adams(f, a), b) == adams(f, a * b), "adams composition");
  }
  for (int N = 1; N <= 6; ++N) {
    const Series e = pleth_exp(Series::monomial(N, 1, RatFunc(1)));
    Series want(N);
    for (int n = 0; n <= N; ++n) want[n] = RatFunc(1);
    t.expect(e == want, "Exp(x) at N=" + std::to_string(N));
  }
  return t.finish(9, "Plethystic property suite");
}

inline Outcome root_independence(const Limits& limits) {
  detail::Tally t;
  for (auto [n, q] : std::vector<std::pair<int, std::uint32_t>>{{2, 3}, {2, 5}, {2, 7}, {3, 7}, {4, 5}}) {
    const auto F = field_create(q);
    const auto roots = primitive_roots_of_unity(F, static_cast<unsigned>(n));
    t.expect(!roots.empty(), "roots exist");
    if (roots.empty()) continue;
    const BigRational first = twisted_count(n, 1, F, limits, roots.front()).value;
    for (const auto& r : roots)
      t.expect(twisted_count(n, 1, F, limits, r).value == first, detail::label({{"n", n}, {"q", q}}));
  }
  return t.finish(10, "Twisted counts independent of the root");
}

inline Outcome interpolation_holdout(const Limits& limits) {
  detail::Tally t;
  const std::vector<std::uint32_t> primes{3, 5, 7, 11, 13, 17, 19, 23, 29};
  const std::vector<std::uint32_t> fresh{31, 37, 41};
  for (auto [n, g] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}}) {
    for (bool twisted : {true, false}) {
      auto sample = [&](std::uint32_t p) {
        const auto F = field_create(p);
        if (twisted) return numerator_of(twisted_count(n, g, F, limits, primitive_root_of_unity(F, n)).value);
        return numerator_of(untwisted_count(n, g, F, limits).value);
      };
      InterpolationProblem prob;
      prob.degree_bound = degree_bound_for(n, g);
      for (std::size_t i = 0; i < static_cast<std::size_t>(prob.degree_bound) + 1 && i < primes.size(); ++i)
        prob.samples.push_back({primes[i], sample(primes[i])});
      prob.holdout = Sample{fresh.front(), sample(fresh.front())};
      const std::string what =
          std::string(twisted ? "T" : "U") + detail::label({{"n", n}, {"g", g}});
      try {
        const LaurentPoly f = interpolate(prob);
        for (std::uint32_t p : fresh)
          t.expect(f.evaluate(BigInt(p)) == BigRational(sample(p)), what + " at " + std::to_string(p));
      } catch (const Error& e) {
        t.expect(false, what + ": " + e.what());
      }
      // A corrupted holdout must be rejected.
      InterpolationProblem bad = prob;
      bad.holdout->count += 1;
      bool rejected = false;
      try {
        interpolate(bad);
      } catch (const Error& e) {
        rejected = e.code() == ErrorCode::HoldoutMismatch;
      }
      t.expect(rejected, what + " corrupted holdout rejected");
    }
  }
  return t.finish(11, "Interpolated polynomials reproduce fresh primes");
}

inline std::vector<Criterion> criteria() {
  return {
      {1, "Exp identity, g=1 N=2, polynomial mode", exp_identity_genus_one},
      {2, "Exp identity, g=2 N=2, numeric mode p=3,5", exp_identity_genus_two},
      {3, "Convolution equals brute force on every class", oracle_equivalence},
      {4, "Dimensional-reduction count identity", dimred_identity},
      {5, "Morita / 2d-Jacobi stack counts", morita_identity},
      {6, "Jacobi algebra vs surface-group stack counts", gtrue_identity},
      {7, "Symbolic suite for x[y,z]", symbolic_suite},
      {8, "Euler / shift audit over the corpus", shift_audit_suite},
      {9, "Plethystic property suite", plethystic_suite},
      {10, "Twisted counts independent of the root", root_independence},
      {11, "Interpolated polynomials reproduce fresh primes", interpolation_holdout},
  };
}

// Runs one criterion; library errors count as failures.
inline Outcome run(const Criterion& c, const Limits& limits) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = c.run(limits);
  } catch (const Error& e) {
    out = {c.id, c.title, false, e.what(), 0};
  }
  out.id = c.id;
  out.title = c.title;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline std::string line(const Outcome& o) {
  std::ostringstream out;
  out << (o.pass ? "PASS" : "FAIL") << "  [" << o.id << "] " << o.title << "  (" << o.detail << ")";
  return out.str();
}

inline nlohmann::json to_json(const std::vector<Outcome>& outcomes) {
  nlohmann::json rows = nlohmann::json::array();
  bool all = true;
  for (const auto& o : outcomes) {
    rows.push_back({{"id", o.id}, {"title", o.title}, {"pass", o.pass}, {"detail", o.detail}});
    all = all && o.pass;
  }
  return {{"schema", 1}, {"kind", "audit"}, {"criteria", rows}, {"pass", all}};
}

}  // namespace charvar::audit

#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "charvar/charcount.hpp"
#include "charvar/exactq.hpp"
#include "charvar/plethys.hpp"
#include "charvar/repscan.hpp"
#include "charvar/tileforge.hpp"

namespace charvar::report {

using nlohmann::json;

inline constexpr int kSchema = 1;

// Integers as decimal strings, everything else as {num, den}.
inline json rational(const BigRational& r) {
  if (is_integer(r)) return to_decimal(numerator_of(r));
  return json{{"num", to_decimal(numerator_of(r))}, {"den", to_decimal(denominator_of(r))}};
}

inline json integer(const BigInt& v) { return to_decimal(v); }

inline json polynomial(const LaurentPoly& f) {
  json out = json::object();
  for (const auto& [e, c] : f.terms()) out[std::to_string(e)] = to_decimal(c);
  return out;
}

inline json ratfunc(const RatFunc& f) {
  return json{{"numerator", polynomial(f.numerator())}, {"denominator", polynomial(f.denominator())},
              {"text", f.to_string()}};
}

inline json envelope(const std::string& kind, json body) {
  json out{{"schema", kSchema}, {"kind", kind}};
  for (auto& [k, v] : body.items()) out[k] = std::move(v);
  return out;
}

inline json count_record(const CountRecord& r) {
  return json{{"n", r.n}, {"g", r.g}, {"p", r.p}, {"k", r.k}, {"kind", std::string(to_string(r.kind))},
              {"value", rational(r.value)}};
}

inline json labeled_values(const std::vector<LabeledValue>& vs) {
  if (vs.size() == 1 && vs.front().at.empty()) return vs.front().value;
  json out = json::object();
  for (const auto& v : vs) out[v.at] = v.value;
  return out;
}

inline json verification(const VerificationReport& r) {
  json degrees = json::array();
  for (const auto& d : r.degrees)
    degrees.push_back(
        {{"degree", d.degree}, {"lhs", labeled_values(d.lhs)}, {"rhs", labeled_values(d.rhs)}, {"pass", d.pass}});
  return json{{"g", r.g}, {"N", r.N}, {"mode", r.mode}, {"degrees", degrees}, {"pass", r.pass()}};
}

template <typename C>
json eseries_terms(const ESeries<C>& s) {
  json out = json::array();
  for (int n = 0; n <= s.terms.truncation(); ++n) {
    if constexpr (std::is_same_v<C, RatFunc>) {
      out.push_back(ratfunc(s.terms[n]));
    } else {
      const int depth = n == 0 ? 1 : s.terms.truncation() / n;
      out.push_back(labeled_values(detail::labeled(s.terms[n], depth)));
    }
  }
  return out;
}

inline json check(const CheckReport& r) {
  return json{{"check", r.check}, {"inputs", r.inputs},   {"lhs", rational(r.lhs)},
              {"rhs", rational(r.rhs)}, {"pass", r.pass}, {"details", r.details}};
}

inline json word(const Quiver& Q, const Word& w) {
  json out = json::array();
  for (int a : w) out.push_back(Q.arrows[static_cast<std::size_t>(a)].name);
  return out;
}

inline json cuts(const Quiver& Q, const std::vector<Cut>& cs) {
  json out = json::array();
  for (const auto& c : cs) out.push_back(word(Q, c.arrows));
  return out;
}

inline json tiling_info(const BraneTiling& T) {
  const Quiver Q = dual_quiver(T);
  const Potential W = potential_of(T);
  json arrows = json::array();
  for (const auto& a : Q.arrows) arrows.push_back({{"name", a.name}, {"source", a.source}, {"target", a.target}});
  json potential = json::array();
  for (const auto& t : W) potential.push_back({{"sign", t.sign}, {"word", word(Q, t.word)}});
  json derivatives = json::object();
  for (int a = 0; a < Q.arrow_count(); ++a)
    derivatives[Q.arrows[static_cast<std::size_t>(a)].name] = path_sum_string(Q, simplify(cyclic_derivative(W, a)));
  return json{{"name", T.name},
              {"V", T.V()},
              {"E", T.E()},
              {"F", T.F()},
              {"genus", T.genus},
              {"vertices", Q.vertices},
              {"arrows", arrows},
              {"potential", potential},
              {"potential_text", potential_string(Q, W)},
              {"cyclic_derivatives", derivatives},
              {"cuts", cuts(Q, find_cuts(Q, W))}};
}

namespace detail {

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void flatten(const json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object() || j.is_array()) {
    if (j.empty()) rows.emplace_back(path, j.dump());
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string key = j.is_object() ? it.key() : std::to_string(std::distance(j.begin(), it));
      flatten(*it, path.empty() ? key : path + "." + key, rows);
    }
    return;
  }
  rows.emplace_back(path, j.is_string() ? j.get<std::string>() : j.dump());
}

}  // namespace detail

// Two-column key,value rendering with dotted paths.
inline std::string to_csv(const json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  detail::flatten(j, "", rows);
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [k, v] : rows) out << detail::csv_cell(k) << ',' << detail::csv_cell(v) << '\n';
  return out.str();
}

}  // namespace charvar::report

#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "charvar/bigint.hpp"
#include "charvar/error.hpp"

namespace charvar {

// Bipartite map given by its rotation system: each white and black vertex
// lists its edges counterclockwise.
struct BraneTiling {
  std::string name;
  int edges = 0;
  std::vector<std::vector<int>> white;
  std::vector<std::vector<int>> black;
  std::vector<std::string> arrow_names;  // optional, one per edge

  std::vector<int> sigma_w, sigma_b, sigma_b_inv;
  std::vector<int> white_of, black_of;
  std::vector<std::vector<int>> faces;  // cycles of sigma_w . sigma_b
  std::vector<int> face_of;
  int genus = 1;

  int V() const { return static_cast<int>(white.size() + black.size()); }
  int E() const { return edges; }
  int F() const { return static_cast<int>(faces.size()); }
};

namespace detail {

inline std::vector<int> rotation(int edges, const std::vector<std::vector<int>>& cycles, std::vector<int>& vertex_of,
                                 const char* colour) {
  std::vector<int> sigma(static_cast<std::size_t>(edges), -1);
  vertex_of.assign(static_cast<std::size_t>(edges), -1);
  for (std::size_t v = 0; v < cycles.size(); ++v) {
    const auto& c = cycles[v];
    if (c.empty()) fail(ErrorCode::MalformedMap, std::string("empty ") + colour + " cycle");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const int e = c[i];
      if (e < 0 || e >= edges) fail(ErrorCode::MalformedMap, "edge index " + std::to_string(e) + " out of range");
      if (sigma[static_cast<std::size_t>(e)] != -1)
        fail(ErrorCode::MalformedMap, "edge " + std::to_string(e) + " appears twice among " + colour + " cycles");
      sigma[static_cast<std::size_t>(e)] = c[(i + 1) % c.size()];
      vertex_of[static_cast<std::size_t>(e)] = static_cast<int>(v);
    }
  }
  for (int e = 0; e < edges; ++e)
    if (sigma[static_cast<std::size_t>(e)] == -1)
      fail(ErrorCode::MalformedMap, "edge " + std::to_string(e) + " is missing from the " + colour + " cycles");
  return sigma;
}

}  // namespace detail

inline BraneTiling build_tiling(const std::vector<std::vector<int>>& white, const std::vector<std::vector<int>>& black,
                                int edges = -1, std::string name = {}, std::vector<std::string> arrow_names = {}) {
  BraneTiling T;
  if (edges < 0) {
    edges = 0;
    for (const auto& c : white) edges += static_cast<int>(c.size());
  }
  if (edges <= 0) fail(ErrorCode::MalformedMap, "a tiling needs at least one edge");
  T.name = std::move(name);
  T.edges = edges;
  T.white = white;
  T.black = black;
  if (!arrow_names.empty() && arrow_names.size() != static_cast<std::size_t>(edges))
    fail(ErrorCode::MalformedMap, "arrow_names must name every edge");
  T.arrow_names = std::move(arrow_names);

  T.sigma_w = detail::rotation(edges, white, T.white_of, "white");
  T.sigma_b = detail::rotation(edges, black, T.black_of, "black");
  T.sigma_b_inv.assign(static_cast<std::size_t>(edges), 0);
  for (int e = 0; e < edges; ++e) T.sigma_b_inv[static_cast<std::size_t>(T.sigma_b[static_cast<std::size_t>(e)])] = e;

  // Connectivity of the map.
  std::vector<int> parent(static_cast<std::size_t>(edges));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int e = 0; e < edges; ++e) {
    parent[find(e)] = find(T.sigma_w[e]);
    parent[find(e)] = find(T.sigma_b[e]);
  }
  for (int e = 0; e < edges; ++e)
    if (find(e) != find(0)) fail(ErrorCode::MalformedMap, "the bipartite map is not connected");

  T.face_of.assign(static_cast<std::size_t>(edges), -1);
  for (int e = 0; e < edges; ++e) {
    if (T.face_of[e] != -1) continue;
    std::vector<int> face;
    for (int cur = e; T.face_of[cur] == -1; cur = T.sigma_w[T.sigma_b[cur]]) {
      T.face_of[cur] = static_cast<int>(T.faces.size());
      face.push_back(cur);
    }
    T.faces.push_back(std::move(face));
  }

  const int chi = T.V() - T.E() + T.F();
  if (chi == 2) fail(ErrorCode::GenusZero, "the map is spherical (V - E + F = 2); genus must be at least 1");
  if (chi > 2 || chi % 2 != 0) fail(ErrorCode::MalformedMap, "Euler characteristic " + std::to_string(chi));
  T.genus = (2 - chi) / 2;
  return T;
}

struct Arrow {
  int source = 0;
  int target = 0;
  std::string name;
};

struct Quiver {
  int vertices = 0;
  std::vector<Arrow> arrows;
  std::vector<bool> invertible;

  int arrow_count() const { return static_cast<int>(arrows.size()); }
  std::optional<int> arrow_named(const std::string& name) const {
    for (int i = 0; i < arrow_count(); ++i)
      if (arrows[static_cast<std::size_t>(i)].name == name) return i;
    return std::nullopt;
  }
};

// A word lists arrows in traversal order: the head of each arrow is the tail of the next.
using Word = std::vector<int>;

struct PotentialTerm {
  int sign = 1;
  Word word;
};

using Potential = std::vector<PotentialTerm>;

struct PathTerm {
  BigInt coeff = 1;
  Word word;
};

using PathSum = std::vector<PathTerm>;

struct Cut {
  std::vector<int> arrows;  // ascending
  bool operator==(const Cut&) const = default;
};

struct Grading {
  std::vector<BigRational> weight;
};

// One vertex per face, one arrow per edge running from face_of[e] to the face
// on the other side; arrows around a black vertex close up into a cycle.
inline Quiver dual_quiver(const BraneTiling& T) {
  Quiver Q;
  Q.vertices = T.F();
  for (int e = 0; e < T.E(); ++e) {
    Arrow a;
    a.source = T.face_of[static_cast<std::size_t>(e)];
    a.target = T.face_of[static_cast<std::size_t>(T.sigma_b_inv[static_cast<std::size_t>(e)])];
    a.name = T.arrow_names.empty() ? "a" + std::to_string(e) : T.arrow_names[static_cast<std::size_t>(e)];
    Q.arrows.push_back(std::move(a));
  }
  Q.invertible.assign(Q.arrows.size(), true);
  return Q;
}

// Sum of white vertex cycles minus black vertex cycles.
inline Potential potential_of(const BraneTiling& T) {
  Potential W;
  for (const auto& c : T.white) W.push_back({+1, c});
  for (const auto& c : T.black) {
    Word w{c.front()};
    for (int cur = T.sigma_b_inv[static_cast<std::size_t>(c.front())]; cur != c.front();
         cur = T.sigma_b_inv[static_cast<std::size_t>(cur)])
      w.push_back(cur);
    W.push_back({-1, w});
  }
  return W;
}

// Raw summands: one per occurrence of a, with sign * (suffix . prefix).
inline PathSum cyclic_derivative(const Potential& W, int a) {
  PathSum out;
  for (const auto& term : W)
    for (std::size_t i = 0; i < term.word.size(); ++i) {
      if (term.word[i] != a) continue;
      Word w(term.word.begin() + static_cast<std::ptrdiff_t>(i) + 1, term.word.end());
      w.insert(w.end(), term.word.begin(), term.word.begin() + static_cast<std::ptrdiff_t>(i));
      out.push_back({term.sign, std::move(w)});
    }
  return out;
}

// Merges equal words and drops zero coefficients; keeps first-occurrence order.
inline PathSum simplify(const PathSum& s) {
  PathSum out;
  for (const auto& t : s) {
    auto it = std::find_if(out.begin(), out.end(), [&](const PathTerm& o) { return o.word == t.word; });
    if (it == out.end())
      out.push_back(t);
    else
      it->coeff += t.coeff;
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const PathTerm& t) { return t.coeff == 0; }), out.end());
  return out;
}

inline std::string word_string(const Quiver& Q, const Word& w) {
  if (w.empty()) return "e";
  std::string out;
  bool multi = false;
  for (int a : w) multi |= Q.arrows[static_cast<std::size_t>(a)].name.size() > 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i && multi) out += "*";
    out += Q.arrows[static_cast<std::size_t>(w[i])].name;
  }
  return out;
}

inline std::string path_sum_string(const Quiver& Q, const PathSum& s) {
  if (s.empty()) return "0";
  std::string out;
  for (const auto& t : s) {
    const BigInt mag = t.coeff < 0 ? BigInt(-t.coeff) : t.coeff;
    if (out.empty())
      out += t.coeff < 0 ? "-" : "";
    else
      out += t.coeff < 0 ? " - " : " + ";
    if (mag != 1) out += to_decimal(mag) + "*";
    out += word_string(Q, t.word);
  }
  return out;
}

inline std::string potential_string(const Quiver& Q, const Potential& W) {
  PathSum s;
  for (const auto& t : W) s.push_back({t.sign, t.word});
  return path_sum_string(Q, s);
}

// Arrow subsets meeting every term exactly once (with multiplicity). Arrows are
// decided in index order, taking an arrow before leaving it out.
inline std::vector<Cut> find_cuts(const Quiver& Q, const Potential& W) {
  const int A = Q.arrow_count();
  // occurrences[a][t] = multiplicity of arrow a in term t
  std::vector<std::vector<int>> occ(static_cast<std::size_t>(A), std::vector<int>(W.size(), 0));
  std::vector<int> remaining(W.size(), 0);
  for (std::size_t t = 0; t < W.size(); ++t)
    for (int a : W[t].word) {
      ++occ[static_cast<std::size_t>(a)][t];
      ++remaining[t];
    }
  std::vector<int> hit(W.size(), 0);
  std::vector<Cut> cuts;
  std::vector<int> chosen;

  std::function<void(int)> search = [&](int a) {
    for (std::size_t t = 0; t < W.size(); ++t)
      if (hit[t] > 1 || hit[t] + remaining[t] < 1) return;
    if (a == A) {
      cuts.push_back({chosen});
      return;
    }
    const auto& row = occ[static_cast<std::size_t>(a)];
    for (std::size_t t = 0; t < W.size(); ++t) remaining[t] -= row[t];
    for (std::size_t t = 0; t < W.size(); ++t) hit[t] += row[t];
    chosen.push_back(a);
    search(a + 1);
    chosen.pop_back();
    for (std::size_t t = 0; t < W.size(); ++t) hit[t] -= row[t];
    search(a + 1);
    for (std::size_t t = 0; t < W.size(); ++t) remaining[t] += row[t];
  };
  search(0);
  return cuts;
}

inline bool grading_is_valid(const Potential& W, const Grading& w) {
  for (const auto& t : W) {
    BigRational total = 0;
    for (int a : t.word) total += w.weight[static_cast<std::size_t>(a)];
    if (total != 1) return false;
  }
  return true;
}

inline Grading grading_from_cut(const Quiver& Q, const Potential& W, const Cut& cut) {
  Grading g{std::vector<BigRational>(static_cast<std::size_t>(Q.arrow_count()), 0)};
  for (int a : cut.arrows) g.weight.at(static_cast<std::size_t>(a)) = 1;
  if (!grading_is_valid(W, g)) fail(ErrorCode::InvalidArgument, "arrow set is not a cut of the potential");
  return g;
}

// Minimum-norm solution of {sum of weights over each term = 1}: w = A^T y with A A^T y = 1.
inline Grading grading_min_norm(const Quiver& Q, const Potential& W) {
  const std::size_t m = W.size(), A = static_cast<std::size_t>(Q.arrow_count());
  std::vector<std::vector<BigRational>> M(m, std::vector<BigRational>(A, 0));
  for (std::size_t t = 0; t < m; ++t)
    for (int a : W[t].word) M[t][static_cast<std::size_t>(a)] += 1;
  // Augmented system (A A^T | 1).
  std::vector<std::vector<BigRational>> G(m, std::vector<BigRational>(m + 1, 0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < A; ++k) G[i][j] += M[i][k] * M[j][k];
    G[i][m] = 1;
  }
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m && row < m; ++col) {
    std::size_t piv = row;
    while (piv < m && G[piv][col] == 0) ++piv;
    if (piv == m) continue;
    std::swap(G[piv], G[row]);
    const BigRational inv = BigRational(1) / G[row][col];
    for (auto& v : G[row]) v *= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || G[r][col] == 0) continue;
      const BigRational f = G[r][col];
      for (std::size_t c = 0; c <= m; ++c) G[r][c] -= f * G[row][c];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (std::size_t r = row; r < m; ++r)
    if (G[r][m] != 0) fail(ErrorCode::NoGrading, "no weights make every potential term weight one");
  std::vector<BigRational> y(m, 0);
  for (std::size_t r = 0; r < row; ++r) y[pivot_col[r]] = G[r][m];
  Grading g{std::vector<BigRational>(A, 0)};
  for (std::size_t k = 0; k < A; ++k)
    for (std::size_t t = 0; t < m; ++t) g.weight[k] += M[t][k] * y[t];
  if (!grading_is_valid(W, g)) fail(ErrorCode::NoGrading, "no weights make every potential term weight one");
  return g;
}

struct Relation {
  int arrow = 0;  // the arrow differentiated by
  PathSum sum;
};

struct Presentation {
  Quiver quiver;
  std::vector<int> generators;  // arrows that survive
  std::vector<Relation> relations;

  bool is_generator(int a) const { return std::find(generators.begin(), generators.end(), a) != generators.end(); }

  std::string to_string() const {
    std::ostringstream out;
    out << "vertices: " << quiver.vertices << "\n";
    out << "generators:";
    for (int a : generators) {
      const auto& arr = quiver.arrows[static_cast<std::size_t>(a)];
      out << " " << arr.name << "(" << arr.source << "->" << arr.target << ")";
      if (quiver.invertible[static_cast<std::size_t>(a)]) out << " " << arr.name << "^-1";
    }
    out << "\nrelations:\n";
    for (const auto& r : relations)
      out << "  d/d" << quiver.arrows[static_cast<std::size_t>(r.arrow)].name << ": "
          << path_sum_string(quiver, r.sum) << "\n";
    return out.str();
  }
};

inline Presentation jacobi_presentation(const Quiver& Q, const Potential& W) {
  Presentation P{Q, {}, {}};
  for (int a = 0; a < Q.arrow_count(); ++a) {
    P.generators.push_back(a);
    P.relations.push_back({a, simplify(cyclic_derivative(W, a))});
  }
  return P;
}

// Localize every arrow except the cut.
inline Quiver localize_except(Quiver Q, const Cut& cut) {
  std::fill(Q.invertible.begin(), Q.invertible.end(), true);
  for (int a : cut.arrows) Q.invertible.at(static_cast<std::size_t>(a)) = false;
  return Q;
}

inline Presentation two_dim_jacobi(const Quiver& Q, const Potential& W, const Cut& cut) {
  for (int a : cut.arrows)
    if (Q.invertible.at(static_cast<std::size_t>(a)))
      fail(ErrorCode::CutMeetsLocalization, "cut arrow " + Q.arrows[static_cast<std::size_t>(a)].name + " is localized");
  grading_from_cut(Q, W, cut);
  Presentation P{Q, {}, {}};
  for (int a = 0; a < Q.arrow_count(); ++a)
    if (std::find(cut.arrows.begin(), cut.arrows.end(), a) == cut.arrows.end()) P.generators.push_back(a);
  for (int a : cut.arrows) {
    Relation r{a, simplify(cyclic_derivative(W, a))};
    for (const auto& t : r.sum)
      for (int b : t.word)
        if (!P.is_generator(b)) fail(ErrorCode::AuditFailure, "2d relation uses a cut arrow");
    P.relations.push_back(std::move(r));
  }
  return P;
}

struct ShiftAudit {
  BigInt vertex_term;  // V n^2
  BigInt arrow_term;   // (|Q1| - |Q0|) n^2
  BigInt difference;
};

inline ShiftAudit shift_audit(const BraneTiling& T, int n) {
  const Quiver Q = dual_quiver(T);
  const BigInt n2 = BigInt(n) * n;
  ShiftAudit s{T.V() * n2, (Q.arrow_count() - Q.vertices) * n2, 0};
  s.difference = s.vertex_term - s.arrow_term;
  if (s.difference != (2 - 2 * T.genus) * n2)
    fail(ErrorCode::AuditFailure, "V n^2 - (|Q1| - |Q0|) n^2 differs from (2 - 2g) n^2");
  for (const auto& cut : find_cuts(Q, potential_of(T)))
    if (2 * static_cast<int>(cut.arrows.size()) != T.V())
      fail(ErrorCode::AuditFailure, "cut of size " + std::to_string(cut.arrows.size()) + " in a tiling with " +
                                        std::to_string(T.V()) + " vertices");
  return s;
}

inline nlohmann::json tiling_to_json(const BraneTiling& T) {
  nlohmann::json j;
  if (!T.name.empty()) j["name"] = T.name;
  j["edges"] = T.edges;
  j["white"] = T.white;
  j["black"] = T.black;
  if (!T.arrow_names.empty()) j["arrow_names"] = T.arrow_names;
  return j;
}

inline BraneTiling tiling_from_json(const nlohmann::json& j) {
  try {
    return build_tiling(j.at("white").get<std::vector<std::vector<int>>>(),
                        j.at("black").get<std::vector<std::vector<int>>>(), j.at("edges").get<int>(),
                        j.value("name", std::string{}), j.value("arrow_names", std::vector<std::string>{}));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedMap, std::string("tiling JSON: ") + e.what());
  }
}

inline BraneTiling load_tiling(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open tiling file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedMap, path + ": " + e.what());
  }
  return tiling_from_json(j);
}

namespace corpus {

// Dual to the three-loop quiver with W = xyz - xzy.
inline BraneTiling hex_torus() { return build_tiling({{0, 1, 2}}, {{0, 1, 2}}, 3, "hex-torus", {"x", "y", "z"}); }

inline BraneTiling square_torus() { return build_tiling({{0, 1, 2, 3}}, {{0, 1, 2, 3}}, 4, "square-torus"); }

inline BraneTiling genus2() { return build_tiling({{0, 1, 2, 3, 4, 5}}, {{0, 1, 2, 3, 4, 5}}, 6, "genus2"); }

inline std::vector<BraneTiling> all() { return {hex_torus(), square_torus(), genus2()}; }

}  // namespace corpus

}  // namespace charvar

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "charvar/audit.hpp"
#include "charvar/charcount.hpp"
#include "charvar/plethys.hpp"
#include "charvar/report.hpp"
#include "charvar/repscan.hpp"
#include "charvar/tileforge.hpp"

#ifndef CHARVAR_DATA_DIR
#define CHARVAR_DATA_DIR "data"
#endif

using namespace charvar;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIdentity = 2;

struct Common {
  std::optional<std::uint64_t> max_iterations;
  unsigned workers = 1;
  std::string out;
  std::string format = "json";
};

struct Params {
  int n = 1;
  int g = 1;
  int N = 2;
  std::uint32_t p = 0;
  std::uint32_t k = 1;
  std::string kind = "untwisted";
  std::string side = "twisted";
  std::string mode = "polynomial";
  std::vector<std::uint32_t> primes;
  std::optional<std::uint32_t> holdout;
  std::size_t root_index = 0;
  std::string tiling;
  std::vector<std::string> cut;
  std::vector<int> gamma;
  std::vector<int> only;
};

Limits limits_for(const Common& c) {
  Limits limits = Limits::from_environment();
  if (c.max_iterations) {
    limits.max_iterations = *c.max_iterations;
    limits.max_group_order = std::min<std::uint64_t>(Limits{}.max_group_order, *c.max_iterations);
  }
  if (c.workers < 1) fail(ErrorCode::InvalidArgument, "--workers must be at least 1");
  limits.workers = c.workers;
  return limits;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) fail(ErrorCode::InvalidArgument, "cannot write " + c.out);
  f << text;
}

void emit_json(const Common& c, const json& j) {
  emit(c, c.format == "csv" ? report::to_csv(j) : j.dump(2) + "\n");
}

std::optional<CountKind> kind_named(const std::string& s) {
  if (s == "twisted") return CountKind::TwistedSolutions;
  if (s == "untwisted") return CountKind::UntwistedSolutions;
  return parse_count_kind(s);
}

BraneTiling resolve_tiling(const std::string& arg) {
  if (arg.empty()) fail(ErrorCode::InvalidArgument, "--tiling is required");
  namespace fs = std::filesystem;
  if (fs::exists(arg)) return load_tiling(arg);
  const fs::path bundled = fs::path(CHARVAR_DATA_DIR) / "tilings" / fs::path(arg).filename();
  if (fs::exists(bundled)) return load_tiling(bundled.string());
  const std::string stem = fs::path(arg).stem().string();
  for (const auto& T : corpus::all())
    if (T.name == stem) return T;
  fail(ErrorCode::InvalidArgument, "no tiling file or built-in tiling named " + arg);
}

std::uint32_t require_prime(const Params& p) {
  if (p.p == 0) fail(ErrorCode::InvalidArgument, "--p is required");
  return p.p;
}

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint32_t lcm_upto(int N) {
  std::uint32_t l = 1;
  for (int i = 2; i <= N; ++i) l = std::lcm(l, static_cast<std::uint32_t>(i));
  return l;
}

// Enough primes with lcm(1..N) | p - 1 for every n <= N, then one for the holdout.
void default_primes(int g, int N, Params& p) {
  if (!p.primes.empty()) return;
  const std::uint32_t l = lcm_upto(N);
  const int need = degree_bound_for(N, g) + 1;
  std::uint32_t c = 2;
  while (static_cast<int>(p.primes.size()) < need + (p.holdout ? 0 : 1)) {
    ++c;
    if (is_prime(c) && (c - 1) % l == 0) p.primes.push_back(c);
  }
  if (!p.holdout) {
    p.holdout = p.primes.back();
    p.primes.pop_back();
  }
}

std::uint32_t default_numeric_prime(int N, const Params& p) {
  if (p.p) return p.p;
  const std::uint32_t l = lcm_upto(N);
  for (std::uint32_t c = 3;; ++c)
    if (is_prime(c) && (c - 1) % l == 0) return c;
}

int run_count(const Common& c, const Params& p) {
  const auto kind = kind_named(p.kind);
  if (!kind) fail(ErrorCode::InvalidArgument, "unknown --kind " + p.kind);
  const auto F = field_create(require_prime(p), p.k);
  const Limits limits = limits_for(c);
  CountRecord r;
  if (*kind == CountKind::TwistedSolutions)
    r = twisted_count(p.n, p.g, F, limits, detail::pick_root(F, p.n, p.root_index));
  else
    r = count(*kind, p.n, p.g, F, limits);
  emit_json(c, report::envelope("count", report::count_record(r)));
  return kExitOk;
}

int run_mu_count(const Common& c, const Params& p) {
  const auto F = field_create(require_prime(p), p.k);
  emit_json(c, report::envelope("mu-count", report::count_record(additive_mu_stack_count(p.n, p.g, F, limits_for(c)))));
  return kExitOk;
}

int run_eseries(const Common& c, Params p) {
  const Limits limits = limits_for(c);
  const bool twisted = p.side == "twisted";
  if (!twisted && p.side != "untwisted") fail(ErrorCode::InvalidArgument, "--side must be twisted or untwisted");
  json body{{"g", p.g}, {"N", p.N}, {"side", p.side}, {"mode", p.mode}};
  if (p.mode == "polynomial") {
    default_primes(p.g, p.N, p);
    const auto r = verify_exp_identity_polynomial(p.g, p.N, {p.primes, p.holdout, p.root_index, limits});
    const auto& counts = twisted ? r.twisted : r.untwisted;
    json polys = json::object();
    for (const auto& [n, f] : counts) polys[std::to_string(n)] = report::polynomial(f);
    body["counts"] = polys;
    body["primes"] = p.primes;
    body["holdout"] = *p.holdout;
    body["terms"] = report::eseries_terms(twisted ? r.a : r.b);
  } else if (p.mode == "numeric") {
    p.p = default_numeric_prime(p.N, p);
    const auto r = verify_exp_identity_numeric(p.g, p.N, {p.p, p.root_index, limits});
    json counts = json::array();
    for (const auto& [key, v] : (twisted ? r.twisted : r.untwisted).counts)
      counts.push_back({{"n", key.first}, {"j", key.second}, {"value", report::integer(v)}});
    body["p"] = p.p;
    body["counts"] = counts;
    body["terms"] = report::eseries_terms(twisted ? r.a : r.b);
  } else {
    fail(ErrorCode::InvalidArgument, "--mode must be polynomial or numeric");
  }
  emit_json(c, report::envelope("eseries", body));
  return kExitOk;
}

int run_verify(const Common& c, Params p) {
  const Limits limits = limits_for(c);
  VerificationReport r;
  json extra = json::object();
  if (p.mode == "polynomial") {
    default_primes(p.g, p.N, p);
    r = verify_exp_identity_polynomial(p.g, p.N, {p.primes, p.holdout, p.root_index, limits}).report;
    extra["primes"] = p.primes;
    extra["holdout"] = *p.holdout;
  } else if (p.mode == "numeric") {
    p.p = default_numeric_prime(p.N, p);
    r = verify_exp_identity_numeric(p.g, p.N, {p.p, p.root_index, limits}).report;
    extra["p"] = p.p;
  } else {
    fail(ErrorCode::InvalidArgument, "--mode must be polynomial or numeric");
  }
  json body = report::verification(r);
  for (auto& [k, v] : extra.items()) body[k] = v;
  emit_json(c, report::envelope("verify-exp", body));
  return r.pass() ? kExitOk : kExitIdentity;
}

int run_tiling_info(const Common& c, const Params& p) {
  const BraneTiling T = resolve_tiling(p.tiling);
  json body = report::tiling_info(T);
  body["audit"] = json::array();
  for (int n = 1; n <= 3; ++n) {
    const auto s = shift_audit(T, n);
    body["audit"].push_back({{"n", n},
                             {"vertex_term", report::integer(s.vertex_term)},
                             {"arrow_term", report::integer(s.arrow_term)},
                             {"difference", report::integer(s.difference)}});
  }
  emit_json(c, report::envelope("tiling-info", body));
  return kExitOk;
}

int run_cuts(const Common& c, const Params& p) {
  const BraneTiling T = resolve_tiling(p.tiling);
  const Quiver Q = dual_quiver(T);
  emit_json(c, report::envelope("cuts", {{"tiling", T.name}, {"cuts", report::cuts(Q, find_cuts(Q, potential_of(T)))}}));
  return kExitOk;
}

Cut cut_from_names(const Quiver& Q, const Potential& W, const std::vector<std::string>& names) {
  if (names.empty()) return first_cut(Q, W);
  Cut cut;
  for (const auto& s : names) {
    const auto a = Q.arrow_named(s);
    if (!a) fail(ErrorCode::InvalidArgument, "no arrow named " + s);
    cut.arrows.push_back(*a);
  }
  std::sort(cut.arrows.begin(), cut.arrows.end());
  return cut;
}

int emit_check(const Common& c, const CheckReport& r) {
  emit_json(c, report::envelope("check", report::check(r)));
  return r.pass ? kExitOk : kExitIdentity;
}

int run_dimred(const Common& c, const Params& p) {
  const BraneTiling T = resolve_tiling(p.tiling);
  const Quiver Q = dual_quiver(T);
  const Potential W = potential_of(T);
  std::vector<int> gamma = p.gamma;
  if (gamma.empty()) gamma.assign(static_cast<std::size_t>(Q.vertices), p.n);
  const auto F = field_create(require_prime(p), p.k);
  return emit_check(c, dimred_count_check(Q, W, cut_from_names(Q, W, p.cut), gamma, F, limits_for(c)));
}

int run_morita(const Common& c, const Params& p) {
  const auto F = field_create(require_prime(p), p.k);
  return emit_check(c, morita_count_check(resolve_tiling(p.tiling), p.n, F, limits_for(c)));
}

int run_gtrue(const Common& c, const Params& p) {
  const auto F = field_create(require_prime(p), p.k);
  return emit_check(c, gtrue_count_check(resolve_tiling(p.tiling), p.n, F, limits_for(c)));
}

int run_audit(const Common& c, const Params& p, bool format_given) {
  const Limits limits = limits_for(c);
  std::vector<audit::Outcome> outcomes;
  std::string table;
  for (const auto& crit : audit::criteria()) {
    if (!p.only.empty() && std::find(p.only.begin(), p.only.end(), crit.id) == p.only.end()) continue;
    outcomes.push_back(audit::run(crit, limits));
    if (!format_given) std::cout << audit::line(outcomes.back()) << std::endl;
  }
  const json j = audit::to_json(outcomes);
  if (format_given || !c.out.empty()) emit_json(c, j);
  return j["pass"].get<bool>() ? kExitOk : kExitIdentity;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point counts for character varieties and brane-tiling quivers"};
  app.require_subcommand(1);
  Common common;
  Params params;

  app.add_option("--max-iterations", common.max_iterations, "Bound on enumeration size")->check(CLI::PositiveNumber);
  app.add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", common.out, "Write output to this file instead of stdout");
  auto* format = app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto add_field = [&](CLI::App* s, bool prime_required) {
    auto* o = s->add_option("--p", params.p, "Characteristic")->check(CLI::PositiveNumber);
    if (prime_required) o->required();
    s->add_option("--k", params.k, "Extension degree")->check(CLI::PositiveNumber);
  };

  auto* count = app.add_subcommand("count", "Count solutions or stack points");
  count->add_option("--kind", params.kind, "twisted, untwisted, or a full kind name");
  count->add_option("--n", params.n, "Rank")->required();
  count->add_option("--g", params.g, "Genus")->required();
  count->add_option("--root-index", params.root_index, "Which primitive root of unity");
  add_field(count, true);

  auto* mu = app.add_subcommand("mu-count", "Additive moment-map fibre count over |GL_n|");
  mu->add_option("--n", params.n, "Rank")->required();
  mu->add_option("--g", params.g, "Genus")->required();
  add_field(mu, true);

  auto add_series = [&](CLI::App* s) {
    s->add_option("--g", params.g, "Genus")->required();
    s->add_option("--N", params.N, "Truncation degree")->required();
    s->add_option("--mode", params.mode, "polynomial or numeric")->check(CLI::IsMember({"polynomial", "numeric"}));
    s->add_option("--p", params.p, "Prime for numeric mode");
    s->add_option("--primes", params.primes, "Sample primes for polynomial mode")->delimiter(',');
    s->add_option("--holdout", params.holdout, "Holdout prime for polynomial mode");
    s->add_option("--root-index", params.root_index, "Which primitive root of unity");
  };
  auto* eseries = app.add_subcommand("eseries", "Assemble an E-series");
  add_series(eseries);
  eseries->add_option("--side", params.side, "twisted or untwisted")->check(CLI::IsMember({"twisted", "untwisted"}));
  auto* verify = app.add_subcommand("verify-exp", "Check Exp(sum a_n x^n) = 1 + sum b_n x^n");
  add_series(verify);

  auto* info = app.add_subcommand("tiling-info", "Describe a brane tiling");
  info->add_option("--tiling", params.tiling, "Tiling JSON file or built-in name")->required();
  auto* cuts = app.add_subcommand("cuts", "List the cuts of a tiling potential");
  cuts->add_option("--tiling", params.tiling, "Tiling JSON file or built-in name")->required();

  auto* dimred = app.add_subcommand("dimred-check", "Linear-fibre count identity");
  dimred->add_option("--tiling", params.tiling, "Tiling JSON file or built-in name")->required();
  dimred->add_option("--cut", params.cut, "Cut arrow names (default: first cut)")->delimiter(',');
  dimred->add_option("--gamma", params.gamma, "Dimension vector")->delimiter(',');
  dimred->add_option("--n", params.n, "Uniform dimension when --gamma is absent");
  add_field(dimred, true);

  auto* morita = app.add_subcommand("morita-check", "2d-Jacobi stack count against the untwisted stack count");
  auto* gtrue = app.add_subcommand("gtrue-check", "Localized Jacobi stack count against the surface-group count");
  for (auto* s : {morita, gtrue}) {
    s->add_option("--tiling", params.tiling, "Tiling JSON file or built-in name")->required();
    s->add_option("--n", params.n, "Rank")->required();
    add_field(s, true);
  }

  auto* aud = app.add_subcommand("audit", "Run the acceptance suite");
  aud->add_option("--only", params.only, "Criterion ids")->delimiter(',');

  for (auto* s : app.get_subcommands({})) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*count) return run_count(common, params);
    if (*mu) return run_mu_count(common, params);
    if (*eseries) return run_eseries(common, params);
    if (*verify) return run_verify(common, params);
    if (*info) return run_tiling_info(common, params);
    if (*cuts) return run_cuts(common, params);
    if (*dimred) return run_dimred(common, params);
    if (*morita) return run_morita(common, params);
    if (*gtrue) return run_gtrue(common, params);
    if (*aud) return run_audit(common, params, format->count() > 0);
  } catch (const Error& e) {
    std::cerr << json{{"schema", 1}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump()
              << "\n";
    return e.code() == ErrorCode::IdentityFailure ? kExitIdentity : kExitUsage;
  }
  return kExitUsage;
}

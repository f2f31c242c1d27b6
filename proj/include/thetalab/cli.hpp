#pragma once

// Verification jobs behind the command-line tool. A job names a kind and its
// parameters; run() resolves lattices, calls the library and returns a JSON
// report plus an exit status. Reports are deterministic: they echo the job
// without the worker count and carry no timing, so --jobs never changes a
// byte. Timing and cache statistics go to the caller separately.
//
// Exit status: 0 pass or computed, 2 verification failure, 3 input error,
// 4 internal inconsistency.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "thetalab/cache.hpp"
#include "thetalab/context.hpp"
#include "thetalab/enumeration.hpp"
#include "thetalab/invariants.hpp"
#include "thetalab/jacobi.hpp"
#include "thetalab/registry.hpp"
#include "thetalab/spec_io.hpp"
#include "thetalab/theta.hpp"

namespace thetalab::cli {

inline constexpr int kReportSchema = 1;

enum ExitCode : int { kOk = 0, kFailed = 2, kBadInput = 3, kInconsistent = 4 };

inline const std::vector<std::string>& job_kinds() {
  static const std::vector<std::string> kinds = {
      "validate", "shells",     "theta",        "diff",         "product",
      "restrict", "venkov",     "heat",         "witt",         "schottky",
      "a4-separation", "k-identity", "independence", "hyp-predicate", "registry"};
  return kinds;
}

struct VerificationJob {
  std::string kind;
  std::vector<std::string> lattices;  // built-in names
  std::vector<std::string> specs;     // lattice spec files
  std::optional<std::pair<std::string, std::string>> pair;
  std::optional<std::size_t> genus;
  std::optional<std::size_t> max_genus;
  std::optional<std::int64_t> trace_bound;
  std::optional<std::int64_t> norm_bound;
  std::optional<std::string> tset;
  std::size_t jobs = 1;
  std::optional<std::string> out;
};

struct RunStats {
  double seconds = 0;
  CacheStats cache;
  bool cache_enabled = false;
};

struct Report {
  nlohmann::json body;
  int exit_code = kOk;
  RunStats stats;

  std::string text() const { return body.dump(2) + "\n"; }
};

inline std::pair<std::string, std::string> parse_pair(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
    input_error("--pair expects A:B, got '" + s + "'");
  return {s.substr(0, colon), s.substr(colon + 1)};
}

/// Default trace bound per genus for full truncations.
inline std::int64_t default_trace_bound(std::size_t g) {
  switch (g) {
    case 0:
    case 1: return 10;
    case 2: return 8;
    case 3: return 6;
    default: input_error("genus " + std::to_string(g) +
                         " has no default trace bound; pass --trace-bound or --tset");
  }
}

namespace detail {

inline std::string big(const BigInt& v) { return v.str(); }
inline std::string rat(const Rational& v) { return v.str(); }

inline nlohmann::json job_echo(const VerificationJob& job) {
  nlohmann::json j;
  j["kind"] = job.kind;
  if (!job.lattices.empty()) j["lattices"] = job.lattices;
  if (!job.specs.empty()) j["specs"] = job.specs;
  if (job.pair) j["pair"] = job.pair->first + ":" + job.pair->second;
  if (job.genus) j["genus"] = *job.genus;
  if (job.max_genus) j["max_genus"] = *job.max_genus;
  if (job.trace_bound) j["trace_bound"] = *job.trace_bound;
  if (job.norm_bound) j["norm_bound"] = *job.norm_bound;
  if (job.tset) j["tset"] = *job.tset;
  return j;
}

inline void require_nonnegative(const std::optional<std::int64_t>& v, const char* what) {
  if (v && *v < 0) input_error(std::string(what) + " must be nonnegative");
}

// Owns the contexts of one run, keyed by lattice name.
class Workspace {
 public:
  explicit Workspace(std::size_t jobs) : jobs_(jobs), cache_(CoefficientCache::from_env()) {}

  LatticeContext& named(const std::string& name) {
    const std::string c = Registry::instance().canonical(name);
    if (auto it = contexts_.find(c); it != contexts_.end()) return *it->second;
    return add(c, builtin_lattice(c));
  }

  LatticeContext& spec(const std::string& path) {
    Lattice l = load_lattice_spec(path, Registry::instance().resolver());
    const std::string key = "spec:" + path;
    if (auto it = contexts_.find(key); it != contexts_.end()) return *it->second;
    return add(key, std::move(l));
  }

  /// The lattices named by --lattice and --spec, in that order.
  std::vector<LatticeContext*> listed(const VerificationJob& job) {
    std::vector<LatticeContext*> out;
    for (const auto& n : job.lattices) out.push_back(&named(n));
    for (const auto& s : job.specs) out.push_back(&spec(s));
    return out;
  }

  LatticeContext& single(const VerificationJob& job) {
    auto all = listed(job);
    if (all.size() != 1)
      input_error(job.kind + " needs exactly one lattice (--lattice or --spec)");
    return *all.front();
  }

  std::pair<LatticeContext*, LatticeContext*> pair(const VerificationJob& job) {
    if (!job.pair) input_error(job.kind + " needs --pair A:B");
    return {&named(job.pair->first), &named(job.pair->second)};
  }

  /// The single lattice of the job, without building a context; the Gram
  /// matrix may be indefinite.
  Lattice single_lattice(const VerificationJob& job) {
    if (job.lattices.size() + job.specs.size() != 1)
      input_error(job.kind + " needs exactly one lattice (--lattice or --spec)");
    if (!job.lattices.empty()) return builtin_lattice(job.lattices.front());
    return load_lattice_spec(job.specs.front(), Registry::instance().resolver());
  }

  CoefficientCache* cache() const { return cache_.get(); }

 private:
  LatticeContext& add(const std::string& key, Lattice l) {
    auto ctx = std::make_unique<LatticeContext>(std::move(l), ContextOptions{jobs_, cache_.get()});
    if (ctx->rank() > 0 && ctx->lattice().gram().symmetric() &&
        is_positive_definite(to_rational(ctx->lattice().gram())))
      attach_fingerprint(*ctx);
    return *contexts_.emplace(key, std::move(ctx)).first->second;
  }

  std::size_t jobs_;
  std::unique_ptr<CoefficientCache> cache_;
  std::map<std::string, std::unique_ptr<LatticeContext>> contexts_;
};

inline std::string fingerprint_of(const LatticeContext& ctx) {
  return ctx.fingerprint() ? *ctx.fingerprint() : std::string("none");
}

inline nlohmann::json lattice_ref(const LatticeContext& ctx) {
  return {{"name", ctx.lattice().name()}, {"fingerprint", fingerprint_of(ctx)},
          {"rank", ctx.rank()}};
}

inline std::vector<LatticeContext*> rank24_or_listed(Workspace& ws, const VerificationJob& job) {
  auto out = ws.listed(job);
  if (out.empty())
    for (const auto& n : rank24_names()) out.push_back(&ws.named(n));
  return out;
}

inline std::vector<std::pair<std::string, std::string>> pairs_or_default(
    const VerificationJob& job) {
  if (job.pair) return {*job.pair};
  return rank24_pairs();
}

inline std::vector<GramTarget> tset_or_curated(const VerificationJob& job) {
  return job.tset ? load_targets(*job.tset) : curated_tset();
}

inline nlohmann::json series_json(const ThetaTruncation& s, std::size_t rank) {
  return {{"genus", s.genus},
          {"trace_bound", s.trace_bound},
          {"entries", s.coeffs.size()},
          {"export", export_series(s, rank)}};
}

// --- individual kinds -----------------------------------------------------

inline std::string do_validate(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  const Lattice l = ws.single_lattice(job);
  const ValidationReport v = validate(l);
  p["lattice"] = {{"name", l.name()}, {"rank", l.rank()}};
  p["even"] = v.even;
  p["symmetric"] = v.symmetric;
  p["det"] = big(v.det);
  p["positive_definite"] = v.positive_definite;
  p["unimodular"] = v.unimodular();
  if (v.even && v.positive_definite && l.rank() > 0) {
    LatticeContext& ctx = ws.single(job);
    p["lattice"] = lattice_ref(ctx);
    p["min_norm"] = v.min_norm;
    p["roots"] = big(v.root_count);
    p["root_system"] = root_system(ctx).label();
    const auto ex = extremality_from(ctx.rank(), v.min_norm);
    p["extremal_bound"] = ex.bound;
    p["extremal"] = ex.is_extremal;
  }
  return v.ok() ? "pass" : "fail";
}

inline std::string do_shells(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  LatticeContext& ctx = ws.single(job);
  const std::int64_t b = job.norm_bound.value_or(10);
  const ShellTable t = enumerate_shells(ctx, b, false);
  p["lattice"] = lattice_ref(ctx);
  p["norm_bound"] = b;
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [norm, shell] : t.shells) counts[std::to_string(norm)] = big(shell.count);
  p["counts"] = counts;
  return "computed";
}

inline ThetaTruncation theta_for(LatticeContext& ctx, const VerificationJob& job, std::size_t g) {
  if (job.tset) {
    auto targets = load_targets(*job.tset);
    for (const auto& t : targets)
      if (t.genus() != g) input_error("T_set genus does not match --genus");
    return theta_sampled(ctx, targets);
  }
  return theta_truncated(ctx, g, job.trace_bound.value_or(default_trace_bound(g)));
}

inline std::string do_theta(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  LatticeContext& ctx = ws.single(job);
  const std::size_t g = job.genus.value_or(1);
  p["lattice"] = lattice_ref(ctx);
  p["series"] = series_json(theta_for(ctx, job, g), ctx.rank());
  return "computed";
}

inline std::string do_diff(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  auto [a, b] = ws.pair(job);
  const std::size_t g = job.genus.value_or(1);
  const FormalDifference d = series_difference(theta_for(*a, job, g), theta_for(*b, job, g));
  p["minuend"] = lattice_ref(*a);
  p["subtrahend"] = lattice_ref(*b);
  p["zero"] = d.is_zero();
  p["series"] = series_json(d.series, a->rank());
  return "computed";
}

inline std::string do_product(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  auto [a, b] = ws.pair(job);
  const std::size_t g = job.genus.value_or(1);
  const std::int64_t bound = job.trace_bound.value_or(default_trace_bound(g));
  const ThetaTruncation prod =
      series_product(theta_truncated(*a, g, bound), theta_truncated(*b, g, bound));
  p["factors"] = {lattice_ref(*a), lattice_ref(*b)};
  p["series"] = series_json(prod, a->rank() + b->rank());
  return "computed";
}

inline std::string do_restrict(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  LatticeContext& ctx = ws.single(job);
  const std::size_t g = job.genus.value_or(1);
  if (g == 0) input_error("restrict needs --genus >= 1 (the genus being restricted)");
  const std::int64_t bound = job.trace_bound.value_or(default_trace_bound(g));
  const ThetaTruncation restricted = siegel_restrict(theta_truncated(ctx, g, bound));
  const ThetaTruncation lower = theta_truncated(ctx, g - 1, bound);
  const bool equal = restricted.coeffs == lower.coeffs;
  p["lattice"] = lattice_ref(ctx);
  p["from_genus"] = g;
  p["trace_bound"] = bound;
  p["restricted"] = series_json(restricted, ctx.rank());
  p["matches_lower_genus"] = equal;
  return equal ? "pass" : "fail";
}

struct VenkovSummary {
  std::optional<Rational> constant;
  bool uniform = true;
  bool consistent = true;
};

inline VenkovSummary venkov_table(std::vector<LatticeContext*> lats, std::int64_t bound,
                                  nlohmann::json& p) {
  VenkovSummary sum;
  nlohmann::json rows = nlohmann::json::array();
  for (LatticeContext* ctx : lats) {
    const VenkovReport r = venkov_constant(*ctx, bound);
    rows.push_back({{"lattice", lattice_ref(*ctx)},
                    {"r2", big(r.r2)},
                    {"constant", rat(r.constant)},
                    {"vectors_checked", big(r.vectors_checked)},
                    {"mismatches", big(r.mismatches)},
                    {"consistent", r.consistent}});
    sum.consistent = sum.consistent && r.consistent;
    if (!sum.constant)
      sum.constant = r.constant;
    else if (*sum.constant != r.constant)
      sum.uniform = false;
  }
  p["lattices"] = rows;
  return sum;
}

inline std::string do_venkov(Workspace& ws, const VerificationJob& job, nlohmann::json& p,
                             int& code) {
  const std::int64_t bound = job.norm_bound.value_or(8);
  const VenkovSummary s = venkov_table(rank24_or_listed(ws, job), bound, p);
  // The printed reference value; the derived constant is reported beside it.
  const Rational reference(48);
  p["norm_bound"] = bound;
  p["uniform"] = s.uniform;
  p["constant"] = s.uniform && s.constant ? rat(*s.constant) : std::string("non-uniform");
  p["reference_constant"] = rat(reference);
  p["reference_matches"] = s.uniform && s.constant && *s.constant == reference;
  if (!s.uniform) code = kInconsistent;
  return s.uniform && s.consistent ? "pass" : "fail";
}

inline std::string do_heat(Workspace& ws, const VerificationJob& job, nlohmann::json& p,
                           int& code) {
  const std::size_t g_max = job.genus.value_or(2);
  const std::int64_t bound = job.trace_bound.value_or(4);
  const std::int64_t venkov_bound = job.norm_bound.value_or(4);
  auto lats = rank24_or_listed(ws, job);
  nlohmann::json venkov;
  const VenkovSummary s = venkov_table(lats, venkov_bound, venkov);
  if (!s.uniform) {
    code = kInconsistent;
    p["venkov"] = venkov;
    return "fail";
  }
  const Rational c = *s.constant;
  p["constant"] = rat(c);
  p["genus"] = g_max;
  p["trace_bound"] = bound;
  bool all = s.consistent;
  nlohmann::json per = nlohmann::json::array();
  for (LatticeContext* ctx : lats) {
    std::size_t rows = 0, failed = 0;
    nlohmann::json failures = nlohmann::json::array();
    for (std::size_t g = 1; g <= g_max; ++g) {
      for (const HeatRow& r : heat_check_all(*ctx, g, bound, c)) {
        ++rows;
        if (r.holds) continue;
        ++failed;
        failures.push_back({{"s", r.s.key()}, {"i", r.i}, {"j", r.j},
                            {"lhs", big(r.lhs)}, {"rhs", rat(r.rhs)}});
      }
    }
    per.push_back({{"lattice", lattice_ref(*ctx)}, {"rows", rows}, {"failed", failed},
                   {"failures", failures}});
    all = all && failed == 0;
  }
  p["lattices"] = per;
  return all ? "pass" : "fail";
}

inline std::string do_witt(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  const auto names = job.pair.value_or(std::make_pair(std::string("E8^2"), std::string("D16+")));
  LatticeContext& a = ws.named(names.first);
  LatticeContext& b = ws.named(names.second);
  const std::size_t g_max = job.max_genus.value_or(3);
  p["first"] = lattice_ref(a);
  p["second"] = lattice_ref(b);
  bool all = true;
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t g = 1; g <= g_max; ++g) {
    const std::int64_t bound = job.trace_bound.value_or(g <= 2 ? 8 : 6);
    const ThetaTruncation ta = theta_truncated(a, g, bound);
    const ThetaTruncation tb = theta_truncated(b, g, bound);
    const FormalDifference d = series_difference(ta, tb);
    nlohmann::json row = {{"genus", g},
                          {"trace_bound", bound},
                          {"coefficients", ta.coeffs.size()},
                          {"equal", d.is_zero()}};
    if (d.is_zero()) {
      row["series"] = export_series(ta, a.rank());
    } else {
      row["difference"] = export_series(d.series, a.rank());
    }
    all = all && d.is_zero();
    per.push_back(row);
  }
  p["genera"] = per;
  return all ? "pass" : "fail";
}

inline nlohmann::json count_row(const GramTarget& t, const BigInt& x, const BigInt& y) {
  return {{"target", t.key()}, {"first", big(x)}, {"second", big(y)}, {"differs", x != y}};
}

inline std::string do_schottky(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  const auto names = job.pair.value_or(std::make_pair(std::string("E8^2"), std::string("D16+")));
  LatticeContext& a = ws.named(names.first);
  LatticeContext& b = ws.named(names.second);
  const auto targets = tset_or_curated(job);
  const std::size_t g = targets.front().genus();
  const DistinguishReport rep = distinguishing_report(a, b, {GenusScan{g, std::nullopt, targets}});
  nlohmann::json rows = nlohmann::json::array();
  std::set<GramTarget> sorted(targets.begin(), targets.end());
  for (const auto& t : sorted)
    rows.push_back(count_row(t, representation_count(a, t), representation_count(b, t)));
  p["first"] = lattice_ref(a);
  p["second"] = lattice_ref(b);
  p["genus"] = g;
  p["rows"] = rows;
  p["witness"] = rep.found ? nlohmann::json(count_row(rep.target, rep.count_first,
                                                      rep.count_second))
                           : nlohmann::json(nullptr);
  return rep.found ? "pass" : "fail";
}

inline std::string do_a4(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  const std::int64_t bound = job.norm_bound.value_or(10);
  const GramTarget a4 = a4_target();
  bool all = true;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [na, nb] : pairs_or_default(job)) {
    LatticeContext& a = ws.named(na);
    LatticeContext& b = ws.named(nb);
    const BigInt ra = representation_count(a, a4), rb = representation_count(b, a4);
    const auto sa = a.shell_counts(bound);
    const auto sb = b.shell_counts(bound);
    nlohmann::json shells = nlohmann::json::object();
    for (std::size_t k = 0; k < sa.size(); ++k)
      shells[std::to_string(2 * k)] = {std::to_string(sa[k]), std::to_string(sb[k])};
    const bool separated = ra != rb;
    const bool same_shells = sa == sb;
    rows.push_back({{"first", lattice_ref(a)},
                    {"second", lattice_ref(b)},
                    {"a4_first", big(ra)},
                    {"a4_second", big(rb)},
                    {"separated", separated},
                    {"shells", shells},
                    {"shells_equal", same_shells}});
    all = all && separated && same_shells;
  }
  p["target"] = a4.key();
  p["norm_bound"] = bound;
  p["pairs"] = rows;
  return all ? "pass" : "fail";
}

inline std::string do_k_identity(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  const auto targets = tset_or_curated(job);
  SchottkyFactors f{&ws.named("E8"), &ws.named("E8^2"), &ws.named("D16+")};
  bool all = true;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [na, nb] : pairs_or_default(job)) {
    LatticeContext& a = ws.named(na);
    LatticeContext& b = ws.named(nb);
    const KIdentityReport r = k_identity_check(a, b, f, targets);
    nlohmann::json trows = nlohmann::json::array();
    for (const auto& row : r.rows)
      trows.push_back({{"target", row.target.key()}, {"lhs", big(row.lhs)},
                       {"rhs_base", big(row.rhs_base)}, {"holds", row.holds}});
    rows.push_back({{"first", lattice_ref(a)},
                    {"second", lattice_ref(b)},
                    {"k", rat(r.k)},
                    {"normalizer", r.normalizer.key()},
                    {"verified", r.verified},
                    {"rows", trows}});
    all = all && r.verified && r.k != 0;
  }
  p["pairs"] = rows;
  p["factors"] = {lattice_ref(*f.e8), lattice_ref(*f.e8_sum), lattice_ref(*f.d16_plus)};
  return all ? "pass" : "fail";
}

inline std::string do_independence(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  auto lats = rank24_or_listed(ws, job);
  std::vector<ThetaTruncation> series;
  nlohmann::json refs = nlohmann::json::array();
  const bool sampled = !job.trace_bound;
  const auto targets = sampled ? tset_or_curated(job) : std::vector<GramTarget>{};
  const std::size_t g = sampled ? targets.front().genus() : job.genus.value_or(1);
  for (LatticeContext* ctx : lats) {
    refs.push_back(lattice_ref(*ctx));
    series.push_back(sampled ? theta_sampled(*ctx, targets)
                             : theta_truncated(*ctx, g, *job.trace_bound));
  }
  p["lattices"] = refs;
  p["genus"] = g;
  if (sampled) {
    p["targets"] = targets.size();
  } else {
    p["trace_bound"] = *job.trace_bound;
  }
  p["rank"] = linear_independence_rank(series);
  return "computed";
}

inline std::string do_predicate(Workspace& ws, const VerificationJob& job, nlohmann::json& p) {
  auto [a, b] = ws.pair(job);
  const RankMinimum ma{a->rank(), minimum_norm(*a)};
  const RankMinimum mb{b->rank(), minimum_norm(*b)};
  p["first"] = lattice_ref(*a);
  p["second"] = lattice_ref(*b);
  p["min_norms"] = {ma.min_norm, mb.min_norm};
  p["ratio"] = rat(Rational(static_cast<long long>(ma.rank), ma.min_norm));
  p["holds"] = stable_eq_hyp_predicate(ma, mb);
  return "computed";
}

inline std::string do_registry(Workspace& ws, nlohmann::json& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& name : Registry::instance().names()) {
    LatticeContext& ctx = ws.named(name);
    rows.push_back({{"name", name},
                    {"fingerprint", fingerprint_of(ctx)},
                    {"rank", ctx.rank()},
                    {"min_norm", minimum_norm(ctx)},
                    {"roots", std::to_string(ctx.shell_count(2))},
                    {"root_system", root_system(ctx).label()}});
  }
  p["lattices"] = rows;
  return "computed";
}

inline void check_job(const VerificationJob& job) {
  bool known = false;
  for (const auto& k : job_kinds()) known = known || k == job.kind;
  if (!known) input_error("unknown job kind '" + job.kind + "'");
  require_nonnegative(job.trace_bound, "--trace-bound");
  require_nonnegative(job.norm_bound, "--norm-bound");
  if (job.jobs == 0) input_error("--jobs must be positive");
}

}  // namespace detail

inline Report run(const VerificationJob& job) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  nlohmann::json& body = rep.body;
  body["schema"] = kReportSchema;
  body["job"] = detail::job_echo(job);
  std::unique_ptr<detail::Workspace> ws;
  try {
    detail::check_job(job);
    ws = std::make_unique<detail::Workspace>(job.jobs);
    nlohmann::json payload = nlohmann::json::object();
    int code = kOk;
    std::string status;
    const std::string& k = job.kind;
    if (k == "validate") status = detail::do_validate(*ws, job, payload);
    else if (k == "shells") status = detail::do_shells(*ws, job, payload);
    else if (k == "theta") status = detail::do_theta(*ws, job, payload);
    else if (k == "diff") status = detail::do_diff(*ws, job, payload);
    else if (k == "product") status = detail::do_product(*ws, job, payload);
    else if (k == "restrict") status = detail::do_restrict(*ws, job, payload);
    else if (k == "venkov") status = detail::do_venkov(*ws, job, payload, code);
    else if (k == "heat") status = detail::do_heat(*ws, job, payload, code);
    else if (k == "witt") status = detail::do_witt(*ws, job, payload);
    else if (k == "schottky") status = detail::do_schottky(*ws, job, payload);
    else if (k == "a4-separation") status = detail::do_a4(*ws, job, payload);
    else if (k == "k-identity") status = detail::do_k_identity(*ws, job, payload);
    else if (k == "independence") status = detail::do_independence(*ws, job, payload);
    else if (k == "hyp-predicate") status = detail::do_predicate(*ws, job, payload);
    else status = detail::do_registry(*ws, payload);
    if (status == "fail" && code == kOk) code = kFailed;
    body["status"] = status;
    body["payload"] = payload;
    rep.exit_code = code;
  } catch (const Error& e) {
    body["status"] = "error";
    body["error"] = e.what();
    rep.exit_code = e.kind() == ErrorKind::kInconsistency ? kInconsistent : kBadInput;
  } catch (const nlohmann::json::exception& e) {
    body["status"] = "error";
    body["error"] = std::string("malformed JSON: ") + e.what();
    rep.exit_code = kBadInput;
  } catch (const std::exception& e) {
    body["status"] = "error";
    body["error"] = e.what();
    rep.exit_code = kInconsistent;
  }
  rep.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (ws && ws->cache()) {
    rep.stats.cache_enabled = true;
    rep.stats.cache = ws->cache()->stats();
  }
  return rep;
}

}  // namespace thetalab::cli

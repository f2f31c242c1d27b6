#pragma once

// Truncated Siegel theta series as formal coefficient tables, their algebra,
// and the series-level identity checks built on them.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "thetalab/context.hpp"
#include "thetalab/enumeration.hpp"
#include "thetalab/gram_target.hpp"
#include "thetalab/invariants.hpp"

namespace thetalab {

/// Coefficients r(T) for trace(T) <= trace_bound. A complete truncation
/// stores only nonzero coefficients; a sampled one (complete == false) knows
/// exactly the keys it stores, zeros included.
struct ThetaTruncation {
  std::size_t genus = 0;
  std::int64_t trace_bound = 0;
  Rational weight = 0;
  std::string provenance;
  bool complete = true;
  std::map<GramTarget, BigInt> coeffs;

  bool knows(const GramTarget& t) const {
    if (t.genus() != genus || t.trace() > trace_bound) return false;
    return complete || coeffs.count(t) > 0;
  }

  BigInt at(const GramTarget& t) const {
    if (t.genus() != genus)
      domain_error("series " + provenance + " has genus " + std::to_string(genus) +
                   ", asked for " + t.key());
    if (t.trace() > trace_bound)
      domain_error("coefficient " + t.key() + " lies beyond trace bound " +
                   std::to_string(trace_bound) + " of " + provenance);
    auto it = coeffs.find(t);
    if (it != coeffs.end()) return it->second;
    if (!complete) domain_error("coefficient " + t.key() + " was not sampled in " + provenance);
    return 0;
  }
};

inline bool same_coefficients(const ThetaTruncation& a, const ThetaTruncation& b) {
  if (a.genus != b.genus) return false;
  std::set<GramTarget> keys;
  for (const auto& [t, c] : a.coeffs) keys.insert(t);
  for (const auto& [t, c] : b.coeffs) keys.insert(t);
  for (const auto& t : keys) {
    if (!a.knows(t) || !b.knows(t)) continue;
    if (a.at(t) != b.at(t)) return false;
  }
  return true;
}

/// F = minuend - subtrahend, coefficientwise.
struct FormalDifference {
  std::string minuend;
  std::string subtrahend;
  ThetaTruncation series;

  bool is_zero() const {
    for (const auto& [t, c] : series.coeffs)
      if (c != 0) return false;
    return true;
  }
};

/// The constant series 1 of the given genus.
inline ThetaTruncation unit_series(std::size_t genus, std::int64_t bound) {
  ThetaTruncation s;
  s.genus = genus;
  s.trace_bound = bound;
  s.provenance = "1";
  s.coeffs.emplace(GramTarget(genus), 1);
  return s;
}

// ---------------------------------------------------------------------------
// Series export format
//
//   thetalab-series 1
//   expr <text>
//   rank <n>
//   genus <g>
//   trace_bound <B>
//   weight <p/q>
//   support complete|sampled
//   entries <count>
//   <upper triangle of T> <coefficient>
//   ...

inline std::string export_series(const ThetaTruncation& s, std::size_t rank) {
  std::ostringstream os;
  os << "thetalab-series 1\n";
  os << "expr " << s.provenance << "\n";
  os << "rank " << rank << "\n";
  os << "genus " << s.genus << "\n";
  os << "trace_bound " << s.trace_bound << "\n";
  os << "weight " << s.weight.str() << "\n";
  os << "support " << (s.complete ? "complete" : "sampled") << "\n";
  os << "entries " << s.coeffs.size() << "\n";
  for (const auto& [t, c] : s.coeffs) {
    for (auto v : t.upper()) os << v << ' ';
    os << c.str() << "\n";
  }
  return os.str();
}

struct ParsedSeries {
  ThetaTruncation series;
  std::size_t rank = 0;
};

inline ParsedSeries parse_series(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next = [&](const std::string& field) {
    if (!std::getline(in, line)) input_error("series: missing field '" + field + "'");
    const std::string prefix = field + " ";
    if (line.rfind(prefix, 0) != 0 && line != field)
      input_error("series: expected '" + field + "', got '" + line + "'");
    return line.size() > prefix.size() ? line.substr(prefix.size()) : std::string();
  };
  ParsedSeries out;
  if (next("thetalab-series") != "1") input_error("series: unsupported format version");
  ThetaTruncation& s = out.series;
  try {
    s.provenance = next("expr");
    out.rank = std::stoul(next("rank"));
    s.genus = std::stoul(next("genus"));
    s.trace_bound = std::stoll(next("trace_bound"));
    s.weight = Rational(next("weight"));
    const std::string support = next("support");
    if (support != "complete" && support != "sampled")
      input_error("series: bad support '" + support + "'");
    s.complete = support == "complete";
    const std::size_t entries = std::stoul(next("entries"));
    const std::size_t width = s.genus * (s.genus + 1) / 2;
    for (std::size_t e = 0; e < entries; ++e) {
      if (!std::getline(in, line)) input_error("series: truncated entry list");
      std::istringstream row(line);
      std::vector<std::int64_t> up(width);
      for (auto& v : up)
        if (!(row >> v)) input_error("series: malformed row '" + line + "'");
      std::string count;
      if (!(row >> count)) input_error("series: missing coefficient in '" + line + "'");
      GramTarget t(s.genus, std::move(up));
      if (!s.coeffs.emplace(t, BigInt(count)).second)
        input_error("series: duplicate key " + t.key());
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    input_error(std::string("series: malformed number: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Construction

inline std::string lattice_tag(const LatticeContext& ctx) {
  return ctx.lattice().name();
}

inline Rational lattice_weight(const LatticeContext& ctx) {
  return Rational(static_cast<long long>(ctx.rank()), 2);
}

/// Theta series of the lattice truncated at trace <= bound.
inline ThetaTruncation theta_truncated(LatticeContext& ctx, std::size_t g, std::int64_t bound) {
  if (bound < 0) domain_error("theta_truncated: negative trace bound");
  CoefficientCache* disk = ctx.fingerprint() ? ctx.disk_cache() : nullptr;
  const std::string entry = "g" + std::to_string(g) + "_b" + std::to_string(bound) + ".series";
  if (disk) {
    if (auto text = disk->get(*ctx.fingerprint(), entry)) {
      ParsedSeries p = parse_series(*text);
      if (p.rank == ctx.rank() && p.series.genus == g && p.series.trace_bound == bound) {
        p.series.provenance = lattice_tag(ctx);
        return p.series;
      }
    }
  }
  ThetaTruncation s;
  s.genus = g;
  s.trace_bound = bound;
  s.weight = lattice_weight(ctx);
  s.provenance = lattice_tag(ctx);
  s.coeffs = representation_profile(ctx, g, bound);
  if (disk) disk->put(*ctx.fingerprint(), entry, export_series(s, ctx.rank()));
  return s;
}

inline ThetaTruncation theta_truncated(const Lattice& l, std::size_t g, std::int64_t bound,
                                       const EnumOptions& opt = {}) {
  LatticeContext ctx(l, ContextOptions{opt.jobs, nullptr});
  return theta_truncated(ctx, g, bound);
}

/// Theta coefficients at an explicit list of targets of one genus.
inline ThetaTruncation theta_sampled(LatticeContext& ctx, const std::vector<GramTarget>& targets) {
  if (targets.empty()) input_error("theta_sampled: empty target list");
  ThetaTruncation s;
  s.genus = targets.front().genus();
  s.weight = lattice_weight(ctx);
  s.provenance = lattice_tag(ctx);
  s.complete = false;
  for (const auto& t : targets) {
    if (t.genus() != s.genus) input_error("theta_sampled: targets of mixed genus");
    s.trace_bound = std::max(s.trace_bound, t.trace());
    s.coeffs[t] = representation_count(ctx, t);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Algebra

inline FormalDifference series_difference(const ThetaTruncation& f, const ThetaTruncation& g) {
  if (f.genus != g.genus) domain_error("series_difference: genus mismatch");
  if (f.weight != g.weight) domain_error("series_difference: weight mismatch");
  FormalDifference d;
  d.minuend = f.provenance;
  d.subtrahend = g.provenance;
  ThetaTruncation& s = d.series;
  s.genus = f.genus;
  s.trace_bound = std::min(f.trace_bound, g.trace_bound);
  s.weight = f.weight;
  s.provenance = f.provenance + " - " + g.provenance;
  s.complete = f.complete && g.complete;
  std::set<GramTarget> keys;
  for (const auto& [t, c] : f.coeffs) keys.insert(t);
  for (const auto& [t, c] : g.coeffs) keys.insert(t);
  for (const auto& t : keys) {
    if (t.trace() > s.trace_bound || !f.knows(t) || !g.knows(t)) continue;
    const BigInt v = f.at(t) - g.at(t);
    if (v != 0 || !s.complete) s.coeffs.emplace(t, v);
  }
  return d;
}

/// Cauchy product restricted to the smaller of the two trace bounds.
inline ThetaTruncation series_product(const ThetaTruncation& f, const ThetaTruncation& g) {
  if (f.genus != g.genus) domain_error("series_product: genus mismatch");
  if (!f.complete || !g.complete) domain_error("series_product: needs complete truncations");
  ThetaTruncation s;
  s.genus = f.genus;
  s.trace_bound = std::min(f.trace_bound, g.trace_bound);
  s.weight = f.weight + g.weight;
  s.provenance = "(" + f.provenance + ")*(" + g.provenance + ")";
  for (const auto& [a, ca] : f.coeffs) {
    const std::int64_t ta = a.trace();
    if (ta > s.trace_bound) break;
    for (const auto& [b, cb] : g.coeffs) {
      if (ta + b.trace() > s.trace_bound) break;
      std::vector<std::int64_t> up(a.upper().size());
      for (std::size_t i = 0; i < up.size(); ++i) up[i] = a.upper()[i] + b.upper()[i];
      s.coeffs[GramTarget(s.genus, std::move(up))] += ca * cb;
    }
  }
  for (auto it = s.coeffs.begin(); it != s.coeffs.end();)
    it = it->second == 0 ? s.coeffs.erase(it) : std::next(it);
  return s;
}

using CoefficientFn = std::function<BigInt(const GramTarget&)>;

/// All even positive semidefinite T1 with T - T1 even positive semidefinite.
inline std::vector<GramTarget> psd_splittings(const GramTarget& t) {
  const std::size_t g = t.genus();
  std::vector<GramTarget> out;
  GramTarget cur(g);
  std::vector<std::pair<std::size_t, std::size_t>> offdiag;
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i + 1; j < g; ++j) offdiag.emplace_back(i, j);
  auto isqrt = [](std::int64_t v) { return detail::isqrt<std::int64_t>(v); };

  std::function<void(std::size_t)> off = [&](std::size_t k) {
    if (k == offdiag.size()) {
      GramTarget rest(g);
      for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = i; j < g; ++j) rest.set(i, j, t(i, j) - cur(i, j));
      if (cur.admissible() && rest.admissible()) out.push_back(cur);
      return;
    }
    const auto [i, j] = offdiag[k];
    const std::int64_t r1 = isqrt(cur(i, i) * cur(j, j));
    const std::int64_t r2 = isqrt((t(i, i) - cur(i, i)) * (t(j, j) - cur(j, j)));
    const std::int64_t lo = std::max(-r1, t(i, j) - r2);
    const std::int64_t hi = std::min(r1, t(i, j) + r2);
    for (std::int64_t c = lo; c <= hi; ++c) {
      cur.set(i, j, c);
      off(k + 1);
    }
    cur.set(i, j, 0);
  };
  std::function<void(std::size_t)> diag = [&](std::size_t i) {
    if (i == g) {
      off(0);
      return;
    }
    for (std::int64_t d = 0; d <= t(i, i); d += 2) {
      cur.set(i, i, d);
      diag(i + 1);
    }
  };
  diag(0);
  return out;
}

/// One coefficient of a product: sum over T1 + T2 = T of f(T1) * g(T2).
inline BigInt series_product_at(const CoefficientFn& f, const CoefficientFn& g,
                                const GramTarget& t) {
  t.require_admissible();
  BigInt sum = 0;
  for (const auto& t1 : psd_splittings(t)) {
    const BigInt a = f(t1);
    if (a == 0) continue;
    GramTarget t2(t.genus());
    for (std::size_t i = 0; i < t.genus(); ++i)
      for (std::size_t j = i; j < t.genus(); ++j) t2.set(i, j, t(i, j) - t1(i, j));
    sum += a * g(t2);
  }
  return sum;
}

inline BigInt series_product_at(const ThetaTruncation& f, const ThetaTruncation& g,
                                const GramTarget& t) {
  return series_product_at([&](const GramTarget& x) { return f.at(x); },
                           [&](const GramTarget& x) { return g.at(x); }, t);
}

/// Siegel operator: keep the coefficients whose last row and column vanish.
inline ThetaTruncation siegel_restrict(const ThetaTruncation& f) {
  if (f.genus == 0) domain_error("siegel_restrict: genus 0 series has no restriction");
  const std::size_t g = f.genus - 1;
  ThetaTruncation s;
  s.genus = g;
  s.trace_bound = f.trace_bound;
  s.weight = f.weight;
  s.complete = f.complete;
  s.provenance = "Phi(" + f.provenance + ")";
  for (const auto& [t, c] : f.coeffs) {
    bool last_zero = true;
    for (std::size_t j = 0; j <= g; ++j)
      if (t(g, j) != 0) last_zero = false;
    if (last_zero) s.coeffs.emplace(t.leading_block(g), c);
  }
  return s;
}

inline FormalDifference siegel_restrict(const FormalDifference& d) {
  FormalDifference out;
  out.minuend = "Phi(" + d.minuend + ")";
  out.subtrahend = "Phi(" + d.subtrahend + ")";
  out.series = siegel_restrict(d.series);
  return out;
}

// ---------------------------------------------------------------------------
// Checks

inline GramTarget block_target(const GramTarget& a, const GramTarget& b,
                               const std::vector<std::int64_t>& c) {
  const std::size_t ga = a.genus(), gb = b.genus();
  GramTarget t(ga + gb);
  for (std::size_t i = 0; i < ga; ++i)
    for (std::size_t j = i; j < ga; ++j) t.set(i, j, a(i, j));
  for (std::size_t i = 0; i < gb; ++i)
    for (std::size_t j = i; j < gb; ++j) t.set(ga + i, ga + j, b(i, j));
  for (std::size_t i = 0; i < ga; ++i)
    for (std::size_t j = 0; j < gb; ++j) t.set(i, ga + j, c[i * gb + j]);
  return t;
}

struct BlockFactorization {
  BigInt block_sum = 0;
  BigInt product = 0;
  std::size_t blocks = 0;  // off-diagonal blocks with a nonzero count
  bool holds() const { return block_sum == product; }
};

/// Sum over off-diagonal blocks C of r([[T1, C], [C^T, T2]]) against r(T1) r(T2).
inline BlockFactorization block_factorization_check(LatticeContext& ctx, const GramTarget& t1,
                                                    const GramTarget& t2) {
  t1.require_admissible();
  t2.require_admissible();
  BlockFactorization out;
  out.product = representation_count(ctx, t1) * representation_count(ctx, t2);
  const std::size_t ga = t1.genus(), gb = t2.genus();
  std::vector<std::int64_t> c(ga * gb, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == c.size()) {
      const GramTarget t = block_target(t1, t2, c);
      if (!t.admissible()) return;
      const BigInt r = representation_count(ctx, t);
      if (r != 0) ++out.blocks;
      out.block_sum += r;
      return;
    }
    const std::size_t i = k / gb, j = k % gb;
    const std::int64_t r = detail::isqrt<std::int64_t>(t1(i, i) * t2(j, j));
    for (std::int64_t v = -r; v <= r; ++v) {
      c[k] = v;
      rec(k + 1);
    }
    c[k] = 0;
  };
  rec(0);
  return out;
}

/// How one genus is scanned: a full truncation up to a trace bound, or an
/// explicit list of targets.
struct GenusScan {
  std::size_t genus = 1;
  std::optional<std::int64_t> trace_bound;
  std::vector<GramTarget> targets;

  std::string describe() const {
    if (trace_bound) return "g" + std::to_string(genus) + ":trace<=" + std::to_string(*trace_bound);
    return "g" + std::to_string(genus) + ":" + std::to_string(targets.size()) + " targets";
  }
};

struct DistinguishReport {
  bool found = false;
  std::size_t genus = 0;
  GramTarget target;
  BigInt count_first = 0;
  BigInt count_second = 0;
  std::vector<std::string> scanned;
};

inline DistinguishReport distinguishing_report(LatticeContext& a, LatticeContext& b,
                                               const std::vector<GenusScan>& scans) {
  if (a.rank() != b.rank()) domain_error("distinguishing_report: rank mismatch");
  DistinguishReport rep;
  for (const auto& scan : scans) {
    rep.scanned.push_back(scan.describe());
    std::vector<GramTarget> order;
    std::map<GramTarget, BigInt> ca, cb;
    if (scan.trace_bound) {
      ca = theta_truncated(a, scan.genus, *scan.trace_bound).coeffs;
      cb = theta_truncated(b, scan.genus, *scan.trace_bound).coeffs;
      std::set<GramTarget> keys;
      for (const auto& [t, c] : ca) keys.insert(t);
      for (const auto& [t, c] : cb) keys.insert(t);
      order.assign(keys.begin(), keys.end());
    } else {
      order = scan.targets;
      std::sort(order.begin(), order.end());
      order.erase(std::unique(order.begin(), order.end()), order.end());
      for (const auto& t : order) {
        if (t.genus() != scan.genus) input_error("distinguishing_report: target genus mismatch");
        ca[t] = representation_count(a, t);
        cb[t] = representation_count(b, t);
      }
    }
    for (const auto& t : order) {
      const BigInt x = ca.count(t) ? ca[t] : BigInt(0);
      const BigInt y = cb.count(t) ? cb[t] : BigInt(0);
      if (x != y) {
        rep.found = true;
        rep.genus = scan.genus;
        rep.target = t;
        rep.count_first = x;
        rep.count_second = y;
        return rep;
      }
    }
  }
  return rep;
}

/// Uniform trace bound for genera 1..g_max.
inline DistinguishReport distinguishing_report(LatticeContext& a, LatticeContext& b,
                                               std::size_t g_max, std::int64_t bound) {
  std::vector<GenusScan> scans;
  for (std::size_t g = 1; g <= g_max; ++g) scans.push_back(GenusScan{g, bound, {}});
  return distinguishing_report(a, b, scans);
}

/// Exact rank of the (series x target) coefficient matrix.
inline std::size_t linear_independence_rank(const std::vector<ThetaTruncation>& series) {
  if (series.empty()) return 0;
  std::set<GramTarget> keys;
  for (const auto& s : series) {
    if (s.genus != series.front().genus || s.trace_bound != series.front().trace_bound)
      domain_error("linear_independence_rank: series differ in genus or bound");
    for (const auto& [t, c] : s.coeffs) keys.insert(t);
  }
  IntMatrix m(series.size(), keys.size());
  std::size_t col = 0;
  for (const auto& t : keys) {
    for (std::size_t r = 0; r < series.size(); ++r) m(r, col) = series[r].at(t);
    ++col;
  }
  return exact_rank(m);
}

struct KIdentityRow {
  GramTarget target;
  BigInt lhs = 0;        // r_Lambda(T) - r_Gamma(T)
  BigInt rhs_base = 0;   // (Theta_E8 * (Theta_E8^2 - Theta_D16+))(T)
  bool holds = false;
};

struct KIdentityReport {
  Rational k = 0;
  GramTarget normalizer;
  bool verified = false;
  std::vector<KIdentityRow> rows;
};

/// Contexts for the lattices on the right-hand side of the genus-4 identity.
struct SchottkyFactors {
  LatticeContext* e8;
  LatticeContext* e8_sum;
  LatticeContext* d16_plus;
};

/// Determines k from the first target with a nonzero right side and checks
/// r_Lambda(T) - r_Gamma(T) = k * rhs(T) on every target.
inline KIdentityReport k_identity_check(LatticeContext& lambda, LatticeContext& gamma,
                                        const SchottkyFactors& rhs,
                                        const std::vector<GramTarget>& targets) {
  if (targets.empty()) input_error("k_identity_check: empty target set");
  KIdentityReport rep;
  CoefficientFn theta_e8 = [&](const GramTarget& t) { return representation_count(*rhs.e8, t); };
  CoefficientFn schottky = [&](const GramTarget& t) {
    return representation_count(*rhs.e8_sum, t) - representation_count(*rhs.d16_plus, t);
  };
  std::optional<Rational> k;
  for (const auto& t : targets) {
    KIdentityRow row;
    row.target = t;
    row.lhs = representation_count(lambda, t) - representation_count(gamma, t);
    row.rhs_base = series_product_at(theta_e8, schottky, t);
    if (!k && row.rhs_base != 0) {
      k = Rational(row.lhs, row.rhs_base);
      rep.normalizer = t;
    }
    rep.rows.push_back(std::move(row));
  }
  if (!k) domain_error("cannot normalize k: right side vanishes on every target");
  rep.k = *k;
  rep.verified = true;
  for (auto& row : rep.rows) {
    row.holds = Rational(row.lhs) == rep.k * row.rhs_base;
    rep.verified = rep.verified && row.holds;
  }
  return rep;
}

}  // namespace thetalab

#pragma once

// Fourier-Jacobi coefficients as joint counts N(S, l): tuples x with Gram S
// together with a vector y of norm 2n having inner products l_i = Q(y, x_i).
// Venkov's second-moment identity for the roots and the heat-equation
// identity it implies are checked coefficientwise.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "thetalab/context.hpp"
#include "thetalab/enumeration.hpp"
#include "thetalab/gram_target.hpp"

namespace thetalab {

using JacobiKey = std::pair<GramTarget, std::vector<std::int64_t>>;

struct JacobiCoefficient {
  std::size_t genus = 0;
  std::int64_t index = 1;  // y has norm 2 * index
  std::int64_t trace_bound = 0;
  std::map<JacobiKey, BigInt> entries;

  /// Sum over l of N(S, l).
  BigInt marginal(const GramTarget& s) const {
    BigInt total = 0;
    for (auto it = entries.lower_bound({s, {}}); it != entries.end() && it->first.first == s; ++it)
      total += it->second;
    return total;
  }

  /// Sum over l of l_i * l_j * N(S, l).
  BigInt second_moment(const GramTarget& s, std::size_t i, std::size_t j) const {
    BigInt total = 0;
    for (auto it = entries.lower_bound({s, {}}); it != entries.end() && it->first.first == s; ++it)
      total += BigInt(it->first.second[i] * it->first.second[j]) * it->second;
    return total;
  }

  /// Sum over l of l_i * N(S, l).
  BigInt first_moment(const GramTarget& s, std::size_t i) const {
    BigInt total = 0;
    for (auto it = entries.lower_bound({s, {}}); it != entries.end() && it->first.first == s; ++it)
      total += BigInt(it->first.second[i]) * it->second;
    return total;
  }

  std::set<GramTarget> supports() const {
    std::set<GramTarget> out;
    for (const auto& [key, c] : entries) out.insert(key.first);
    return out;
  }
};

/// N(S, l) for all S of genus g with trace(S) <= bound.
inline JacobiCoefficient jacobi_coefficient(LatticeContext& ctx, std::size_t g, std::int64_t n,
                                            std::int64_t bound) {
  if (n < 1) domain_error("jacobi_coefficient: index must be positive");
  if (bound < 0) domain_error("jacobi_coefficient: negative trace bound");
  JacobiCoefficient out;
  out.genus = g;
  out.index = n;
  out.trace_bound = bound;
  const std::int64_t ynorm = 2 * n;
  const std::uint64_t shell = ctx.rank() ? ctx.shell_count(ynorm) : 0;
  if (shell == 0) return out;
  out.entries.emplace(JacobiKey{GramTarget(g), std::vector<std::int64_t>(g, 0)}, shell);
  if (g == 0) return out;

  std::vector<std::vector<std::int64_t>> diags;
  std::vector<std::int64_t> cur;
  detail::sorted_diagonals(g, bound, cur, diags);
  for (const auto& sorted : diags) {
    std::vector<std::int64_t> with_y = sorted;
    with_y.push_back(ynorm);
    const GramCounts hist = gram_histogram(ctx, with_y);
    if (hist.empty()) continue;
    const std::size_t k = sorted.size();
    std::vector<std::vector<std::size_t>> placements;
    std::vector<std::size_t> pc;
    detail::position_sets(g, k, 0, pc, placements);
    std::vector<std::int64_t> arrangement = sorted;
    do {
      std::vector<std::size_t> sigma(k);
      std::vector<bool> used(k, false);
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t s = 0; s < k; ++s)
          if (!used[s] && sorted[s] == arrangement[j]) {
            sigma[j] = s;
            used[s] = true;
            break;
          }
      for (const auto& [big, count] : hist) {
        for (const auto& pos : placements) {
          GramTarget full(g);
          std::vector<std::int64_t> ell(g, 0);
          for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a; b < k; ++b) full.set(pos[a], pos[b], big(sigma[a], sigma[b]));
            ell[pos[a]] = big(sigma[a], k);
          }
          out.entries.emplace(JacobiKey{std::move(full), std::move(ell)}, count);
        }
      }
    } while (std::next_permutation(arrangement.begin(), arrangement.end()));
  }
  return out;
}

struct VenkovReport {
  std::string lattice;
  BigInt r2 = 0;
  Rational constant = 0;
  std::int64_t checked_norm_bound = 0;
  BigInt vectors_checked = 0;
  BigInt mismatches = 0;
  bool consistent = false;
};

/// Finds the c with r2 * Q(v, v) = c * sum_{roots y} Q(y, v)^2 and checks it
/// on every v with 0 < Q(v, v) <= norm_bound.
inline VenkovReport venkov_constant(LatticeContext& ctx, std::int64_t norm_bound) {
  if (norm_bound < 2) domain_error("venkov_constant: norm bound must be at least 2");
  VenkovReport rep;
  rep.lattice = ctx.lattice().name();
  rep.checked_norm_bound = norm_bound;
  if (ctx.rank() == 0) domain_error("venkov_constant: no roots");
  const ShellVectors& roots = ctx.shell(2);
  if (roots.count == 0) domain_error("venkov_constant: no roots in " + rep.lattice);
  rep.r2 = roots.count;

  // Moment matrix M = sum_y (G y)(G y)^T, so that v^T M v = sum_y Q(y, v)^2.
  const std::size_t n = ctx.rank();
  std::vector<std::int64_t> moment(n * n, 0);
  for (std::size_t y = 0; y < roots.count; ++y) {
    const std::int16_t* d = roots.dual(y);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) moment[i * n + j] += std::int64_t{d[i]} * d[j];
  }
  // The first root fixes c; every other vector must agree with it.
  std::int64_t first_moment = 0;
  {
    const std::int16_t* v = roots.coord(0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) first_moment += moment[i * n + j] * v[i] * v[j];
  }
  rep.constant = Rational(BigInt(roots.count) * 2, BigInt(first_moment));
  const std::int64_t num = to_int64(numerator(rep.constant));
  const std::int64_t den = to_int64(denominator(rep.constant));
  const auto r2 = static_cast<std::int64_t>(roots.count);

  struct Tally {
    std::int64_t r2, num, den;
    std::uint64_t checked = 0, bad = 0;
    void operator()(const std::int32_t*, std::int64_t norm, std::int64_t aux) {
      ++checked;
      if (r2 * norm * den != num * aux) ++bad;
    }
  };
  auto parts = ctx.enumerator().run<Tally>(
      norm_bound, ctx.jobs(), [&] { return Tally{r2, num, den}; }, &moment);
  for (const auto& p : parts) {
    rep.vectors_checked += 2 * p.checked;
    rep.mismatches += 2 * p.bad;
  }
  rep.consistent = rep.mismatches == 0;
  return rep;
}

struct HeatRow {
  GramTarget s;
  std::size_t i = 0, j = 0;
  BigInt lhs = 0;  // r2 * S_ij * r(S)
  Rational rhs = 0;  // c * sum_l l_i l_j N(S, l)
  bool holds = false;
};

namespace detail {

inline std::vector<HeatRow> heat_rows(const JacobiCoefficient& f1, const GramTarget& s,
                                      const BigInt& r_s, const BigInt& r2, const Rational& c) {
  std::vector<HeatRow> rows;
  for (std::size_t i = 0; i < s.genus(); ++i)
    for (std::size_t j = i; j < s.genus(); ++j) {
      HeatRow row;
      row.s = s;
      row.i = i;
      row.j = j;
      row.lhs = r2 * s(i, j) * r_s;
      row.rhs = c * f1.second_moment(s, i, j);
      row.holds = Rational(row.lhs) == row.rhs;
      rows.push_back(row);
    }
  return rows;
}

}  // namespace detail

/// Checks r2 * S_ij * r(S) = c * sum_l l_i l_j N(S, l) for all i <= j.
inline std::vector<HeatRow> heat_coefficient_check(LatticeContext& ctx, const GramTarget& s,
                                                   const Rational& c) {
  s.require_admissible();
  const JacobiCoefficient f1 = jacobi_coefficient(ctx, s.genus(), 1, s.trace());
  return detail::heat_rows(f1, s, representation_count(ctx, s), ctx.shell_count(2), c);
}

/// Heat identity on every representable S of genus g with trace <= bound.
inline std::vector<HeatRow> heat_check_all(LatticeContext& ctx, std::size_t g,
                                           std::int64_t bound, const Rational& c) {
  const JacobiCoefficient f1 = jacobi_coefficient(ctx, g, 1, bound);
  const auto profile = representation_profile(ctx, g, bound);
  const BigInt r2 = ctx.shell_count(2);
  std::vector<HeatRow> rows;
  for (const auto& [s, r] : profile) {
    auto part = detail::heat_rows(f1, s, r, r2, c);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

struct PairF1Row {
  GramTarget s;
  std::size_t i = 0, j = 0;
  BigInt moment_first = 0, moment_second = 0;
  BigInt r_first = 0, r_second = 0;
  bool holds = false;
};

struct PairF1Report {
  BigInt r2 = 0;
  Rational constant = 0;
  bool holds = false;
  std::vector<PairF1Row> rows;
};

/// For a pair with equal root counts r: c * moment_L(S) = r * S_ij * r_L(S)
/// for both lattices, hence the f_1 moments differ exactly as r * S_ij times
/// the theta coefficients do.
inline PairF1Report pair_difference_f1_check(LatticeContext& a, LatticeContext& b, std::size_t g,
                                             std::int64_t bound, const Rational& c) {
  PairF1Report rep;
  const BigInt ra = a.shell_count(2), rb = b.shell_count(2);
  if (ra != rb)
    domain_error("pair_difference_f1_check: root counts differ (" + ra.str() + " vs " +
                 rb.str() + ")");
  rep.r2 = ra;
  rep.constant = c;
  const JacobiCoefficient fa = jacobi_coefficient(a, g, 1, bound);
  const JacobiCoefficient fb = jacobi_coefficient(b, g, 1, bound);
  const auto pa = representation_profile(a, g, bound);
  const auto pb = representation_profile(b, g, bound);
  std::set<GramTarget> keys;
  for (const auto& [s, r] : pa) keys.insert(s);
  for (const auto& [s, r] : pb) keys.insert(s);
  rep.holds = true;
  for (const auto& s : keys) {
    const BigInt r_a = pa.count(s) ? pa.at(s) : BigInt(0);
    const BigInt r_b = pb.count(s) ? pb.at(s) : BigInt(0);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = i; j < g; ++j) {
        PairF1Row row;
        row.s = s;
        row.i = i;
        row.j = j;
        row.moment_first = fa.second_moment(s, i, j);
        row.moment_second = fb.second_moment(s, i, j);
        row.r_first = r_a;
        row.r_second = r_b;
        const Rational diff = c * (row.moment_first - row.moment_second);
        row.holds = c * row.moment_first == Rational(rep.r2 * s(i, j) * r_a) &&
                    c * row.moment_second == Rational(rep.r2 * s(i, j) * r_b) &&
                    diff == Rational(rep.r2 * s(i, j) * (r_a - r_b));
        rep.holds = rep.holds && row.holds;
        rep.rows.push_back(row);
      }
  }
  return rep;
}

}  // namespace thetalab

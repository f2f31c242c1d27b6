#pragma once

// Lattice-level invariants: validation, minimum norm, extremality, root
// system identification and the N/mu <= 8 predicate.

#include <algorithm>
#include <cstdio>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "thetalab/context.hpp"
#include "thetalab/lattice.hpp"

namespace thetalab {

struct ValidationReport {
  bool even = false;
  bool symmetric = false;
  BigInt det = 0;
  bool positive_definite = false;
  std::int64_t min_norm = 0;  // 0 when undefined (rank 0 or not PD)
  BigInt root_count = 0;

  bool unimodular() const { return det == 1; }
  bool ok() const { return even && symmetric && positive_definite && det == 1; }
};

inline std::int64_t minimum_norm(LatticeContext& ctx) {
  if (ctx.rank() == 0) domain_error("empty lattice: no nonzero vectors");
  for (std::size_t i = 0; i < ctx.rank(); ++i)
    if (ctx.lattice().gram()(i, i) % 2 != 0) domain_error("minimum_norm: lattice is odd");
  // Every basis vector bounds the minimum from above.
  std::int64_t cap = to_int64(ctx.reduced_gram()(0, 0));
  for (std::int64_t b = 2; b <= cap; b += 2) {
    if (ctx.shell_count(b) > 0) return b;
  }
  return cap;
}

inline std::int64_t minimum_norm(const Lattice& l) {
  LatticeContext ctx(l);
  return minimum_norm(ctx);
}

inline ValidationReport validate(LatticeContext& ctx) {
  const IntMatrix& g = ctx.lattice().gram();
  ValidationReport r;
  r.symmetric = g.symmetric();
  r.even = true;
  for (std::size_t i = 0; i < g.rows(); ++i)
    if (g(i, i) % 2 != 0) r.even = false;
  r.det = det_exact(g);
  r.positive_definite = r.symmetric && is_positive_definite(to_rational(g));
  if (r.even && r.positive_definite && ctx.rank() > 0) {
    r.min_norm = minimum_norm(ctx);
    r.root_count = ctx.shell_count(2);
  }
  return r;
}

/// Also accepts Gram matrices that are not positive definite.
inline ValidationReport validate(const Lattice& l) {
  const IntMatrix& g = l.gram();
  if (!g.symmetric() || !is_positive_definite(to_rational(g))) {
    ValidationReport r;
    r.symmetric = g.symmetric();
    r.even = true;
    for (std::size_t i = 0; i < g.rows(); ++i)
      if (g(i, i) % 2 != 0) r.even = false;
    r.det = det_exact(g);
    return r;
  }
  LatticeContext ctx(l);
  return validate(ctx);
}

struct ExtremalityReport {
  std::int64_t bound = 0;
  std::int64_t min_norm = 0;
  bool is_extremal = false;
};

inline std::int64_t extremal_bound(std::size_t rank) {
  return 2 * static_cast<std::int64_t>(rank / 24) + 2;
}

inline ExtremalityReport extremality_from(std::size_t rank, std::int64_t mu) {
  ExtremalityReport r;
  r.bound = extremal_bound(rank);
  r.min_norm = mu;
  r.is_extremal = mu == r.bound;
  return r;
}

inline ExtremalityReport extremality_check(LatticeContext& ctx) {
  return extremality_from(ctx.rank(), minimum_norm(ctx));
}

inline ExtremalityReport extremality_check(const Lattice& l) {
  LatticeContext ctx(l);
  return extremality_check(ctx);
}

struct RootSystemReport {
  std::map<RootComponent, int> components;  // component -> multiplicity
  std::int64_t root_count = 0;

  std::string label() const {
    std::string s;
    // A before D before E; within a type, larger rank first.
    std::vector<std::pair<RootComponent, int>> items(components.begin(), components.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      if (a.first.type != b.first.type) return a.first.type < b.first.type;
      return a.first.rank > b.first.rank;
    });
    for (const auto& [c, m] : items) {
      s += c.to_string();
      if (m > 1) s += "^" + std::to_string(m);
    }
    return s;
  }

  /// The common Coxeter number of all components, or 0 if they differ.
  std::int64_t common_coxeter_number() const {
    std::int64_t h = 0;
    for (const auto& [c, m] : components) {
      const std::int64_t hc = coxeter_number(c);
      if (h != 0 && hc != h) return 0;
      h = hc;
    }
    return h;
  }
};

namespace detail {

inline RootComponent classify_component(std::int64_t roots, std::int64_t rank) {
  // A3 and D3 coincide; report A3.
  if (roots == rank * (rank + 1)) return RootComponent{RootType::A, static_cast<int>(rank)};
  if (rank >= 4 && roots == 2 * rank * (rank - 1))
    return RootComponent{RootType::D, static_cast<int>(rank)};
  if (rank == 6 && roots == 72) return RootComponent{RootType::E, 6};
  if (rank == 7 && roots == 126) return RootComponent{RootType::E, 7};
  if (rank == 8 && roots == 240) return RootComponent{RootType::E, 8};
  domain_error("unrecognized root system component: " + std::to_string(roots) +
               " roots spanning rank " + std::to_string(rank));
}

}  // namespace detail

inline RootSystemReport root_system(LatticeContext& ctx) {
  RootSystemReport rep;
  if (ctx.rank() == 0) return rep;
  const ShellVectors& roots = ctx.shell(2);
  rep.root_count = static_cast<std::int64_t>(roots.count);
  if (roots.count == 0) return rep;
  // Work with one root of each +-pair (even indices).
  const std::size_t m = roots.count / 2;
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (dot16(roots.dual(2 * a), roots.coord(2 * b), roots.stride) != 0)
        parent[find(a)] = find(b);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t a = 0; a < m; ++a) groups[find(a)].push_back(a);
  for (const auto& [root, members] : groups) {
    IntMatrix span(members.size(), ctx.rank());
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = 0; j < ctx.rank(); ++j)
        span(i, j) = roots.coord(2 * members[i])[j];
    const auto rank = static_cast<std::int64_t>(exact_rank(span));
    const auto count = static_cast<std::int64_t>(2 * members.size());
    ++rep.components[detail::classify_component(count, rank)];
  }
  return rep;
}

inline RootSystemReport root_system(const Lattice& l) {
  LatticeContext ctx(l);
  return root_system(ctx);
}

/// Rank and minimum norm, the data the stable-equation predicate reads.
struct RankMinimum {
  std::size_t rank = 0;
  std::int64_t min_norm = 0;
};

inline bool stable_eq_hyp_predicate(const RankMinimum& a, const RankMinimum& b) {
  if (a.rank != b.rank || a.min_norm != b.min_norm || a.min_norm <= 0) return false;
  return static_cast<std::int64_t>(a.rank) <= 8 * a.min_norm;
}

inline bool stable_eq_hyp_predicate(const Lattice& l, const Lattice& g) {
  if (l.rank() == 0 || g.rank() == 0) return false;
  return stable_eq_hyp_predicate(RankMinimum{l.rank(), minimum_norm(l)},
                                 RankMinimum{g.rank(), minimum_norm(g)});
}

/// Isometry-invariant content hash: FNV-1a over rank, shell counts up to
/// norm 4 and the root system label. Used as the cache directory name.
inline std::string lattice_fingerprint(LatticeContext& ctx) {
  std::string content = "rank=" + std::to_string(ctx.rank()) + ";shells=";
  if (ctx.rank() > 0) {
    const auto counts = ctx.shell_counts(4);
    for (std::size_t k = 0; k < counts.size(); ++k)
      content += (k ? "," : "") + std::to_string(counts[k]);
    content += ";roots=" + root_system(ctx).label();
    // The shell data alone can coincide for different lattices.
    content += ";gram=" + ctx.reduced_gram().to_string();
  }
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : content) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Computes and stores the fingerprint so the context can use its disk cache.
inline void attach_fingerprint(LatticeContext& ctx) {
  if (!ctx.fingerprint()) ctx.set_fingerprint(lattice_fingerprint(ctx));
}

}  // namespace thetalab

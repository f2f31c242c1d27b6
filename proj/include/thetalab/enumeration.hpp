#pragma once

// Exact counting of lattice vectors by norm and of g-tuples with a prescribed
// Gram matrix. All counts are direct enumerations.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "thetalab/context.hpp"
#include "thetalab/gram_target.hpp"
#include "thetalab/lattice.hpp"
#include "thetalab/parallel.hpp"

namespace thetalab {

struct EnumOptions {
  std::size_t jobs = 1;
  bool retain_vectors = false;
};

struct Shell {
  std::int64_t norm = 0;
  BigInt count = 0;
  std::vector<std::vector<BigInt>> vectors;  // lattice-basis coordinates
};

/// Vectors of L grouped by norm, up to max_norm.
struct ShellTable {
  std::string lattice;
  std::int64_t max_norm = 0;
  bool has_vectors = false;
  std::map<std::int64_t, Shell> shells;

  BigInt count(std::int64_t norm) const {
    auto it = shells.find(norm);
    return it == shells.end() ? BigInt(0) : it->second.count;
  }
};

inline ShellTable enumerate_shells(LatticeContext& ctx, std::int64_t bound,
                                   bool retain_vectors) {
  if (bound < 0) domain_error("enumerate_shells: negative norm bound");
  ShellTable table;
  table.lattice = ctx.lattice().name();
  table.max_norm = bound;
  table.has_vectors = retain_vectors;
  const auto counts = ctx.shell_counts(bound);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    Shell s;
    s.norm = static_cast<std::int64_t>(2 * k);
    s.count = counts[k];
    if (retain_vectors) {
      if (k == 0) {
        s.vectors.emplace_back(ctx.rank(), BigInt(0));
      } else {
        const ShellVectors& sv = ctx.shell(s.norm);
        for (std::size_t i = 0; i < sv.count; ++i)
          s.vectors.push_back(ctx.to_lattice_coordinates(sv.coord(i)));
      }
    }
    table.shells.emplace(s.norm, std::move(s));
  }
  return table;
}

inline ShellTable enumerate_shells(const Lattice& l, std::int64_t bound,
                                   const EnumOptions& opt = {}) {
  LatticeContext ctx(l, ContextOptions{opt.jobs, nullptr});
  return enumerate_shells(ctx, bound, opt.retain_vectors);
}

inline BigInt shell_count(LatticeContext& ctx, std::int64_t norm) {
  return ctx.shell_count(norm);
}

inline BigInt shell_count(const Lattice& l, std::int64_t norm, const EnumOptions& opt = {}) {
  LatticeContext ctx(l, ContextOptions{opt.jobs, nullptr});
  return ctx.shell_count(norm);
}

namespace detail {

// Splits [0, n) into a fixed number of contiguous chunks.
inline std::vector<std::pair<std::size_t, std::size_t>> chunks(std::size_t n,
                                                               std::size_t target = 256) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n == 0) return out;
  const std::size_t size = std::max<std::size_t>(1, (n + target - 1) / target);
  for (std::size_t b = 0; b < n; b += size) out.emplace_back(b, std::min(n, b + size));
  return out;
}

// Counts tuples (x_0..x_{g-1}) with Gram t, all diagonal entries positive,
// using bitset inner-product tables. x_0 runs over one vector of each +-pair;
// the caller doubles.
class BitsetCounter {
 public:
  BitsetCounter(LatticeContext& ctx, const GramTarget& t) : t_(t), g_(t.genus()) {
    shells_.resize(g_);
    for (std::size_t k = 0; k < g_; ++k) shells_[k] = &ctx.shell(t(k, k));
    tables_.assign(g_ * g_, nullptr);
    for (std::size_t i = 0; i < g_; ++i)
      for (std::size_t k = i + 1; k < g_; ++k)
        tables_[i * g_ + k] = ctx.ip_bits(t(i, i), t(k, k));
  }

  bool usable() const {
    for (std::size_t i = 0; i < g_; ++i)
      for (std::size_t k = i + 1; k < g_; ++k)
        if (tables_[i * g_ + k] == nullptr) return false;
    return true;
  }

  std::uint64_t count_range(std::size_t begin_pair, std::size_t end_pair) const {
    // masks[depth][k] : candidates for slot k after fixing slots < depth
    std::vector<std::vector<std::vector<std::uint64_t>>> masks(g_);
    for (std::size_t d = 0; d < g_; ++d) {
      masks[d].resize(g_);
      for (std::size_t k = d; k < g_; ++k)
        masks[d][k].assign((shells_[k]->count + 63) / 64, 0);
    }
    for (std::size_t k = 1; k < g_; ++k) fill_all(masks[0][k], shells_[k]->count);
    std::uint64_t total = 0;
    for (std::size_t p = begin_pair; p < end_pair; ++p) {
      total += step(masks, 0, 2 * p);
    }
    return total;
  }

 private:
  static void fill_all(std::vector<std::uint64_t>& m, std::size_t count) {
    std::fill(m.begin(), m.end(), ~std::uint64_t{0});
    if (count % 64) m.back() = (std::uint64_t{1} << (count % 64)) - 1;
  }

  // Fix slot `depth` to vector u, then count completions.
  std::uint64_t step(std::vector<std::vector<std::vector<std::uint64_t>>>& masks,
                     std::size_t depth, std::size_t u) const {
    const std::size_t next = depth + 1;
    for (std::size_t k = next; k < g_; ++k) {
      const InnerProductBits* tab = tables_[depth * g_ + k];
      const std::uint64_t* row = tab->row(u, t_(depth, k));
      const auto& src = masks[depth][k];
      auto& dst = masks[next][k];
      std::uint64_t any = 0;
      for (std::size_t w = 0; w < dst.size(); ++w) {
        dst[w] = src[w] & row[w];
        any |= dst[w];
      }
      if (!any) return 0;
    }
    if (next == g_ - 1) {
      std::uint64_t c = 0;
      for (auto w : masks[next][next]) c += static_cast<std::uint64_t>(std::popcount(w));
      return c;
    }
    std::uint64_t total = 0;
    const auto& cand = masks[next][next];
    for (std::size_t w = 0; w < cand.size(); ++w) {
      std::uint64_t bits = cand[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        bits &= bits - 1;
        total += step(masks, next, w * 64 + static_cast<std::size_t>(b));
      }
    }
    return total;
  }

  GramTarget t_;
  std::size_t g_;
  std::vector<const ShellVectors*> shells_;
  std::vector<const InnerProductBits*> tables_;
};

// Same count with explicit candidate lists and dot products; used when some
// shell is too large for bitset tables.
class ListCounter {
 public:
  ListCounter(LatticeContext& ctx, const GramTarget& t)
      : t_(t), g_(t.genus()), stride_(ctx.stride()) {
    shells_.resize(g_);
    for (std::size_t k = 0; k < g_; ++k) shells_[k] = &ctx.shell(t(k, k));
  }

  std::uint64_t count_range(std::size_t begin_pair, std::size_t end_pair) const {
    std::vector<std::vector<std::vector<std::uint32_t>>> lists(g_);
    for (std::size_t d = 0; d < g_; ++d) lists[d].resize(g_);
    for (std::size_t k = 1; k < g_; ++k) {
      lists[0][k].resize(shells_[k]->count);
      std::iota(lists[0][k].begin(), lists[0][k].end(), 0u);
    }
    std::uint64_t total = 0;
    for (std::size_t p = begin_pair; p < end_pair; ++p) total += step(lists, 0, 2 * p);
    return total;
  }

 private:
  std::uint64_t step(std::vector<std::vector<std::vector<std::uint32_t>>>& lists,
                     std::size_t depth, std::size_t u) const {
    const std::int16_t* du = shells_[depth]->dual(u);
    const std::size_t next = depth + 1;
    if (next == g_ - 1) {
      // Count the last slot without materialising it.
      const ShellVectors& s = *shells_[next];
      const std::int64_t want = t_(depth, next);
      std::uint64_t c = 0;
      for (auto w : lists[depth][next])
        if (dot16(du, s.coord(w), stride_) == want) ++c;
      return c;
    }
    for (std::size_t k = next; k < g_; ++k) {
      const ShellVectors& s = *shells_[k];
      const std::int64_t want = t_(depth, k);
      auto& dst = lists[next][k];
      dst.clear();
      for (auto w : lists[depth][k])
        if (dot16(du, s.coord(w), stride_) == want) dst.push_back(w);
      if (dst.empty()) return 0;
    }
    std::uint64_t total = 0;
    const auto cand = lists[next][next];
    for (auto w : cand) total += step(lists, next, w);
    return total;
  }

  GramTarget t_;
  std::size_t g_;
  std::size_t stride_;
  std::vector<const ShellVectors*> shells_;
};

// Counts for a target whose diagonal is strictly positive.
inline std::uint64_t count_positive_diagonal(LatticeContext& ctx, const GramTarget& t) {
  const std::size_t g = t.genus();
  if (g == 1) return ctx.shell_count(t(0, 0));
  const std::size_t pairs = ctx.shell(t(0, 0)).count / 2;
  const auto parts = chunks(pairs);
  std::vector<std::uint64_t> sums(parts.size(), 0);
  BitsetCounter bitset(ctx, t);
  if (bitset.usable()) {
    parallel_for(parts.size(), ctx.jobs(), [&](std::size_t i) {
      sums[i] = bitset.count_range(parts[i].first, parts[i].second);
    });
  } else {
    ListCounter list(ctx, t);
    parallel_for(parts.size(), ctx.jobs(), [&](std::size_t i) {
      sums[i] = list.count_range(parts[i].first, parts[i].second);
    });
  }
  std::uint64_t total = 0;
  for (auto s : sums) total += s;
  return 2 * total;
}

}  // namespace detail

/// r_L(T): number of ordered tuples (x_1..x_g) in L^g with Gram matrix T.
inline BigInt representation_count(LatticeContext& ctx, const GramTarget& t) {
  t.require_admissible();
  if (auto hit = ctx.memo_get(t)) return *hit;
  CoefficientCache* disk = ctx.fingerprint() ? ctx.disk_cache() : nullptr;
  const std::string entry = "coeff/" + t.key();
  if (disk) {
    if (auto text = disk->get(*ctx.fingerprint(), entry)) {
      const std::uint64_t v = std::stoull(*text);
      ctx.memo_put(t, v);
      return v;
    }
  }
  // A zero diagonal entry forces x_k = 0, hence a zero row.
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < t.genus(); ++k) {
    if (t(k, k) > 0) {
      keep.push_back(k);
      continue;
    }
    for (std::size_t j = 0; j < t.genus(); ++j)
      if (t(k, j) != 0) return 0;
  }
  std::uint64_t result = 1;
  if (!keep.empty()) {
    // Order slots by increasing norm; r_L is invariant under permutations.
    std::stable_sort(keep.begin(), keep.end(),
                     [&](std::size_t a, std::size_t b) { return t(a, a) < t(b, b); });
    GramTarget sub(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t j = i; j < keep.size(); ++j) sub.set(i, j, t(keep[i], keep[j]));
    result = detail::count_positive_diagonal(ctx, sub);
  }
  ctx.memo_put(t, result);
  if (disk) disk->put(*ctx.fingerprint(), entry, std::to_string(result) + "\n");
  return result;
}

inline BigInt representation_count(const Lattice& l, const GramTarget& t,
                                   const EnumOptions& opt = {}) {
  LatticeContext ctx(l, ContextOptions{opt.jobs, nullptr});
  return representation_count(ctx, t);
}

using GramCounts = std::map<GramTarget, std::uint64_t>;

/// Gram-matrix histogram of all tuples with x_k in the shell of norm d[k]
/// (every d[k] > 0): maps each realised Gram matrix T (diag = d) to r_L(T).
inline GramCounts gram_histogram(LatticeContext& ctx, const std::vector<std::int64_t>& d) {
  const std::size_t g = d.size();
  GramCounts out;
  if (g == 0) {
    out.emplace(GramTarget(0), 1);
    return out;
  }
  for (auto v : d)
    if (v <= 0 || v % 2 != 0) domain_error("gram_histogram: diagonal must be positive and even");
  if (g == 1) {
    const std::uint64_t c = ctx.shell_count(d[0]);
    if (c) out.emplace(GramTarget::diagonal(d), c);
    return out;
  }

  std::vector<const ShellVectors*> shells(g);
  for (std::size_t k = 0; k < g; ++k) shells[k] = &ctx.shell(d[k]);
  const std::size_t stride = ctx.stride();
  const std::size_t last = g - 1;
  // Histogram over inner products of the last slot with the prefix.
  std::vector<std::int64_t> cap(last), radix(last);
  std::size_t cells = 1;
  for (std::size_t i = 0; i < last; ++i) {
    cap[i] = static_cast<std::int64_t>(boost::multiprecision::sqrt(BigInt(d[i] * d[last])));
    radix[i] = 2 * cap[i] + 1;
    cells *= static_cast<std::size_t>(radix[i]);
  }

  const auto parts = detail::chunks(shells[0]->count / 2);
  std::vector<GramCounts> partial(parts.size());
  parallel_for(parts.size(), ctx.jobs(), [&](std::size_t item) {
    GramCounts& local = partial[item];
    std::vector<std::uint64_t> hist(cells, 0);
    std::vector<std::size_t> chosen(g, 0);
    GramTarget t = GramTarget::diagonal(d);

    auto flush = [&] {
      for (std::size_t cell = 0; cell < cells; ++cell) {
        if (!hist[cell]) continue;
        std::size_t rem = cell;
        for (std::size_t i = 0; i < last; ++i) {
          const auto r = static_cast<std::size_t>(radix[i]);
          t.set(i, last, static_cast<std::int64_t>(rem % r) - cap[i]);
          rem /= r;
        }
        local[t] += 2 * hist[cell];
        hist[cell] = 0;
      }
    };

    auto finish = [&] {
      const ShellVectors& s = *shells[last];
      for (std::size_t w = 0; w < s.count; ++w) {
        std::size_t cell = 0, mult = 1;
        for (std::size_t i = 0; i < last; ++i) {
          const std::int64_t v =
              dot16(shells[i]->dual(chosen[i]), s.coord(w), stride);
          cell += static_cast<std::size_t>(v + cap[i]) * mult;
          mult *= static_cast<std::size_t>(radix[i]);
        }
        ++hist[cell];
      }
      flush();
    };

    // Depth-first over prefix slots 1..last-1.
    auto recurse = [&](auto&& self, std::size_t slot) -> void {
      if (slot == last) {
        finish();
        return;
      }
      const ShellVectors& s = *shells[slot];
      for (std::size_t w = 0; w < s.count; ++w) {
        chosen[slot] = w;
        for (std::size_t i = 0; i < slot; ++i)
          t.set(i, slot, dot16(shells[i]->dual(chosen[i]), s.coord(w), stride));
        self(self, slot + 1);
      }
    };

    for (std::size_t p = parts[item].first; p < parts[item].second; ++p) {
      chosen[0] = 2 * p;
      recurse(recurse, 1);
    }
  });
  for (auto& part : partial)
    for (auto& [key, c] : part) out[key] += c;
  return out;
}

namespace detail {

// Nondecreasing tuples of positive even numbers with length <= g and sum <= b.
inline void sorted_diagonals(std::size_t g, std::int64_t b, std::vector<std::int64_t>& cur,
                             std::vector<std::vector<std::int64_t>>& out) {
  if (!cur.empty()) out.push_back(cur);
  if (cur.size() == g) return;
  const std::int64_t used = std::accumulate(cur.begin(), cur.end(), std::int64_t{0});
  const std::int64_t start = cur.empty() ? 2 : cur.back();
  for (std::int64_t v = start; used + v <= b; v += 2) {
    cur.push_back(v);
    sorted_diagonals(g, b, cur, out);
    cur.pop_back();
  }
}

// All ways to choose an increasing set of `k` positions out of `g`.
inline void position_sets(std::size_t g, std::size_t k, std::size_t start,
                          std::vector<std::size_t>& cur,
                          std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t p = start; p < g; ++p) {
    cur.push_back(p);
    position_sets(g, k, p + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// r_L(T) for every admissible genus-g T with trace <= bound and r_L(T) > 0.
inline std::map<GramTarget, BigInt> representation_profile(LatticeContext& ctx, std::size_t g,
                                                           std::int64_t bound) {
  if (bound < 0) domain_error("representation_profile: negative trace bound");
  std::map<GramTarget, BigInt> out;
  out.emplace(GramTarget(g), 1);
  if (g == 0) return out;

  std::vector<std::vector<std::int64_t>> diags;
  std::vector<std::int64_t> cur;
  detail::sorted_diagonals(g, bound, cur, diags);

  for (const auto& sorted : diags) {
    const GramCounts hist = gram_histogram(ctx, sorted);
    if (hist.empty()) continue;
    const std::size_t k = sorted.size();
    std::vector<std::vector<std::size_t>> placements;
    std::vector<std::size_t> pc;
    detail::position_sets(g, k, 0, pc, placements);
    // Each distinct arrangement of the diagonal, with a fixed matching back
    // to the sorted slots, yields every target exactly once.
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
      for (const auto& [ts, count] : hist) {
        for (const auto& pos : placements) {
          GramTarget full(g);
          for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a; b < k; ++b)
              full.set(pos[a], pos[b], ts(sigma[a], sigma[b]));
          out.emplace(std::move(full), count);
        }
      }
    } while (std::next_permutation(arrangement.begin(), arrangement.end()));
  }
  return out;
}

inline std::map<GramTarget, BigInt> representation_profile(const Lattice& l, std::size_t g,
                                                           std::int64_t bound,
                                                           const EnumOptions& opt = {}) {
  LatticeContext ctx(l, ContextOptions{opt.jobs, nullptr});
  return representation_profile(ctx, g, bound);
}

}  // namespace thetalab

#pragma once

// Exact short-vector enumeration over an integer Gram matrix.
//
// With a(k, j) the Bareiss pivot rows and d[k] the leading principal minors
// (d[0] = 1), put z_k = sum_{j >= k} a(k, j) x_j. Then
//
//   Q(x) = sum_k z_k^2 / (d[k] d[k+1])
//
// and the tail t_k = sum_{l >= k} z_l^2 / (d[l] d[l+1]) satisfies
// d[k] t_k in Z (Sylvester), with T_k := d[k] t_k obeying
//
//   T_k = (d[k] T_{k+1} + z_k^2) / d[k+1]      (exact division).
//
// The search keeps T_k <= d[k] B at every level, so all pruning is integer
// arithmetic and the enumeration is complete by construction.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "thetalab/error.hpp"
#include "thetalab/exactnum.hpp"
#include "thetalab/parallel.hpp"

namespace thetalab {

namespace detail {

using i128 = __int128;

template <class I>
inline I floor_div(I a, I b) {  // b > 0
  I q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

template <class I>
inline I ceil_div(I a, I b) {  // b > 0
  I q = a / b;
  if ((a % b != 0) && (a > 0)) ++q;
  return q;
}

template <class I>
inline I isqrt(I m) {  // m >= 0
  I r = static_cast<I>(std::sqrt(static_cast<long double>(m)));
  while (r > 0 && r * r > m) --r;
  while ((r + 1) * (r + 1) <= m) ++r;
  return r;
}

}  // namespace detail

class ShortVectorEnumerator {
 public:
  ShortVectorEnumerator() = default;

  explicit ShortVectorEnumerator(const IntMatrix& gram) : n_(gram.rows()) {
    const BareissRows br = bareiss_rows(gram);
    gram_.assign(n_ * n_, 0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) gram_[i * n_ + j] = to_int64(gram(i, j));
    delta_big_ = br.minors;
    // Coordinate bounds |x_j| <= sqrt(B * (G^-1)_jj) are needed for the
    // overflow analysis; keep the diagonal of the inverse.
    if (n_ > 0) {
      const RatMatrix inv = inverse_rational(to_rational(gram));
      for (std::size_t j = 0; j < n_; ++j) inv_diag_.push_back(inv(j, j));
    }
    rows_big_ = br.rows;
  }

  std::size_t dimension() const noexcept { return n_; }

  /// Visits every nonzero x with Q(x) <= bound, one representative of each
  /// pair {x, -x} (the one whose last nonzero coordinate is positive).
  /// Returns one accumulator per work item, in a fixed item order that does
  /// not depend on `jobs`. Acc must provide
  ///   void operator()(const std::int32_t* x, std::int64_t norm, std::int64_t aux)
  /// where aux = x^T M x for the optional auxiliary form M (0 without one).
  template <class Acc, class Make>
  std::vector<Acc> run(std::int64_t bound, std::size_t jobs, Make&& make,
                       const std::vector<std::int64_t>* aux_form = nullptr) const {
    if (bound < 0) domain_error("enumeration bound must be nonnegative");
    if (n_ == 0 || bound == 0) {
      std::vector<Acc> out;
      out.push_back(make());
      return out;
    }
    if (fits_int64(bound, aux_form)) {
      return run_typed<std::int64_t, Acc>(bound, jobs, make, aux_form);
    }
    return run_typed<detail::i128, Acc>(bound, jobs, make, aux_form);
  }

  /// Upper bound on |x_j| for vectors of norm <= bound.
  std::int64_t coordinate_bound(std::size_t j, std::int64_t bound) const {
    const Rational v = inv_diag_[j] * bound;
    BigInt fl = numerator(v) / denominator(v);
    BigInt r = boost::multiprecision::sqrt(fl);
    return to_int64(r);
  }

  const std::vector<std::int64_t>& gram_flat() const noexcept { return gram_; }

 private:
  template <class I>
  struct Frame {
    std::size_t level = 0;  // next level to choose
    bool zero_above = true;
    std::vector<std::int32_t> x;
    std::vector<I> ps;   // (n+1) x n partial sums of the pivot rows
    std::vector<I> t;    // n+1 scaled tails
    std::vector<I> w;    // (n+1) x n partial sums of the auxiliary form
    std::vector<I> p;    // n+1 auxiliary tail values
  };

  bool fits_int64(std::int64_t bound, const std::vector<std::int64_t>* aux) const {
    using boost::multiprecision::abs;
    const BigInt limit = BigInt(1) << 61;
    std::vector<BigInt> xb(n_);
    for (std::size_t j = 0; j < n_; ++j) xb[j] = coordinate_bound(j, bound) + 1;
    for (std::size_t i = 0; i < n_; ++i) {
      BigInt z = 0;
      for (std::size_t j = i; j < n_; ++j) z += abs(rows_big_(i, j)) * xb[j];
      if (z * z > limit) return false;
      if (delta_big_[i] * delta_big_[i + 1] * bound > limit) return false;
      if (2 * abs(rows_big_(i, i)) * z > limit) return false;
    }
    if (aux) {
      BigInt s = 0;
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
          s += abs(BigInt((*aux)[i * n_ + j])) * xb[i] * xb[j];
      if (s > limit) return false;
    }
    return true;
  }

  template <class I>
  void load(std::vector<I>& a, std::vector<I>& d) const {
    a.assign(n_ * n_, 0);
    d.assign(n_ + 1, 0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j)
        a[i * n_ + j] = static_cast<I>(rows_big_(i, j));
    for (std::size_t k = 0; k <= n_; ++k) d[k] = static_cast<I>(delta_big_[k]);
  }

  template <class I, class Acc, class Make>
  std::vector<Acc> run_typed(std::int64_t bound, std::size_t jobs, Make& make,
                             const std::vector<std::int64_t>* aux) const {
    Ctx<I> ctx;
    load<I>(ctx.a, ctx.d);
    prepare_division(ctx);
    ctx.n = n_;
    ctx.bound = static_cast<I>(bound);
    ctx.aux = aux != nullptr;
    if (aux) {
      ctx.m.resize(n_ * n_);
      for (std::size_t i = 0; i < n_ * n_; ++i) ctx.m[i] = static_cast<I>((*aux)[i]);
    }

    Frame<I> root;
    root.level = n_ - 1;
    root.x.assign(n_, 0);
    root.ps.assign((n_ + 1) * n_, 0);
    root.t.assign(n_ + 1, 0);
    root.w.assign((n_ + 1) * n_, 0);
    root.p.assign(n_ + 1, 0);

    // Split the top of the tree into work items. The split depends only on the
    // lattice and the bound, never on the number of workers.
    std::vector<Frame<I>> items{root};
    constexpr std::size_t kTargetItems = 256;
    while (items.size() < kTargetItems && items.front().level >= 2) {
      std::vector<Frame<I>> next;
      for (auto& f : items) expand(ctx, f, next);
      if (next.empty()) break;
      items.swap(next);
    }

    std::vector<Acc> accs;
    accs.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) accs.push_back(make());
    parallel_for(items.size(), jobs, [&](std::size_t i) {
      Frame<I> f = items[i];
      if constexpr (std::is_same_v<I, std::int64_t>) {
        if (f.level == 0)
          descend(ctx, f, f.level, f.zero_above, accs[i]);
        else if (ctx.aux)
          walk<true>(ctx, f, accs[i]);
        else
          walk<false>(ctx, f, accs[i]);
      } else {
        descend(ctx, f, f.level, f.zero_above, accs[i]);
      }
    });
    return accs;
  }

  template <class I>
  struct Ctx {
    std::size_t n = 0;
    I bound = 0;
    bool aux = false;
    std::vector<I> a, d, m;
    // Exact division by d[k]: shift out the power of two, then multiply by
    // the inverse of the odd part modulo 2^64.
    std::vector<unsigned> div_shift;
    std::vector<std::uint64_t> div_inverse;
    std::vector<double> inv_pivot;  // 1 / d[k+1]

    I exact_div(I x, std::size_t k) const {  // x >= 0 and d[k] | x
      if constexpr (std::is_same_v<I, std::int64_t>) {
        return static_cast<I>((static_cast<std::uint64_t>(x) >> div_shift[k]) * div_inverse[k]);
      } else {
        return x / d[k];
      }
    }
  };

  template <class I>
  static void prepare_division(Ctx<I>& c) {
    c.div_shift.assign(c.d.size(), 0);
    c.div_inverse.assign(c.d.size(), 1);
    c.inv_pivot.assign(c.d.size(), 0.0);
    for (std::size_t k = 0; k + 1 < c.d.size(); ++k)
      c.inv_pivot[k] = 1.0 / static_cast<double>(c.d[k + 1]);
    if constexpr (std::is_same_v<I, std::int64_t>) {
      for (std::size_t k = 0; k < c.d.size(); ++k) {
        auto v = static_cast<std::uint64_t>(c.d[k]);
        const auto shift = static_cast<unsigned>(std::countr_zero(v));
        v >>= shift;
        std::uint64_t inv = v;  // Newton iteration, 3 -> 6 -> ... -> 96 bits
        for (int it = 0; it < 5; ++it) inv *= 2 - v * inv;
        c.div_shift[k] = shift;
        c.div_inverse[k] = inv;
      }
    }
  }

  // Sets x_level = v in frame f (which must be positioned at `level`).
  template <class I>
  static inline void assign(const Ctx<I>& c, Frame<I>& f, std::size_t level, I v) {
    const std::size_t n = c.n;
    const I s = f.ps[(level + 1) * n + level];
    const I z = c.d[level + 1] * v + s;
    f.t[level] = c.exact_div(c.d[level] * f.t[level + 1] + z * z, level + 1);
    f.x[level] = static_cast<std::int32_t>(v);
    const I* arow = c.a.data();
    I* cur = f.ps.data() + level * n;
    const I* up = f.ps.data() + (level + 1) * n;
    for (std::size_t i = 0; i < level; ++i) cur[i] = up[i] + arow[i * n + level] * v;
    if (c.aux) {
      const I* mrow = c.m.data() + level * n;
      I* wc = f.w.data() + level * n;
      const I* wu = f.w.data() + (level + 1) * n;
      f.p[level] = f.p[level + 1] + 2 * v * wu[level] + mrow[level] * v * v;
      for (std::size_t i = 0; i < level; ++i) wc[i] = wu[i] + mrow[i] * v;
    }
  }

  template <class I>
  static inline void range(const Ctx<I>& c, const Frame<I>& f, std::size_t level,
                           bool zero_above, I& lo, I& hi) {
    const std::size_t n = c.n;
    const I s = f.ps[(level + 1) * n + level];
    const I m = c.d[level] * (c.d[level + 1] * c.bound - f.t[level + 1]);
    interval(c, level, s, m, lo, hi);
    if (zero_above && lo < 0) lo = 0;
  }

  // The admissible x at `level` form {v : (d[level+1] v + s)^2 <= m}.
  template <class I>
  static inline void interval(const Ctx<I>& c, std::size_t level, I s, I m, I& lo, I& hi) {
    const I dl = c.d[level + 1];
    if constexpr (std::is_same_v<I, std::int64_t>) {
      // Start from the integer nearest the center (a floating estimate,
      // corrected by exact tests) and walk outwards; intervals are short.
      auto ok = [&](I v) {
        const I z = dl * v + s;
        return z * z <= m;
      };
      const double center = -static_cast<double>(s) * c.inv_pivot[level] + 0.5;
      I p = static_cast<I>(center);
      if (static_cast<double>(p) > center) --p;
      if (!ok(p)) {
        if (ok(p - 1)) {
          --p;
        } else if (ok(p + 1)) {
          ++p;
        } else {
          lo = 1;
          hi = 0;
          return;
        }
      }
      lo = p;
      hi = p;
      while (ok(lo - 1)) --lo;
      while (ok(hi + 1)) ++hi;
    } else {
      const I r = detail::isqrt<I>(m);
      lo = detail::ceil_div<I>(-s - r, dl);
      hi = detail::floor_div<I>(r - s, dl);
    }
  }

  template <class I>
  void expand(const Ctx<I>& c, const Frame<I>& f, std::vector<Frame<I>>& out) const {
    I lo, hi;
    range(c, f, f.level, f.zero_above, lo, hi);
    for (I v = lo; v <= hi; ++v) {
      Frame<I> child = f;
      assign(c, child, f.level, v);
      child.zero_above = f.zero_above && v == 0;
      child.level = f.level - 1;
      out.push_back(std::move(child));
    }
  }

  template <class I, class Acc>
  static void descend(const Ctx<I>& c, Frame<I>& f, std::size_t level, bool zero_above,
                      Acc& acc) {
    I lo, hi;
    range(c, f, level, zero_above, lo, hi);
    if (level == 0) {
      if (zero_above && lo < 1) lo = 1;
      if (lo > hi) return;
      const std::size_t n = c.n;
      const I dl = c.d[1];
      const I s = f.ps[n];  // row 1, entry 0
      I z = dl * lo + s;
      I norm = c.exact_div(f.t[1] + z * z, 1);
      I wv = 0, pv = 0, m00 = 0;
      if (c.aux) {
        wv = f.w[n];
        pv = f.p[1];
        m00 = c.m[0];
      }
      for (I v = lo; v <= hi; ++v) {
        f.x[0] = static_cast<std::int32_t>(v);
        const I aux = c.aux ? pv + 2 * v * wv + m00 * v * v : I(0);
        acc(f.x.data(), static_cast<std::int64_t>(norm), static_cast<std::int64_t>(aux));
        norm += 2 * z + dl;
        z += dl;
      }
      return;
    }
    for (I v = lo; v <= hi; ++v) {
      assign(c, f, level, v);
      descend(c, f, level - 1, zero_above && v == 0, acc);
    }
  }

  // Iterative form of descend for the int64 path. Row k of `sig` holds the
  // suffix sums sig[k][j] = sum_{i >= j} a(k, i) x_i (and likewise for the
  // auxiliary form); stale[k] is the highest level whose x changed since row k
  // was last refreshed, so a row is only brought up to date on entry and only
  // over the columns that moved.
  template <bool Aux, class Acc>
  static void walk(const Ctx<std::int64_t>& c, const Frame<std::int64_t>& f, Acc& acc) {
    using I = std::int64_t;
    const std::size_t n = c.n;
    const std::size_t w = n + 1;
    const std::size_t top = f.level;
    std::vector<I> sig(n * w, 0), wsig(Aux ? n * w : 0, 0);
    std::vector<I> t(n + 1, 0), p(n + 1, 0), hi(n, 0);
    std::vector<std::size_t> stale(n, 0);
    std::vector<char> zero(n + 1, 0);
    std::vector<std::int32_t> x = f.x;
    const I* a = c.a.data();
    const I* mm = c.m.data();

    for (std::size_t k = 0; k <= top; ++k) {
      for (std::size_t j = n; j-- > top + 1;) {
        sig[k * w + j] = sig[k * w + j + 1] + a[k * n + j] * x[j];
        if constexpr (Aux) wsig[k * w + j] = wsig[k * w + j + 1] + mm[k * n + j] * x[j];
      }
      stale[k] = k < top ? top : k;
    }
    t[top + 1] = f.t[top + 1];
    if constexpr (Aux) p[top + 1] = f.p[top + 1];
    zero[top] = f.zero_above;

    auto refresh = [&](std::size_t k) {
      for (std::size_t j = stale[k]; j > k; --j) {
        sig[k * w + j] = sig[k * w + j + 1] + a[k * n + j] * x[j];
        if constexpr (Aux) wsig[k * w + j] = wsig[k * w + j + 1] + mm[k * n + j] * x[j];
      }
      stale[k] = k;
    };
    auto open = [&](std::size_t k) {  // row k is fresh; sets x[k] = lo and hi[k]
      const I m = c.d[k] * (c.d[k + 1] * c.bound - t[k + 1]);
      I lo, h;
      interval(c, k, sig[k * w + k + 1], m, lo, h);
      if (zero[k] && lo < 0) lo = 0;
      x[k] = static_cast<std::int32_t>(lo);
      hi[k] = h;
      if (k > 0 && stale[k - 1] < k) stale[k - 1] = k;
    };

    std::size_t k = top;
    open(k);
    for (;;) {
      if (x[k] > hi[k]) {
        if (k == top) return;
        ++k;
        ++x[k];
        if (stale[k - 1] < k) stale[k - 1] = k;
        continue;
      }
      const I v = x[k];
      const I s = sig[k * w + k + 1];
      const I z = c.d[k + 1] * v + s;
      t[k] = c.exact_div(c.d[k] * t[k + 1] + z * z, k + 1);
      if constexpr (Aux)
        p[k] = p[k + 1] + v * (2 * wsig[k * w + k + 1] + mm[k * n + k] * v);
      zero[k - 1] = zero[k] && v == 0;

      if (k == 1) {
        refresh(0);
        const I s0 = sig[1];
        const I m0 = c.d[1] * c.bound - t[1];
        I lo, h;
        interval(c, 0, s0, m0, lo, h);
        if (zero[0] && lo < 1) lo = 1;
        if (lo <= h) {
          const I dl = c.d[1];
          I z0 = dl * lo + s0;
          I norm = c.exact_div(t[1] + z0 * z0, 1);
          const I wv = Aux ? wsig[1] : 0;
          const I pv = Aux ? p[1] : 0;
          const I m00 = Aux ? mm[0] : 0;
          for (I u = lo; u <= h; ++u) {
            x[0] = static_cast<std::int32_t>(u);
            const I aux = Aux ? pv + u * (2 * wv + m00 * u) : 0;
            acc(x.data(), norm, aux);
            norm += 2 * z0 + dl;
            z0 += dl;
          }
        }
        ++x[1];
        if (stale[0] < 1) stale[0] = 1;
        continue;
      }
      if (stale[k - 2] < stale[k - 1]) stale[k - 2] = stale[k - 1];
      refresh(k - 1);
      --k;
      open(k);
    }
  }

  std::size_t n_ = 0;
  std::vector<std::int64_t> gram_;
  std::vector<BigInt> delta_big_;
  IntMatrix rows_big_;
  std::vector<Rational> inv_diag_;
};

}  // namespace thetalab

#pragma once

// Per-lattice working state shared by the counting routines: the reduced
// basis, the enumerator, cached shells and inner-product tables, and a memo
// of representation numbers. The Lattice itself stays immutable; all caches
// here are insert-if-absent under a mutex.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "thetalab/cache.hpp"
#include "thetalab/enumerator.hpp"
#include "thetalab/gram_target.hpp"
#include "thetalab/lattice.hpp"

namespace thetalab {

/// All vectors of one norm, stored in reduced-basis coordinates as
/// consecutive pairs (v, -v). `dual(i)` holds G * coord(i), so that
/// Q(u, v) = dual(u) . coord(v).
struct ShellVectors {
  std::int64_t norm = 0;
  std::size_t count = 0;
  std::size_t stride = 0;
  std::vector<std::int16_t> coords;
  std::vector<std::int16_t> duals;

  const std::int16_t* coord(std::size_t i) const { return coords.data() + i * stride; }
  const std::int16_t* dual(std::size_t i) const { return duals.data() + i * stride; }
};

inline std::int32_t dot16(const std::int16_t* a, const std::int16_t* b, std::size_t n) {
  std::int32_t s = 0;
  for (std::size_t k = 0; k < n; ++k) s += static_cast<std::int32_t>(a[k]) * b[k];
  return s;
}

/// For every u in shell A and every admissible inner product value v, the
/// set of w in shell B with Q(u, w) = v, as a bitset.
struct InnerProductBits {
  std::int64_t max_abs = 0;  // values range over [-max_abs, max_abs]
  std::size_t words = 0;     // 64-bit words per bitset
  std::vector<std::uint64_t> bits;

  const std::uint64_t* row(std::size_t u, std::int64_t value) const {
    const std::size_t values = static_cast<std::size_t>(2 * max_abs + 1);
    return bits.data() + (u * values + static_cast<std::size_t>(value + max_abs)) * words;
  }
};

struct ContextOptions {
  std::size_t jobs = 1;
  CoefficientCache* disk_cache = nullptr;
};

class LatticeContext {
 public:
  static constexpr std::size_t kBitsetShellLimit = 8192;

  explicit LatticeContext(Lattice lattice, ContextOptions options = {})
      : lattice_(std::move(lattice)), options_(options) {
    if (lattice_.rank() > 0) {
      const LllResult red = lll_reduce_gram(lattice_.gram());
      reduced_gram_ = red.gram;
      transform_ = red.transform;
      enumerator_ = ShortVectorEnumerator(reduced_gram_);
    }
    stride_ = (lattice_.rank() + 7) / 8 * 8;
  }

  LatticeContext(const LatticeContext&) = delete;
  LatticeContext& operator=(const LatticeContext&) = delete;

  const Lattice& lattice() const noexcept { return lattice_; }
  const IntMatrix& reduced_gram() const noexcept { return reduced_gram_; }
  /// Rows express the reduced basis in terms of the lattice's own basis.
  const IntMatrix& transform() const noexcept { return transform_; }
  const ShortVectorEnumerator& enumerator() const noexcept { return enumerator_; }
  std::size_t rank() const noexcept { return lattice_.rank(); }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t jobs() const noexcept { return options_.jobs; }
  CoefficientCache* disk_cache() const noexcept { return options_.disk_cache; }

  /// Number of vectors of norm 2k for k = 0 .. bound/2 (index k).
  std::vector<std::uint64_t> shell_counts(std::int64_t bound) {
    for (std::size_t i = 0; i < rank(); ++i)
      if (lattice_.gram()(i, i) % 2 != 0)
        domain_error("lattice " + lattice_.name() + " is odd; shells are indexed by even norms");
    std::lock_guard<std::mutex> lock(mutex_);
    if (bound <= counts_bound_) {
      return std::vector<std::uint64_t>(counts_.begin(), counts_.begin() + bound / 2 + 1);
    }
    struct Counter {
      std::vector<std::uint64_t> hist;
      void operator()(const std::int32_t*, std::int64_t norm, std::int64_t) {
        ++hist[static_cast<std::size_t>(norm / 2)];
      }
    };
    const std::size_t slots = static_cast<std::size_t>(bound / 2 + 1);
    auto parts = enumerator_.run<Counter>(bound, jobs(), [&] {
      return Counter{std::vector<std::uint64_t>(slots, 0)};
    });
    std::vector<std::uint64_t> total(slots, 0);
    total[0] = 1;
    for (const auto& p : parts)
      for (std::size_t k = 1; k < slots; ++k) total[k] += 2 * p.hist[k];
    counts_ = total;
    counts_bound_ = bound;
    return total;
  }

  std::uint64_t shell_count(std::int64_t norm) {
    if (norm < 0 || norm % 2 != 0) return 0;
    return shell_counts(norm)[static_cast<std::size_t>(norm / 2)];
  }

  /// Retained vectors of exactly the given (even, positive) norm.
  const ShellVectors& shell(std::int64_t norm) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = shells_.find(norm);
    if (it != shells_.end()) return *it->second;
    const std::size_t n = rank();
    struct Collector {
      std::int64_t norm;
      std::size_t n;
      std::vector<std::int32_t> found;
      void operator()(const std::int32_t* x, std::int64_t q, std::int64_t) {
        if (q == norm) found.insert(found.end(), x, x + n);
      }
    };
    auto parts = enumerator_.run<Collector>(norm, jobs(), [&] {
      return Collector{norm, n, {}};
    });
    auto sv = std::make_unique<ShellVectors>();
    sv->norm = norm;
    sv->stride = stride_;
    std::size_t pairs = 0;
    for (const auto& p : parts) pairs += p.found.size() / (n ? n : 1);
    sv->count = 2 * pairs;
    sv->coords.assign(sv->count * stride_, 0);
    sv->duals.assign(sv->count * stride_, 0);
    const auto& g = enumerator_.gram_flat();
    std::size_t idx = 0;
    auto put = [&](const std::int32_t* x, int sign) {
      std::int16_t* c = sv->coords.data() + idx * stride_;
      std::int16_t* d = sv->duals.data() + idx * stride_;
      for (std::size_t i = 0; i < n; ++i) {
        c[i] = narrow(sign * x[i]);
        std::int64_t s = 0;
        for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * x[j];
        d[i] = narrow(sign * s);
      }
      ++idx;
    };
    for (const auto& p : parts)
      for (std::size_t off = 0; off < p.found.size(); off += n) {
        put(p.found.data() + off, 1);
        put(p.found.data() + off, -1);
      }
    auto& ref = *sv;
    shells_.emplace(norm, std::move(sv));
    return ref;
  }

  /// Bitset inner-product tables between two shells, or nullptr when the
  /// shells are too large for the bitset representation.
  const InnerProductBits* ip_bits(std::int64_t na, std::int64_t nb) {
    const ShellVectors& a = shell(na);
    const ShellVectors& b = shell(nb);
    if (a.count > kBitsetShellLimit || b.count > kBitsetShellLimit) return nullptr;
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(na, nb);
    auto it = bits_.find(key);
    if (it != bits_.end()) return it->second.get();
    auto t = std::make_unique<InnerProductBits>();
    t->max_abs = static_cast<std::int64_t>(
        boost::multiprecision::sqrt(BigInt(na) * BigInt(nb)));
    t->words = (b.count + 63) / 64;
    const std::size_t values = static_cast<std::size_t>(2 * t->max_abs + 1);
    t->bits.assign(a.count * values * t->words, 0);
    for (std::size_t u = 0; u < a.count; ++u) {
      const std::int16_t* du = a.dual(u);
      for (std::size_t w = 0; w < b.count; ++w) {
        const std::int64_t v = dot16(du, b.coord(w), stride_);
        std::uint64_t* row = t->bits.data() +
                             (u * values + static_cast<std::size_t>(v + t->max_abs)) * t->words;
        row[w / 64] |= std::uint64_t{1} << (w % 64);
      }
    }
    const InnerProductBits* out = t.get();
    bits_.emplace(key, std::move(t));
    return out;
  }

  std::optional<std::uint64_t> memo_get(const GramTarget& t) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memo_.find(t);
    if (it == memo_.end()) return std::nullopt;
    return it->second;
  }

  void memo_put(const GramTarget& t, std::uint64_t v) {
    std::lock_guard<std::mutex> lock(mutex_);
    memo_.emplace(t, v);
  }

  /// Isometry-invariant content fingerprint; set once by the cache layer.
  const std::optional<std::string>& fingerprint() const noexcept { return fingerprint_; }
  void set_fingerprint(std::string fp) { fingerprint_ = std::move(fp); }

  /// Maps reduced-basis coordinates back to the lattice's own basis.
  std::vector<BigInt> to_lattice_coordinates(const std::int16_t* x) const {
    const std::size_t n = rank();
    std::vector<BigInt> out(n, 0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (x[i] != 0) out[j] += BigInt(x[i]) * transform_(i, j);
    return out;
  }

 private:
  static std::int16_t narrow(std::int64_t v) {
    if (v > 32767 || v < -32768) domain_error("shell vector coordinate exceeds 16 bits");
    return static_cast<std::int16_t>(v);
  }

  Lattice lattice_;
  ContextOptions options_;
  IntMatrix reduced_gram_;
  IntMatrix transform_;
  ShortVectorEnumerator enumerator_;
  std::size_t stride_ = 0;

  std::mutex mutex_;
  std::vector<std::uint64_t> counts_{1};
  std::int64_t counts_bound_ = 0;
  std::map<std::int64_t, std::unique_ptr<ShellVectors>> shells_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::unique_ptr<InnerProductBits>> bits_;
  std::map<GramTarget, std::uint64_t> memo_;
  std::optional<std::string> fingerprint_;
};

}  // namespace thetalab

#pragma once

// Lattice values and their constructions: ADE root lattices, orthogonal sums,
// the D_n^+ plus-construction and glue-code (Niemeier style) lattices.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "thetalab/error.hpp"
#include "thetalab/exactnum.hpp"

namespace thetalab {

/// A positive definite integral lattice. Rows of `generator` are basis
/// vectors in an ambient rational space carrying the bilinear form
/// `ambient_form`; `gram` = generator * ambient_form * generator^T.
class Lattice {
 public:
  Lattice() = default;
  Lattice(std::string name, RatMatrix generator, RatMatrix ambient_form,
          IntMatrix gram)
      : name_(std::move(name)),
        generator_(std::move(generator)),
        ambient_form_(std::move(ambient_form)),
        gram_(std::move(gram)) {
    if (!gram_.symmetric()) input_error("lattice " + name_ + ": Gram not symmetric");
    if (generator_.rows() != gram_.rows() ||
        generator_.cols() != ambient_form_.rows() || !ambient_form_.square()) {
      input_error("lattice " + name_ + ": inconsistent generator/form shapes");
    }
  }

  /// Lattice given only by its Gram matrix (basis = standard coordinates).
  static Lattice from_gram(std::string name, const IntMatrix& gram) {
    if (!gram.square()) input_error("lattice " + name + ": Gram matrix is not square");
    return Lattice(std::move(name), RatMatrix::identity(gram.rows()),
                   to_rational(gram), gram);
  }

  static Lattice zero() { return from_gram("0", IntMatrix(0, 0)); }

  const std::string& name() const noexcept { return name_; }
  std::size_t rank() const noexcept { return gram_.rows(); }
  const RatMatrix& generator() const noexcept { return generator_; }
  const RatMatrix& ambient_form() const noexcept { return ambient_form_; }
  const IntMatrix& gram() const noexcept { return gram_; }

  Lattice renamed(std::string name) const {
    Lattice copy = *this;
    copy.name_ = std::move(name);
    return copy;
  }

 private:
  std::string name_;
  RatMatrix generator_;
  RatMatrix ambient_form_;
  IntMatrix gram_;
};

// ---------------------------------------------------------------------------
// Root systems

enum class RootType : char { A = 'A', D = 'D', E = 'E' };

struct RootComponent {
  RootType type = RootType::A;
  int rank = 1;

  std::string to_string() const {
    return std::string(1, static_cast<char>(type)) + std::to_string(rank);
  }
  friend bool operator==(const RootComponent&, const RootComponent&) = default;
  friend auto operator<=>(const RootComponent& a, const RootComponent& b) {
    if (a.type != b.type) return static_cast<char>(a.type) <=> static_cast<char>(b.type);
    return a.rank <=> b.rank;
  }
};

inline bool valid_component(const RootComponent& c) {
  switch (c.type) {
    case RootType::A: return c.rank >= 1;
    case RootType::D: return c.rank >= 3;
    case RootType::E: return c.rank >= 6 && c.rank <= 8;
  }
  return false;
}

/// Parses "A5", "D16", "E8".
inline RootComponent parse_component(const std::string& s) {
  if (s.size() < 2) input_error("bad root component '" + s + "'");
  RootComponent c;
  switch (s[0]) {
    case 'A': c.type = RootType::A; break;
    case 'D': c.type = RootType::D; break;
    case 'E': c.type = RootType::E; break;
    default: input_error("bad root component '" + s + "'");
  }
  try {
    std::size_t pos = 0;
    c.rank = std::stoi(s.substr(1), &pos);
    if (pos != s.size() - 1) input_error("bad root component '" + s + "'");
  } catch (const std::logic_error&) {
    input_error("bad root component '" + s + "'");
  }
  if (!valid_component(c)) input_error("invalid root component '" + s + "'");
  return c;
}

inline std::int64_t root_count(const RootComponent& c) {
  const std::int64_t r = c.rank;
  switch (c.type) {
    case RootType::A: return r * (r + 1);
    case RootType::D: return 2 * r * (r - 1);
    case RootType::E: return r == 6 ? 72 : r == 7 ? 126 : 240;
  }
  return 0;
}

inline std::int64_t coxeter_number(const RootComponent& c) {
  switch (c.type) {
    case RootType::A: return c.rank + 1;
    case RootType::D: return 2 * c.rank - 2;
    case RootType::E: return c.rank == 6 ? 12 : c.rank == 7 ? 18 : 30;
  }
  return 0;
}

/// Order of the discriminant group L^* / L.
inline int discriminant_order(const RootComponent& c) {
  switch (c.type) {
    case RootType::A: return c.rank + 1;
    case RootType::D: return 4;
    case RootType::E: return c.rank == 6 ? 3 : c.rank == 7 ? 2 : 1;
  }
  return 1;
}

/// Cartan matrix with the usual node numbering: A_n a chain; D_n a chain
/// 1..n-2 with n-1 and n both attached to n-2; E_n with 1-3-4-5-...-n and
/// node 2 attached to node 4.
inline IntMatrix cartan_matrix(const RootComponent& c) {
  if (!valid_component(c)) domain_error("invalid root component " + c.to_string());
  const std::size_t n = static_cast<std::size_t>(c.rank);
  IntMatrix m(n, n);
  auto link = [&](std::size_t a, std::size_t b) {  // 1-based nodes
    m(a - 1, b - 1) = -1;
    m(b - 1, a - 1) = -1;
  };
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 2;
  switch (c.type) {
    case RootType::A:
      for (std::size_t i = 1; i < n; ++i) link(i, i + 1);
      break;
    case RootType::D:
      for (std::size_t i = 1; i + 2 < n; ++i) link(i, i + 1);
      link(n - 2, n - 1);
      link(n - 2, n);
      break;
    case RootType::E:
      link(1, 3);
      link(2, 4);
      for (std::size_t i = 3; i < n; ++i) link(i, i + 1);
      break;
  }
  return m;
}

/// Coordinates (in the simple-root basis) of the minuscule weight chosen as
/// representative of discriminant class `cls`. Class labels follow the usual
/// glue-code convention: A_n: i -> omega_i; D_n: 1 -> spinor omega_n,
/// 2 -> vector omega_1, 3 -> omega_{n-1}; E6: 1 -> omega_1, 2 -> omega_6;
/// E7: 1 -> omega_7.
inline std::vector<Rational> glue_class_vector(const RootComponent& c, int cls) {
  const std::size_t n = static_cast<std::size_t>(c.rank);
  if (cls < 0 || cls >= discriminant_order(c)) {
    input_error("glue class " + std::to_string(cls) + " out of range for " +
                c.to_string());
  }
  std::vector<Rational> v(n, Rational(0));
  if (cls == 0) return v;
  std::size_t node = 0;  // 1-based fundamental weight index
  switch (c.type) {
    case RootType::A: node = static_cast<std::size_t>(cls); break;
    case RootType::D: node = cls == 1 ? n : cls == 2 ? 1 : n - 1; break;
    case RootType::E: node = c.rank == 6 ? (cls == 1 ? 1 : 6) : 7; break;
  }
  const RatMatrix inv = inverse_rational(to_rational(cartan_matrix(c)));
  for (std::size_t i = 0; i < n; ++i) v[i] = inv(i, node - 1);
  return v;
}

namespace detail {

inline IntMatrix gram_of(const RatMatrix& gen, const RatMatrix& form,
                         const std::string& name) {
  const RatMatrix g = gen * form * gen.transpose();
  auto gi = to_integer(g);
  if (!gi) domain_error("lattice " + name + " is not integral");
  return *gi;
}

inline RatMatrix block_diagonal(const RatMatrix& a, const RatMatrix& b) {
  RatMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
  return m;
}

inline IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
  return m;
}

}  // namespace detail

/// Unimodular change of basis found by LLL on an exact Gram matrix.
/// Floating point only steers which integral row operations to apply; the
/// returned Gram is recomputed exactly, so it is always the Gram of a basis of
/// the same lattice.
struct LllResult {
  IntMatrix gram;
  IntMatrix transform;  // new basis rows = transform * old basis rows
};

inline LllResult lll_reduce_gram(const IntMatrix& gram, long double delta = 0.99L) {
  const std::size_t n = gram.rows();
  std::vector<std::int64_t> g(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i * n + j] = to_int64(gram(i, j));
  std::vector<std::int64_t> u(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) u[i * n + i] = 1;

  constexpr std::int64_t kLimit = std::int64_t{1} << 40;
  auto check = [&](std::int64_t v) {
    if (v > kLimit || v < -kLimit) domain_error("LLL: intermediate entries too large");
  };
  // b_k <- b_k - q b_j
  auto row_op = [&](std::size_t k, std::size_t j, std::int64_t q) {
    const std::int64_t gkk = g[k * n + k] - 2 * q * g[k * n + j] + q * q * g[j * n + j];
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      g[k * n + i] -= q * g[j * n + i];
      g[i * n + k] = g[k * n + i];
      check(g[k * n + i]);
    }
    g[k * n + k] = gkk;
    check(gkk);
    for (std::size_t i = 0; i < n; ++i) {
      u[k * n + i] -= q * u[j * n + i];
      check(u[k * n + i]);
    }
  };
  auto swap_rows = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < n; ++i) std::swap(g[a * n + i], g[b * n + i]);
    for (std::size_t i = 0; i < n; ++i) std::swap(g[i * n + a], g[i * n + b]);
    for (std::size_t i = 0; i < n; ++i) std::swap(u[a * n + i], u[b * n + i]);
  };

  std::vector<long double> mu(n * n), r(n * n), bstar(n);
  auto gso = [&](std::size_t upto) {
    for (std::size_t i = 0; i <= upto; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        long double s = static_cast<long double>(g[i * n + j]);
        for (std::size_t l = 0; l < j; ++l) s -= mu[j * n + l] * r[i * n + l];
        r[i * n + j] = s;
        if (j < i) mu[i * n + j] = s / bstar[j];
      }
      bstar[i] = r[i * n + i];
    }
  };

  std::size_t k = 1;
  std::size_t iterations = 0;
  while (n > 1 && k < n && iterations++ < 200000) {
    gso(k);
    for (std::size_t jj = k; jj-- > 0;) {
      const long double m = mu[k * n + jj];
      if (std::fabs(m) <= 0.5L) continue;
      const std::int64_t q = static_cast<std::int64_t>(std::llround(m));
      row_op(k, jj, q);
      for (std::size_t l = 0; l < jj; ++l) mu[k * n + l] -= q * mu[jj * n + l];
      mu[k * n + jj] -= q;
    }
    const long double m1 = mu[k * n + k - 1];
    if (bstar[k] < (delta - m1 * m1) * bstar[k - 1]) {
      swap_rows(k, k - 1);
      k = k > 1 ? k - 1 : 1;
    } else {
      ++k;
    }
  }

  LllResult out{IntMatrix(n, n), IntMatrix(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      out.gram(i, j) = g[i * n + j];
      out.transform(i, j) = u[i * n + j];
    }
  // Exact recomputation guards against any slip in the incremental updates.
  if (!(out.transform * gram * out.transform.transpose() == out.gram)) {
    throw Error(ErrorKind::kInconsistency, "LLL: Gram update drifted");
  }
  return out;
}

/// Same lattice, LLL-reduced basis.
inline Lattice lll_reduced(const Lattice& l) {
  const LllResult red = lll_reduce_gram(l.gram());
  RatMatrix t = to_rational(red.transform);
  return Lattice(l.name(), t * l.generator(), l.ambient_form(), red.gram);
}

// ---------------------------------------------------------------------------
// Constructions

/// Root lattice of an ADE type in simple-root coordinates. Even and positive
/// definite; unimodular only for E8.
inline Lattice root_lattice(const RootComponent& c) {
  if (!valid_component(c)) input_error("invalid root lattice " + c.to_string());
  const IntMatrix cm = cartan_matrix(c);
  return Lattice(c.to_string(), RatMatrix::identity(cm.rows()), to_rational(cm), cm);
}

inline Lattice root_lattice(char type, int rank) {
  return root_lattice(parse_component(std::string(1, type) + std::to_string(rank)));
}

inline Lattice direct_sum(const Lattice& a, const Lattice& b) {
  std::string name = a.rank() == 0 ? b.name() : b.rank() == 0 ? a.name()
                                                               : a.name() + "+" + b.name();
  return Lattice(std::move(name),
                 detail::block_diagonal(a.generator(), b.generator()),
                 detail::block_diagonal(a.ambient_form(), b.ambient_form()),
                 detail::block_diagonal(a.gram(), b.gram()));
}

/// Glue data: root components and glue words; word entry i is a discriminant
/// class label of component i.
struct GlueSpec {
  std::string name;
  std::vector<RootComponent> components;
  std::vector<std::vector<int>> glue_words;
};

namespace detail {

inline void require_even_unimodular(const Lattice& l) {
  const IntMatrix& g = l.gram();
  for (std::size_t i = 0; i < g.rows(); ++i)
    if (g(i, i) % 2 != 0) domain_error("lattice " + l.name() + " is not even");
  if (!is_positive_definite(to_rational(g)))
    domain_error("lattice " + l.name() + " is not positive definite");
  const BigInt det = det_exact(g);
  if (det != 1)
    domain_error("lattice " + l.name() + " has determinant " + det.str() + ", expected 1");
}

}  // namespace detail

/// Builds the lattice generated by the orthogonal sum of the component root
/// lattices and the glue vectors. Fails unless the result is even, unimodular
/// and positive definite.
inline Lattice glue(const GlueSpec& spec) {
  if (spec.components.empty()) input_error("glue: no components in " + spec.name);
  RatMatrix form(0, 0);
  std::vector<std::size_t> offsets;
  std::size_t dim = 0;
  for (const auto& c : spec.components) {
    if (!valid_component(c)) input_error("glue: invalid component " + c.to_string());
    offsets.push_back(dim);
    form = detail::block_diagonal(form, to_rational(cartan_matrix(c)));
    dim += static_cast<std::size_t>(c.rank);
  }
  RatMatrix gens(dim + spec.glue_words.size(), dim);
  for (std::size_t i = 0; i < dim; ++i) gens(i, i) = 1;
  for (std::size_t w = 0; w < spec.glue_words.size(); ++w) {
    const auto& word = spec.glue_words[w];
    if (word.size() != spec.components.size())
      input_error("glue: word length mismatch in " + spec.name);
    for (std::size_t c = 0; c < word.size(); ++c) {
      const auto v = glue_class_vector(spec.components[c], word[c]);
      for (std::size_t i = 0; i < v.size(); ++i) gens(dim + w, offsets[c] + i) = v[i];
    }
  }
  const RatMatrix basis = hnf_rowreduce(gens).as_rational();
  const RatMatrix g = basis * form * basis.transpose();
  auto gi = to_integer(g);
  if (!gi) domain_error("glue: " + spec.name + " glue words do not give an integral lattice");
  Lattice l = lll_reduced(Lattice(spec.name, basis, form, *gi));
  detail::require_even_unimodular(l);
  return l;
}

/// D_n^+ : D_n together with the spinor glue class; even unimodular for
/// n divisible by 8.
inline Lattice plus_construction(int n) {
  if (n < 8 || n % 8 != 0)
    domain_error("plus_construction: n = " + std::to_string(n) +
                 " is not a positive multiple of 8");
  GlueSpec spec{"D" + std::to_string(n) + "+", {RootComponent{RootType::D, n}}, {{1}}};
  return glue(spec);
}

}  // namespace thetalab

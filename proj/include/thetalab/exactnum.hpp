#pragma once

// Exact integer and rational linear algebra. Nothing in here touches floating
// point; every routine is a pure function of its (immutable) arguments.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "thetalab/error.hpp"

namespace thetalab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Dense row-major matrix over an exact ring.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      input_error("matrix entry count does not match its shape");
    }
  }
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) input_error("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  const std::vector<T>& data() const noexcept { return data_; }

  bool symmetric() const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) domain_error("matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
      os << (i ? ",[" : "[");
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j);
      os << ']';
    }
    os << ']';
    return os.str();
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<BigInt>;
using RatMatrix = Matrix<Rational>;

inline RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
  return r;
}

/// Converts a rational matrix whose entries are all integers; nullopt otherwise.
inline std::optional<IntMatrix> to_integer(const RatMatrix& m) {
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (denominator(m(i, j)) != 1) return std::nullopt;
      r(i, j) = numerator(m(i, j));
    }
  return r;
}

inline std::int64_t to_int64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    domain_error("integer " + v.str() + " does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

/// Determinant by Bareiss fraction-free elimination with row pivoting.
inline BigInt det_exact(IntMatrix m) {
  if (!m.square()) domain_error("det_exact: matrix is not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = (m(k, k) * m(i, j) - m(i, k) * m(k, j)) / prev;
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

/// Exact rank of an integer matrix (fraction-free elimination).
inline std::size_t exact_rank(IntMatrix m) {
  std::size_t rank = 0;
  BigInt prev = 1;
  for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    std::size_t p = rank;
    while (p < m.rows() && m(p, col) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != rank)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(rank, j), m(p, j));
    for (std::size_t i = rank + 1; i < m.rows(); ++i) {
      for (std::size_t j = col + 1; j < m.cols(); ++j) {
        m(i, j) = (m(rank, col) * m(i, j) - m(i, col) * m(rank, j)) / prev;
      }
      m(i, col) = 0;
    }
    prev = m(rank, col);
    ++rank;
  }
  return rank;
}

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t pivot)
      : Error(ErrorKind::kDomain,
              "not positive definite: pivot " + std::to_string(pivot) +
                  " is not positive"),
        pivot_(pivot) {}
  std::size_t pivot_index() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

struct LdlFactors {
  std::vector<Rational> d;  // diagonal
  RatMatrix u;              // unit upper triangular, G = U^T diag(d) U
};

/// Rational LDL^T of a symmetric matrix. Throws NotPositiveDefinite on the
/// first pivot that is <= 0.
inline LdlFactors ldl_rational(const RatMatrix& g) {
  if (!g.symmetric()) domain_error("ldl_rational: matrix is not symmetric");
  const std::size_t n = g.rows();
  RatMatrix a = g;
  LdlFactors f{std::vector<Rational>(n), RatMatrix::identity(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const Rational pivot = a(k, k);
    if (pivot <= 0) throw NotPositiveDefinite(k);
    f.d[k] = pivot;
    for (std::size_t j = k + 1; j < n; ++j) f.u(k, j) = a(k, j) / pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(k, i) == 0) continue;
      const Rational factor = a(k, i) / pivot;
      for (std::size_t j = i; j < n; ++j) {
        a(i, j) -= factor * a(k, j);
        a(j, i) = a(i, j);
      }
    }
  }
  return f;
}

inline bool is_positive_definite(const RatMatrix& g) {
  try {
    ldl_rational(g);
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

/// Positive semidefiniteness by symmetric elimination: a zero pivot is only
/// admissible when its whole remaining row vanishes.
inline bool is_positive_semidefinite(const RatMatrix& g) {
  if (!g.symmetric()) return false;
  const std::size_t n = g.rows();
  RatMatrix a = g;
  for (std::size_t k = 0; k < n; ++k) {
    const Rational pivot = a(k, k);
    if (pivot < 0) return false;
    if (pivot == 0) {
      for (std::size_t j = k + 1; j < n; ++j)
        if (a(k, j) != 0) return false;
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(k, i) == 0) continue;
      const Rational factor = a(k, i) / pivot;
      for (std::size_t j = i; j < n; ++j) {
        a(i, j) -= factor * a(k, j);
        a(j, i) = a(i, j);
      }
    }
  }
  return true;
}

/// Gauss-Jordan inverse over Q; throws on singular input.
inline RatMatrix inverse_rational(const RatMatrix& m) {
  if (!m.square()) domain_error("inverse_rational: matrix is not square");
  const std::size_t n = m.rows();
  RatMatrix a = m;
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) domain_error("inverse_rational: matrix is singular");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(c, j), a(p, j));
      std::swap(inv(c, j), inv(p, j));
    }
    const Rational piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      const Rational f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

/// Basis of the additive group generated by rational rows, stored as integer
/// numerators over one common denominator.
struct HnfBasis {
  IntMatrix rows;
  BigInt denominator = 1;

  RatMatrix as_rational() const {
    RatMatrix r(rows.rows(), rows.cols());
    for (std::size_t i = 0; i < rows.rows(); ++i)
      for (std::size_t j = 0; j < rows.cols(); ++j)
        r(i, j) = Rational(rows(i, j), denominator);
    return r;
  }
};

namespace detail {

// Row-style Hermite normal form of an integer matrix; returns the nonzero rows.
inline IntMatrix hermite_rows(IntMatrix m) {
  const std::size_t nr = m.rows();
  const std::size_t nc = m.cols();
  std::size_t pivot_row = 0;
  auto swap_rows = [&](std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < nc; ++j) std::swap(m(a, j), m(b, j));
  };
  for (std::size_t col = 0; col < nc && pivot_row < nr; ++col) {
    // Euclid on the column until a single nonzero entry remains below pivot_row.
    for (;;) {
      std::size_t best = nr;
      for (std::size_t i = pivot_row; i < nr; ++i) {
        if (m(i, col) == 0) continue;
        if (best == nr || abs(m(i, col)) < abs(m(best, col))) best = i;
      }
      if (best == nr) break;
      swap_rows(pivot_row, best);
      bool done = true;
      for (std::size_t i = pivot_row + 1; i < nr; ++i) {
        if (m(i, col) == 0) continue;
        const BigInt q = m(i, col) / m(pivot_row, col);
        for (std::size_t j = col; j < nc; ++j) m(i, j) -= q * m(pivot_row, j);
        if (m(i, col) != 0) done = false;
      }
      if (done) break;
    }
    if (pivot_row >= nr || m(pivot_row, col) == 0) continue;
    if (m(pivot_row, col) < 0)
      for (std::size_t j = col; j < nc; ++j) m(pivot_row, j) = -m(pivot_row, j);
    const BigInt& p = m(pivot_row, col);
    for (std::size_t i = 0; i < pivot_row; ++i) {
      BigInt q = m(i, col) / p;
      if (m(i, col) - q * p < 0) q -= 1;
      if (q == 0) continue;
      for (std::size_t j = col; j < nc; ++j) m(i, j) -= q * m(pivot_row, j);
    }
    ++pivot_row;
  }
  IntMatrix out(pivot_row, nc);
  for (std::size_t i = 0; i < pivot_row; ++i)
    for (std::size_t j = 0; j < nc; ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace detail

/// Reduces generating rows of a full-rank additive group to a basis.
inline HnfBasis hnf_rowreduce(const RatMatrix& gens) {
  BigInt d = 1;
  for (const auto& e : gens.data()) d = boost::multiprecision::lcm(d, denominator(e));
  IntMatrix scaled(gens.rows(), gens.cols());
  for (std::size_t i = 0; i < gens.rows(); ++i)
    for (std::size_t j = 0; j < gens.cols(); ++j)
      scaled(i, j) = numerator(Rational(gens(i, j) * d));
  IntMatrix h = detail::hermite_rows(std::move(scaled));
  if (h.rows() != gens.cols()) {
    domain_error("hnf_rowreduce: generated group has rank " +
                 std::to_string(h.rows()) + ", expected " +
                 std::to_string(gens.cols()));
  }
  return HnfBasis{std::move(h), d};
}

/// Pivot rows of Bareiss elimination on a positive definite Gram matrix.
/// Row k holds the bordered minors a(k, j), j >= k, with a(k, k) the leading
/// principal minor of size k + 1; minors[k] is the leading minor of size k.
struct BareissRows {
  IntMatrix rows;
  std::vector<BigInt> minors;  // size n + 1, minors[0] = 1
};

inline BareissRows bareiss_rows(const IntMatrix& g) {
  if (!g.symmetric()) domain_error("bareiss_rows: Gram matrix is not symmetric");
  const std::size_t n = g.rows();
  IntMatrix a = g;
  BareissRows out{IntMatrix(n, n), std::vector<BigInt>(n + 1)};
  out.minors[0] = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a(k, k) <= 0) throw NotPositiveDefinite(k);
    for (std::size_t j = k; j < n; ++j) out.rows(k, j) = a(k, j);
    out.minors[k + 1] = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = (a(k, k) * a(i, j) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return out;
}

}  // namespace thetalab

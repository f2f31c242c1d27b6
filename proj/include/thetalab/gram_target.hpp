#pragma once

#include <compare>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "thetalab/error.hpp"
#include "thetalab/exactnum.hpp"

namespace thetalab {

/// Index T of a degree-g Fourier coefficient: a symmetric g x g integer
/// matrix with even nonnegative diagonal, stored as its upper triangle in
/// row-major order. Ordering is (trace, upper triangle lexicographic).
class GramTarget {
 public:
  GramTarget() = default;
  explicit GramTarget(std::size_t genus)
      : genus_(genus), upper_(genus * (genus + 1) / 2, 0) {}

  GramTarget(std::size_t genus, std::vector<std::int64_t> upper)
      : genus_(genus), upper_(std::move(upper)) {
    if (upper_.size() != genus_ * (genus_ + 1) / 2)
      input_error("GramTarget: wrong number of upper-triangle entries");
  }

  static GramTarget from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    GramTarget t(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) input_error("GramTarget: matrix is not square");
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[i][j] != rows[j][i]) input_error("GramTarget: matrix is not symmetric");
        if (j >= i) t.set(i, j, rows[i][j]);
      }
    }
    return t;
  }

  static GramTarget from_matrix(const IntMatrix& m) {
    if (!m.symmetric()) input_error("GramTarget: matrix is not symmetric");
    GramTarget t(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = i; j < m.cols(); ++j) t.set(i, j, to_int64(m(i, j)));
    return t;
  }

  static GramTarget diagonal(const std::vector<std::int64_t>& d) {
    GramTarget t(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) t.set(i, i, d[i]);
    return t;
  }

  std::size_t genus() const noexcept { return genus_; }
  const std::vector<std::int64_t>& upper() const noexcept { return upper_; }

  std::int64_t operator()(std::size_t i, std::size_t j) const {
    return upper_[index(i, j)];
  }
  void set(std::size_t i, std::size_t j, std::int64_t v) { upper_[index(i, j)] = v; }

  std::int64_t trace() const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < genus_; ++i) s += (*this)(i, i);
    return s;
  }

  bool is_zero() const {
    for (auto v : upper_)
      if (v != 0) return false;
    return true;
  }

  IntMatrix to_matrix() const {
    IntMatrix m(genus_, genus_);
    for (std::size_t i = 0; i < genus_; ++i)
      for (std::size_t j = 0; j < genus_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  /// Even nonnegative diagonal and positive semidefinite.
  bool admissible() const {
    for (std::size_t i = 0; i < genus_; ++i) {
      const auto d = (*this)(i, i);
      if (d < 0 || d % 2 != 0) return false;
    }
    return is_positive_semidefinite(to_rational(to_matrix()));
  }

  void require_admissible() const {
    if (!admissible())
      domain_error("GramTarget " + key() + " is not an even positive semidefinite matrix");
  }

  /// T with row/column `drop` removed.
  GramTarget minor_without(std::size_t drop) const {
    GramTarget t(genus_ - 1);
    for (std::size_t i = 0, a = 0; i < genus_; ++i) {
      if (i == drop) continue;
      for (std::size_t j = i, b = a; j < genus_; ++j) {
        if (j == drop) continue;
        t.set(a, b, (*this)(i, j));
        ++b;
      }
      ++a;
    }
    return t;
  }

  /// Leading g x g block.
  GramTarget leading_block(std::size_t g) const {
    GramTarget t(g);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = i; j < g; ++j) t.set(i, j, (*this)(i, j));
    return t;
  }

  /// Block matrix [[T, 0], [0, 0]] of genus `g` >= genus().
  GramTarget padded(std::size_t g) const {
    GramTarget t(g);
    for (std::size_t i = 0; i < genus_; ++i)
      for (std::size_t j = i; j < genus_; ++j) t.set(i, j, (*this)(i, j));
    return t;
  }

  /// Stable textual key, e.g. "2:2,1,2" for [[2,1],[1,2]].
  std::string key() const {
    std::ostringstream os;
    os << genus_ << ':';
    for (std::size_t i = 0; i < upper_.size(); ++i) os << (i ? "," : "") << upper_[i];
    return os.str();
  }

  static GramTarget parse_key(const std::string& key) {
    const auto colon = key.find(':');
    if (colon == std::string::npos) input_error("bad GramTarget key '" + key + "'");
    const std::size_t g = std::stoul(key.substr(0, colon));
    std::vector<std::int64_t> up;
    std::string rest = key.substr(colon + 1);
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) up.push_back(std::stoll(item));
    return GramTarget(g, std::move(up));
  }

  friend bool operator==(const GramTarget& a, const GramTarget& b) {
    return a.genus_ == b.genus_ && a.upper_ == b.upper_;
  }
  friend std::strong_ordering operator<=>(const GramTarget& a, const GramTarget& b) {
    if (a.genus_ != b.genus_) return a.genus_ <=> b.genus_;
    if (auto c = a.trace() <=> b.trace(); c != 0) return c;
    return a.upper_ <=> b.upper_;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (j >= genus_) domain_error("GramTarget index out of range");
    // offset of row i in the packed upper triangle
    return i * genus_ - i * (i - 1) / 2 + (j - i);
  }

  std::size_t genus_ = 0;
  std::vector<std::int64_t> upper_;
};

}  // namespace thetalab

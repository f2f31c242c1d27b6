#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>

#include "thetalab/jacobi.hpp"
#include "thetalab/registry.hpp"

using namespace thetalab;

namespace {

// E8 roots in doubled coordinates: 112 of shape (+-2, +-2, 0^6), 128 of shape
// (+-1)^8 with an even number of minus signs. Doubled inner products are 4x.
std::vector<std::array<int, 8>> e8_roots() {
  std::vector<std::array<int, 8>> out;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j)
      for (int si : {-2, 2})
        for (int sj : {-2, 2}) {
          std::array<int, 8> y{};
          y[i] = si;
          y[j] = sj;
          out.push_back(y);
        }
  for (int mask = 0; mask < 256; ++mask) {
    if (__builtin_popcount(mask) % 2) continue;
    std::array<int, 8> y{};
    for (int i = 0; i < 8; ++i) y[i] = (mask >> i) & 1 ? -1 : 1;
    out.push_back(y);
  }
  return out;
}

int dot4(const std::array<int, 8>& a, const std::array<int, 8>& b) {
  int s = 0;
  for (int i = 0; i < 8; ++i) s += a[i] * b[i];
  return s / 4;
}

}  // namespace

TEST(Jacobi, GenusZeroIsTheRootCount) {
  LatticeContext ctx(root_lattice('E', 8));
  const JacobiCoefficient f = jacobi_coefficient(ctx, 0, 1, 4);
  ASSERT_EQ(f.entries.size(), 1u);
  EXPECT_EQ(f.entries.begin()->second, 240);
}

TEST(Jacobi, E8ZeroTargetHasOnlyZeroPairing) {
  LatticeContext ctx(root_lattice('E', 8));
  const JacobiCoefficient f = jacobi_coefficient(ctx, 1, 1, 2);
  EXPECT_EQ(f.entries.at({GramTarget::diagonal({0}), {0}}), 240);
  EXPECT_EQ(f.marginal(GramTarget::diagonal({0})), 240);
}

TEST(Jacobi, E8RootPairsAgainstCoordinateModel) {
  const auto roots = e8_roots();
  ASSERT_EQ(roots.size(), 240u);
  std::map<std::int64_t, std::uint64_t> by_pairing;
  for (const auto& x : roots)
    for (const auto& y : roots) ++by_pairing[dot4(x, y)];
  LatticeContext ctx(root_lattice('E', 8));
  const JacobiCoefficient f = jacobi_coefficient(ctx, 1, 1, 2);
  const GramTarget s = GramTarget::diagonal({2});
  for (std::int64_t l = -2; l <= 2; ++l)
    EXPECT_EQ(f.entries.at({s, {l}}), by_pairing[l]) << "pairing " << l;
  EXPECT_EQ(f.marginal(s), 240 * 240);
}

TEST(Jacobi, MarginalIsThetaTimesRootCount) {
  LatticeContext ctx(root_lattice('D', 5));
  const JacobiCoefficient f = jacobi_coefficient(ctx, 2, 1, 6);
  const BigInt r2 = ctx.shell_count(2);
  for (const auto& s : f.supports()) EXPECT_EQ(f.marginal(s), r2 * representation_count(ctx, s));
}

TEST(Jacobi, OddMomentsVanish) {
  LatticeContext ctx(root_lattice('A', 4));
  const JacobiCoefficient f = jacobi_coefficient(ctx, 2, 1, 6);
  for (const auto& s : f.supports())
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(f.first_moment(s, i), 0) << s.key();
}

TEST(Jacobi, PairingsSatisfyCauchySchwarz) {
  LatticeContext ctx(root_lattice('E', 6));
  const std::int64_t index = 2;
  const JacobiCoefficient f = jacobi_coefficient(ctx, 2, index, 6);
  ASSERT_FALSE(f.entries.empty());
  for (const auto& [key, c] : f.entries) {
    EXPECT_GT(c, 0);
    for (std::size_t i = 0; i < 2; ++i)
      EXPECT_LE(key.second[i] * key.second[i], key.first(i, i) * 2 * index);
  }
}

TEST(Jacobi, RejectsBadArguments) {
  LatticeContext ctx(root_lattice('E', 8));
  EXPECT_THROW(jacobi_coefficient(ctx, 1, 0, 2), Error);
  EXPECT_THROW(jacobi_coefficient(ctx, 1, 1, -2), Error);
}

TEST(Venkov, E8ConstantIsHalfTheRank) {
  LatticeContext ctx(root_lattice('E', 8));
  const VenkovReport r = venkov_constant(ctx, 6);
  EXPECT_EQ(r.r2, 240);
  EXPECT_EQ(r.constant, 4);
  EXPECT_TRUE(r.consistent);
  // 2160 + 6720 vectors of norm 4 and 6, plus the roots.
  EXPECT_EQ(r.vectors_checked, 240 + 2160 + 6720);
}

TEST(Venkov, E8ConstantFromCoordinateModel) {
  // sum_y (y, x)^2 over roots for a fixed root x, against r2 * Q(x, x) = c * sum.
  const auto roots = e8_roots();
  std::int64_t sum = 0;
  for (const auto& y : roots) sum += dot4(roots[0], y) * dot4(roots[0], y);
  EXPECT_EQ(Rational(240 * 2, sum), 4);
}

TEST(Venkov, IndependentOfBasis) {
  const IntMatrix g = root_lattice('E', 8).gram();
  IntMatrix u = IntMatrix::identity(8);
  u(7, 0) = 1;
  u(3, 5) = -1;
  LatticeContext a(root_lattice('E', 8)), b(Lattice::from_gram("E8'", u * g * u.transpose()));
  EXPECT_EQ(venkov_constant(a, 4).constant, venkov_constant(b, 4).constant);
}

TEST(Venkov, MixedCoxeterNumbersAreInconsistent) {
  LatticeContext ctx(direct_sum(root_lattice('A', 1), root_lattice('A', 2)));
  EXPECT_FALSE(venkov_constant(ctx, 4).consistent);
}

TEST(Venkov, RejectsLatticesWithoutRoots) {
  LatticeContext ctx(Lattice::from_gram("4I", IntMatrix{{4, 0}, {0, 4}}));
  EXPECT_THROW(venkov_constant(ctx, 4), Error);
  LatticeContext e8(root_lattice('E', 8));
  EXPECT_THROW(venkov_constant(e8, 0), Error);
}

class Rank24Venkov : public ::testing::TestWithParam<const char*> {};

TEST_P(Rank24Venkov, ConstantIsTwelve) {
  LatticeContext ctx(builtin_lattice(GetParam()));
  const VenkovReport r = venkov_constant(ctx, 4);
  EXPECT_TRUE(r.consistent);
  // Equal Coxeter numbers h give sum_y (y, v)^2 = 2h Q(v, v), so c = r2 / 2h = rank / 2.
  EXPECT_EQ(r.constant, Rational(24, 2));
}

INSTANTIATE_TEST_SUITE_P(All, Rank24Venkov,
                         ::testing::Values("A5^4D4", "D4^6", "A9^2D6", "D6^4", "E6^4", "A11D7E6",
                                           "A17E7", "D10E7^2", "D16E8", "E8^3"));

TEST(Venkov, RankSixteenConstantIsEight) {
  for (const char* name : {"E8^2", "D16+"}) {
    LatticeContext ctx(builtin_lattice(name));
    const VenkovReport r = venkov_constant(ctx, 6);
    EXPECT_TRUE(r.consistent) << name;
    EXPECT_EQ(r.constant, 8) << name;
  }
}

TEST(Heat, E8CubedRootTarget) {
  LatticeContext ctx(builtin_lattice("E8^3"));
  const auto rows = heat_coefficient_check(ctx, GramTarget::diagonal({2}), 12);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].lhs, 720 * 2 * 720);
  EXPECT_TRUE(rows[0].holds);
}

TEST(Heat, D4SixA2Target) {
  LatticeContext ctx(builtin_lattice("D4^6"));
  const auto rows = heat_coefficient_check(ctx, GramTarget::from_rows({{2, 1}, {1, 2}}), 12);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_TRUE(r.holds) << r.i << r.j;
  const auto wrong = heat_coefficient_check(ctx, GramTarget::from_rows({{2, 1}, {1, 2}}), 48);
  for (const auto& r : wrong) EXPECT_FALSE(r.holds);
}

TEST(Heat, AllTargetsOfE8GenusTwo) {
  LatticeContext ctx(root_lattice('E', 8));
  const auto rows = heat_check_all(ctx, 2, 4, 4);
  EXPECT_FALSE(rows.empty());
  for (const auto& r : rows) EXPECT_TRUE(r.holds) << r.s.key();
}

TEST(PairF1, WittPairAgrees) {
  LatticeContext a(builtin_lattice("E8^2")), b(builtin_lattice("D16+"));
  const PairF1Report r = pair_difference_f1_check(a, b, 2, 4, 8);
  EXPECT_EQ(r.r2, 480);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.rows.empty());
}

TEST(PairF1, RootCountMismatchIsAnError) {
  LatticeContext a(builtin_lattice("E8^3")), b(builtin_lattice("D4^6"));
  EXPECT_THROW(pair_difference_f1_check(a, b, 1, 2, 12), Error);
}

#include <gtest/gtest.h>

#include "thetalab/registry.hpp"
#include "thetalab/theta.hpp"

using namespace thetalab;

namespace {

GramTarget cartan(RootType type, int rank) {
  return GramTarget::from_matrix(cartan_matrix(RootComponent{type, rank}));
}

// Brute-force product of two complete truncations: every pair of keys.
std::map<GramTarget, BigInt> naive_product(const ThetaTruncation& f, const ThetaTruncation& g,
                                           std::int64_t bound) {
  std::map<GramTarget, BigInt> out;
  for (const auto& [a, ca] : f.coeffs)
    for (const auto& [b, cb] : g.coeffs) {
      std::vector<std::int64_t> up(a.upper().size());
      for (std::size_t i = 0; i < up.size(); ++i) up[i] = a.upper()[i] + b.upper()[i];
      GramTarget t(f.genus, up);
      if (t.trace() <= bound) out[t] += ca * cb;
    }
  return out;
}

}  // namespace

TEST(Theta, E8SquaredGenusOne) {
  const ThetaTruncation s = theta_truncated(builtin_lattice("E8^2"), 1, 4);
  // Convolution of the E8 shells 1, 240, 2160.
  EXPECT_EQ(s.at(GramTarget::diagonal({0})), 1);
  EXPECT_EQ(s.at(GramTarget::diagonal({2})), 480);
  EXPECT_EQ(s.at(GramTarget::diagonal({4})), 2 * 2160 + 240 * 240);
  EXPECT_EQ(s.at(GramTarget::diagonal({4})), 61920);
  EXPECT_EQ(s.weight, 8);
  EXPECT_EQ(s.at(GramTarget::diagonal({3})), 0);
}

TEST(Theta, CoefficientAccessErrors) {
  const ThetaTruncation s = theta_truncated(root_lattice('E', 8), 1, 4);
  EXPECT_THROW(s.at(GramTarget::diagonal({6})), Error);
  EXPECT_THROW(s.at(GramTarget::diagonal({2, 2})), Error);
  LatticeContext ctx(root_lattice('E', 8));
  const ThetaTruncation sampled = theta_sampled(ctx, {GramTarget::diagonal({4})});
  EXPECT_EQ(sampled.at(GramTarget::diagonal({4})), 2160);
  EXPECT_THROW(sampled.at(GramTarget::diagonal({2})), Error);
}

TEST(Theta, ExportParseRoundTrip) {
  const ThetaTruncation s = theta_truncated(root_lattice('D', 4), 2, 6);
  const std::string text = export_series(s, 4);
  const ParsedSeries p = parse_series(text);
  EXPECT_EQ(p.rank, 4u);
  EXPECT_EQ(p.series.genus, 2u);
  EXPECT_EQ(p.series.trace_bound, 6);
  EXPECT_EQ(p.series.weight, 2);
  EXPECT_EQ(p.series.coeffs, s.coeffs);
  EXPECT_EQ(export_series(p.series, p.rank), text);
}

TEST(Theta, ParseRejectsMalformedText) {
  EXPECT_THROW(parse_series(""), Error);
  EXPECT_THROW(parse_series("thetalab-series 2\n"), Error);
  EXPECT_THROW(parse_series("thetalab-series 1\nexpr x\nrank 8\ngenus 1\ntrace_bound 2\n"
                            "weight 4\nsupport complete\nentries 2\n0 1\n"),
               Error);
  EXPECT_THROW(parse_series("thetalab-series 1\nexpr x\nrank 8\ngenus 1\ntrace_bound 2\n"
                            "weight 4\nsupport partial\nentries 0\n"),
               Error);
  EXPECT_THROW(parse_series("thetalab-series 1\nexpr x\nrank eight\n"), Error);
  EXPECT_THROW(parse_series("thetalab-series 1\nexpr x\nrank 8\ngenus 1\ntrace_bound 2\n"
                            "weight 4\nsupport complete\nentries 2\n0 1\n0 1\n"),
               Error);
}

TEST(Theta, UnitIsProductIdentity) {
  const ThetaTruncation s = theta_truncated(root_lattice('A', 2), 2, 6);
  const ThetaTruncation p = series_product(unit_series(2, 6), s);
  EXPECT_EQ(p.coeffs, s.coeffs);
}

TEST(Theta, ProductMatchesNaivePairing) {
  const ThetaTruncation a = theta_truncated(root_lattice('A', 2), 2, 6);
  const ThetaTruncation d = theta_truncated(root_lattice('D', 4), 2, 6);
  const auto want = naive_product(a, d, 6);
  const ThetaTruncation p = series_product(a, d);
  for (const auto& [t, c] : want) EXPECT_EQ(p.at(t), c) << t.key();
  for (const auto& [t, c] : p.coeffs) EXPECT_EQ(want.at(t), c);
}

TEST(Theta, ProductOfFactorsIsThetaOfSum) {
  for (const auto& [g, bound] : std::vector<std::pair<std::size_t, std::int64_t>>{{1, 8}, {2, 6}}) {
    const ThetaTruncation e8 = theta_truncated(root_lattice('E', 8), g, bound);
    const ThetaTruncation sq = theta_truncated(builtin_lattice("E8^2"), g, bound);
    const ThetaTruncation prod = series_product(e8, e8);
    EXPECT_EQ(prod.coeffs, sq.coeffs) << "genus " << g;
    EXPECT_EQ(prod.weight, sq.weight);
  }
}

TEST(Theta, ProductAtAgreesWithFullProduct) {
  const ThetaTruncation a = theta_truncated(root_lattice('A', 3), 3, 6);
  const ThetaTruncation e = theta_truncated(root_lattice('E', 6), 3, 6);
  const ThetaTruncation p = series_product(a, e);
  for (const auto& [t, c] : p.coeffs) EXPECT_EQ(series_product_at(a, e, t), c) << t.key();
}

TEST(Theta, SiegelRestrictionLowersGenus) {
  LatticeContext ctx(root_lattice('D', 5));
  for (std::size_t g = 1; g <= 3; ++g) {
    const ThetaTruncation hi = theta_truncated(ctx, g, 6);
    const ThetaTruncation lo = theta_truncated(ctx, g - 1, 6);
    EXPECT_EQ(siegel_restrict(hi).coeffs, lo.coeffs) << "genus " << g;
  }
  EXPECT_THROW(siegel_restrict(theta_truncated(ctx, 0, 6)), Error);
}

TEST(Theta, RestrictionCommutesWithProduct) {
  const ThetaTruncation a = theta_truncated(root_lattice('A', 2), 2, 6);
  const ThetaTruncation d = theta_truncated(root_lattice('D', 4), 2, 6);
  EXPECT_EQ(siegel_restrict(series_product(a, d)).coeffs,
            series_product(siegel_restrict(a), siegel_restrict(d)).coeffs);
}

TEST(Theta, BlockFactorizationE8Roots) {
  LatticeContext ctx(root_lattice('E', 8));
  const auto f = block_factorization_check(ctx, GramTarget::diagonal({2}), GramTarget::diagonal({2}));
  EXPECT_EQ(f.product, 57600);
  EXPECT_EQ(f.block_sum, 57600);
  EXPECT_EQ(f.blocks, 5u);
  EXPECT_TRUE(f.holds());
}

TEST(Theta, BlockFactorizationGenusTwoByOne) {
  LatticeContext ctx(root_lattice('D', 4));
  const auto f = block_factorization_check(ctx, GramTarget::from_rows({{2, 1}, {1, 2}}),
                                           GramTarget::diagonal({4}));
  EXPECT_TRUE(f.holds());
  EXPECT_EQ(f.product, representation_count(ctx, GramTarget::from_rows({{2, 1}, {1, 2}})) *
                           ctx.shell_count(4));
}

TEST(Theta, DifferenceOfWittPairVanishesThroughGenusThree) {
  LatticeContext a(builtin_lattice("E8^2")), b(builtin_lattice("D16+"));
  for (std::size_t g = 1; g <= 3; ++g) {
    const FormalDifference d = series_difference(theta_truncated(a, g, 6), theta_truncated(b, g, 6));
    EXPECT_TRUE(d.is_zero()) << "genus " << g;
  }
}

TEST(Theta, DifferenceRejectsWeightMismatch) {
  EXPECT_THROW(series_difference(theta_truncated(root_lattice('E', 8), 1, 2),
                                 theta_truncated(builtin_lattice("E8^2"), 1, 2)),
               Error);
}

TEST(Theta, WittPairSeparatedInGenusFour) {
  LatticeContext a(builtin_lattice("E8^2")), b(builtin_lattice("D16+"));
  const std::vector<GenusScan> scans{{3, 6, {}}, {4, std::nullopt, {cartan(RootType::D, 4)}}};
  const DistinguishReport r = distinguishing_report(a, b, scans);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.genus, 4u);
  EXPECT_EQ(r.target, cartan(RootType::D, 4));
  EXPECT_EQ(r.count_first, 7257600);
  EXPECT_EQ(r.count_second, 2096640);
  EXPECT_EQ(r.scanned.size(), 2u);
}

TEST(Theta, SameLatticeInTwoBasesIsNotSeparated) {
  const IntMatrix g = root_lattice('D', 6).gram();
  IntMatrix u = IntMatrix::identity(6);
  u(2, 0) = 1;
  u(4, 5) = -2;
  LatticeContext a(root_lattice('D', 6)), b(Lattice::from_gram("D6'", u * g * u.transpose()));
  EXPECT_FALSE(distinguishing_report(a, b, 3, 6).found);
}

TEST(Theta, RankTwentyFourLatticesWithDifferentRootCounts) {
  LatticeContext a(builtin_lattice("E8^3")), b(builtin_lattice("D4^6"));
  const DistinguishReport r = distinguishing_report(a, b, 1, 2);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.target, GramTarget::diagonal({2}));
  EXPECT_EQ(r.count_first, 720);
  EXPECT_EQ(r.count_second, 144);
}

TEST(Theta, IndependenceRank) {
  const ThetaTruncation e8sq = theta_truncated(builtin_lattice("E8^2"), 2, 4);
  const ThetaTruncation d16 = theta_truncated(builtin_lattice("D16+"), 2, 4);
  EXPECT_EQ(linear_independence_rank({e8sq, d16}), 1u);
  const ThetaTruncation e83 = theta_truncated(builtin_lattice("E8^3"), 1, 4);
  const ThetaTruncation d46 = theta_truncated(builtin_lattice("D4^6"), 1, 4);
  const ThetaTruncation d24 = theta_truncated(builtin_lattice("D24+"), 1, 4);
  // Genus 1, trace <= 4: rows (1, r2, r4); weight-12 forms form a 2-dimensional space.
  EXPECT_EQ(linear_independence_rank({e83, d46}), 2u);
  EXPECT_EQ(linear_independence_rank({e83, d46, d24}), 2u);
  EXPECT_EQ(linear_independence_rank({}), 0u);
  EXPECT_THROW(linear_independence_rank({e8sq, e83}), Error);
}

TEST(KIdentity, SameLatticeGivesZero) {
  LatticeContext e8(root_lattice('E', 8)), e8sq(builtin_lattice("E8^2")),
      d16(builtin_lattice("D16+"));
  const SchottkyFactors f{&e8, &e8sq, &d16};
  const KIdentityReport r = k_identity_check(e8sq, e8sq, f, {cartan(RootType::D, 4)});
  EXPECT_TRUE(r.verified);
  EXPECT_EQ(r.k, 0);
  ASSERT_EQ(r.rows.size(), 1u);
  // At D4 the right side is (r_E8^2 - r_D16+)(D4) plus splittings through E8 roots.
  EXPECT_NE(r.rows[0].rhs_base, 0);
}

TEST(KIdentity, RightSideBaseAgreesWithDirectSplittingSum) {
  LatticeContext e8(root_lattice('E', 8)), e8sq(builtin_lattice("E8^2")),
      d16(builtin_lattice("D16+"));
  const GramTarget t = cartan(RootType::D, 4);
  BigInt want = 0;
  for (const auto& t1 : psd_splittings(t)) {
    GramTarget t2(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i; j < 4; ++j) t2.set(i, j, t(i, j) - t1(i, j));
    want += representation_count(e8, t1) *
            (representation_count(e8sq, t2) - representation_count(d16, t2));
  }
  const KIdentityReport r = k_identity_check(e8sq, d16, SchottkyFactors{&e8, &e8sq, &d16}, {t});
  EXPECT_EQ(r.rows[0].rhs_base, want);
  // Only T2 = T contributes, with r_E8(0) = 1.
  EXPECT_EQ(want, 7257600 - 2096640);
  EXPECT_EQ(r.k, 1);
}

TEST(KIdentity, CannotNormalizeOnVanishingRightSide) {
  LatticeContext e8(root_lattice('E', 8)), e8sq(builtin_lattice("E8^2")),
      d16(builtin_lattice("D16+"));
  const SchottkyFactors f{&e8, &e8sq, &d16};
  try {
    k_identity_check(e8sq, d16, f, {GramTarget(4), GramTarget::diagonal({2, 0, 0, 0})});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("cannot normalize k"), std::string::npos);
  }
  EXPECT_THROW(k_identity_check(e8sq, d16, f, {}), Error);
}

TEST(PsdSplittings, CountsForSmallTargets) {
  EXPECT_EQ(psd_splittings(GramTarget::diagonal({4})).size(), 3u);
  // Splitting off [[2,0],[0,0]] leaves [[0,1],[1,2]], which is indefinite; only 0 and T remain.
  for (const auto& t1 : psd_splittings(GramTarget::from_rows({{2, 1}, {1, 2}}))) {
    EXPECT_TRUE(t1.admissible());
  }
  EXPECT_EQ(psd_splittings(GramTarget::from_rows({{2, 1}, {1, 2}})).size(), 2u);
}

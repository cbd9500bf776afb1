#include <gtest/gtest.h>

#include <random>

#include "gconv/group.hpp"
#include "gconv/measure.hpp"
#include "gconv/function.hpp"
#include "oracles.hpp"

using namespace gconv;

namespace {

GroupPoint dihedral_point(int rot, int flip) { return GroupPoint{rot, flip}; }

}  // namespace

TEST(GroupSpace, IntegerSubtraction) {
  const auto Z = GroupSpace::integers();
  EXPECT_EQ(sub(Z, GroupPoint{5}, GroupPoint{2}), GroupPoint{3});
  EXPECT_EQ(neg(Z, GroupPoint{3}), GroupPoint{-3});
}

TEST(GroupSpace, CyclicWrapsAround) {
  const auto C8 = GroupSpace::cyclic(8);
  EXPECT_EQ(sub(C8, GroupPoint{1}, GroupPoint{3}), GroupPoint{6});
  EXPECT_EQ(neg(C8, GroupPoint{3}), GroupPoint{5});
  EXPECT_EQ(neg(C8, GroupPoint{0}), GroupPoint{0});
  EXPECT_EQ(C8.point({-1}), GroupPoint{7});
}

TEST(GroupSpace, DihedralExamplesMatchPermutationOracle) {
  const auto D4 = GroupSpace::dihedral(4);
  const oracle::DihedralPermutations perms(4);

  // s * r^-1 computed by composing permutations.
  const auto expected = perms.identify(oracle::DihedralPermutations::compose(perms.s(), perms.inverse(perms.r())));
  ASSERT_EQ(expected, std::make_pair(1, 1));
  EXPECT_EQ(sub(D4, dihedral_point(0, 1), dihedral_point(1, 0)), dihedral_point(1, 1));

  const auto refl_inv = perms.identify(perms.inverse(perms.element(1, 1)));
  ASSERT_EQ(refl_inv, std::make_pair(1, 1));
  EXPECT_EQ(neg(D4, dihedral_point(1, 1)), dihedral_point(1, 1));
}

TEST(GroupSpace, PermutationOracleSatisfiesPresentation) {
  for (int n = 1; n <= 6; ++n) {
    const oracle::DihedralPermutations P(n);
    const auto e = P.identity();
    EXPECT_EQ(P.power(P.r(), n), e);
    EXPECT_EQ(P.power(P.s(), 2), e);
    EXPECT_EQ(P.compose(P.compose(P.s(), P.r()), P.s()), P.inverse(P.r()));
  }
}

TEST(GroupSpace, DihedralProductMatchesOracleExhaustively) {
  for (int n = 1; n <= 6; ++n) {
    const auto G = GroupSpace::dihedral(n);
    const oracle::DihedralPermutations P(n);
    for (const auto& a : G.elements()) {
      for (const auto& b : G.elements()) {
        const auto prod = P.identify(P.compose(P.element(int(a[0]), int(a[1])), P.element(int(b[0]), int(b[1]))));
        EXPECT_EQ(G.add(a, b), dihedral_point(prod.first, prod.second)) << "n=" << n;
      }
    }
  }
}

TEST(GroupSpace, DihedralGroupAxiomsBruteForce) {
  for (int n = 1; n <= 6; ++n) {
    const auto G = GroupSpace::dihedral(n);
    const auto elems = G.elements();
    ASSERT_EQ(elems.size(), static_cast<std::size_t>(2 * n));
    for (const auto& a : elems) {
      EXPECT_EQ(G.add(a, G.neg(a)), G.zero());
      EXPECT_EQ(G.add(G.neg(a), a), G.zero());
      EXPECT_EQ(G.add(a, G.zero()), a);
      EXPECT_EQ(G.sub(G.zero(), a), G.neg(a));
      for (const auto& b : elems)
        for (const auto& c : elems) EXPECT_EQ(G.add(G.add(a, b), c), G.add(a, G.add(b, c)));
    }
  }
}

TEST(GroupSpace, DihedralIsNoncommutative) {
  const auto D4 = GroupSpace::dihedral(4);
  const auto r = dihedral_point(1, 0), s = dihedral_point(0, 1);
  EXPECT_NE(D4.add(s, r), D4.add(r, s));
  EXPECT_FALSE(D4.is_abelian());
  EXPECT_TRUE(GroupSpace::dihedral(2).is_abelian());
}

TEST(GroupSpace, SubIsAddNegOnAbelianKinds) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> coord(-50, 50);
  const std::vector<GroupSpace> groups = {GroupSpace::integers(), GroupSpace::cyclic(8), GroupSpace::cyclic(13),
                                          GroupSpace::lattice(2, 0.5), GroupSpace::lattice(3, 0.1)};
  for (const auto& G : groups) {
    for (int trial = 0; trial < 100; ++trial) {
      GroupPoint x = G.zero(), t = G.zero();
      for (std::size_t k = 0; k < G.rank(); ++k) {
        x[k] = coord(rng);
        t[k] = coord(rng);
      }
      if (G.kind() == GroupKind::Cyclic) {
        x = G.point({x[0]});
        t = G.point({t[0]});
      }
      EXPECT_EQ(G.sub(x, t), G.add(x, G.neg(t)));
      EXPECT_EQ(G.add(x, t), G.add(t, x));
    }
  }
}

TEST(GroupSpace, MismatchedPointsAreRejected) {
  const auto L2 = GroupSpace::lattice(2, 1.0);
  try {
    L2.sub(GroupPoint{1}, GroupPoint{1, 2});
    FAIL() << "expected SpaceMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpaceMismatch);
  }
  EXPECT_THROW(GroupSpace::cyclic(8).neg(GroupPoint{9}), Error);
  EXPECT_THROW(GroupSpace::dihedral(4).neg(GroupPoint{1, 2}), Error);
}

TEST(GroupSpace, BallUsesEmbeddedCoordinates) {
  const auto L = GroupSpace::lattice(1, 0.1);
  const auto pts = L.ball(L.zero(), 0.25);
  ASSERT_EQ(pts.size(), 5u);
  EXPECT_EQ(pts.front(), GroupPoint{-2});
  EXPECT_EQ(pts.back(), GroupPoint{2});
  const auto L2 = GroupSpace::lattice(2, 1.0);
  EXPECT_EQ(L2.ball(L2.zero(), 1.5).size(), 9u);
  EXPECT_EQ(L2.ball(L2.zero(), 1.0).size(), 1u);
}

TEST(Measure, Weights) {
  EXPECT_EQ(weight(Measure::counting(GroupSpace::integers()), GroupPoint{7}), 1.0);
  EXPECT_DOUBLE_EQ(weight(Measure::grid_volume(GroupSpace::lattice(2, 0.5)), GroupPoint{3, -1}), 0.25);
  EXPECT_DOUBLE_EQ(weight(Measure::grid_volume(GroupSpace::lattice(1, 0.1)), GroupPoint{4}), 0.1);
  EXPECT_THROW(Measure::grid_volume(GroupSpace::integers()), Error);
}

TEST(Measure, WeightedTableDeclaresNoInvariance) {
  const auto C4 = GroupSpace::cyclic(4);
  const auto mu = Measure::weighted(C4, {{GroupPoint{1}, 3.0}}, 0.5);
  EXPECT_EQ(mu.weight(GroupPoint{1}), 3.0);
  EXPECT_EQ(mu.weight(GroupPoint{2}), 0.5);
  EXPECT_FALSE(mu.invariance().left);
  EXPECT_FALSE(mu.invariance().right);
  EXPECT_THROW(Measure::weighted(C4, {{GroupPoint{1}, -1.0}}), Error);
}

namespace {

// x -> f(a + x): support point p moves to -a + p.
SampledFunction shifted_argument(const SampledFunction& f, const GroupPoint& a) {
  std::vector<GroupPoint> pts;
  for (const auto& p : f.points()) pts.push_back(f.group().add(f.group().neg(a), p));
  return SampledFunction(f.group(), f.vdim(), pts, {f.raw_values().begin(), f.raw_values().end()});
}

}  // namespace

TEST(Measure, DeclaredInvarianceFlagsHold) {
  std::mt19937_64 rng(11);
  const std::vector<Measure> measures = {
      Measure::counting(GroupSpace::integers()), Measure::counting(GroupSpace::cyclic(8)),
      Measure::counting(GroupSpace::dihedral(4)), Measure::grid_volume(GroupSpace::lattice(1, 0.1)),
      Measure::grid_volume(GroupSpace::lattice(2, 0.5))};
  for (const auto& mu : measures) {
    const auto& G = mu.group();
    ASSERT_TRUE(mu.invariance().left && mu.invariance().neg);
    for (int trial = 0; trial < 50; ++trial) {
      const auto f = oracle::random_function(rng, G, 2, 12);
      const auto shift = oracle::random_function(rng, G, 1, 1).point(0);
      const auto base = integral(f, mu);
      const auto moved = integral(shifted_argument(f, shift), mu);
      const auto mirrored = integral(reflect(f), mu);
      for (std::size_t k = 0; k < base.size(); ++k) {
        EXPECT_NEAR(moved[k], base[k], 1e-14 * std::max(1.0, std::abs(base[k])));
        EXPECT_NEAR(mirrored[k], base[k], 1e-14 * std::max(1.0, std::abs(base[k])));
      }
    }
  }
}

#include <gtest/gtest.h>

#include "hausloss/edt.hpp"
#include "oracles.hpp"

using namespace hausloss;

namespace {

BoundarySet set_of(const GridSpec& s, std::vector<Index> sites) { return BoundarySet(s, std::move(sites)); }

}  // namespace

TEST(Edt, UnitNeighbours) {
  const GridSpec s({1, 3});
  const DistanceMap d = edt_to_set(s, set_of(s, {1}));
  EXPECT_EQ(d[0], 1.0);
  EXPECT_EQ(d[1], 0.0);
  EXPECT_EQ(d[2], 1.0);
}

TEST(Edt, AllSourcesGiveZero) {
  const GridSpec s({4, 5, 3});
  std::vector<Index> all(static_cast<std::size_t>(s.size()));
  std::iota(all.begin(), all.end(), 0);
  EXPECT_TRUE((edt_to_set(s, set_of(s, all)).values() == 0.0).all());
}

TEST(Edt, EmptySourceSet) {
  const GridSpec s({4, 4});
  EXPECT_TRUE(squared_edt(s, {}).values().isInf().all());
  EXPECT_THROW(edt_to_set(s, set_of(s, {})), Error);
}

TEST(Edt, BoundaryDistanceOfSolidSquare) {
  const GridSpec s({5, 5});
  BinaryMask::Array v = BinaryMask::Array::Zero(25);
  for (Index i = 1; i < 4; ++i)
    for (Index j = 1; j < 4; ++j) v[s.linear({0, i, j})] = 1;
  const DistanceMap d = boundary_dt(BinaryMask(s, v));
  EXPECT_EQ(d.at({0, 2, 2}), 1.0);
  EXPECT_EQ(d.at({0, 1, 1}), 0.0);
}

TEST(Edt, SinglePixelBoundary) {
  const GridSpec s({7, 6});
  const BinaryMask m = oracle::mask_from(s, {{4, 1}});
  EXPECT_TRUE((boundary_dt(m).values() == edt_to_set(s, set_of(s, {s.linear({0, 4, 1})})).values()).all());
}

TEST(Edt, MatchesBruteForce2D) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    const GridSpec s = oracle::random_spec(rng, 2, 40, t % 2 == 1);
    const BinaryMask m = oracle::random_mask(rng, s, 0.01);
    const auto sites = boundary(m).sites();
    const auto want = oracle::edt(s, sites);
    const DistanceMap got = edt_to_set(s, BoundarySet(s, sites));
    for (Index i = 0; i < s.size(); ++i) ASSERT_NEAR(got[i], want[static_cast<std::size_t>(i)], 1e-9) << s.describe();
  }
}

TEST(Edt, MatchesBruteForce3D) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    const GridSpec s = oracle::random_spec(rng, 3, 14, t % 2 == 1);
    const BinaryMask m = oracle::random_mask(rng, s, 0.01);
    const auto sites = boundary(m).sites();
    const auto want = oracle::edt(s, sites);
    const DistanceMap got = edt_to_set(s, BoundarySet(s, sites));
    for (Index i = 0; i < s.size(); ++i) ASSERT_NEAR(got[i], want[static_cast<std::size_t>(i)], 1e-9) << s.describe();
  }
}

TEST(Edt, ForegroundAndBackground) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const GridSpec s = oracle::random_spec(rng, 2, 20, false);
    const BinaryMask m = oracle::random_mask(rng, s, 0.05);
    const auto fgd = foreground_dt(m);
    const auto want = oracle::edt(s, m.foreground_sites());
    for (Index i = 0; i < s.size(); ++i) EXPECT_NEAR(fgd[i], want[static_cast<std::size_t>(i)], 1e-9);
    // Background includes the ring of sites just outside the grid.
    const auto bgd = background_dt(m);
    const auto& e = s.extents3();
    for (Index i = 0; i < s.size(); ++i) {
      const Coord c = s.coord(i);
      double best = static_cast<double>(std::min({c[1] + 1, e[1] - c[1], c[2] + 1, e[2] - c[2]}));
      for (Index j = 0; j < s.size(); ++j) {
        if (!m[j]) best = std::min(best, oracle::distance(s, i, j));
      }
      EXPECT_NEAR(bgd[i], best, 1e-9);
    }
  }
}

TEST(Edt, LipschitzAcrossFaces) {
  std::mt19937_64 rng(14);
  const GridSpec s({17, 23});
  const BinaryMask m = oracle::random_mask(rng, s);
  const DistanceMap d = boundary_dt(m);
  for (Index i = 0; i < s.size(); ++i) {
    const Coord c = s.coord(i);
    for (const Coord& o : face_offsets(2)) {
      const Coord n = oracle::add(c, o);
      if (s.contains(n)) EXPECT_LE(std::abs(d[i] - d.at(n)), 1.0 + 1e-12);
    }
  }
}

TEST(Edt, SpacingScalesDistances) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 10; ++t) {
    const GridSpec s = oracle::random_spec(rng, t % 2 ? 3 : 2, 12, true);
    const BinaryMask m = oracle::random_mask(rng, s);
    std::vector<double> scaled;
    for (double x : s.spacing()) scaled.push_back(2.0 * x);
    const DistanceMap a = boundary_dt(m);
    const DistanceMap b = boundary_dt(m.with_spacing(scaled));
    EXPECT_TRUE((b.values() == 2.0 * a.values()).all());
  }
}

TEST(Edt, ReflectionCommutes) {
  std::mt19937_64 rng(16);
  const GridSpec s({14, 19});
  const BinaryMask m = oracle::random_mask(rng, s);
  BinaryMask::Array flipped(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    const Coord c = s.coord(i);
    flipped[s.linear({0, c[1], 18 - c[2]})] = m.values()[i];
  }
  const DistanceMap a = boundary_dt(m);
  const DistanceMap b = boundary_dt(BinaryMask(s, flipped));
  for (Index i = 0; i < s.size(); ++i) {
    const Coord c = s.coord(i);
    EXPECT_EQ(a[i], b.at({0, c[1], 18 - c[2]}));
  }
}

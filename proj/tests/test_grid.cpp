#include <gtest/gtest.h>

#include "hausloss/grid.hpp"
#include "oracles.hpp"

using namespace hausloss;

TEST(GridSpec, RejectsBadShapes) {
  EXPECT_THROW(GridSpec({5}), Error);
  EXPECT_THROW(GridSpec({2, 2, 2, 2}), Error);
  EXPECT_THROW(GridSpec({0, 4}), Error);
  EXPECT_THROW(GridSpec({4, 4}, {1.0, 0.0}), Error);
  EXPECT_THROW(GridSpec({4, 4}, {1.0}), Error);
  const GridSpec s({3, 4}, {0.5, 2.0});
  EXPECT_EQ(s.size(), 12);
  EXPECT_DOUBLE_EQ(s.min_spacing(), 0.5);
}

TEST(GridSpec, CoordinateRoundTrip) {
  const GridSpec s({3, 4, 5});
  for (Index i = 0; i < s.size(); ++i) EXPECT_EQ(s.linear(s.coord(i)), i);
  const GridSpec t({6, 7});
  EXPECT_EQ(t.padded({2, 3}), (Coord{0, 2, 3}));
  EXPECT_EQ(t.unpadded({0, 2, 3}), (std::vector<Index>{2, 3}));
}

TEST(Grid, ValidatesData) {
  const GridSpec s({2, 2});
  EXPECT_THROW(Grid<double>(s, Eigen::ArrayXd::Zero(3)), Error);
  Eigen::ArrayXd bad = Eigen::ArrayXd::Zero(4);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Grid<double>(s, bad), Error);
  EXPECT_THROW(ProbMap<double>(s, Eigen::ArrayXd::Constant(4, 1.5)), Error);
  BinaryMask::Array two = BinaryMask::Array::Zero(4);
  two[0] = 2;
  EXPECT_THROW(BinaryMask(s, two), Error);
}

TEST(Threshold, UniformMapBecomesSolid) {
  const GridSpec s({4, 4});
  EXPECT_EQ(threshold(ProbMap<double>(s, Eigen::ArrayXd::Constant(16, 0.7))), BinaryMask::ones(s));
}

TEST(Threshold, BinaryInputIsFixed) {
  std::mt19937_64 rng(1);
  const GridSpec s({9, 11});
  const BinaryMask m = oracle::random_mask(rng, s);
  EXPECT_EQ(threshold(ProbMap<double>::from_mask(m)), m);
}

TEST(Threshold, MatchesSitewiseComparison) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const GridSpec s = oracle::random_spec(rng, t % 2 ? 3 : 2, 12, false);
    const ProbMap<double> map(oracle::random_field(rng, s));
    const BinaryMask m = threshold(map);
    for (Index i = 0; i < s.size(); ++i) EXPECT_EQ(m[i], map[i] >= 0.5);
    EXPECT_EQ(threshold(ProbMap<double>::from_mask(m)), m);
  }
}

TEST(Threshold, TieGoesToForeground) {
  const GridSpec s({1, 2});
  const BinaryMask m = threshold(ProbMap<double>(s, Eigen::Array2d(0.5, 0.4999999)));
  EXPECT_TRUE(m[0]);
  EXPECT_FALSE(m[1]);
}

TEST(Boundary, SolidThreeByThreeKeepsRing) {
  const GridSpec s({3, 3});
  const BoundarySet b = boundary(BinaryMask::ones(s));
  EXPECT_EQ(b.size(), 8u);
  EXPECT_EQ(std::count(b.sites().begin(), b.sites().end(), s.linear({0, 1, 1})), 0);
}

TEST(Boundary, SinglePixel) {
  const GridSpec s({5, 5});
  const BinaryMask m = oracle::mask_from(s, {{2, 3}});
  EXPECT_EQ(boundary(m).sites(), (std::vector<Index>{s.linear({0, 2, 3})}));
}

TEST(Boundary, SquareInsideZeros) {
  const GridSpec s({9, 9});
  BinaryMask::Array v = BinaryMask::Array::Zero(81);
  for (Index i = 2; i < 7; ++i)
    for (Index j = 2; j < 7; ++j) v[s.linear({0, i, j})] = 1;
  const BoundarySet b = boundary(BinaryMask(s, v));
  EXPECT_EQ(b.size(), 16u);
  EXPECT_EQ(b.sites(), oracle::boundary(BinaryMask(s, v)));
}

TEST(Boundary, EmptyMaskThrows) {
  EXPECT_THROW(boundary(BinaryMask::zeros(GridSpec({4, 4}))), Error);
}

TEST(Boundary, MatchesNeighbourScanAndStaysInForeground) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 60; ++t) {
    const GridSpec s = oracle::random_spec(rng, t % 3 == 0 ? 3 : 2, t % 3 == 0 ? 10 : 20, false);
    const BinaryMask m = oracle::random_mask(rng, s, 0.05);
    const BoundarySet b = boundary(m);
    EXPECT_EQ(b.sites(), oracle::boundary(m));
    for (Index i : b.sites()) EXPECT_TRUE(m[i]);
  }
}

TEST(SetOps, SymmetricDifference) {
  std::mt19937_64 rng(4);
  const GridSpec s({13, 7});
  EXPECT_EQ(symmetric_difference(BinaryMask::ones(s), BinaryMask::zeros(s)), BinaryMask::ones(s));
  for (int t = 0; t < 20; ++t) {
    const BinaryMask a = oracle::random_mask(rng, s, 0.2), b = oracle::random_mask(rng, s, 0.2);
    const BinaryMask x = symmetric_difference(a, b);
    for (Index i = 0; i < s.size(); ++i) EXPECT_EQ(x[i], a[i] != b[i]);
    EXPECT_EQ(x, symmetric_difference(b, a));
    EXPECT_EQ(symmetric_difference(a, a), BinaryMask::zeros(s));
  }
}

TEST(SetOps, Complement) {
  std::mt19937_64 rng(5);
  const GridSpec s({6, 5, 4});
  EXPECT_EQ(complement(BinaryMask::ones(s)), BinaryMask::zeros(s));
  for (int t = 0; t < 20; ++t) {
    const BinaryMask a = oracle::random_mask(rng, s, 0.2);
    const BinaryMask c = complement(a);
    for (Index i = 0; i < s.size(); ++i) EXPECT_EQ(c[i], !a[i]);
    EXPECT_EQ(complement(c), a);
  }
}

TEST(SetOps, ShapeMismatchIsRejected) {
  EXPECT_THROW(symmetric_difference(BinaryMask::zeros(GridSpec({3, 3})), BinaryMask::zeros(GridSpec({3, 4}))), Error);
}

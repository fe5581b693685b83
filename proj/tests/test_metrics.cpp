#include <gtest/gtest.h>

#include "hausloss/metrics.hpp"
#include "hausloss/synth.hpp"
#include "oracles.hpp"

using namespace hausloss;

namespace {

const GridSpec kLine({10, 10});

BoundarySet pts(std::vector<std::vector<Index>> coords) { return BoundarySet::from_coords(kLine, coords); }

}  // namespace

TEST(Metrics, ThreeFourFive) {
  EXPECT_EQ(directed_hd(pts({{0, 0}}), pts({{3, 4}})), 5.0);
  EXPECT_EQ(modified_hd(pts({{0, 0}}), pts({{3, 4}})), 5.0);
}

TEST(Metrics, IdenticalSetsAreZero) {
  const BoundarySet x = pts({{1, 2}, {5, 5}, {7, 0}});
  EXPECT_EQ(directed_hd(x, x), 0.0);
  EXPECT_EQ(hausdorff(x, x), 0.0);
  EXPECT_EQ(modified_hd(x, x), 0.0);
  EXPECT_EQ(asd(x, x), 0.0);
  for (double pct : {1.0, 50.0, 95.0, 100.0}) EXPECT_EQ(percentile_hd(x, x, pct), 0.0);
}

TEST(Metrics, AsymmetryForcesMax) {
  const BoundarySet x = pts({{0, 0}});
  const BoundarySet y = pts({{0, 0}, {0, 9}});
  EXPECT_EQ(directed_hd(x, y), 0.0);
  EXPECT_EQ(directed_hd(y, x), 9.0);
  EXPECT_EQ(hausdorff(x, y), 9.0);
  EXPECT_EQ(hausdorff(y, x), 9.0);
}

TEST(Metrics, PartialRank) {
  // distances {0, 0, 8} from X to Y
  const BoundarySet x = pts({{0, 0}, {0, 1}, {0, 9}});
  const BoundarySet y = pts({{0, 0}, {0, 1}});
  EXPECT_EQ(directed_partial_hd(x, y, 1), 8.0);
  EXPECT_EQ(directed_partial_hd(x, y, 2), 0.0);
  EXPECT_EQ(directed_partial_hd(x, y, 1), directed_hd(x, y));
  EXPECT_THROW(directed_partial_hd(x, y, 4), Error);
  EXPECT_THROW(directed_partial_hd(x, y, 0), Error);
}

TEST(Metrics, AsdOfSingletons) { EXPECT_EQ(asd(pts({{0, 0}}), pts({{0, 2}})), 2.0); }

TEST(Metrics, PercentileHundredIsHausdorff) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const GridSpec s = oracle::random_spec(rng, 2, 24, false);
    const BoundarySet x = boundary(oracle::random_mask(rng, s)), y = boundary(oracle::random_mask(rng, s));
    EXPECT_EQ(percentile_hd(x, y, 100.0), hausdorff(x, y));
  }
}

TEST(Metrics, EmptyBoundaryThrows) {
  const BoundarySet e(kLine, {});
  EXPECT_THROW(hausdorff(e, pts({{0, 0}})), Error);
}

TEST(Dice, Examples) {
  const GridSpec s({1, 4});
  const BinaryMask a = oracle::mask_from(s, {{0, 0}, {0, 1}});
  const BinaryMask b = oracle::mask_from(s, {{0, 1}, {0, 2}});
  const BinaryMask c = oracle::mask_from(s, {{0, 3}});
  EXPECT_EQ(dsc(a, a), 1.0);
  EXPECT_EQ(dsc(a, c), 0.0);
  EXPECT_EQ(dsc(a, b), 0.5);
  EXPECT_EQ(dsc(ProbMap<double>::from_mask(a), ProbMap<double>::from_mask(b)), 0.5);
  EXPECT_THROW(dsc(BinaryMask::zeros(s), BinaryMask::zeros(s)), Error);
}

TEST(Metrics, MatchBruteForceOnRandomPairs) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 60; ++t) {
    const bool three = t % 4 == 0;
    const GridSpec s = oracle::random_spec(rng, three ? 3 : 2, three ? 12 : 28, t % 3 == 0);
    const BinaryMask p = oracle::random_mask(rng, s), q = oracle::random_mask(rng, s);
    const auto bx = oracle::boundary(p), by = oracle::boundary(q);
    const BoundarySet x(s, bx), y(s, by);
    const int k = 1 + static_cast<int>(std::min(bx.size(), by.size()) / 3);

    EXPECT_NEAR(hausdorff(x, y), oracle::hausdorff(s, bx, by), 1e-9);
    EXPECT_NEAR(directed_hd(x, y), oracle::max_of(oracle::directed(s, bx, by)), 1e-9);
    EXPECT_NEAR(percentile_hd(x, y, 95.0), oracle::pooled_percentile(s, bx, by, 95.0), 1e-9);
    EXPECT_NEAR(percentile_hd(x, y, 90.0), oracle::pooled_percentile(s, bx, by, 90.0), 1e-9);
    EXPECT_NEAR(partial_hd(x, y, k), oracle::partial(s, bx, by, k), 1e-9);
    EXPECT_NEAR(modified_hd(x, y), oracle::modified(s, bx, by), 1e-9);
    EXPECT_NEAR(asd(x, y), oracle::asd(s, bx, by), 1e-9);
  }
}

TEST(Metrics, ReportConsistency) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 40; ++t) {
    const GridSpec s = oracle::random_spec(rng, 2, 30, t % 2 == 0);
    const BinaryMask p = oracle::random_mask(rng, s), q = oracle::random_mask(rng, s);
    const MetricReport r = evaluate(p, q, 1);
    EXPECT_EQ(r.hd, std::max(r.hd_directed_pq, r.hd_directed_qp));
    EXPECT_LE(r.hd95, r.hd);
    EXPECT_LE(r.hd90, r.hd95);
    EXPECT_LE(r.modified_hd, r.hd);
    EXPECT_LE(r.partial_hd, r.hd);
    EXPECT_LE(r.asd, r.hd);
    EXPECT_GE(r.dsc, 0.0);
    EXPECT_LE(r.dsc, 1.0);
    EXPECT_EQ(r.partial_hd, r.hd);
  }
}

TEST(Metrics, PercentileIsMonotone) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 20; ++t) {
    const GridSpec s = oracle::random_spec(rng, 2, 24, true);
    const BoundarySet x = boundary(oracle::random_mask(rng, s)), y = boundary(oracle::random_mask(rng, s));
    double prev = 0.0;
    for (double pct = 5.0; pct <= 100.0; pct += 5.0) {
      const double v = percentile_hd(x, y, pct);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Metrics, TriangleInequality) {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 40; ++t) {
    const GridSpec s = oracle::random_spec(rng, 2, 24, t % 2 == 0);
    const BoundarySet a = boundary(oracle::random_mask(rng, s));
    const BoundarySet b = boundary(oracle::random_mask(rng, s));
    const BoundarySet c = boundary(oracle::random_mask(rng, s));
    EXPECT_LE(hausdorff(a, c), hausdorff(a, b) + hausdorff(b, c) + 1e-12);
  }
}

TEST(Metrics, TranslationInvariance) {
  std::mt19937_64 rng(26);
  const GridSpec s({40, 40});
  for (int t = 0; t < 20; ++t) {
    // Keep shapes away from the edge so the shift never clips them.
    const GridSpec inner({20, 20});
    const BinaryMask a0 = oracle::random_mask(rng, inner), b0 = oracle::random_mask(rng, inner);
    auto embed = [&](const BinaryMask& m, Index di, Index dj) {
      BinaryMask::Array v = BinaryMask::Array::Zero(s.size());
      for (Index i = 0; i < inner.size(); ++i) {
        const Coord c = inner.coord(i);
        v[s.linear({0, c[1] + di, c[2] + dj})] = m.values()[i];
      }
      return BinaryMask(s, v);
    };
    const Index di = static_cast<Index>(rng() % 19), dj = static_cast<Index>(rng() % 19);
    const MetricReport r0 = evaluate(embed(a0, 1, 1), embed(b0, 1, 1));
    const MetricReport r1 = evaluate(embed(a0, di + 1, dj + 1), embed(b0, di + 1, dj + 1));
    EXPECT_EQ(r0.hd, r1.hd);
    EXPECT_EQ(r0.hd95, r1.hd95);
    EXPECT_EQ(r0.asd, r1.asd);
    EXPECT_EQ(r0.modified_hd, r1.modified_hd);
    EXPECT_EQ(r0.dsc, r1.dsc);
  }
}

TEST(Metrics, SpacingLinearity) {
  std::mt19937_64 rng(27);
  for (int t = 0; t < 20; ++t) {
    const GridSpec s = oracle::random_spec(rng, t % 2 ? 3 : 2, t % 2 ? 10 : 24, true);
    const BinaryMask p = oracle::random_mask(rng, s), q = oracle::random_mask(rng, s);
    const double c = t % 2 ? 4.0 : 0.5;
    std::vector<double> sc;
    for (double x : s.spacing()) sc.push_back(c * x);
    const MetricReport a = evaluate(p, q, 2);
    const MetricReport b = evaluate(p.with_spacing(sc), q.with_spacing(sc), 2);
    EXPECT_EQ(b.hd, c * a.hd);
    EXPECT_EQ(b.hd95, c * a.hd95);
    EXPECT_EQ(b.partial_hd, c * a.partial_hd);
    EXPECT_NEAR(b.asd, c * a.asd, 1e-12 * b.asd);
    EXPECT_NEAR(b.modified_hd, c * a.modified_hd, 1e-12 * b.modified_hd);
    EXPECT_EQ(b.dsc, a.dsc);
  }
}

TEST(Metrics, ZeroIffIdentical) {
  std::mt19937_64 rng(28);
  for (int t = 0; t < 30; ++t) {
    const GridSpec s = oracle::random_spec(rng, 2, 20, false);
    const BinaryMask p = oracle::random_mask(rng, s);
    EXPECT_EQ(evaluate(p, p).hd, 0.0);
    const BinaryMask q = oracle::random_mask(rng, s);
    EXPECT_EQ(evaluate(p, q).hd == 0.0, boundary(p) == boundary(q));
  }
}

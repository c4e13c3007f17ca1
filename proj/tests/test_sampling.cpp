#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "zombi/sampling.hpp"

using namespace zombi;

namespace {

// Independent binning: stratum index of each coordinate, counted per dimension.
std::vector<std::vector<int>> stratum_histogram(const std::vector<Point>& pts, const Bounds& b) {
    const std::size_t n = pts.size();
    std::vector<std::vector<int>> hist(b.dim(), std::vector<int>(n, 0));
    for (const auto& p : pts)
        for (std::size_t d = 0; d < b.dim(); ++d) {
            auto s = static_cast<std::size_t>(std::floor((p[d] - b.lower[d]) / b.width(d) * static_cast<double>(n)));
            if (s == n) s = n - 1;
            ++hist[d][s];
        }
    return hist;
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
    Rng a(123), b(123), c(124);
    bool differs = false;
    for (int k = 0; k < 100; ++k) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs |= x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, MatchesReferenceXoshiroStream) {
    // splitmix64-seeded xoshiro256**, seed 0, from an independent Python port.
    Rng a(0);
    EXPECT_EQ(a.next_u64(), 0x99ec5f36cb75f2b4ULL);
    EXPECT_EQ(a.next_u64(), 0xbf6e1f784956452aULL);
    EXPECT_EQ(a.next_u64(), 0x1a5f849d4933e6e0ULL);
}

TEST(Rng, BelowStaysInRange) {
    Rng r(9);
    for (int k = 0; k < 10000; ++k) EXPECT_LT(r.below(7), 7u);
}

TEST(LatinHypercube, FourPointsFillEveryQuarter) {
    Rng rng(1);
    const Bounds unit = Bounds::cube(2, 0.0, 1.0);
    const auto pts = latin_hypercube(4, unit, rng);
    ASSERT_EQ(pts.size(), 4u);
    for (const auto& row : stratum_histogram(pts, unit))
        for (int c : row) EXPECT_EQ(c, 1);
}

TEST(LatinHypercube, SinglePointInsideBounds) {
    Rng rng(2);
    const Bounds b(Point{-3.0, 10.0}, Point{-1.0, 12.5});
    const auto pts = latin_hypercube(1, b, rng);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_TRUE(contains(b, pts[0]));
}

TEST(LatinHypercube, HundredPointsUniformOccupancySeed7) {
    Rng rng(7);
    const Bounds b = Bounds::cube(5, -5.0, 5.0);
    const auto pts = latin_hypercube(100, b, rng);
    for (const auto& row : stratum_histogram(pts, b))
        for (int c : row) EXPECT_EQ(c, 1);
}

TEST(LatinHypercube, StratificationPropertyAcrossSizes) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const std::size_t n = 1 + rng.below(40);
        const std::size_t dim = 1 + rng.below(6);
        Point lo(dim), hi(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = rng.uniform(-10.0, 0.0);
            hi[d] = lo[d] + rng.uniform(1e-3, 10.0);
        }
        const Bounds b(lo, hi);
        const auto pts = latin_hypercube(n, b, rng);
        for (const auto& p : pts) ASSERT_TRUE(contains(b, p));
        for (const auto& row : stratum_histogram(pts, b))
            for (int c : row) ASSERT_EQ(c, 1);
    }
}

TEST(LatinHypercube, Deterministic) {
    const Bounds b = Bounds::cube(3, 0.0, 1.0);
    Rng a(5), c(5);
    EXPECT_EQ(latin_hypercube(10, b, a), latin_hypercube(10, b, c));
}

TEST(LatinHypercube, RejectsDegenerateBounds) {
    Rng rng(0);
    EXPECT_THROW(latin_hypercube(3, Bounds(Point{0.0, 0.0}, Point{1.0, 0.0}), rng), Error);
    EXPECT_THROW(latin_hypercube(0, Bounds::cube(1, 0.0, 1.0), rng), Error);
}

TEST(UniformCandidates, InsideBoundsAndDeterministic) {
    const Bounds b = Bounds::cube(5, 0.0, 1.0);
    Rng a(77), c(77);
    const auto pts = uniform_candidates(1000, b, a);
    ASSERT_EQ(pts.size(), 1000u);
    for (const auto& p : pts) EXPECT_TRUE(contains(b, p));
    EXPECT_EQ(pts, uniform_candidates(1000, b, c));
}

TEST(UniformCandidates, MeanConverges) {
    Rng rng(4);
    const auto pts = uniform_candidates(100000, Bounds::cube(1, 0.0, 1.0), rng);
    double s = 0.0;
    for (const auto& p : pts) s += p[0];
    EXPECT_NEAR(s / 1e5, 0.5, 0.01);
}

TEST(Rng, NormalMomentsAreStandard) {
    Rng rng(8);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

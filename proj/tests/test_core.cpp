#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

#include "zombi/core.hpp"
#include "zombi/objectives.hpp"
#include "zombi/sampling.hpp"

using namespace zombi;

namespace {

std::vector<EvaluatedSample> samples_with_y(std::initializer_list<double> ys) {
    std::vector<EvaluatedSample> out;
    std::size_t it = 0;
    for (double y : ys) {
        out.push_back({Point{static_cast<double>(it)}, y, it, 0});
        ++it;
    }
    return out;
}

}  // namespace

TEST(SelectMemory, ReturnsSmallestInAscendingOrder) {
    const auto history = samples_with_y({3.0, 1.0, 2.0});
    const auto best = select_memory(history, 2);
    ASSERT_EQ(best.size(), 2u);
    EXPECT_EQ(best[0].y, 1.0);
    EXPECT_EQ(best[1].y, 2.0);
}

TEST(SelectMemory, DuplicateYKeepsEarliestIteration) {
    const auto history = samples_with_y({1.0, 1.0, 2.0});
    const auto best = select_memory(history, 2);
    ASSERT_EQ(best.size(), 2u);
    EXPECT_EQ(best[0].y, 1.0);
    EXPECT_EQ(best[0].iteration, 0u);
    EXPECT_EQ(best[1].y, 2.0);
}

TEST(SelectMemory, CapsAtAvailableCount) {
    const auto history = samples_with_y({5.0, 4.0, 6.0});
    EXPECT_EQ(select_memory(history, 10).size(), 3u);
}

TEST(SelectMemory, EmptyHistoryIsAnError) {
    std::vector<EvaluatedSample> none;
    EXPECT_THROW(
        {
            try {
                select_memory(none, 3);
            } catch (const Error& e) {
                EXPECT_STREQ(e.what(), "no memory to select from");
                throw;
            }
        },
        Error);
}

TEST(SelectMemory, OutputSortedAndDistinctOnRandomHistories) {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<EvaluatedSample> history;
        const std::size_t n = 1 + rng.below(30);
        for (std::size_t k = 0; k < n; ++k)
            history.push_back({Point{rng.uniform()}, static_cast<double>(rng.below(8)), k, 0});
        const std::size_t m = 1 + rng.below(10);
        const auto best = select_memory(history, m);
        ASSERT_LE(best.size(), m);
        for (std::size_t k = 1; k < best.size(); ++k) ASSERT_LT(best[k - 1].y, best[k].y);
        for (const auto& s : best) {
            // earliest iteration among samples sharing this y
            std::size_t first = n;
            for (const auto& h : history)
                if (h.y == s.y) first = std::min(first, h.iteration);
            ASSERT_EQ(s.iteration, first);
        }
    }
}

TEST(ZoomBounds, ComponentwiseMinMax) {
    const Bounds original = Bounds::cube(2, 0.0, 1.0);
    std::vector<EvaluatedSample> memory = {
        {Point{0.2, 0.8}, 0.0, 0, 0}, {Point{0.4, 0.1}, 1.0, 1, 0}, {Point{0.3, 0.5}, 2.0, 2, 0}};
    const Bounds b = compute_zoom_bounds(memory, original, 0.01);
    EXPECT_DOUBLE_EQ(b.lower[0], 0.2);
    EXPECT_DOUBLE_EQ(b.lower[1], 0.1);
    EXPECT_DOUBLE_EQ(b.upper[0], 0.4);
    EXPECT_DOUBLE_EQ(b.upper[1], 0.8);
}

TEST(ZoomBounds, DegenerateDimensionIsExpanded) {
    const Bounds original = Bounds::cube(2, 0.0, 1.0);
    std::vector<EvaluatedSample> memory = {{Point{0.5, 0.5}, 0.0, 0, 0}};
    const Bounds b = compute_zoom_bounds(memory, original, 0.01);
    for (std::size_t d = 0; d < 2; ++d) {
        EXPECT_NEAR(b.lower[d], 0.495, 1e-15);
        EXPECT_NEAR(b.upper[d], 0.505, 1e-15);
    }
}

TEST(ZoomBounds, ExpansionAtEdgeStaysInsideAndKeepsWidth) {
    const Bounds original = Bounds::cube(1, 0.0, 1.0);
    std::vector<EvaluatedSample> memory = {{Point{1.0}, 0.0, 0, 0}};
    const Bounds b = compute_zoom_bounds(memory, original, 0.01);
    EXPECT_DOUBLE_EQ(b.upper[0], 1.0);
    EXPECT_NEAR(b.lower[0], 0.99, 1e-15);
}

TEST(ZoomBounds, BestOfAckleyLhsMatchesBruteForce) {
    const Bounds original = Bounds::cube(5, -5.0, 5.0);
    Rng rng(42);
    const auto pts = latin_hypercube(20, original, rng);
    std::vector<EvaluatedSample> history;
    for (std::size_t k = 0; k < pts.size(); ++k) history.push_back({pts[k], ackley(pts[k]), k, 0});

    const auto best = select_memory(history, 5);
    const Bounds b = compute_zoom_bounds(best, original, 0.01);

    // Brute force: sort indices by y, take 5, scan each coordinate.
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto c) { return history[a].y < history[c].y; });
    for (std::size_t d = 0; d < 5; ++d) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t j = 0; j < 5; ++j) {
            lo = std::min(lo, pts[idx[j]][d]);
            hi = std::max(hi, pts[idx[j]][d]);
        }
        EXPECT_EQ(b.lower[d], lo);
        EXPECT_EQ(b.upper[d], hi);
    }
}

TEST(ZoomBounds, ContainmentIdempotenceAndNestingProperty) {
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t dim = 1 + rng.below(5);
        Bounds outer = Bounds::cube(dim, -1.0, 1.0);
        Bounds box = outer;
        for (int step = 0; step < 6; ++step) {
            const std::size_t n = 1 + rng.below(6);
            std::vector<EvaluatedSample> memory;
            for (std::size_t k = 0; k < n; ++k) {
                Point p(dim);
                // Clustered points near an edge of the current box.
                for (std::size_t d = 0; d < dim; ++d)
                    p[d] = box.upper[d] - box.width(d) * 0.02 * rng.uniform();
                memory.push_back({p, rng.uniform(), k, 0});
            }
            const Bounds next = compute_zoom_bounds(memory, outer, 0.01, box);
            for (const auto& s : memory) ASSERT_TRUE(contains(next, s.x));
            ASSERT_TRUE(nested_in(next, box));
            ASSERT_EQ(next, compute_zoom_bounds(memory, outer, 0.01, box));
            for (std::size_t d = 0; d < dim; ++d) ASSERT_GE(next.width(d), 0.01 * outer.width(d) * (1 - 1e-12));
            box = next;
        }
    }
}

TEST(Contains, BoundaryInclusive) {
    const Bounds unit = Bounds::cube(2, 0.0, 1.0);
    EXPECT_TRUE(contains(unit, Point{0.5, 0.5}));
    EXPECT_TRUE(contains(unit, Point{1.0, 0.0}));
    EXPECT_FALSE(contains(unit, Point{1.0001, 0.5}));
}

TEST(Contains, DimensionMismatchThrows) {
    EXPECT_THROW(contains(Bounds::cube(2, 0.0, 1.0), Point{0.5}), Error);
}

TEST(Bounds, RejectsInvertedInterval) {
    EXPECT_THROW(Bounds(Point{1.0}, Point{0.0}), Error);
    EXPECT_THROW(Bounds(Point{0.0, 0.0}, Point{1.0}), Error);
}

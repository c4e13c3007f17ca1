#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "zombi/engine.hpp"
#include "zombi/objectives.hpp"
#include "zombi/trace_io.hpp"

using namespace zombi;

namespace {

ZombiConfig ackley_config(std::uint64_t seed, AcqKind kind = AcqKind::lcb_adaptive) {
    ZombiConfig c;
    c.bounds = Bounds::cube(5, -5.0, 5.0);
    c.seed = seed;
    c.acquisition = kind;
    c.hyper = AcqHyperparams::defaults_for(kind);
    c.candidates_per_step = 300;
    return c;
}

const Objective narrow_ackley = [](const Point& x) { return ackley(x, {20.0, 0.2, 2.0 * 3.141592653589793, 3.0}); };

}  // namespace

TEST(RunZombi, DefaultBudgetAndNestedBounds) {
    const auto t = run_zombi(narrow_ackley, ackley_config(42));
    EXPECT_EQ(t.evaluations(), 110u);
    ASSERT_EQ(t.activations.size(), 4u);
    EXPECT_TRUE(nested_in(t.activations[0].bounds, Bounds::cube(5, -5.0, 5.0)));
    for (std::size_t a = 1; a < t.activations.size(); ++a)
        EXPECT_TRUE(nested_in(t.activations[a].bounds, t.activations[a - 1].bounds));
    for (const auto& act : t.activations)
        for (const auto& s : act.memory_used) EXPECT_TRUE(contains(act.bounds, s.x));
}

TEST(RunZombi, RowsLieInTheirActivationBounds) {
    const auto t = run_zombi(narrow_ackley, ackley_config(8));
    for (const auto& r : t.records) {
        if (r.activation == 0) continue;
        EXPECT_TRUE(contains(t.activations[r.activation - 1].bounds, r.x));
    }
}

TEST(RunZombi, MinimalConfigBudget) {
    ZombiConfig c;
    c.activations = 1;
    c.init_per_activation = 1;
    c.forward_per_activation = 1;
    c.memory = 1;
    c.bounds = Bounds::cube(1, -1.0, 1.0);
    const auto t = run_zombi([](const Point& x) { return x[0] * x[0]; }, c);
    EXPECT_EQ(t.evaluations(), 10u + 1u * (1u + 1u));
    EXPECT_EQ(t.records.back().kind, SampleKind::forward);
    EXPECT_EQ(t.records.back().surrogate_n, 1u);
}

TEST(RunZombi, ConstantObjective) {
    const auto t = run_zombi([](const Point&) { return 5.0; }, ackley_config(1));
    for (const auto& r : t.records) EXPECT_EQ(r.best_y, 5.0);
    EXPECT_EQ(t.best_value(), 5.0);
}

TEST(RunZombi, ArchiveInvariants) {
    const auto c = ackley_config(5);
    std::size_t calls = 0;
    const auto t = run_zombi(
        [&](const Point& x) {
            ++calls;
            return narrow_ackley(x);
        },
        c);
    EXPECT_EQ(calls, t.evaluations());
    EXPECT_EQ(t.evaluations(), c.budget());
    for (std::size_t k = 0; k < t.records.size(); ++k) {
        EXPECT_EQ(t.records[k].iteration, k);
        if (k) { EXPECT_LE(t.records[k].best_y, t.records[k - 1].best_y); }
        if (t.records[k].kind == SampleKind::forward) {
            EXPECT_GE(t.records[k].surrogate_n, c.init_per_activation);
            EXPECT_LE(t.records[k].surrogate_n, c.init_per_activation + c.forward_per_activation);
        }
    }
}

TEST(RunZombi, DeterministicForSeed) {
    const auto a = run_zombi(narrow_ackley, ackley_config(77));
    const auto b = run_zombi(narrow_ackley, ackley_config(77));
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        EXPECT_EQ(a.records[k].x, b.records[k].x);
        EXPECT_EQ(a.records[k].y, b.records[k].y);
    }
}

TEST(RunZombi, NonFiniteObjectiveNamesThePoint) {
    try {
        run_zombi([](const Point& x) { return x[0] > 0.0 ? std::nan("") : 1.0; }, ackley_config(3));
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find('('), std::string::npos);
    }
}

TEST(RunZombi, ZeroBudgetRejected) {
    auto c = ackley_config(0);
    c.activations = 0;
    EXPECT_THROW(run_zombi(narrow_ackley, c), Error);
    c = ackley_config(0);
    c.memory = 40;
    EXPECT_THROW(run_zombi(narrow_ackley, c), Error);
}

TEST(RunZombi, MaximizeIsNegatedAtTheBoundary) {
    auto c = ackley_config(4);
    c.sense = ObjectiveSense::maximize;
    const auto t = run_zombi([](const Point& x) { return -narrow_ackley(x); }, c);
    EXPECT_LE(t.best_value(), 0.0);
    EXPECT_EQ(t.best_value(), -t.best.y);
    std::ostringstream csv;
    write_trace_csv(csv, t);
    EXPECT_NE(csv.str().find("iteration,activation,x1,x2,x3,x4,x5,y,best_y,surrogate_n,fit_ms,acq_ms"),
              std::string::npos);
}

TEST(RunZombi, EvaluationCapTruncates) {
    auto c = ackley_config(2);
    c.max_evaluations = 47;
    EXPECT_EQ(run_zombi(narrow_ackley, c).evaluations(), 47u);
}

TEST(RunZombi, EiAbruptSwitchesOnPlateau) {
    auto c = ackley_config(6, AcqKind::ei_abrupt);
    c.activations = 1;
    const auto t = run_zombi([](const Point&) { return 1.0; }, c);
    std::size_t forward = 0;
    for (const auto& r : t.records) {
        if (r.kind != SampleKind::forward) continue;
        EXPECT_EQ(r.branch, forward < 3 ? AcqBranch::greedy : AcqBranch::explore);
        ++forward;
    }
}

TEST(RunZombi, LcbAdaptiveWeightDecaysAcrossRun) {
    const auto t = run_zombi(narrow_ackley, ackley_config(9));
    double prev = 1e300;
    std::size_t n = 0;
    for (const auto& r : t.records) {
        if (r.kind != SampleKind::forward) continue;
        EXPECT_NEAR(r.explore_weight, 3.0 * std::pow(0.9, static_cast<double>(n)), 1e-12);
        EXPECT_LT(r.explore_weight, prev);
        prev = r.explore_weight;
        ++n;
    }
    EXPECT_EQ(n, 80u);
}

TEST(RunPlainBo, TrainingSetGrowsWithIteration) {
    auto c = ackley_config(42);
    c.activations = 2;
    const auto t = run_plain_bo(narrow_ackley, c);
    EXPECT_EQ(t.evaluations(), c.budget());
    EXPECT_TRUE(t.activations.empty());
    for (const auto& r : t.records)
        if (r.kind == SampleKind::forward) { EXPECT_EQ(r.surrogate_n, r.iteration); }
}

TEST(RunPlainBo, CandidatesUseOriginalBounds) {
    auto c = ackley_config(10);
    c.activations = 1;
    const auto t = run_plain_bo(narrow_ackley, c);
    for (const auto& r : t.records) EXPECT_TRUE(contains(c.bounds, r.x));
}

TEST(RunEnsemble, SingleRunEqualsTrace) {
    auto c = ackley_config(100);
    c.activations = 2;
    const auto e = run_ensemble(narrow_ackley, c, 1);
    const auto t = run_zombi(narrow_ackley, c);
    ASSERT_EQ(e.best_curve.size(), t.records.size());
    for (std::size_t k = 0; k < t.records.size(); ++k) {
        EXPECT_EQ(e.best_curve[k].median, t.records[k].best_y);
        EXPECT_EQ(e.best_curve[k].min, t.records[k].best_y);
        EXPECT_EQ(e.best_curve[k].max, t.records[k].best_y);
    }
}

TEST(RunEnsemble, MedianNonIncreasingAndThreadIndependent) {
    auto c = ackley_config(200);
    c.activations = 2;
    const auto serial = run_ensemble(narrow_ackley, c, 6, RunMode::zombi, 1);
    const auto parallel = run_ensemble(narrow_ackley, c, 6, RunMode::zombi, 3);
    for (std::size_t k = 1; k < serial.best_curve.size(); ++k)
        EXPECT_LE(serial.best_curve[k].median, serial.best_curve[k - 1].median);
    for (std::size_t k = 0; k < serial.best_curve.size(); ++k) {
        EXPECT_EQ(serial.best_curve[k].median, parallel.best_curve[k].median);
        EXPECT_LE(serial.best_curve[k].min, serial.best_curve[k].median);
        EXPECT_GE(serial.best_curve[k].max, serial.best_curve[k].median);
    }
    for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(serial.traces[k].seed, 200u + k);
}

TEST(RunEnsemble, ZeroRunsRejected) {
    EXPECT_THROW(run_ensemble(narrow_ackley, ackley_config(0), 0), Error);
}

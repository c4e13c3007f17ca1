#pragma once

// The ZoMBI driver: zoom the search box onto the best memory points,
// re-initialize inside it with a Latin hypercube, prune everything else from
// memory, then run forward experiments on a GP surrogate. A plain-BO mode
// runs the same loop without zooming or pruning for comparison.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "zombi/acquisition.hpp"
#include "zombi/core.hpp"
#include "zombi/sampling.hpp"
#include "zombi/surrogate.hpp"

namespace zombi {

struct ZombiConfig {
    std::size_t activations = 4;
    std::size_t forward_per_activation = 20;  // phi
    std::size_t init_per_activation = 5;      // i
    std::size_t memory = 5;                   // m
    std::size_t initial_global_samples = 10;
    std::size_t candidates_per_step = 1000;
    std::size_t max_evaluations = 0;  // 0: no cap beyond the natural budget
    double epsilon_expand = 0.01;
    AcqKind acquisition = AcqKind::lcb_adaptive;
    AcqHyperparams hyper = AcqHyperparams::defaults_for(AcqKind::lcb_adaptive);
    std::uint64_t seed = 0;
    ObjectiveSense sense = ObjectiveSense::minimize;
    Bounds bounds;

    std::size_t natural_budget() const noexcept {
        return initial_global_samples + activations * (init_per_activation + forward_per_activation);
    }

    std::size_t budget() const noexcept {
        const std::size_t b = natural_budget();
        return max_evaluations ? std::min(b, max_evaluations) : b;
    }

    void validate() const {
        if (activations == 0 || forward_per_activation == 0 || init_per_activation == 0 || memory == 0 ||
            initial_global_samples == 0 || candidates_per_step == 0)
            throw Error("config: activations, phi, init, memory, global samples and candidates must be positive");
        if (memory > init_per_activation + forward_per_activation)
            throw Error("config: memory must not exceed init + phi");
        if (bounds.dim() == 0) throw Error("config: bounds are empty");
        for (std::size_t d = 0; d < bounds.dim(); ++d)
            if (!(bounds.width(d) > 0.0)) throw Error("config: bounds must have positive width");
        if (!(epsilon_expand > 0.0 && epsilon_expand <= 1.0))
            throw Error("config: epsilon_expand must lie in (0, 1]");
        hyper.validate();
    }
};

enum class RunMode { zombi, plain_bo };

inline std::string_view to_string(RunMode m) noexcept { return m == RunMode::zombi ? "zombi" : "plain-bo"; }

enum class SampleKind { global_init, lhs_init, forward };

struct TraceRecord {
    std::size_t iteration = 0;
    std::size_t activation = 0;  // 0 for the global initial design
    SampleKind kind = SampleKind::global_init;
    Point x;
    double y = 0.0;       // minimization convention
    double best_y = 0.0;  // running best over the archive
    std::size_t surrogate_n = 0;
    double fit_ms = 0.0;
    double acq_ms = 0.0;
    AcqBranch branch = AcqBranch::none;
    double explore_weight = 0.0;
};

struct ActivationRecord {
    std::size_t index = 0;
    Bounds bounds;
    std::vector<EvaluatedSample> memory_used;
};

struct RunTrace {
    RunMode mode = RunMode::zombi;
    ObjectiveSense sense = ObjectiveSense::minimize;
    std::uint64_t seed = 0;
    std::vector<TraceRecord> records;  // the never-pruned archive
    std::vector<ActivationRecord> activations;
    EvaluatedSample best;
    double total_seconds = 0.0;

    std::size_t evaluations() const noexcept { return records.size(); }
    /// Best value in problem units.
    double best_value() const noexcept { return best.y * sense_sign(sense); }
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

class RunState {
public:
    RunState(const Objective& objective, const ZombiConfig& config, RunMode mode)
        : objective_(objective), config_(config), budget_(config.budget()), rng_(config.seed) {
        config.validate();
        trace_.mode = mode;
        trace_.sense = config.sense;
        trace_.seed = config.seed;
        trace_.records.reserve(budget_);
    }

    bool exhausted() const noexcept { return trace_.records.size() >= budget_; }
    Rng& rng() noexcept { return rng_; }
    RunTrace& trace() noexcept { return trace_; }

    EvaluatedSample evaluate(const Point& x, std::size_t activation, SampleKind kind, TraceRecord meta = {}) {
        if (exhausted()) throw Error("evaluation budget exhausted");
        if (!x.finite()) throw Error("non-finite design point " + to_string(x));
        const double raw = objective_(x);
        if (!std::isfinite(raw)) throw Error("objective returned a non-finite value at " + to_string(x));
        const double y = raw * sense_sign(config_.sense);

        EvaluatedSample sample{x, y, trace_.records.size(), activation};
        if (trace_.records.empty() || y < trace_.best.y) trace_.best = sample;

        meta.iteration = sample.iteration;
        meta.activation = activation;
        meta.kind = kind;
        meta.x = x;
        meta.y = y;
        meta.best_y = trace_.best.y;
        trace_.records.push_back(std::move(meta));
        return sample;
    }

    /// One acquisition-driven step on the given memory inside `box`.
    EvaluatedSample forward_step(std::span<const EvaluatedSample> memory, const Bounds& box,
                                 std::size_t activation, AcqContext& ctx) {
        std::vector<Point> xs;
        std::vector<double> ys;
        xs.reserve(memory.size());
        ys.reserve(memory.size());
        for (const auto& s : memory) {
            xs.push_back(s.x);
            ys.push_back(s.y);
        }

        auto t0 = std::chrono::steady_clock::now();
        const GpModel model = fit_gp_selected(xs, ys, box);
        const double fit_ms = elapsed_ms(t0);

        t0 = std::chrono::steady_clock::now();
        ctx.incumbent = *std::min_element(ys.begin(), ys.end());
        const auto candidates = uniform_candidates(config_.candidates_per_step, box, rng_);
        const AcqChoice choice = argmax_acquisition(candidates, model, config_.acquisition, ctx, config_.hyper);
        const double acq_ms = elapsed_ms(t0);

        TraceRecord meta;
        meta.surrogate_n = memory.size();
        meta.fit_ms = fit_ms;
        meta.acq_ms = acq_ms;
        meta.branch = choice.branch;
        meta.explore_weight = exploration_weight(config_.acquisition, ctx, config_.hyper);
        EvaluatedSample s = evaluate(candidates[choice.index], activation, SampleKind::forward, meta);

        ++ctx.forward_count;
        ctx.recent_y.push_back(s.y);
        if (ctx.recent_y.size() > 3) ctx.recent_y.erase(ctx.recent_y.begin());
        return s;
    }

    std::vector<EvaluatedSample> global_design() {
        std::vector<EvaluatedSample> memory;
        for (const auto& p : latin_hypercube(config_.initial_global_samples, config_.bounds, rng_)) {
            if (exhausted()) break;
            memory.push_back(evaluate(p, 0, SampleKind::global_init));
        }
        return memory;
    }

private:
    const Objective& objective_;
    const ZombiConfig& config_;
    std::size_t budget_;
    Rng rng_;
    RunTrace trace_;
};

}  // namespace detail

inline RunTrace run_zombi(const Objective& objective, const ZombiConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    detail::RunState state(objective, config, RunMode::zombi);

    std::vector<EvaluatedSample> memory = state.global_design();
    Bounds box = config.bounds;
    AcqContext ctx;

    for (std::size_t a = 1; a <= config.activations && !state.exhausted(); ++a) {
        auto best = select_memory(memory, config.memory);
        box = compute_zoom_bounds(best, config.bounds, config.epsilon_expand, box);
        state.trace().activations.push_back({a, box, std::move(best)});

        memory.clear();
        for (const auto& p : latin_hypercube(config.init_per_activation, box, state.rng())) {
            if (state.exhausted()) break;
            memory.push_back(state.evaluate(p, a, SampleKind::lhs_init));
        }
        ctx.recent_y.clear();

        for (std::size_t f = 0; f < config.forward_per_activation && !state.exhausted(); ++f)
            memory.push_back(state.forward_step(memory, box, a, ctx));
    }

    RunTrace trace = std::move(state.trace());
    trace.total_seconds = detail::elapsed_ms(start) / 1000.0;
    return trace;
}

inline RunTrace run_plain_bo(const Objective& objective, const ZombiConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    detail::RunState state(objective, config, RunMode::plain_bo);

    std::vector<EvaluatedSample> memory = state.global_design();
    AcqContext ctx;
    while (!state.exhausted()) memory.push_back(state.forward_step(memory, config.bounds, 1, ctx));

    RunTrace trace = std::move(state.trace());
    trace.total_seconds = detail::elapsed_ms(start) / 1000.0;
    return trace;
}

inline RunTrace run(RunMode mode, const Objective& objective, const ZombiConfig& config) {
    return mode == RunMode::zombi ? run_zombi(objective, config) : run_plain_bo(objective, config);
}

struct EnvelopePoint {
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct EnsembleResult {
    std::vector<RunTrace> traces;           // ordered by run index
    std::vector<EnvelopePoint> best_curve;  // per iteration, problem units

    double median_final_best() const { return best_curve.empty() ? 0.0 : best_curve.back().median; }
};

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw Error("median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Independent runs with seeds config.seed + k. Runs are distributed over
/// `threads` workers; results do not depend on the thread count.
inline EnsembleResult run_ensemble(const Objective& objective, const ZombiConfig& config, std::size_t runs,
                                   RunMode mode = RunMode::zombi, std::size_t threads = 1) {
    if (runs == 0) throw Error("ensemble: runs must be positive");
    config.validate();

    EnsembleResult result;
    result.traces.resize(runs);
    std::vector<std::exception_ptr> errors(runs);
    auto worker = [&](std::size_t first) {
        for (std::size_t k = first; k < runs; k += std::max<std::size_t>(threads, 1)) {
            try {
                ZombiConfig c = config;
                c.seed = config.seed + k;
                result.traces[k] = run(mode, objective, c);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, runs); ++t) pool.emplace_back(worker, t);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    const std::size_t len = result.traces.front().records.size();
    const double sign = sense_sign(config.sense);
    result.best_curve.resize(len);
    std::vector<double> column(runs);
    for (std::size_t it = 0; it < len; ++it) {
        for (std::size_t k = 0; k < runs; ++k) column[k] = result.traces[k].records.at(it).best_y * sign;
        const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
        result.best_curve[it] = {median_of(column), *lo, *hi};
    }
    return result;
}

}  // namespace zombi

#pragma once

// Benchmark helpers: ZoMBI vs plain-BO compute-time comparison and the
// basin-width (Gaussian smoothing) sweep.

#include <algorithm>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "zombi/engine.hpp"
#include "zombi/objectives.hpp"
#include "zombi/trace_io.hpp"

namespace zombi {

/// Per-step surrogate timings of the acquisition-driven rows of a trace.
struct StepTimings {
    std::vector<std::size_t> activation;
    std::vector<double> fit_ms;
    std::vector<double> total_ms;  // fit + acquire
};

inline StepTimings forward_timings(const RunTrace& trace) {
    StepTimings t;
    for (const auto& r : trace.records) {
        if (r.kind != SampleKind::forward) continue;
        t.activation.push_back(r.activation);
        t.fit_ms.push_back(r.fit_ms);
        t.total_ms.push_back(r.fit_ms + r.acq_ms);
    }
    return t;
}

inline double mean_of(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Mean of the last tenth of the series divided by the mean of the first tenth.
inline double decile_ratio(std::span<const double> v) {
    if (v.size() < 10) return 0.0;
    const std::size_t k = v.size() / 10;
    const double first = mean_of(v.first(k));
    return first > 0.0 ? mean_of(v.last(k)) / first : 0.0;
}

/// Values belonging to one activation.
inline std::vector<double> activation_slice(const StepTimings& t, std::span<const double> v, std::size_t activation) {
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k)
        if (t.activation[k] == activation) out.push_back(v[k]);
    return out;
}

struct TimingReport {
    std::size_t zombi_evaluations = 0;
    std::size_t plain_evaluations = 0;
    std::size_t zombi_max_train_n = 0;
    std::size_t plain_max_train_n = 0;

    double plain_fit_decile_ratio = 0.0;
    double plain_total_decile_ratio = 0.0;

    double zombi_first_activation_fit_mean = 0.0;
    double zombi_last_activation_fit_mean = 0.0;
    double zombi_first_activation_total_mean = 0.0;
    double zombi_last_activation_total_mean = 0.0;
    double zombi_sawtooth_max_ms = 0.0;  // max fit+acquire over the final activation

    double final_speedup = 0.0;  // plain-BO / ZoMBI fit+acquire at the last step

    double zombi_activation_fit_ratio() const {
        return zombi_first_activation_fit_mean > 0.0 ? zombi_last_activation_fit_mean / zombi_first_activation_fit_mean
                                                     : 0.0;
    }
    double zombi_activation_total_ratio() const {
        return zombi_first_activation_total_mean > 0.0
                   ? zombi_last_activation_total_mean / zombi_first_activation_total_mean
                   : 0.0;
    }
};

inline TimingReport compute_timing_report(const RunTrace& zombi_trace, const RunTrace& plain_trace) {
    TimingReport rep;
    rep.zombi_evaluations = zombi_trace.evaluations();
    rep.plain_evaluations = plain_trace.evaluations();
    for (const auto& r : zombi_trace.records) rep.zombi_max_train_n = std::max(rep.zombi_max_train_n, r.surrogate_n);
    for (const auto& r : plain_trace.records) rep.plain_max_train_n = std::max(rep.plain_max_train_n, r.surrogate_n);

    const auto plain = forward_timings(plain_trace);
    rep.plain_fit_decile_ratio = decile_ratio(plain.fit_ms);
    rep.plain_total_decile_ratio = decile_ratio(plain.total_ms);

    const auto zt = forward_timings(zombi_trace);
    if (!zt.activation.empty()) {
        const std::size_t first = zt.activation.front(), last = zt.activation.back();
        rep.zombi_first_activation_fit_mean = mean_of(activation_slice(zt, zt.fit_ms, first));
        rep.zombi_last_activation_fit_mean = mean_of(activation_slice(zt, zt.fit_ms, last));
        rep.zombi_first_activation_total_mean = mean_of(activation_slice(zt, zt.total_ms, first));
        const auto last_total = activation_slice(zt, zt.total_ms, last);
        rep.zombi_last_activation_total_mean = mean_of(last_total);
        rep.zombi_sawtooth_max_ms = *std::max_element(last_total.begin(), last_total.end());
        if (!plain.total_ms.empty() && zt.total_ms.back() > 0.0)
            rep.final_speedup = plain.total_ms.back() / zt.total_ms.back();
    }
    return rep;
}

inline nlohmann::ordered_json timing_json(const TimingReport& r) {
    nlohmann::ordered_json j;
    j["zombi_evaluations"] = r.zombi_evaluations;
    j["plain_bo_evaluations"] = r.plain_evaluations;
    j["zombi_max_train_n"] = r.zombi_max_train_n;
    j["plain_bo_max_train_n"] = r.plain_max_train_n;
    j["plain_bo_time_ratio"] = r.plain_total_decile_ratio;
    j["plain_bo_fit_time_ratio"] = r.plain_fit_decile_ratio;
    j["zombi_first_activation_mean_ms"] = r.zombi_first_activation_total_mean;
    j["zombi_last_activation_mean_ms"] = r.zombi_last_activation_total_mean;
    j["zombi_activation_time_ratio"] = r.zombi_activation_total_ratio();
    j["zombi_activation_fit_time_ratio"] = r.zombi_activation_fit_ratio();
    j["zombi_sawtooth_max_ms"] = r.zombi_sawtooth_max_ms;
    j["final_speedup"] = r.final_speedup;
    return j;
}

/// Header: iteration,mode,fit_ms,acq_ms (acquisition-driven steps only).
inline void write_timing_csv(std::ostream& out, const RunTrace& zombi_trace, const RunTrace& plain_trace) {
    out << "iteration,mode,fit_ms,acq_ms\n";
    for (const RunTrace* t : {&zombi_trace, &plain_trace})
        for (const auto& r : t->records)
            if (r.kind == SampleKind::forward)
                out << r.iteration << ',' << to_string(t->mode) << ',' << detail::fmt_ms(r.fit_ms) << ','
                    << detail::fmt_ms(r.acq_ms) << '\n';
}

struct SweepRow {
    double bandwidth = 0.0;
    AcqKind acquisition = AcqKind::lcb_adaptive;
    std::size_t runs = 0;
    double median_best_y = 0.0;
    double smoothed_min = 0.0;  // lowest smoothed value over the best dataset rows
};

/// Lowest smoothed value found at the `probe` dataset rows with the best raw targets.
inline double smoothed_minimum(const Objective& smoothed, const TabularDataset& ds, std::size_t probe = 256) {
    const double sign = sense_sign(ds.sense);
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    probe = std::min(probe, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(probe), order.end(),
                      [&](auto a, auto b) { return sign * ds.targets[a] < sign * ds.targets[b]; });
    double best = sign * smoothed(ds.features[order[0]]);
    for (std::size_t k = 1; k < probe; ++k) best = std::min(best, sign * smoothed(ds.features[order[k]]));
    return best * sign;
}

/// For each bandwidth and acquisition kind, an ensemble of ZoMBI runs on the
/// smoothed dataset. `base` supplies budget, seed and engine settings; its
/// bounds and sense are taken from the dataset.
inline std::vector<SweepRow> run_smooth_sweep(const InterpolatedManifold& manifold, std::span<const double> bandwidths,
                                              std::span<const AcqKind> kinds, std::size_t runs, ZombiConfig base,
                                              std::size_t threads = 1) {
    const auto& ds = manifold.dataset();
    base.bounds = ds.ranges;
    base.sense = ds.sense;
    std::vector<SweepRow> rows;
    for (double bw : bandwidths) {
        const Objective smoothed = gaussian_smooth(manifold, bw);
        const double floor = smoothed_minimum(smoothed, ds);
        for (AcqKind kind : kinds) {
            ZombiConfig c = base;
            c.acquisition = kind;
            c.hyper = AcqHyperparams::defaults_for(kind);
            const auto result = run_ensemble(smoothed, c, runs, RunMode::zombi, threads);
            rows.push_back({bw, kind, runs, result.median_final_best(), floor});
        }
    }
    return rows;
}

/// Header: bandwidth,acquisition,runs,median_best_y,smoothed_min
inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "bandwidth,acquisition,runs,median_best_y,smoothed_min\n";
    for (const auto& r : rows)
        out << detail::fmt_real(r.bandwidth) << ',' << to_string(r.acquisition) << ',' << r.runs << ','
            << detail::fmt_real(r.median_best_y) << ',' << detail::fmt_real(r.smoothed_min) << '\n';
}

}  // namespace zombi

#pragma once

// Serialization of run traces: one CSV row per evaluation, a JSON run
// summary, and the ensemble envelope. Values are written in problem units.

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "zombi/engine.hpp"

namespace zombi {

namespace detail {

inline std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_ms(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace detail

/// Header: iteration,activation,x1..xd,y,best_y,surrogate_n,fit_ms,acq_ms
inline void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    const std::size_t dim = trace.records.empty() ? 0 : trace.records.front().x.size();
    out << "iteration,activation";
    for (std::size_t d = 0; d < dim; ++d) out << ",x" << d + 1;
    out << ",y,best_y,surrogate_n,fit_ms,acq_ms\n";
    const double sign = sense_sign(trace.sense);
    for (const auto& r : trace.records) {
        out << r.iteration << ',' << r.activation;
        for (double v : r.x) out << ',' << detail::fmt_real(v);
        out << ',' << detail::fmt_real(r.y * sign) << ',' << detail::fmt_real(r.best_y * sign) << ','
            << r.surrogate_n << ',' << detail::fmt_ms(r.fit_ms) << ',' << detail::fmt_ms(r.acq_ms) << '\n';
    }
}

inline nlohmann::ordered_json config_json(const ZombiConfig& c) {
    nlohmann::ordered_json j;
    j["activations"] = c.activations;
    j["phi"] = c.forward_per_activation;
    j["init"] = c.init_per_activation;
    j["memory"] = c.memory;
    j["initial_global_samples"] = c.initial_global_samples;
    j["candidates"] = c.candidates_per_step;
    j["max_evaluations"] = c.max_evaluations;
    j["epsilon_expand"] = c.epsilon_expand;
    j["acquisition"] = std::string(to_string(c.acquisition));
    j["beta"] = c.hyper.beta;
    j["xi"] = c.hyper.xi;
    j["epsilon"] = c.hyper.epsilon;
    j["eta"] = c.hyper.eta;
    j["seed"] = c.seed;
    j["sense"] = c.sense == ObjectiveSense::minimize ? "min" : "max";
    j["lower"] = c.bounds.lower.coords();
    j["upper"] = c.bounds.upper.coords();
    return j;
}

inline nlohmann::ordered_json summary_json(const RunTrace& trace, const ZombiConfig& config) {
    nlohmann::ordered_json j;
    j["mode"] = std::string(to_string(trace.mode));
    j["best_x"] = trace.best.x.coords();
    j["best_y"] = trace.best_value();
    j["best_iteration"] = trace.best.iteration;
    j["total_evaluations"] = trace.evaluations();
    j["total_seconds"] = trace.total_seconds;
    j["config"] = config_json(config);
    return j;
}

/// Header: iteration,median_best_y,min_best_y,max_best_y
inline void write_envelope_csv(std::ostream& out, const EnsembleResult& result) {
    out << "iteration,median_best_y,min_best_y,max_best_y\n";
    for (std::size_t it = 0; it < result.best_curve.size(); ++it) {
        const auto& p = result.best_curve[it];
        out << it << ',' << detail::fmt_real(p.median) << ',' << detail::fmt_real(p.min) << ','
            << detail::fmt_real(p.max) << '\n';
    }
}

}  // namespace zombi

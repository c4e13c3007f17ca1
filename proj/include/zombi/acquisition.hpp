#pragma once

// Acquisition functions. Everything runs as minimization and every function
// returns a value where larger is better, so the next experiment is always
// the argmax over the candidate set.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zombi/core.hpp"
#include "zombi/surrogate.hpp"

namespace zombi {

enum class AcqKind { ei, lcb, ei_abrupt, lcb_adaptive };

inline std::string_view to_string(AcqKind k) noexcept {
    switch (k) {
        case AcqKind::ei: return "ei";
        case AcqKind::lcb: return "lcb";
        case AcqKind::ei_abrupt: return "ei-abrupt";
        case AcqKind::lcb_adaptive: return "lcb-adaptive";
    }
    return "?";
}

inline std::optional<AcqKind> parse_acq_kind(std::string_view s) noexcept {
    for (AcqKind k : {AcqKind::ei, AcqKind::lcb, AcqKind::ei_abrupt, AcqKind::lcb_adaptive})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

inline constexpr std::array<AcqKind, 4> kAllAcqKinds = {AcqKind::ei, AcqKind::lcb, AcqKind::ei_abrupt,
                                                        AcqKind::lcb_adaptive};

struct AcqHyperparams {
    double beta = 3.0;
    double xi = 0.1;
    double epsilon = 0.9;
    double eta = 0.0;

    static AcqHyperparams defaults_for(AcqKind kind) noexcept {
        switch (kind) {
            case AcqKind::ei: return {3.0, 0.1, 0.9, 0.0};
            case AcqKind::lcb: return {3.0, 0.1, 0.9, 0.0};
            case AcqKind::ei_abrupt: return {0.1, 0.1, 0.9, 0.0};
            case AcqKind::lcb_adaptive: return {3.0, 0.1, 0.9, 0.0};
        }
        return {};
    }

    void validate() const {
        if (!(beta >= 0.0) || !(xi >= 0.0) || !(eta >= 0.0))
            throw Error("acquisition hyperparameters beta, xi, eta must be >= 0");
        if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error("acquisition epsilon must lie in (0, 1]");
    }
};

struct AcqContext {
    double incumbent = 0.0;               // y*, minimum over the current memory
    std::size_t forward_count = 0;        // n, forward experiments so far in the run
    std::vector<double> recent_y;         // last measured y values, oldest first
};

/// Which branch of EI Abrupt produced a value; `none` for the other kinds.
enum class AcqBranch { none, greedy, explore };

inline std::string_view to_string(AcqBranch b) noexcept {
    switch (b) {
        case AcqBranch::none: return "none";
        case AcqBranch::greedy: return "greedy";
        case AcqBranch::explore: return "ei";
    }
    return "?";
}

inline double normal_pdf(double z) noexcept {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Expected improvement below y* - xi.
inline double acq_ei(const Posterior& post, const AcqContext& ctx, const AcqHyperparams& h) {
    const double improvement = ctx.incumbent - post.mean - h.xi;
    if (!(post.stdev > 0.0)) return std::max(improvement, 0.0);
    const double z = improvement / post.stdev;
    return std::max(improvement * normal_cdf(z) + post.stdev * normal_pdf(z), 0.0);
}

inline double acq_lcb(const Posterior& post, const AcqHyperparams& h) {
    return -post.mean + h.beta * post.stdev;
}

/// True when the last three values moved by at most eta between steps.
inline bool plateau_detected(std::span<const double> recent_y, double eta) noexcept {
    if (recent_y.size() < 3) return false;
    const auto tail = recent_y.last(3);
    return std::max(std::abs(tail[1] - tail[0]), std::abs(tail[2] - tail[1])) <= eta;
}

inline AcqBranch ei_abrupt_branch(const AcqContext& ctx, const AcqHyperparams& h) noexcept {
    return plateau_detected(ctx.recent_y, h.eta) ? AcqBranch::explore : AcqBranch::greedy;
}

inline double acq_ei_abrupt(const Posterior& post, const AcqContext& ctx, const AcqHyperparams& h) {
    if (ei_abrupt_branch(ctx, h) == AcqBranch::explore) return acq_ei(post, ctx, h);
    return -post.mean + h.beta * post.stdev;
}

/// beta * epsilon^n, the decayed exploration weight.
inline double lcb_adaptive_weight(std::size_t n, const AcqHyperparams& h) {
    return h.beta * std::pow(h.epsilon, static_cast<double>(n));
}

inline double acq_lcb_adaptive(const Posterior& post, const AcqContext& ctx, const AcqHyperparams& h) {
    return -post.mean + lcb_adaptive_weight(ctx.forward_count, h) * post.stdev;
}

inline double acquisition_value(AcqKind kind, const Posterior& post, const AcqContext& ctx,
                                const AcqHyperparams& h) {
    switch (kind) {
        case AcqKind::ei: return acq_ei(post, ctx, h);
        case AcqKind::lcb: return acq_lcb(post, h);
        case AcqKind::ei_abrupt: return acq_ei_abrupt(post, ctx, h);
        case AcqKind::lcb_adaptive: return acq_lcb_adaptive(post, ctx, h);
    }
    return 0.0;
}

/// Weight on sigma for the confidence-bound kinds, 0 for EI-type branches.
inline double exploration_weight(AcqKind kind, const AcqContext& ctx, const AcqHyperparams& h) {
    switch (kind) {
        case AcqKind::lcb: return h.beta;
        case AcqKind::lcb_adaptive: return lcb_adaptive_weight(ctx.forward_count, h);
        case AcqKind::ei_abrupt: return ei_abrupt_branch(ctx, h) == AcqBranch::greedy ? h.beta : 0.0;
        case AcqKind::ei: return 0.0;
    }
    return 0.0;
}

struct AcqChoice {
    std::size_t index = 0;
    double value = 0.0;
    AcqBranch branch = AcqBranch::none;
};

/// Index of the first maximizer of the values (lowest index wins ties).
inline std::size_t first_argmax(std::span<const double> values) {
    if (values.empty()) throw Error("argmax over an empty set");
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] > values[best]) best = k;
    return best;
}

inline AcqChoice argmax_acquisition(std::span<const Point> candidates, const GpModel& model, AcqKind kind,
                                    const AcqContext& ctx, const AcqHyperparams& h) {
    if (candidates.empty()) throw Error("argmax_acquisition: no candidates");
    const auto posts = predict_batch(model, candidates);
    std::vector<double> values(posts.size());
    for (std::size_t k = 0; k < posts.size(); ++k) values[k] = acquisition_value(kind, posts[k], ctx, h);
    AcqChoice choice;
    choice.index = first_argmax(values);
    choice.value = values[choice.index];
    if (kind == AcqKind::ei_abrupt) choice.branch = ei_abrupt_branch(ctx, h);
    return choice;
}

}  // namespace zombi

#pragma once

// Exact Gaussian-process regression with an isotropic squared-exponential
// kernel. Inputs are min-max normalized to the bounds the model is fit in
// and targets are standardized per fit, so kernel hyperparameters stay
// scale-free as the search window shrinks.

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "zombi/core.hpp"

namespace zombi {

struct KernelParams {
    double length_scale = 0.2;
    double signal_variance = 1.0;
    double noise_variance = 1e-6;  // nugget

    static constexpr double min_nugget = 1e-8;
    static constexpr double max_nugget = 1e-2;
};

struct Posterior {
    double mean = 0.0;
    double stdev = 0.0;
    bool extrapolated = false;  // query lay outside the fit bounds
};

inline double kernel_eval(const Point& a, const Point& b, const KernelParams& params) {
    if (a.size() != b.size()) throw Error("kernel_eval: dimension mismatch");
    double sq = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sq += diff * diff;
    }
    return params.signal_variance * std::exp(-sq / (2.0 * params.length_scale * params.length_scale));
}

class GpModel {
public:
    const Bounds& bounds() const noexcept { return bounds_; }
    const KernelParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(x_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(x_.cols()); }

    /// Normalized training inputs, one row per sample.
    const Eigen::MatrixXd& train_x() const noexcept { return x_; }
    /// Standardized training targets.
    const Eigen::VectorXd& train_y() const noexcept { return y_; }
    const Eigen::MatrixXd& chol() const noexcept { return chol_; }
    const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
    double y_mean() const noexcept { return y_mean_; }
    double y_scale() const noexcept { return y_scale_; }
    double fit_ms() const noexcept { return fit_ms_; }

    Eigen::VectorXd normalize(const Point& x) const {
        Eigen::VectorXd z(static_cast<Eigen::Index>(x.size()));
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double w = bounds_.width(d);
            z[static_cast<Eigen::Index>(d)] = w > 0.0 ? (x[d] - bounds_.lower[d]) / w : 0.0;
        }
        return z;
    }

    /// Gram matrix K(A, B) over normalized rows.
    Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
        const double inv = 1.0 / (2.0 * params_.length_scale * params_.length_scale);
        Eigen::MatrixXd k(a.rows(), b.rows());
        for (Eigen::Index j = 0; j < b.rows(); ++j)
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                k(i, j) = params_.signal_variance * std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv);
        return k;
    }

private:
    friend GpModel fit_gp(std::span<const Point>, std::span<const double>, const Bounds&, KernelParams);

    Bounds bounds_;
    KernelParams params_;
    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd alpha_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    double fit_ms_ = 0.0;
};

/// Fits the GP. On Cholesky failure the nugget is escalated by x10 up to
/// KernelParams::max_nugget before giving up.
inline GpModel fit_gp(std::span<const Point> x, std::span<const double> y, const Bounds& bounds,
                      KernelParams params) {
    const auto start = std::chrono::steady_clock::now();
    if (x.empty() || x.size() != y.size()) throw Error("fit_gp: need matching, non-empty x and y");
    if (!(params.length_scale > 0.0) || !(params.signal_variance > 0.0))
        throw Error("fit_gp: kernel parameters must be positive");
    params.noise_variance = std::max(params.noise_variance, KernelParams::min_nugget);

    const auto n = static_cast<Eigen::Index>(x.size());
    const auto dim = static_cast<Eigen::Index>(bounds.dim());

    GpModel model;
    model.bounds_ = bounds;
    model.params_ = params;
    model.x_.resize(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (x[static_cast<std::size_t>(i)].size() != bounds.dim()) throw Error("fit_gp: dimension mismatch");
        model.x_.row(i) = model.normalize(x[static_cast<std::size_t>(i)]).transpose();
    }

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    model.y_mean_ = mean;
    model.y_scale_ = sd > 0.0 ? sd : 1.0;
    model.y_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        model.y_[i] = sd > 0.0 ? (y[static_cast<std::size_t>(i)] - mean) / sd : 0.0;

    const Eigen::MatrixXd gram = model.cross_kernel(model.x_, model.x_);
    for (;;) {
        Eigen::MatrixXd k = gram;
        k.diagonal().array() += model.params_.noise_variance;
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() == Eigen::Success) {
            model.chol_ = llt.matrixL();
            model.alpha_ = llt.solve(model.y_);
            break;
        }
        if (model.params_.noise_variance >= KernelParams::max_nugget)
            throw Error("ill-conditioned kernel matrix");
        model.params_.noise_variance = std::min(model.params_.noise_variance * 10.0, KernelParams::max_nugget);
    }

    model.fit_ms_ =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return model;
}

/// Posterior of the latent function at every query, in original y units.
inline std::vector<Posterior> predict_batch(const GpModel& model, std::span<const Point> queries) {
    std::vector<Posterior> out(queries.size());
    if (queries.empty()) return out;

    Eigen::MatrixXd q(static_cast<Eigen::Index>(queries.size()), static_cast<Eigen::Index>(model.dim()));
    for (std::size_t j = 0; j < queries.size(); ++j) {
        q.row(static_cast<Eigen::Index>(j)) = model.normalize(queries[j]).transpose();
        out[j].extrapolated = !contains(model.bounds(), queries[j]);
    }
    const Eigen::MatrixXd k_star = model.cross_kernel(model.train_x(), q);  // n x m
    const Eigen::VectorXd mean = k_star.transpose() * model.alpha();
    const Eigen::MatrixXd v = model.chol().triangularView<Eigen::Lower>().solve(k_star);
    const double prior = model.params().signal_variance;
    for (std::size_t j = 0; j < queries.size(); ++j) {
        const auto c = static_cast<Eigen::Index>(j);
        const double var = std::max(prior - v.col(c).squaredNorm(), 0.0);
        out[j].mean = mean[c] * model.y_scale() + model.y_mean();
        out[j].stdev = std::sqrt(var) * model.y_scale();
    }
    return out;
}

inline Posterior predict(const GpModel& model, const Point& x) {
    return predict_batch(model, std::span<const Point>(&x, 1)).front();
}

inline double log_marginal_likelihood(const GpModel& model) {
    const auto n = static_cast<double>(model.size());
    return -0.5 * model.train_y().dot(model.alpha()) - model.chol().diagonal().array().log().sum() -
           0.5 * n * std::log(2.0 * std::numbers::pi);
}

inline constexpr double kLengthScaleGrid[] = {0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
inline constexpr double kNuggetGrid[] = {1e-6, 1e-4, 1e-2};

/// Grid search on log marginal likelihood; returns the best fitted model.
/// Fewer than two points fall back to the default parameters.
inline GpModel fit_gp_selected(std::span<const Point> x, std::span<const double> y, const Bounds& bounds) {
    if (x.size() < 2) return fit_gp(x, y, bounds, KernelParams{});

    std::optional<GpModel> best;
    double best_lml = -std::numeric_limits<double>::infinity();
    for (double length : kLengthScaleGrid) {
        for (double nugget : kNuggetGrid) {
            try {
                GpModel m = fit_gp(x, y, bounds, {length, 1.0, nugget});
                const double lml = log_marginal_likelihood(m);
                if (!best || lml > best_lml) {
                    best_lml = lml;
                    best = std::move(m);
                }
            } catch (const Error&) {
                // Skip combinations that stay singular after escalation.
            }
        }
    }
    if (!best) throw Error("ill-conditioned kernel matrix");
    return std::move(*best);
}

inline KernelParams select_hyperparameters(std::span<const Point> x, std::span<const double> y,
                                           const Bounds& bounds) {
    if (x.size() < 2) return KernelParams{};
    return fit_gp_selected(x, y, bounds).params();
}

}  // namespace zombi

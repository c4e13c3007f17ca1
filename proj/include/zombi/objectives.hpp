#pragma once

// Benchmark objectives: the Ackley needle, tabular datasets continuized by
// an interpolator, Gaussian smoothing of a dataset, a planted-needle dataset
// generator, and the thermoelectric figure of merit.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "zombi/core.hpp"
#include "zombi/regression_forest.hpp"
#include "zombi/sampling.hpp"

namespace zombi {

struct AckleyParams {
    double a = 20.0;
    double b = 0.2;
    double c = 2.0 * std::numbers::pi;
    double scale = 1.0;  // > 1 narrows the basin around the origin
};

/// Ackley function on scale*x. Written so that ackley(0) is exactly 0.
inline double ackley(const Point& x, const AckleyParams& p = {}) {
    if (x.size() == 0) throw Error("ackley: empty point");
    double sq = 0.0, cs = 0.0;
    for (double v : x) {
        const double s = v * p.scale;
        sq += s * s;
        cs += std::cos(p.c * s);
    }
    const double n = static_cast<double>(x.size());
    return p.a * (1.0 - std::exp(-p.b * std::sqrt(sq / n))) + (std::numbers::e - std::exp(cs / n));
}

inline double compute_zt(double seebeck, double elec_conductivity, double thermal_conductivity,
                         double temperature) {
    if (!(elec_conductivity > 0.0)) throw Error("compute_zt: electrical conductivity must be positive");
    if (!(thermal_conductivity > 0.0)) throw Error("compute_zt: thermal conductivity must be positive");
    if (!(temperature > 0.0)) throw Error("compute_zt: temperature must be positive");
    return seebeck * seebeck * elec_conductivity * temperature / thermal_conductivity;
}

struct TabularDataset {
    std::vector<std::string> feature_names;
    std::string target_name;
    std::vector<Point> features;
    std::vector<double> targets;  // problem units
    ObjectiveSense sense = ObjectiveSense::minimize;
    Bounds ranges;                // per-column min/max
    std::size_t dropped_rows = 0;

    std::size_t size() const noexcept { return targets.size(); }
    std::size_t dim() const noexcept { return feature_names.size(); }

    void refresh_ranges() {
        if (features.empty()) throw Error("dataset has no rows");
        Point lo = features.front(), hi = features.front();
        for (const auto& row : features)
            for (std::size_t d = 0; d < row.size(); ++d) {
                lo[d] = std::min(lo[d], row[d]);
                hi[d] = std::max(hi[d], row[d]);
            }
        ranges = Bounds(std::move(lo), std::move(hi));
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

inline bool parse_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Reads a comma-separated file with a header row. Every column except the
/// target whose cells are mostly numeric becomes a feature, in header order;
/// other columns (identifiers, formulas) are ignored. Rows with a missing or
/// unparseable value in a used column are dropped and counted.
inline TabularDataset load_csv(std::istream& in, const std::string& target_column, ObjectiveSense sense) {
    std::string header;
    if (!std::getline(in, header) || detail::trim(header).empty()) throw Error("csv: empty file");
    if (header.starts_with("\xEF\xBB\xBF")) header.erase(0, 3);
    std::vector<std::string> names;
    for (auto c : detail::split_csv_line(header)) names.emplace_back(c);

    const auto target_it = std::find(names.begin(), names.end(), target_column);
    if (target_it == names.end()) throw Error("csv: target column '" + target_column + "' not found");
    const std::size_t target_col = static_cast<std::size_t>(target_it - names.begin());

    std::vector<std::vector<std::string>> raw;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> row;
        for (auto c : detail::split_csv_line(line)) row.emplace_back(c);
        raw.push_back(std::move(row));
    }
    if (raw.empty()) throw Error("csv: no data rows");

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c == target_col) continue;
        std::size_t numeric = 0, filled = 0;
        for (const auto& row : raw) {
            if (c >= row.size() || row[c].empty()) continue;
            ++filled;
            double v;
            numeric += detail::parse_number(row[c], v);
        }
        if (filled > 0 && 2 * numeric >= filled) feature_cols.push_back(c);
    }
    if (feature_cols.empty()) throw Error("csv: no numeric feature columns");

    TabularDataset ds;
    ds.target_name = target_column;
    ds.sense = sense;
    for (auto c : feature_cols) ds.feature_names.push_back(names[c]);
    for (const auto& row : raw) {
        double y;
        if (row.size() != names.size() || !detail::parse_number(row[target_col], y)) {
            ++ds.dropped_rows;
            continue;
        }
        Point x(feature_cols.size());
        bool ok = true;
        for (std::size_t k = 0; k < feature_cols.size() && ok; ++k) ok = detail::parse_number(row[feature_cols[k]], x[k]);
        if (!ok) {
            ++ds.dropped_rows;
            continue;
        }
        ds.features.push_back(std::move(x));
        ds.targets.push_back(y);
    }
    if (ds.targets.empty()) throw Error("csv: zero valid rows");
    ds.refresh_ranges();
    return ds;
}

inline TabularDataset load_csv(const std::string& path, const std::string& target_column, ObjectiveSense sense) {
    std::ifstream in(path);
    if (!in) throw Error("csv: cannot open '" + path + "'");
    return load_csv(in, target_column, sense);
}

inline void write_csv(std::ostream& out, const TabularDataset& ds) {
    for (const auto& n : ds.feature_names) out << n << ',';
    out << ds.target_name << '\n';
    char buf[32];
    auto put = [&](double v) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, p - buf);
    };
    for (std::size_t r = 0; r < ds.size(); ++r) {
        for (double v : ds.features[r]) {
            put(v);
            out << ',';
        }
        put(ds.targets[r]);
        out << '\n';
    }
}

enum class InterpolatorKind { knn_idw, bagged_trees };

/// A tabular dataset turned into a function defined on its whole feature box.
/// Distances are taken on range-normalized coordinates.
class InterpolatedManifold {
public:
    static InterpolatedManifold knn_idw(TabularDataset ds, std::size_t k = 8) {
        if (k == 0) throw Error("knn_idw: k must be positive");
        InterpolatedManifold m(std::move(ds));
        m.kind_ = InterpolatorKind::knn_idw;
        m.k_ = std::min(k, m.ds_->size());
        return m;
    }

    static InterpolatedManifold bagged_trees(TabularDataset ds, ForestParams params = {}, std::uint64_t seed = 0) {
        InterpolatedManifold m(std::move(ds));
        m.kind_ = InterpolatorKind::bagged_trees;
        m.forest_ = std::make_shared<const RegressionForest>(m.normalized_, m.ds_->targets, m.ds_->dim(), params, seed);
        return m;
    }

    InterpolatorKind kind() const noexcept { return kind_; }
    const TabularDataset& dataset() const noexcept { return *ds_; }
    std::size_t neighbors() const noexcept { return k_; }

    std::vector<double> normalize(const Point& x) const {
        if (x.size() != ds_->dim()) throw Error("manifold: dimension mismatch");
        std::vector<double> z(x.size());
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double w = ds_->ranges.width(d);
            z[d] = w > 0.0 ? (x[d] - ds_->ranges.lower[d]) / w : 0.0;
        }
        return z;
    }

    /// Squared normalized distance from z to every dataset row.
    std::vector<double> squared_distances(std::span<const double> z) const {
        const std::size_t dim = ds_->dim();
        std::vector<double> out(ds_->size());
        for (std::size_t r = 0; r < out.size(); ++r) {
            double s = 0.0;
            const double* row = normalized_.data() + r * dim;
            for (std::size_t d = 0; d < dim; ++d) s += (z[d] - row[d]) * (z[d] - row[d]);
            out[r] = s;
        }
        return out;
    }

    double operator()(const Point& x) const {
        const auto z = normalize(x);
        if (kind_ == InterpolatorKind::bagged_trees) return forest_->predict(z);

        const auto dist = squared_distances(z);
        std::vector<std::size_t> order(dist.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto closer = [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_), order.end(), closer);
        if (dist[order[0]] == 0.0) return ds_->targets[order[0]];
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < k_; ++j) {
            const double w = 1.0 / dist[order[j]];
            num += w * ds_->targets[order[j]];
            den += w;
        }
        return num / den;
    }

private:
    explicit InterpolatedManifold(TabularDataset ds)
        : ds_(std::make_shared<const TabularDataset>(std::move(ds))) {
        if (ds_->size() == 0 || ds_->dim() == 0) throw Error("manifold: dataset is empty");
        normalized_.reserve(ds_->size() * ds_->dim());
        for (const auto& row : ds_->features) {
            const auto z = normalize(row);
            normalized_.insert(normalized_.end(), z.begin(), z.end());
        }
    }

    std::shared_ptr<const TabularDataset> ds_;
    std::vector<double> normalized_;  // row-major, shared by both interpolators
    InterpolatorKind kind_ = InterpolatorKind::knn_idw;
    std::size_t k_ = 8;
    std::shared_ptr<const RegressionForest> forest_;
};

inline double manifold_eval(const InterpolatedManifold& m, const Point& x) { return m(x); }

/// Nadaraya-Watson average of the dataset targets under a Gaussian kernel of
/// the given bandwidth (normalized units). Larger bandwidths widen basins.
inline Objective gaussian_smooth(const InterpolatedManifold& m, double bandwidth) {
    if (!(bandwidth > 0.0)) throw Error("gaussian_smooth: bandwidth must be positive");
    return [m, bandwidth](const Point& x) {
        const auto dist = m.squared_distances(m.normalize(x));
        const double nearest = *std::min_element(dist.begin(), dist.end());
        const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
        const auto& targets = m.dataset().targets;
        double num = 0.0, den = 0.0;
        for (std::size_t r = 0; r < dist.size(); ++r) {
            const double w = std::exp(-(dist[r] - nearest) * inv);
            num += w * targets[r];
            den += w;
        }
        return num / den;
    };
}

struct PlantedNeedle {
    TabularDataset dataset;
    Point center;
    double radius = 0.02;
    std::size_t needle_rows = 0;
};

/// Funnel toward `center` with a cosine ripple (period 0.5 per axis) that
/// leaves a lattice of local minima. Lies in [0, 1] and is zero at the center.
inline double needle_background(const Point& x, const Point& center) {
    const double dim = static_cast<double>(x.size());
    double sq = 0.0, ripple = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double u = x[d] - center[d];
        sq += u * u;
        ripple += std::cos(2.0 * std::numbers::pi * 2.0 * u);
    }
    const double funnel = std::min(1.0, std::sqrt(sq / dim) / 0.5);
    return 0.8 * funnel + 0.2 * 0.5 * (1.0 - ripple / dim);
}

/// Synthetic needle-in-a-haystack dataset on [0, 1]^d. Background rows lie
/// in [0, 1]; ceil(fraction * rows) rows sit inside a ball of radius 0.02
/// with targets falling linearly from 0 at the rim to `depth` at the center,
/// one of them exactly at the center. Needle radii are radius * u^1.5, so
/// rows thicken toward the center.
inline PlantedNeedle plant_needle(std::size_t dim, std::size_t n_rows, double needle_fraction, double needle_depth,
                                  std::uint64_t seed) {
    if (dim == 0 || n_rows == 0) throw Error("plant_needle: dimension and row count must be positive");
    if (!(needle_fraction > 0.0 && needle_fraction < 0.05))
        throw Error("plant_needle: needle_fraction must lie in (0, 0.05)");
    if (!(needle_depth < 0.0)) throw Error("plant_needle: needle_depth must be negative");
    const double expected = needle_fraction * static_cast<double>(n_rows);
    if (expected < 1.0) throw Error("needle would be empty");
    const auto count = static_cast<std::size_t>(std::ceil(expected - 1e-9));

    Rng rng(seed);
    PlantedNeedle out;
    out.needle_rows = count;
    out.center = Point(dim);
    for (std::size_t d = 0; d < dim; ++d) out.center[d] = rng.uniform(0.25, 0.75);

    auto& ds = out.dataset;
    ds.sense = ObjectiveSense::minimize;
    ds.target_name = "target";
    for (std::size_t d = 0; d < dim; ++d) ds.feature_names.push_back("x" + std::to_string(d + 1));
    ds.features.reserve(n_rows);
    ds.targets.reserve(n_rows);

    ds.features.push_back(out.center);
    ds.targets.push_back(needle_depth);
    for (std::size_t k = 1; k < count; ++k) {
        Point dir(dim);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                dir[d] = rng.normal();
                norm += dir[d] * dir[d];
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        const double r = out.radius * std::pow(rng.uniform(), 1.5);
        Point x(dim);
        for (std::size_t d = 0; d < dim; ++d) x[d] = out.center[d] + r * dir[d] / norm;
        ds.features.push_back(std::move(x));
        ds.targets.push_back(needle_depth * (1.0 - r / out.radius));
    }
    while (ds.features.size() < n_rows) {
        Point x(dim);
        for (std::size_t d = 0; d < dim; ++d) x[d] = rng.uniform();
        ds.targets.push_back(needle_background(x, out.center));
        ds.features.push_back(std::move(x));
    }
    ds.refresh_ranges();
    return out;
}

}  // namespace zombi

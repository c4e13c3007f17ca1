#pragma once

// Domain types shared across the library plus the memory-selection and
// zooming-bounds computations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace zombi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A design point in problem units.
class Point {
public:
    Point() = default;
    explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
    Point(std::initializer_list<double> coords) : coords_(coords) {}
    explicit Point(std::size_t dim, double fill = 0.0) : coords_(dim, fill) {}

    std::size_t size() const noexcept { return coords_.size(); }
    double operator[](std::size_t d) const { return coords_[d]; }
    double& operator[](std::size_t d) { return coords_[d]; }

    auto begin() const noexcept { return coords_.begin(); }
    auto end() const noexcept { return coords_.end(); }

    std::span<const double> view() const noexcept { return coords_; }
    const std::vector<double>& coords() const noexcept { return coords_; }

    bool finite() const noexcept {
        return std::all_of(coords_.begin(), coords_.end(),
                           [](double v) { return std::isfinite(v); });
    }

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::vector<double> coords_;
};

inline std::string to_string(const Point& x) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t d = 0; d < x.size(); ++d) {
        if (d) os << ", ";
        os << x[d];
    }
    os << ')';
    return os.str();
}

struct EvaluatedSample {
    Point x;
    double y = 0.0;              // minimization convention
    std::size_t iteration = 0;
    std::size_t activation = 0;
};

struct Bounds {
    Point lower;
    Point upper;

    Bounds() = default;
    Bounds(Point lo, Point hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size() || lower.size() == 0)
            throw Error("bounds: lower/upper dimensionality mismatch or empty");
        for (std::size_t d = 0; d < lower.size(); ++d)
            if (!(lower[d] <= upper[d]))
                throw Error("bounds: lower exceeds upper in dimension " + std::to_string(d));
    }

    static Bounds cube(std::size_t dim, double lo, double hi) {
        return {Point(dim, lo), Point(dim, hi)};
    }

    std::size_t dim() const noexcept { return lower.size(); }
    double width(std::size_t d) const { return upper[d] - lower[d]; }

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Black-box objective in problem units. The engine applies ObjectiveSense.
using Objective = std::function<double(const Point&)>;

enum class ObjectiveSense { minimize, maximize };

/// Sign applied at the objective boundary; everything inside runs as minimization.
inline double sense_sign(ObjectiveSense s) noexcept {
    return s == ObjectiveSense::maximize ? -1.0 : 1.0;
}

inline bool contains(const Bounds& bounds, const Point& x) {
    if (x.size() != bounds.dim())
        throw Error("contains: dimension mismatch (point " + std::to_string(x.size()) +
                    ", bounds " + std::to_string(bounds.dim()) + ")");
    for (std::size_t d = 0; d < x.size(); ++d)
        if (x[d] < bounds.lower[d] || x[d] > bounds.upper[d]) return false;
    return true;
}

/// Inner bounds lie inside outer bounds in every dimension.
inline bool nested_in(const Bounds& inner, const Bounds& outer) {
    if (inner.dim() != outer.dim()) return false;
    for (std::size_t d = 0; d < inner.dim(); ++d)
        if (inner.lower[d] < outer.lower[d] || inner.upper[d] > outer.upper[d]) return false;
    return true;
}

/// The m best samples by y (ascending). Samples sharing a y value are
/// collapsed to the earliest iteration before ranking.
inline std::vector<EvaluatedSample> select_memory(std::span<const EvaluatedSample> history,
                                                  std::size_t m) {
    if (history.empty()) throw Error("no memory to select from");
    if (m == 0) throw Error("select_memory: m must be positive");

    std::vector<EvaluatedSample> sorted(history.begin(), history.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.y != b.y) return a.y < b.y;
        return a.iteration < b.iteration;
    });
    auto last = std::unique(sorted.begin(), sorted.end(),
                            [](const auto& a, const auto& b) { return a.y == b.y; });
    sorted.erase(last, sorted.end());
    if (sorted.size() > m) sorted.resize(m);
    return sorted;
}

/// Per-dimension min/max box of the memory points.
///
/// A dimension narrower than `epsilon_expand` times the reference range is
/// widened to exactly that width around its midpoint, slid back inside
/// `enclosing` if it pokes out, and finally clipped to `enclosing`. The
/// result always contains every memory point and lies inside `enclosing`.
/// With `enclosing` set to the previous activation's box, successive zooms
/// stay nested.
inline Bounds compute_zoom_bounds(std::span<const EvaluatedSample> memory, const Bounds& reference,
                                  double epsilon_expand, const Bounds& enclosing) {
    if (memory.empty()) throw Error("compute_zoom_bounds: empty memory");
    const std::size_t dim = reference.dim();
    if (enclosing.dim() != dim) throw Error("compute_zoom_bounds: dimension mismatch");

    Point lo = memory.front().x, hi = memory.front().x;
    for (const auto& s : memory) {
        if (s.x.size() != dim) throw Error("compute_zoom_bounds: memory dimension mismatch");
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], s.x[d]);
            hi[d] = std::max(hi[d], s.x[d]);
        }
    }

    for (std::size_t d = 0; d < dim; ++d) {
        const double min_width = epsilon_expand * reference.width(d);
        if (hi[d] - lo[d] >= min_width) continue;
        const double mid = 0.5 * (lo[d] + hi[d]);
        double a = mid - 0.5 * min_width;
        double b = mid + 0.5 * min_width;
        if (b > enclosing.upper[d]) {
            a -= b - enclosing.upper[d];
            b = enclosing.upper[d];
        }
        if (a < enclosing.lower[d]) {
            b += enclosing.lower[d] - a;
            a = enclosing.lower[d];
        }
        lo[d] = std::max(a, enclosing.lower[d]);
        hi[d] = std::min(b, enclosing.upper[d]);
        // Round-off must never drop a memory point.
        for (const auto& s : memory) {
            lo[d] = std::min(lo[d], s.x[d]);
            hi[d] = std::max(hi[d], s.x[d]);
        }
    }
    return {std::move(lo), std::move(hi)};
}

inline Bounds compute_zoom_bounds(std::span<const EvaluatedSample> memory, const Bounds& original,
                                  double epsilon_expand) {
    return compute_zoom_bounds(memory, original, epsilon_expand, original);
}

}  // namespace zombi

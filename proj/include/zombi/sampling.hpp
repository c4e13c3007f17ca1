#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "zombi/core.hpp"

namespace zombi {

/// xoshiro256** seeded through splitmix64. Bit-identical on every platform;
/// the standard <random> distributions are not, so all draws go through here.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& s : state_) s = splitmix64(sm);
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) noexcept {
        if (n <= 1) return 0;
        const std::uint64_t limit = -n % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= limit) return r % n;
        }
    }

    /// Standard normal via Box-Muller (no cached second variate, so the
    /// stream position depends only on the call count).
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[below(k)]);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    static std::uint64_t splitmix64(std::uint64_t& x) noexcept {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
};

/// Latin hypercube design: each dimension is cut into n equal strata and
/// every stratum receives exactly one point, with an independent random
/// stratum permutation per dimension.
inline std::vector<Point> latin_hypercube(std::size_t n, const Bounds& bounds, Rng& rng) {
    if (n == 0) throw Error("latin_hypercube: n must be positive");
    const std::size_t dim = bounds.dim();
    for (std::size_t d = 0; d < dim; ++d)
        if (!(bounds.width(d) > 0.0)) throw Error("latin_hypercube: degenerate bounds");

    std::vector<Point> points(n, Point(dim));
    std::vector<std::size_t> strata(n);
    for (std::size_t d = 0; d < dim; ++d) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        rng.shuffle(strata);
        const double step = bounds.width(d) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double a = bounds.lower[d] + static_cast<double>(strata[k]) * step;
            const double b = strata[k] + 1 == n ? bounds.upper[d] : a + step;
            double v = a + rng.uniform() * (b - a);
            if (v >= b) v = std::nextafter(b, a);
            points[k][d] = v;
        }
    }
    return points;
}

inline std::vector<Point> uniform_candidates(std::size_t n, const Bounds& bounds, Rng& rng) {
    if (n == 0) throw Error("uniform_candidates: n must be positive");
    std::vector<Point> points;
    points.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        Point p(bounds.dim());
        for (std::size_t d = 0; d < bounds.dim(); ++d)
            p[d] = std::min(rng.uniform(bounds.lower[d], bounds.upper[d]), bounds.upper[d]);
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace zombi

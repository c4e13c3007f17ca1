#pragma once

// Bagged CART regression trees. Each tree is grown on a bootstrap sample
// with a random feature subset tried at every split; the forest predicts
// the mean of the trees. Leaves hold means of training targets, so every
// prediction lies inside the training target range.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "zombi/core.hpp"
#include "zombi/sampling.hpp"

namespace zombi {

struct ForestParams {
    std::size_t trees = 100;
    std::size_t max_depth = 12;
    std::size_t min_leaf = 2;
    std::size_t features_per_split = 0;  // 0: floor(sqrt(d)), at least 1
};

class RegressionTree {
public:
    /// `rows` holds n*dim features row-major.
    void fit(std::span<const double> rows, std::span<const double> targets, std::size_t dim,
             std::vector<std::size_t> sample, const ForestParams& params, Rng& rng) {
        rows_ = rows;
        targets_ = targets;
        dim_ = dim;
        params_ = params;
        nodes_.clear();
        grow(sample, 0, rng);
        rows_ = {};
        targets_ = {};
    }

    double predict(std::span<const double> x) const {
        std::size_t k = 0;
        while (!nodes_[k].leaf()) k = x[nodes_[k].feature] <= nodes_[k].threshold ? nodes_[k].left : nodes_[k].right;
        return nodes_[k].value;
    }

    std::size_t node_count() const noexcept { return nodes_.size(); }

private:
    struct Node {
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        double value = 0.0;
        bool leaf() const noexcept { return left == 0; }
    };

    double feature(std::size_t row, std::size_t d) const { return rows_[row * dim_ + d]; }

    std::size_t grow(std::vector<std::size_t>& idx, std::size_t depth, Rng& rng) {
        const std::size_t self = nodes_.size();
        nodes_.push_back({});
        double sum = 0.0;
        for (auto i : idx) sum += targets_[i];
        nodes_[self].value = sum / static_cast<double>(idx.size());

        if (depth >= params_.max_depth || idx.size() < 2 * params_.min_leaf) return self;

        std::vector<std::size_t> features(dim_);
        std::iota(features.begin(), features.end(), std::size_t{0});
        rng.shuffle(features);
        std::size_t tries = params_.features_per_split
                                ? params_.features_per_split
                                : static_cast<std::size_t>(std::sqrt(static_cast<double>(dim_)));
        tries = std::clamp<std::size_t>(tries, 1, dim_);

        double best_score = 0.0;  // SSE reduction
        std::size_t best_feature = dim_;
        double best_threshold = 0.0;
        const double n = static_cast<double>(idx.size());
        double total_sq = 0.0;
        for (auto i : idx) total_sq += targets_[i] * targets_[i];
        const double parent_sse = total_sq - sum * sum / n;

        std::vector<std::size_t> order = idx;
        for (std::size_t t = 0; t < tries; ++t) {
            const std::size_t d = features[t];
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return feature(a, d) < feature(b, d); });
            double left_sum = 0.0, left_sq = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                const double y = targets_[order[k]];
                left_sum += y;
                left_sq += y * y;
                const std::size_t nl = k + 1, nr = order.size() - nl;
                if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
                const double lo = feature(order[k], d), hi = feature(order[k + 1], d);
                if (!(lo < hi)) continue;
                const double right_sum = sum - left_sum, right_sq = total_sq - left_sq;
                const double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                                   (right_sq - right_sum * right_sum / static_cast<double>(nr));
                const double score = parent_sse - sse;
                if (score > best_score) {
                    best_score = score;
                    best_feature = d;
                    best_threshold = 0.5 * (lo + hi);
                }
            }
        }
        if (best_feature == dim_) return self;

        std::vector<std::size_t> left, right;
        for (auto i : idx) (feature(i, best_feature) <= best_threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        nodes_[self].feature = best_feature;
        nodes_[self].threshold = best_threshold;
        const std::size_t l = grow(left, depth + 1, rng);
        const std::size_t r = grow(right, depth + 1, rng);
        nodes_[self].left = l;
        nodes_[self].right = r;
        return self;
    }

    std::span<const double> rows_;
    std::span<const double> targets_;
    std::size_t dim_ = 0;
    ForestParams params_;
    std::vector<Node> nodes_;
};

class RegressionForest {
public:
    RegressionForest() = default;

    RegressionForest(std::span<const double> rows, std::span<const double> targets, std::size_t dim,
                     const ForestParams& params, std::uint64_t seed) {
        if (targets.empty() || rows.size() != targets.size() * dim)
            throw Error("regression forest: feature matrix and targets disagree");
        if (params.trees == 0) throw Error("regression forest: need at least one tree");
        Rng rng(seed);
        const std::size_t n = targets.size();
        trees_.resize(params.trees);
        for (auto& tree : trees_) {
            std::vector<std::size_t> sample(n);
            for (auto& s : sample) s = rng.below(n);
            tree.fit(rows, targets, dim, std::move(sample), params, rng);
        }
    }

    double predict(std::span<const double> x) const {
        double sum = 0.0;
        for (const auto& t : trees_) sum += t.predict(x);
        return sum / static_cast<double>(trees_.size());
    }

    std::size_t size() const noexcept { return trees_.size(); }

private:
    std::vector<RegressionTree> trees_;
};

}  // namespace zombi

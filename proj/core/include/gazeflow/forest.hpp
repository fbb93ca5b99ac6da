#pragma once

#include "gazeflow/matrix.hpp"
#include "gazeflow/random.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gazeflow {

/// CART classification tree for labels {0,1}: Gini impurity, thresholds at
/// midpoints between distinct values, grown until leaves are pure or no split
/// separates the node.
class DecisionTree {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;     // value <= threshold
        int right = -1;
        int label = 0;
    };

    // `rows` indexes into x/y and may repeat (bootstrap). max_features == 0
    // means all features. At least one valid split is searched for even if it
    // takes more than max_features candidates.
    void fit(const DenseMatrix& x, std::span<const int> y, std::span<const std::size_t> rows,
             std::size_t max_features, Rng& rng);

    int predict(std::span<const double> row) const;
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t depth() const;

private:
    std::vector<Node> nodes_;
};

struct ForestParams {
    std::size_t trees = 100;
    std::size_t max_features = 0;  // 0: ceil(sqrt(d))
    std::size_t jobs = 1;
};

/// Bagged CART trees with per-split feature subsampling and majority vote
/// (ties go to class 0). Tree k draws from a generator seeded by
/// (seed, k) only, so results do not depend on `jobs`.
class RandomForest {
public:
    void fit(const DenseMatrix& x, std::span<const int> y, const ForestParams& params,
             std::uint64_t seed);

    int predict(std::span<const double> row) const;
    std::size_t size() const { return trees_.size(); }

private:
    std::vector<DecisionTree> trees_;
};

// SplitMix64 finaliser; derives independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace gazeflow

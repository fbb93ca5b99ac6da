#include "gazeflow/forest.hpp"

#include "gazeflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace gazeflow {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = INFINITY;  // weighted child Gini
};

double gini(double n0, double n1)
{
    const double n = n0 + n1;
    if (n <= 0.0)
        return 0.0;
    const double p0 = n0 / n;
    const double p1 = n1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

// Best threshold on one feature; leaves `best` untouched if the feature is constant.
bool best_split_on(const DenseMatrix& x, std::span<const int> y, std::vector<std::size_t>& rows,
                   int feature, Split& best)
{
    const auto f = static_cast<std::size_t>(feature);
    std::sort(rows.begin(), rows.end(),
              [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
    if (x(rows.front(), f) == x(rows.back(), f))
        return false;

    double total1 = 0.0;
    for (std::size_t r : rows)
        total1 += y[r];
    const double n = static_cast<double>(rows.size());
    const double total0 = n - total1;

    double left0 = 0.0, left1 = 0.0;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        (y[rows[k]] ? left1 : left0) += 1.0;
        const double v = x(rows[k], f);
        const double next = x(rows[k + 1], f);
        if (v == next)
            continue;
        const double nl = left0 + left1;
        const double nr = n - nl;
        const double impurity =
            (nl * gini(left0, left1) + nr * gini(total0 - left0, total1 - left1)) / n;
        if (impurity < best.impurity) {
            best.impurity = impurity;
            best.feature = feature;
            best.threshold = v + 0.5 * (next - v);
            if (best.threshold >= next)  // midpoint rounded up onto `next`
                best.threshold = v;
        }
    }
    return true;
}

} // namespace

void DecisionTree::fit(const DenseMatrix& x, std::span<const int> y,
                       std::span<const std::size_t> rows, std::size_t max_features,
                       Rng& rng)
{
    if (rows.empty())
        throw InputError("decision tree: no training rows");
    const std::size_t d = x.cols();
    const std::size_t m = (max_features == 0 || max_features > d) ? d : max_features;

    nodes_.clear();
    struct Pending {
        int node;
        std::vector<std::size_t> rows;
    };
    std::vector<Pending> stack;
    nodes_.push_back(Node{});
    stack.push_back(Pending{0, std::vector<std::size_t>(rows.begin(), rows.end())});

    std::vector<int> features(d);
    std::iota(features.begin(), features.end(), 0);

    while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();

        std::size_t ones = 0;
        for (std::size_t r : job.rows)
            ones += static_cast<std::size_t>(y[r]);
        const std::size_t zeros = job.rows.size() - ones;
        nodes_[static_cast<std::size_t>(job.node)].label = ones > zeros ? 1 : 0;
        if (ones == 0 || zeros == 0 || job.rows.size() < 2)
            continue;

        rng.shuffle(std::span<int>(features));
        Split best;
        std::size_t informative = 0;
        for (int feature : features) {
            if (informative >= m && best.feature >= 0)
                break;
            if (best_split_on(x, y, job.rows, feature, best))
                ++informative;
        }
        if (best.feature < 0)
            continue;

        std::vector<std::size_t> left, right;
        const auto f = static_cast<std::size_t>(best.feature);
        for (std::size_t r : job.rows)
            (x(r, f) <= best.threshold ? left : right).push_back(r);
        if (left.empty() || right.empty())
            continue;

        const int left_id = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{});
        const int right_id = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{});
        Node& node = nodes_[static_cast<std::size_t>(job.node)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left_id;
        node.right = right_id;
        stack.push_back(Pending{right_id, std::move(right)});
        stack.push_back(Pending{left_id, std::move(left)});
    }
}

int DecisionTree::predict(std::span<const double> row) const
{
    if (nodes_.empty())
        throw InputError("decision tree: not fitted");
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
        const Node& n = nodes_[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                             : n.right);
    }
    return nodes_[i].label;
}

std::size_t DecisionTree::depth() const
{
    if (nodes_.empty())
        return 0;
    std::size_t deepest = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [i, level] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, level);
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        if (n.feature >= 0) {
            stack.emplace_back(n.left, level + 1);
            stack.emplace_back(n.right, level + 1);
        }
    }
    return deepest;
}

void RandomForest::fit(const DenseMatrix& x, std::span<const int> y, const ForestParams& params,
                       std::uint64_t seed)
{
    if (x.rows() == 0 || y.size() != x.rows())
        throw InputError("random forest: empty data or label count mismatch");
    if (params.trees == 0)
        throw InputError("random forest: need at least one tree");
    const std::size_t d = x.cols();
    const std::size_t m = params.max_features > 0
                              ? params.max_features
                              : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

    trees_.assign(params.trees, DecisionTree{});
    auto grow = [&](std::size_t k) {
        Rng rng(mix_seed(seed, k));
        std::vector<std::size_t> sample(x.rows());
        for (auto& s : sample)
            s = rng.below(x.rows());
        trees_[k].fit(x, y, sample, m, rng);
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(params.jobs, params.trees));
    if (jobs == 1) {
        for (std::size_t k = 0; k < params.trees; ++k)
            grow(k);
        return;
    }
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
        workers.emplace_back([&, w] {
            for (std::size_t k = w; k < params.trees; k += jobs)
                grow(k);
        });
    for (auto& t : workers)
        t.join();
}

int RandomForest::predict(std::span<const double> row) const
{
    std::size_t ones = 0;
    for (const auto& tree : trees_)
        ones += static_cast<std::size_t>(tree.predict(row));
    return 2 * ones > trees_.size() ? 1 : 0;
}

} // namespace gazeflow

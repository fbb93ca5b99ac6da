#pragma once

#include "gazeflow/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace gazeflow {

struct LogisticParams {
    double c = 1.0;            // inverse L2 strength; intercept unpenalised
    double tolerance = 1e-6;   // on the gradient's infinity norm
    std::size_t max_iterations = 50000;
};

/// Binary L2-regularised logistic regression minimising
///   sum_i logloss_i + ||w||^2 / (2 c)
/// by accelerated gradient descent with adaptive restart.
class LogisticRegression {
public:
    // Returns false if the tolerance was not reached within max_iterations.
    bool fit(const DenseMatrix& x, std::span<const int> y, const LogisticParams& params = {});

    double probability(std::span<const double> row) const;
    int predict(std::span<const double> row) const { return probability(row) >= 0.5 ? 1 : 0; }

    const std::vector<double>& weights() const { return weights_; }
    double intercept() const { return intercept_; }
    std::size_t iterations() const { return iterations_; }

private:
    std::vector<double> weights_;
    double intercept_ = 0.0;
    std::size_t iterations_ = 0;
};

} // namespace gazeflow

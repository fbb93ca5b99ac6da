#include "gazeflow/logistic.hpp"

#include "gazeflow/error.hpp"

#include <algorithm>
#include <cmath>

namespace gazeflow {

namespace {

double sigmoid(double z)
{
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double log1p_exp(double z)
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

} // namespace

bool LogisticRegression::fit(const DenseMatrix& x, std::span<const int> y,
                             const LogisticParams& params)
{
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n == 0 || y.size() != n)
        throw InputError("logistic regression: empty data or label count mismatch");
    if (!(params.c > 0.0))
        throw InputError("logistic regression: c must be positive");

    // Parameters theta = (w_0..w_{d-1}, b).
    const std::size_t p = d + 1;
    const double lambda = 1.0 / params.c;

    // Lipschitz bound of the gradient: ||[X 1]||_F^2 / 4 + lambda.
    double frob = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (double v : x.row(i))
            frob += v * v;
    const double step = 1.0 / (0.25 * frob + lambda);

    auto objective_and_gradient = [&](const std::vector<double>& theta, std::vector<double>& grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = x.row(i);
            double z = theta[d];
            for (std::size_t j = 0; j < d; ++j)
                z += theta[j] * row[j];
            const double yi = static_cast<double>(y[i]);
            loss += log1p_exp(z) - yi * z;
            const double r = sigmoid(z) - yi;
            for (std::size_t j = 0; j < d; ++j)
                grad[j] += r * row[j];
            grad[d] += r;
        }
        for (std::size_t j = 0; j < d; ++j) {
            loss += 0.5 * lambda * theta[j] * theta[j];
            grad[j] += lambda * theta[j];
        }
        return loss;
    };

    std::vector<double> theta(p, 0.0), prev(p, 0.0), look(p, 0.0), grad(p, 0.0);
    double momentum = 1.0;
    double last_loss = INFINITY;
    bool converged = false;
    std::size_t it = 0;
    for (; it < params.max_iterations; ++it) {
        const double loss = objective_and_gradient(look, grad);
        double gnorm = 0.0;
        for (double g : grad)
            gnorm = std::max(gnorm, std::fabs(g));
        if (gnorm < params.tolerance) {
            theta = look;
            converged = true;
            break;
        }
        // Restart momentum when the objective goes up.
        if (loss > last_loss) {
            momentum = 1.0;
            look = theta;
            last_loss = INFINITY;
            continue;
        }
        last_loss = loss;
        prev = theta;
        for (std::size_t j = 0; j < p; ++j)
            theta[j] = look[j] - step * grad[j];
        const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta = (momentum - 1.0) / next;
        momentum = next;
        for (std::size_t j = 0; j < p; ++j)
            look[j] = theta[j] + beta * (theta[j] - prev[j]);
    }
    if (!converged)
        theta = look;

    weights_.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d));
    intercept_ = theta[d];
    iterations_ = it;
    return converged;
}

double LogisticRegression::probability(std::span<const double> row) const
{
    if (row.size() != weights_.size())
        throw InputError("logistic regression: feature count mismatch");
    double z = intercept_;
    for (std::size_t j = 0; j < row.size(); ++j)
        z += weights_[j] * row[j];
    return sigmoid(z);
}

} // namespace gazeflow

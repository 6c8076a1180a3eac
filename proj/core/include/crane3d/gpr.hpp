#pragma once

#include <utility>
#include <vector>

namespace crane3d {

/// Squared-exponential kernel hyperparameters.
struct GprHyper {
    double sigma_f = 1.0;  ///< signal standard deviation
    double length = 0.1;   ///< length scale
    double sigma_n = 0.1;  ///< noise standard deviation
};

/// One-dimensional Gaussian process regressor with a squared-exponential
/// kernel, used for the position-dependent breakaway maps.
class GprModel {
public:
    /// Builds the posterior for fixed hyperparameters. Throws NumericalError
    /// if the Gram matrix is not positive definite after the 1e-10 jitter.
    GprModel(std::vector<double> inputs, std::vector<double> targets, GprHyper hp);

    /// Fits hyperparameters by maximizing the log marginal likelihood with a
    /// multi-start Nelder-Mead search in log space over the box
    /// sigma_f in [1e-3, 1e3], length in [0.01*range, range], sigma_n in [1e-4, 1].
    /// Requires at least 3 samples.
    static GprModel fit(std::vector<double> inputs, std::vector<double> targets);

    /// Posterior mean and variance at a query position.
    std::pair<double, double> predict(double x) const;

    double log_marginal_likelihood() const { return lml_; }
    const GprHyper& hyper() const { return hp_; }
    const std::vector<double>& inputs() const { return x_; }
    const std::vector<double>& targets() const { return y_; }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    GprHyper hp_;
    std::vector<double> chol_;   // lower Cholesky factor of K + sigma_n^2 I, row major
    std::vector<double> alpha_;  // (K + sigma_n^2 I)^{-1} y
    double lml_ = 0.0;
};

} // namespace crane3d

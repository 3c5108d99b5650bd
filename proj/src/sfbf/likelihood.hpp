#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "sfbf/model.hpp"

namespace sfbf {

struct OptimOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;  // on the mean log-likelihood, unconstrained coordinates
    std::optional<Theta> initial_theta;
    int multistart_count = 3;
    std::uint64_t seed = 0;
};

/// Log-likelihood contribution of one observation under the
/// normal / truncated-normal composed-error model. Throws on a non-finite
/// value, which marks a parameter-domain violation.
double loglik_obs(const Theta& theta, const Observation& obs);

/// Total log-likelihood; per-observation terms are combined by pairwise
/// summation in index order so the result is reproducible bit-for-bit.
double loglik(const Theta& theta, const Dataset& data);

/// Per-observation gradient of loglik_obs in the original
/// (theta_x, mu, sigma_v, sigma_e) coordinates, by fourth-order central
/// differences.
std::vector<double> score(const Theta& theta, const Observation& obs);

/// Average negative Hessian of the per-observation log-likelihood at theta,
/// by central second differences of the summed log-likelihood.
Eigen::MatrixXd information_matrix(const Theta& theta, const Dataset& data);

/// Maximum-likelihood fit. The optimizer works on (theta_x, mu, ln sigma_v,
/// ln sigma_e); starts come from an OLS fit with third-moment scale matching,
/// plus seeded jitters when multistart_count > 1. vcov is the inverse
/// information divided by n.
FitResult fit_mle(const Dataset& data, const OptimOptions& opts);

}  // namespace sfbf

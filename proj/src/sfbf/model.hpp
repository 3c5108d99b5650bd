#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sfbf {

/// One production unit in one period: log output y and regressor row x,
/// where x[0] is the constant 1. Identifiers are carried for bookkeeping
/// only; the cross-sectional math never reads them.
struct Observation {
    double y = 0.0;
    std::vector<double> x;
    std::string unit_id;
    std::string period;
};

/// Immutable collection of observations sharing one regressor count.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<Observation> observations, std::vector<std::string> column_names);

    const std::vector<Observation>& observations() const noexcept { return observations_; }
    const Observation& operator[](std::size_t i) const { return observations_[i]; }
    const std::vector<std::string>& column_names() const noexcept { return column_names_; }
    std::size_t size() const noexcept { return observations_.size(); }
    std::size_t regressor_count() const noexcept { return p_; }

    /// Checks the fitting precondition: at least p+3 observations, one per
    /// free parameter of the composed-error model.
    void require_fittable() const;

    /// Resample with replacement using the caller's index choices.
    Dataset resample(std::span<const std::size_t> indices) const;

private:
    std::vector<Observation> observations_;
    std::vector<std::string> column_names_;
    std::size_t p_ = 0;
};

/// Full parameter vector of the composed-error frontier model:
/// frontier coefficients, inefficiency location mu, and the two scales.
struct Theta {
    std::vector<double> theta_x;
    double mu = 0.0;
    double sigma_v = 1.0;
    double sigma_e = 1.0;

    Theta() = default;
    Theta(std::vector<double> theta_x_in, double mu_in, double sigma_v_in, double sigma_e_in);

    std::size_t p() const noexcept { return theta_x.size(); }
    std::size_t dim() const noexcept { return theta_x.size() + 3; }

    /// Flat layout (theta_x..., mu, sigma_v, sigma_e) in original coordinates.
    Eigen::VectorXd to_vector() const;
    static Theta from_vector(const Eigen::VectorXd& v);
};

/// MLE output: point estimate, finite-sample covariance of theta_hat
/// (the asymptotic covariance already divided by n), and fit diagnostics.
struct FitResult {
    Theta theta_hat;
    double loglik_value = 0.0;
    Eigen::MatrixXd vcov;
    std::int64_t n = 0;
    bool converged = false;
    int iterations = 0;

    std::vector<double> standard_errors() const;
};

/// Linear frontier value theta_x . x (inputs already transformed upstream).
double predict_frontier(const Theta& theta, std::span<const double> x);

/// Composite-error realization u = y - theta_x . x for one observation.
double composed_residual(const Theta& theta, const Observation& obs);

}  // namespace sfbf

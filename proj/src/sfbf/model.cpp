#include "sfbf/model.hpp"

#include <cmath>

#include "sfbf/error.hpp"

namespace sfbf {

Dataset::Dataset(std::vector<Observation> observations, std::vector<std::string> column_names)
    : observations_(std::move(observations)), column_names_(std::move(column_names)) {
    require(!observations_.empty(), errc::invalid_argument, "Dataset: no observations");
    p_ = observations_.front().x.size();
    require(p_ > 0, errc::invalid_argument, "Dataset: empty regressor rows");
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const Observation& obs = observations_[i];
        require(obs.x.size() == p_, errc::dimension_mismatch,
                "Dataset: observation " + std::to_string(i) + " has " +
                    std::to_string(obs.x.size()) + " regressors, expected " + std::to_string(p_));
        require(std::isfinite(obs.y), errc::invalid_argument,
                "Dataset: non-finite y at observation " + std::to_string(i));
        for (double v : obs.x)
            require(std::isfinite(v), errc::invalid_argument,
                    "Dataset: non-finite regressor at observation " + std::to_string(i));
    }
}

void Dataset::require_fittable() const {
    require(size() >= p_ + 3, errc::invalid_argument,
            "Dataset: need at least p+3 = " + std::to_string(p_ + 3) + " observations, have " +
                std::to_string(size()));
}

Dataset Dataset::resample(std::span<const std::size_t> indices) const {
    std::vector<Observation> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) {
        require(idx < size(), errc::invalid_argument, "Dataset::resample: index out of range");
        out.push_back(observations_[idx]);
    }
    return Dataset(std::move(out), column_names_);
}

Theta::Theta(std::vector<double> theta_x_in, double mu_in, double sigma_v_in, double sigma_e_in)
    : theta_x(std::move(theta_x_in)), mu(mu_in), sigma_v(sigma_v_in), sigma_e(sigma_e_in) {
    require(!theta_x.empty(), errc::invalid_argument, "Theta: empty coefficient vector");
    require(sigma_v > 0.0 && std::isfinite(sigma_v), errc::domain_violation,
            "Theta: sigma_v must be positive");
    require(sigma_e > 0.0 && std::isfinite(sigma_e), errc::domain_violation,
            "Theta: sigma_e must be positive");
    require(std::isfinite(mu), errc::domain_violation, "Theta: mu must be finite");
    for (double v : theta_x)
        require(std::isfinite(v), errc::domain_violation, "Theta: non-finite coefficient");
}

Eigen::VectorXd Theta::to_vector() const {
    Eigen::VectorXd v(dim());
    for (std::size_t j = 0; j < theta_x.size(); ++j) v[static_cast<Eigen::Index>(j)] = theta_x[j];
    v[static_cast<Eigen::Index>(dim() - 3)] = mu;
    v[static_cast<Eigen::Index>(dim() - 2)] = sigma_v;
    v[static_cast<Eigen::Index>(dim() - 1)] = sigma_e;
    return v;
}

Theta Theta::from_vector(const Eigen::VectorXd& v) {
    require(v.size() >= 4, errc::dimension_mismatch, "Theta::from_vector: need at least 4 entries");
    const auto p = static_cast<std::size_t>(v.size()) - 3;
    std::vector<double> coef(v.data(), v.data() + p);
    return Theta(std::move(coef), v[static_cast<Eigen::Index>(p)],
                 v[static_cast<Eigen::Index>(p + 1)], v[static_cast<Eigen::Index>(p + 2)]);
}

std::vector<double> FitResult::standard_errors() const {
    std::vector<double> se(static_cast<std::size_t>(vcov.rows()));
    for (Eigen::Index j = 0; j < vcov.rows(); ++j)
        se[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, vcov(j, j)));
    return se;
}

double predict_frontier(const Theta& theta, std::span<const double> x) {
    require(x.size() == theta.theta_x.size(), errc::dimension_mismatch,
            "predict_frontier: x has " + std::to_string(x.size()) + " entries, expected " +
                std::to_string(theta.theta_x.size()));
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += theta.theta_x[j] * x[j];
    return acc;
}

double composed_residual(const Theta& theta, const Observation& obs) {
    return obs.y - predict_frontier(theta, obs.x);
}

}  // namespace sfbf

#include "sfbf/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "sfbf/error.hpp"
#include "sfbf/optim.hpp"
#include "sfbf/random.hpp"
#include "sfbf/special.hpp"

namespace sfbf {

namespace {

using special::kLog2Pi;
using special::log_ndtr;

// Bounds on the log-scale coordinates; outside them exp() would leave the
// useful double range long before the likelihood is meaningful.
constexpr double kLogScaleLimit = 40.0;

Eigen::VectorXd to_unconstrained(const Theta& theta) {
    Eigen::VectorXd z = theta.to_vector();
    const Eigen::Index d = z.size();
    z[d - 2] = std::log(theta.sigma_v);
    z[d - 1] = std::log(theta.sigma_e);
    return z;
}

Theta from_unconstrained(const Eigen::VectorXd& z) {
    Eigen::VectorXd v = z;
    const Eigen::Index d = v.size();
    v[d - 2] = std::exp(z[d - 2]);
    v[d - 1] = std::exp(z[d - 1]);
    return Theta::from_vector(v);
}

struct OlsStart {
    Theta theta;
};

// OLS coefficients plus third-moment matching of the residuals against the
// half-normal shape; the intercept is shifted up by the implied mean
// inefficiency so it estimates the frontier rather than the mean function.
OlsStart ols_cols_start(const Dataset& data) {
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto p = static_cast<Eigen::Index>(data.regressor_count());
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Observation& obs = data[static_cast<std::size_t>(i)];
        y[i] = obs.y;
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = obs.x[static_cast<std::size_t>(j)];
    }
    Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
    Eigen::VectorXd resid = y - x * beta;

    const double m2 = resid.squaredNorm() / static_cast<double>(n);
    double m3 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) m3 += resid[i] * resid[i] * resid[i];
    m3 /= static_cast<double>(n);
    const double sd = std::sqrt(std::max(m2, 1e-12));

    // Third central moment of a half-normal with scale s is
    // s^3 sqrt(2/pi) (4-pi)/pi; the composite error inherits it negated.
    const double skew_coef = std::sqrt(2.0 / std::numbers::pi) *
                             (4.0 - std::numbers::pi) / std::numbers::pi;
    double sigma_e = m3 < 0.0 ? std::cbrt(-m3 / skew_coef) : 0.8 * sd;
    sigma_e = std::clamp(sigma_e, 0.05 * sd, 2.0 * sd);
    const double var_e = (1.0 - 2.0 / std::numbers::pi) * sigma_e * sigma_e;
    const double sigma_v = std::sqrt(std::max(m2 - var_e, 0.01 * m2));

    std::vector<double> coef(beta.data(), beta.data() + p);
    coef[0] += sigma_e * std::sqrt(2.0 / std::numbers::pi);  // E[e] under mu = 0
    return {Theta(std::move(coef), 0.0, sigma_v, sigma_e)};
}

}  // namespace

double loglik_obs(const Theta& theta, const Observation& obs) {
    const double u = composed_residual(theta, obs);
    const double sv2 = theta.sigma_v * theta.sigma_v;
    const double se2 = theta.sigma_e * theta.sigma_e;
    const double s2 = sv2 + se2;
    const double gamma = se2 / s2;
    const double z = ((1.0 - gamma) * theta.mu - gamma * u) /
                     std::sqrt(s2 * gamma * (1.0 - gamma));
    const double standardized = (u + theta.mu) / std::sqrt(s2);
    const double ll = -0.5 * kLog2Pi - 0.5 * std::log(s2) - log_ndtr(theta.mu / theta.sigma_e) +
                      log_ndtr(z) - 0.5 * standardized * standardized;
    require(std::isfinite(ll), errc::domain_violation,
            "loglik: non-finite contribution (parameter-domain violation)");
    return ll;
}

double loglik(const Theta& theta, const Dataset& data) {
    require(theta.theta_x.size() == data.regressor_count(), errc::dimension_mismatch,
            "loglik: theta and dataset disagree on the regressor count");
    std::vector<double> terms(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) terms[i] = loglik_obs(theta, data[i]);
    return special::pairwise_sum(terms);
}

std::vector<double> score(const Theta& theta, const Observation& obs) {
    const Eigen::VectorXd at = theta.to_vector();
    const Eigen::Index d = at.size();
    std::vector<double> grad(static_cast<std::size_t>(d));
    Eigen::VectorXd pt = at;
    auto eval = [&](const Eigen::VectorXd& v) { return loglik_obs(Theta::from_vector(v), obs); };

    for (Eigen::Index j = 0; j < d; ++j) {
        double h = 1e-4 * std::max(1.0, std::abs(at[j]));
        if (j >= d - 2) h = std::min(h, at[j] / 8.0);  // keep both scales positive at +-2h
        pt[j] = at[j] - 2.0 * h;
        const double f1 = eval(pt);
        pt[j] = at[j] - h;
        const double f2 = eval(pt);
        pt[j] = at[j] + h;
        const double f3 = eval(pt);
        pt[j] = at[j] + 2.0 * h;
        const double f4 = eval(pt);
        pt[j] = at[j];
        grad[static_cast<std::size_t>(j)] = (f1 - 8.0 * f2 + 8.0 * f3 - f4) / (12.0 * h);
        require(std::isfinite(grad[static_cast<std::size_t>(j)]), errc::domain_violation,
                "score: non-finite gradient entry");
    }
    return grad;
}

Eigen::MatrixXd information_matrix(const Theta& theta, const Dataset& data) {
    const Eigen::VectorXd at = theta.to_vector();
    const Eigen::Index d = at.size();
    const double n = static_cast<double>(data.size());
    auto eval = [&](const Eigen::VectorXd& v) { return loglik(Theta::from_vector(v), data); };

    Eigen::VectorXd step(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        double h = 1e-5 * std::max(1.0, std::abs(at[j]));
        if (j >= d - 2) h = std::min(h, at[j] / 8.0);
        step[j] = h;
    }

    const double f0 = eval(at);
    Eigen::MatrixXd hess(d, d);
    Eigen::VectorXd pt = at;
    for (Eigen::Index i = 0; i < d; ++i) {
        pt[i] = at[i] + step[i];
        const double fp = eval(pt);
        pt[i] = at[i] - step[i];
        const double fm = eval(pt);
        pt[i] = at[i];
        hess(i, i) = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
        for (Eigen::Index j = i + 1; j < d; ++j) {
            pt[i] = at[i] + step[i];
            pt[j] = at[j] + step[j];
            const double fpp = eval(pt);
            pt[j] = at[j] - step[j];
            const double fpm = eval(pt);
            pt[i] = at[i] - step[i];
            pt[j] = at[j] + step[j];
            const double fmp = eval(pt);
            pt[j] = at[j] - step[j];
            const double fmm = eval(pt);
            pt[i] = at[i];
            pt[j] = at[j];
            const double mixed = (fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
            hess(i, j) = mixed;
            hess(j, i) = mixed;
        }
    }
    return -hess / n;
}

FitResult fit_mle(const Dataset& data, const OptimOptions& opts) {
    data.require_fittable();
    require(opts.max_iterations >= 1, errc::invalid_argument, "fit_mle: max_iterations >= 1");
    require(opts.gradient_tolerance > 0.0, errc::invalid_argument,
            "fit_mle: gradient_tolerance > 0");
    require(opts.multistart_count >= 1, errc::invalid_argument, "fit_mle: multistart_count >= 1");

    const double n = static_cast<double>(data.size());
    auto objective = [&](const Eigen::VectorXd& z) -> double {
        const Eigen::Index d = z.size();
        if (std::abs(z[d - 2]) > kLogScaleLimit || std::abs(z[d - 1]) > kLogScaleLimit)
            return std::numeric_limits<double>::infinity();
        try {
            return -loglik(from_unconstrained(z), data) / n;
        } catch (const error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const Theta base = opts.initial_theta ? *opts.initial_theta : ols_cols_start(data).theta;
    require(base.p() == data.regressor_count(), errc::dimension_mismatch,
            "fit_mle: initial_theta does not match the regressor count");
    const Eigen::VectorXd z_base = to_unconstrained(base);

    MinimizeOptions min_opts;
    min_opts.max_iterations = opts.max_iterations;
    min_opts.gradient_tolerance = opts.gradient_tolerance;

    MinimizeResult best;
    bool have_best = false;
    for (int start = 0; start < opts.multistart_count; ++start) {
        Eigen::VectorXd z0 = z_base;
        if (start > 0) {
            RandomStream jitter(opts.seed, static_cast<std::uint64_t>(start));
            const Eigen::Index d = z0.size();
            z0[d - 3] += 0.5 * base.sigma_e * jitter.normal();
            z0[d - 2] += 0.3 * jitter.normal();
            z0[d - 1] += 0.3 * jitter.normal();
        }
        if (!std::isfinite(objective(z0))) continue;
        MinimizeResult run = minimize_bfgs(objective, std::move(z0), min_opts);
        if (!have_best || run.value < best.value ||
            (run.value == best.value && run.converged && !best.converged)) {
            best = std::move(run);
            have_best = true;
        }
    }
    require(have_best, errc::domain_violation,
            "fit_mle: no feasible starting point (data degenerate for this model)");

    FitResult fit;
    fit.theta_hat = from_unconstrained(best.x);
    fit.loglik_value = loglik(fit.theta_hat, data);
    fit.n = static_cast<std::int64_t>(data.size());
    fit.converged = best.converged;
    fit.iterations = best.iterations;

    const Eigen::MatrixXd info = information_matrix(fit.theta_hat, data);
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
        std::ostringstream msg;
        msg << "fit_mle: information matrix is not positive definite"
            << " (eigenvalue range [" << es.eigenvalues().minCoeff() << ", "
            << es.eigenvalues().maxCoeff() << "], condition "
            << es.eigenvalues().maxCoeff() / std::max(es.eigenvalues().minCoeff(), 1e-300)
            << ")";
        raise(errc::singular, msg.str());
    }
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(info.rows(), info.cols());
    Eigen::MatrixXd vcov = llt.solve(identity) / n;
    fit.vcov = 0.5 * (vcov + vcov.transpose());
    return fit;
}

}  // namespace sfbf

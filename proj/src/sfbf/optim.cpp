#include "sfbf/optim.hpp"

#include <cmath>
#include <limits>

#include "sfbf/error.hpp"

namespace sfbf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
}
}  // namespace

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd g(n);
    Eigen::VectorXd xp = x;
    for (Eigen::Index j = 0; j < n; ++j) {
        double h = rel_step * std::max(1.0, std::abs(x[j]));
        double fp = kInf, fm = kInf;
        for (int attempt = 0; attempt < 4; ++attempt) {
            xp[j] = x[j] + h;
            fp = safe_eval(f, xp);
            xp[j] = x[j] - h;
            fm = safe_eval(f, xp);
            if (std::isfinite(fp) && std::isfinite(fm)) break;
            h *= 0.1;
        }
        xp[j] = x[j];
        g[j] = std::isfinite(fp) && std::isfinite(fm) ? (fp - fm) / (2.0 * h) : kInf;
    }
    return g;
}

MinimizeResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const MinimizeOptions& opts) {
    require(opts.max_iterations >= 1, errc::invalid_argument, "max_iterations must be >= 1");
    require(opts.gradient_tolerance > 0.0, errc::invalid_argument,
            "gradient_tolerance must be positive");

    const Eigen::Index n = x0.size();
    MinimizeResult res;
    res.x = std::move(x0);
    res.value = safe_eval(f, res.x);
    require(std::isfinite(res.value), errc::domain_violation,
            "minimize_bfgs: objective not finite at the starting point");
    res.gradient = fd_gradient(f, res.x, opts.fd_step);
    if (!res.gradient.allFinite()) {
        res.converged = false;
        return res;
    }

    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    bool first_update = true;

    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        if (res.gradient.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
            res.converged = true;
            return res;
        }

        Eigen::VectorXd direction = -(h_inv * res.gradient);
        double slope = direction.dot(res.gradient);
        if (!(slope < 0.0)) {  // not a descent direction: restart from steepest descent
            h_inv.setIdentity();
            first_update = true;
            direction = -res.gradient;
            slope = direction.dot(res.gradient);
        }

        // Armijo backtracking.
        const double c1 = 1e-4;
        double t = 1.0;
        double f_new = kInf;
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            x_new = res.x + t * direction;
            f_new = safe_eval(f, x_new);
            if (std::isfinite(f_new) && f_new <= res.value + c1 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (first_update) {
                // Steepest descent already failed to make progress: the
                // gradient estimate is at the finite-difference noise floor.
                res.converged = res.gradient.lpNorm<Eigen::Infinity>() <=
                                10.0 * opts.gradient_tolerance;
                return res;
            }
            h_inv.setIdentity();
            first_update = true;
            continue;
        }

        Eigen::VectorXd g_new = fd_gradient(f, x_new, opts.fd_step);
        if (!g_new.allFinite()) {
            res.x = std::move(x_new);
            res.value = f_new;
            res.converged = false;
            return res;
        }

        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd y = g_new - res.gradient;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (first_update) {
                h_inv *= sy / y.squaredNorm();
                first_update = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd hy = h_inv * y;
            h_inv += (sy + y.dot(hy)) * rho * rho * (s * s.transpose()) -
                     rho * (hy * s.transpose() + s * hy.transpose());
        }

        res.x = std::move(x_new);
        res.value = f_new;
        res.gradient = std::move(g_new);
    }
    res.converged = res.gradient.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance;
    return res;
}

}  // namespace sfbf

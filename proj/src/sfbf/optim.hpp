#pragma once

#include <Eigen/Dense>
#include <functional>

namespace sfbf {

/// Dense quasi-Newton minimizer for smooth low-dimensional objectives.
/// The objective may return +inf to mark infeasible points; the line search
/// backtracks away from them.
struct MinimizeOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;  // inf-norm of the finite-difference gradient
    double fd_step = 1e-6;             // relative central-difference step
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Central-difference gradient with per-coordinate steps scaled by |x_j|;
/// shrinks the step when a perturbed point is infeasible.
Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step);

/// BFGS with Armijo backtracking and reset-on-failure.
MinimizeResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const MinimizeOptions& opts);

}  // namespace sfbf

#pragma once

#include <array>
#include <cstdint>

#include "sfbf/model.hpp"

namespace sfbf {

/// The five moment integrals of the normal / nonnegative-truncated-normal
/// composed-error model evaluated at a composite-error point u:
///
///   d1_v    = int_0^inf exp(-e) N(u+e; sigma_v) de
///   d1_ves  = int_0^inf exp(-e) N(u+e; sigma_v) TN(e; mu, sigma_e) de
///   d1_e    = int_0^inf exp(-e) TN(e; mu, sigma_e) de
///   d2_v    = int_0^inf N(u+e; sigma_v) de
///   d2_ves  = int_0^inf N(u+e; sigma_v) TN(e; mu, sigma_e) de
///
/// N(.; s) is the centered normal density with scale s and TN(.; mu, se) the
/// normal density truncated to [0, inf). d2_ves is the marginal density of
/// u = v - e; d1_ves/d2_ves is the conditional efficiency E[exp(-e) | u].
struct DeltaSet {
    double d1_v = 0.0;
    double d1_ves = 0.0;
    double d1_e = 0.0;
    double d2_v = 0.0;
    double d2_ves = 0.0;
    double u = 0.0;

    /// Canonical 5-vector layout used by every jacobian/gradient consumer:
    /// (d1_v, d2_v, d2_ves, d1_ves, d1_e).
    std::array<double, 5> canonical() const { return {d1_v, d2_v, d2_ves, d1_ves, d1_e}; }

    /// Enforces positivity, finiteness and the exp(-e) <= 1 orderings.
    void validate() const;
};

/// Closed form of the tilted Gaussian product integral
///
///   int_0^inf exp(-a1 e) [N(u+e; sigma_v)]^a2 [TN(e; mu, sigma_e)]^a3 de
///
/// for nonnegative exponents with a2+a3 >= 1 (the quadratic term must be
/// present for the completed square). Computed in log space throughout so
/// small scales cannot overflow the exponential prefactor.
double master_integral(double a1, double a2, double a3, double u, double sigma_v, double sigma_e,
                       double mu);

/// Same integral by adaptive Gauss-Kronrod quadrature on a truncated domain
/// with an analytic tail bound; also accepts a2 + a3 < 1 (pure exponential
/// path), which the closed form refuses. Independent of master_integral.
double master_integral_quadrature(double a1, double a2, double a3, double u, double sigma_v,
                                  double sigma_e, double mu, double abs_tol);

/// All five integrals through the closed form.
DeltaSet delta_set(double u, double sigma_v, double sigma_e, double mu);

/// All five integrals through the quadrature oracle, each within abs_tol.
DeltaSet delta_set_quadrature(double u, double sigma_v, double sigma_e, double mu, double abs_tol);

/// Monte-Carlo estimate from `draws` joint samples (v_s, e_s) of the assumed
/// error model; unbiased for each integral with error shrinking as S^{-1/2}.
DeltaSet delta_set_simulated(double u, const Theta& theta, std::int64_t draws,
                             std::uint64_t seed);

/// Simulated estimate plus per-component Monte-Carlo standard errors
/// computed from the same draws.
struct SimulatedDeltas {
    DeltaSet estimate;
    std::array<double, 5> standard_error{};  // canonical order
};
SimulatedDeltas delta_set_simulated_detailed(double u, const Theta& theta, std::int64_t draws,
                                             std::uint64_t seed);

}  // namespace sfbf

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sfbf/deltas.hpp"

namespace sfbf {

/// Distance of a grid point from the pole of b(c, e0) below which the point
/// is treated as singular.
inline constexpr double kPoleTolerance = 1e-10;

/// A relaxation budget: c bounds the sup-distance of the inefficiency
/// density from its parametric choice, b the one of the noise density.
struct RelaxationPoint {
    double c = 0.0;
    double b = 0.0;
};

/// Identified-set bounds for the conditional efficiency at one relaxation
/// point. Raw values may exit [0,1] because sup-distance perturbations are
/// not constrained to stay nonnegative densities; clamped twins are reported
/// alongside. A nonpositive upper-bound denominator makes the upper bound
/// vacuous (+inf raw, 1 clamped).
struct EfficiencyBounds {
    double lower_raw = 0.0;
    double upper_raw = 0.0;
    double lower_clamped = 0.0;
    double upper_clamped = 0.0;
    bool upper_vacuous = false;
};

/// The breakdown frontier of the conclusion "efficiency >= e0" traced over a
/// c grid: raw b(c, e0), its positive part, and optionally the smoothed
/// curve. Grid points within kPoleTolerance of the pole are skipped and
/// flagged; their values are NaN.
struct FrontierCurve {
    double e0 = 0.0;
    std::vector<double> c_grid;
    std::vector<double> b_values;
    std::vector<double> bf_values;
    std::vector<double> soft_values;  // empty unless a positive rho was supplied
    std::vector<std::uint8_t> pole_flag;
    double rho = 0.0;
};

EfficiencyBounds efficiency_bounds(const DeltaSet& d, const RelaxationPoint& pt);

/// Point-identified efficiency d1_ves / d2_ves, i.e. E[exp(-e) | u] under
/// the unrelaxed model.
double point_efficiency(const DeltaSet& d);

/// Location c = d1_e + e0 where b(c, e0) has its pole.
double b_pole_location(const DeltaSet& d, double e0);

/// The frontier value solving lower_bound(c, b) = e0 for b. Throws
/// errc::singular within kPoleTolerance of the pole.
double b_of_c(const DeltaSet& d, double c, double e0);

/// Trace max{b(c, e0), 0} over the grid; rho > 0 additionally fills the
/// smoothed curve.
FrontierCurve breakdown_frontier(const DeltaSet& d, double e0, std::vector<double> c_grid,
                                 double rho = 0.0);

/// True iff the conclusion "efficiency >= e0" survives the relaxation pt.
bool in_robust_region(const DeltaSet& d, const RelaxationPoint& pt, double e0);

/// Default grid: equally spaced points on [0, c_max] with c_max the smaller
/// of (pole - 1e-3) and 1.0, or the caller's cap if tighter.
std::vector<double> default_c_grid(const DeltaSet& d, double e0, int grid_size,
                                   std::optional<double> c_max = std::nullopt);

/// Smooth positive part b * logistic(rho * b); within |b| exp(-rho |b|) of
/// max(0, b) for b != 0.
double soft_max(double b, double rho);

/// d/db of soft_max; tends to 1 for b > 0, 0 for b < 0, and equals 1/2 at 0.
double soft_max_derivative(double b, double rho);

/// Smoothing schedule max(10, 2 ln n): increasing in n yet o(sqrt(n)), so the
/// smoothed frontier stays consistent for the hard maximum.
double rho_schedule(std::int64_t n);

}  // namespace sfbf

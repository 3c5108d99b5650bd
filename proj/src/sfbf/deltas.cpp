#include "sfbf/deltas.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "sfbf/error.hpp"
#include "sfbf/random.hpp"
#include "sfbf/special.hpp"

namespace sfbf {

namespace {

using special::kLog2Pi;
using special::log_ndtr;

void check_scales(double sigma_v, double sigma_e) {
    require(sigma_v > 0.0 && std::isfinite(sigma_v), errc::domain_violation,
            "sigma_v must be positive");
    require(sigma_e > 0.0 && std::isfinite(sigma_e), errc::domain_violation,
            "sigma_e must be positive");
}

double log_master_integral(double a1, double a2, double a3, double u, double sigma_v,
                           double sigma_e, double mu) {
    check_scales(sigma_v, sigma_e);
    require(a1 >= 0.0 && a2 >= 0.0 && a3 >= 0.0, errc::domain_violation,
            "master_integral: exponents must be nonnegative");
    require(a2 + a3 >= 1.0, errc::domain_violation,
            "master_integral: a2 + a3 must be at least 1 for the closed form");

    const double sv2 = sigma_v * sigma_v;
    const double se2 = sigma_e * sigma_e;
    const double denom = a2 * se2 + a3 * sv2;
    const double tau2 = sv2 * se2 / denom;
    const double center = (a3 * mu * sv2 - a2 * u * se2 - a1 * sv2 * se2) / denom;

    return 0.5 * std::log(tau2) - a2 * u * u / (2.0 * sv2) - a3 * mu * mu / (2.0 * se2) +
           center * center / (2.0 * tau2) - a2 * std::log(sigma_v) - a3 * std::log(sigma_e) -
           (a2 + a3 - 1.0) * 0.5 * kLog2Pi - a3 * log_ndtr(mu / sigma_e) +
           log_ndtr(center / std::sqrt(tau2));
}

// ---------------------------------------------------------------------------
// Quadrature oracle: adaptive Gauss-Kronrod 7/15 in a peak-scaled log frame.
// ---------------------------------------------------------------------------

// QUADPACK dqk15 abscissae/weights. Gauss nodes sit at odd indices plus the
// center (index 7).
constexpr double kGK_X[8] = {0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
                             0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
                             0.2077849550078985, 0.0};
constexpr double kGK_WK[8] = {0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
                              0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
                              0.2044329400752989,  0.2094821410847278};
constexpr double kGK_WG[4] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                              0.4179591836734694};

struct Segment {
    double a, b;
    double integral;
    double err;
};

// One GK15 rule application to g = exp(logf - log_scale).
Segment gk15(const std::function<double(double)>& logf, double log_scale, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&](double x) {
        const double lf = logf(x);
        return std::isfinite(lf) ? std::exp(lf - log_scale) : 0.0;
    };
    const double g_mid = g(mid);
    double k15 = kGK_WK[7] * g_mid;
    double g7 = kGK_WG[3] * g_mid;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGK_X[i];
        const double pair = g(mid + dx) + g(mid - dx);
        k15 += kGK_WK[i] * pair;
        if (i % 2 == 1) g7 += kGK_WG[i / 2] * pair;
    }
    k15 *= half;
    g7 *= half;
    return Segment{a, b, k15, std::abs(k15 - g7)};
}

struct LogIntegral {
    double log_value;
    bool converged;
};

// Integrates exp(logf) over [0, upper] relative to exp(log_scale), seeded at
// the supplied breakpoints, refining the worst segment until the error sum
// meets the scaled tolerances.
LogIntegral integrate_peak_scaled(const std::function<double(double)>& logf, double log_scale,
                                  std::vector<double> breakpoints, double abs_tol, double rel_tol) {
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    std::vector<Segment> segments;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (breakpoints[i + 1] > breakpoints[i])
            segments.push_back(gk15(logf, log_scale, breakpoints[i], breakpoints[i + 1]));

    const int max_segments = 4000;
    for (int iter = 0;; ++iter) {
        double total = 0.0, err = 0.0;
        for (const Segment& s : segments) {
            total += s.integral;
            err += s.err;
        }
        // Absolute tolerance is checked in the unscaled frame via logs so a
        // deep negative log_scale cannot overflow the comparison.
        const bool abs_ok =
            err <= 0.0 || std::log(err) + log_scale <= std::log(abs_tol);
        const bool rel_ok = total > 0.0 && err <= rel_tol * total;
        if (abs_ok || rel_ok)
            return {log_scale + std::log(std::max(total, std::numeric_limits<double>::min())),
                    true};
        if (static_cast<int>(segments.size()) >= max_segments || iter > 2 * max_segments)
            return {log_scale + std::log(std::max(total, std::numeric_limits<double>::min())),
                    false};
        auto worst = std::max_element(
            segments.begin(), segments.end(),
            [](const Segment& lhs, const Segment& rhs) { return lhs.err < rhs.err; });
        const Segment seg = *worst;
        const double mid = 0.5 * (seg.a + seg.b);
        *worst = gk15(logf, log_scale, seg.a, mid);
        segments.push_back(gk15(logf, log_scale, mid, seg.b));
    }
}

}  // namespace

double master_integral(double a1, double a2, double a3, double u, double sigma_v, double sigma_e,
                       double mu) {
    return std::exp(log_master_integral(a1, a2, a3, u, sigma_v, sigma_e, mu));
}

double master_integral_quadrature(double a1, double a2, double a3, double u, double sigma_v,
                                  double sigma_e, double mu, double abs_tol) {
    check_scales(sigma_v, sigma_e);
    require(abs_tol > 0.0, errc::invalid_argument, "abs_tol must be positive");
    require(a1 >= 0.0 && a2 >= 0.0 && a3 >= 0.0, errc::domain_violation,
            "exponents must be nonnegative");
    require(a1 + a2 + a3 > 0.0, errc::domain_violation, "integral diverges for a1=a2=a3=0");

    const double sv2 = sigma_v * sigma_v;
    const double se2 = sigma_e * sigma_e;
    const double log_tn_norm = log_ndtr(mu / sigma_e);  // truncation mass of TN

    auto log_integrand = [=](double e) {
        double lf = -a1 * e;
        if (a2 > 0.0) {
            const double z = (u + e) / sigma_v;
            lf += a2 * (-0.5 * z * z - 0.5 * kLog2Pi - std::log(sigma_v));
        }
        if (a3 > 0.0) {
            const double z = (e - mu) / sigma_e;
            lf += a3 * (-0.5 * z * z - 0.5 * kLog2Pi - std::log(sigma_e) - log_tn_norm);
        }
        return lf;
    };

    // Truncation point: past both density modes, then extended until the
    // analytic bound  integrand(T) / decay_rate(T)  drops below abs_tol/2
    // (and far below the peak, for the relative criterion).
    double upper = std::max({10.0, mu + 10.0 * sigma_e, -u + 10.0 * sigma_v});
    const double step = 5.0 * std::max({sigma_v, sigma_e, 1.0});
    double log_peak_guess = log_integrand(0.0);
    for (int i = 0; i < 64; ++i) {
        const double rate = a1 + a2 * (u + upper) / sv2 + a3 * (upper - mu) / se2;
        const double log_tail = log_integrand(upper) - std::log(rate);
        if (log_tail <= std::log(abs_tol) - M_LN2 && log_tail <= log_peak_guess - 34.0) break;
        upper += step;
    }

    // Locate the peak for scaling and seed the subdivision with the points
    // where each factor has structure.
    std::vector<double> breakpoints{0.0, upper};
    for (double candidate :
         {-u, -u - sigma_v, -u + sigma_v, mu, mu - sigma_e, mu + sigma_e, 1e-3, 1e-2, 0.1, 1.0})
        if (candidate > 0.0 && candidate < upper) breakpoints.push_back(candidate);

    double log_peak = -std::numeric_limits<double>::infinity();
    const int scan_points = 768;
    for (int i = 0; i <= scan_points; ++i) {
        const double t = static_cast<double>(i) / scan_points;
        const double e = upper * t * t;  // quadratic spacing resolves narrow peaks near 0
        log_peak = std::max(log_peak, log_integrand(e));
    }
    for (double bp : breakpoints) log_peak = std::max(log_peak, log_integrand(bp));

    const LogIntegral result =
        integrate_peak_scaled(log_integrand, log_peak, std::move(breakpoints), abs_tol, 1e-12);
    require(result.converged, errc::numeric,
            "master_integral_quadrature: failed to reach tolerance");
    return std::exp(result.log_value);
}

void DeltaSet::validate() const {
    const auto values = canonical();
    for (double v : values)
        require(v > 0.0 && std::isfinite(v), errc::numeric,
                "DeltaSet: integrals must be strictly positive and finite");
    require(d1_ves <= d2_ves, errc::numeric, "DeltaSet: d1_ves must not exceed d2_ves");
    require(d1_v <= d2_v, errc::numeric, "DeltaSet: d1_v must not exceed d2_v");
    require(d1_e <= 1.0, errc::numeric, "DeltaSet: d1_e is a mean of exp(-e) <= 1");
}

DeltaSet delta_set(double u, double sigma_v, double sigma_e, double mu) {
    DeltaSet d;
    d.u = u;
    d.d1_v = master_integral(1, 1, 0, u, sigma_v, sigma_e, mu);
    d.d1_ves = master_integral(1, 1, 1, u, sigma_v, sigma_e, mu);
    d.d1_e = master_integral(1, 0, 1, u, sigma_v, sigma_e, mu);
    d.d2_v = master_integral(0, 1, 0, u, sigma_v, sigma_e, mu);
    d.d2_ves = master_integral(0, 1, 1, u, sigma_v, sigma_e, mu);
    return d;
}

DeltaSet delta_set_quadrature(double u, double sigma_v, double sigma_e, double mu,
                              double abs_tol) {
    DeltaSet d;
    d.u = u;
    d.d1_v = master_integral_quadrature(1, 1, 0, u, sigma_v, sigma_e, mu, abs_tol);
    d.d1_ves = master_integral_quadrature(1, 1, 1, u, sigma_v, sigma_e, mu, abs_tol);
    d.d1_e = master_integral_quadrature(1, 0, 1, u, sigma_v, sigma_e, mu, abs_tol);
    d.d2_v = master_integral_quadrature(0, 1, 0, u, sigma_v, sigma_e, mu, abs_tol);
    d.d2_ves = master_integral_quadrature(0, 1, 1, u, sigma_v, sigma_e, mu, abs_tol);
    return d;
}

SimulatedDeltas delta_set_simulated_detailed(double u, const Theta& theta, std::int64_t draws,
                                             std::uint64_t seed) {
    require(draws >= 1, errc::invalid_argument, "delta_set_simulated: draws must be >= 1");
    const double sigma_v = theta.sigma_v;
    const double sigma_e = theta.sigma_e;
    const double mu = theta.mu;

    RandomStream rng(seed);
    // Accumulate sums and sums of squares per integral, canonical order.
    std::array<double, 5> sum{}, sum_sq{};
    auto add = [&](int k, double g) {
        sum[static_cast<std::size_t>(k)] += g;
        sum_sq[static_cast<std::size_t>(k)] += g * g;
    };
    for (std::int64_t s = 0; s < draws; ++s) {
        const double e = rng.truncated_normal_nonneg(mu, sigma_e);
        const double v = rng.normal(0.0, sigma_v);

        // Integrals over the noise axis use the v draw: d2_v is the tail mass
        // P(v >= u) and d1_v tilts it by exp(-(v-u)).
        const double indicator = v >= u ? 1.0 : 0.0;
        add(0, indicator * std::exp(-(v - u)));
        add(1, indicator);
        // TN-weighted integrals use the e draw with the plug-in normal density.
        const double zf = (u + e) / sigma_v;
        const double f_v = std::exp(-0.5 * zf * zf) / (sigma_v * std::sqrt(2.0 * M_PI));
        add(2, f_v);
        add(3, std::exp(-e) * f_v);
        add(4, std::exp(-e));
    }

    SimulatedDeltas out;
    std::array<double, 5> mean{};
    for (std::size_t k = 0; k < 5; ++k) {
        mean[k] = sum[k] / static_cast<double>(draws);
        const double var =
            std::max(0.0, sum_sq[k] / static_cast<double>(draws) - mean[k] * mean[k]);
        out.standard_error[k] = std::sqrt(var / static_cast<double>(draws));
    }
    out.estimate.u = u;
    out.estimate.d1_v = mean[0];
    out.estimate.d2_v = mean[1];
    out.estimate.d2_ves = mean[2];
    out.estimate.d1_ves = mean[3];
    out.estimate.d1_e = mean[4];
    return out;
}

DeltaSet delta_set_simulated(double u, const Theta& theta, std::int64_t draws,
                             std::uint64_t seed) {
    return delta_set_simulated_detailed(u, theta, draws, seed).estimate;
}

}  // namespace sfbf

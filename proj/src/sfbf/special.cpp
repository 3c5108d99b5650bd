#include "sfbf/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfbf/error.hpp"

namespace sfbf::special {

double ndtr(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

namespace {

// ln Phi(x) for x <= -36 where erfc(-x/sqrt(2)) underflows or loses accuracy.
// Phi(x) = phi(x)/(-x) * sum_k (-1)^k (2k-1)!! / x^(2k); the series is asymptotic,
// terms are summed while they keep shrinking.
double log_ndtr_tail(double x) {
    const double inv_x2 = 1.0 / (x * x);
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 12; ++k) {
        term *= -(2.0 * k - 1.0) * inv_x2;
        if (std::abs(term) >= prev) break;
        sum += term;
        prev = std::abs(term);
    }
    return -0.5 * x * x - std::log(-x) - 0.5 * kLog2Pi + std::log(sum);
}

}  // namespace

double log_ndtr(double x) {
    if (x > 6.0) return std::log1p(-0.5 * std::erfc(x / kSqrt2));
    if (x >= -36.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
    return log_ndtr_tail(x);
}

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double log_norm_pdf(double x) { return -0.5 * (x * x + kLog2Pi); }

double norm_quantile(double p) {
    require(p > 0.0 && p < 1.0, errc::domain_violation, "norm_quantile: p must lie in (0,1)");
    // Acklam's rational approximation, then one Halley step against erfc.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = ndtr(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

double log1pexp(double x) {
    if (x > 37.0) return x + std::exp(-x);
    if (x > -37.0) return std::log1p(std::exp(x));
    return std::exp(x);
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace sfbf::special

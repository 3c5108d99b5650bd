#pragma once

#include <cstddef>
#include <span>

namespace sfbf::special {

inline constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2*pi)
inline constexpr double kSqrt2 = 1.4142135623730950488;

/// Standard normal CDF.
double ndtr(double x);

/// ln of the standard normal CDF, stable for arbitrarily negative x.
/// Uses erfc up to the underflow edge and an asymptotic tail expansion beyond it.
double log_ndtr(double x);

/// Standard normal density and its log.
double norm_pdf(double x);
double log_norm_pdf(double x);

/// Standard normal quantile (inverse CDF), p in (0,1).
double norm_quantile(double p);

/// ln(1 + exp(x)) without overflow.
double log1pexp(double x);

/// Logistic function 1/(1+exp(-x)) without overflow.
double sigmoid(double x);

/// Pairwise (tree) summation; deterministic and independent of thread count
/// when callers fill the buffer in index order.
double pairwise_sum(std::span<const double> values);

}  // namespace sfbf::special

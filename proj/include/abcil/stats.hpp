#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace abcil::stats {

double mean(std::span<const double> x);

/// Unbiased (n - 1) sample standard deviation.
double sample_sd(std::span<const double> x);

/// Central sample moment with divisor n.
double central_moment(std::span<const double> x, int order);

/// Linear-interpolation quantile (Hyndman-Fan type 7). x need not be sorted.
double quantile(std::span<const double> x, double q);

/// Order-statistic quantile: the smallest sorted value x_(i) with
/// i >= q * n (1-based), i.e. x_(ceil(q n)), clamped to [1, n].
double order_statistic_quantile(std::span<const double> x, double q);

/// Fraction of x that is <= t.
double empirical_cdf(std::span<const double> x, double t);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS statistic against a continuous CDF.
double ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov p-value for statistic d with effective size n_eff.
double ks_pvalue(double d, double n_eff);

double lag1_autocorrelation(std::span<const double> x);

/// Trapezoid integral of y over the (not necessarily uniform) grid x.
double trapezoid(std::span<const double> x, std::span<const double> y);

std::size_t argmax(std::span<const double> y);

} // namespace abcil::stats

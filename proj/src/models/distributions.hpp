#pragma once

// Sampling and log-density helpers shared by the example models.

#include <abcil/rng.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace abcil::detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double gamma_draw(Rng& rng, double shape, double rate)
{
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

/// X = scale / G with G ~ Gamma(shape, 1).
inline double inverse_gamma_draw(Rng& rng, double shape, double scale)
{
    return scale / std::gamma_distribution<double>(shape, 1.0)(rng);
}

inline double beta_draw(Rng& rng, double a, double b)
{
    const double x = std::gamma_distribution<double>(a, 1.0)(rng);
    const double y = std::gamma_distribution<double>(b, 1.0)(rng);
    return x / (x + y);
}

inline double log_gamma_pdf(double x, double shape, double rate)
{
    if (!(x > 0.0))
        return kNegInf;
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

inline double log_inverse_gamma_pdf(double x, double shape, double scale)
{
    if (!(x > 0.0))
        return kNegInf;
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

inline double log_normal_pdf(double x, double mean, double sd)
{
    const double u = (x - mean) / sd;
    return -0.5 * u * u - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

inline double logistic(double x)
{
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// log(1 + e^x) without overflow.
inline double log1p_exp(double x)
{
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

} // namespace abcil::detail

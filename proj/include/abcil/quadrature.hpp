#pragma once

#include <cstddef>
#include <functional>

namespace abcil {

struct QuadratureSpec
{
    double abs_tol = 1e-15;
    double rel_tol = 1e-12;
    std::size_t max_subdivisions = 500;

    /// Throws ConfigError unless both tolerances are positive.
    void validate() const;
};

struct QuadratureResult
{
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t intervals = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f over [a, b].
///
/// The interval with the largest error estimate is bisected until the total
/// estimate meets max(abs_tol, rel_tol * |value|). Throws NumericalError
/// (carrying the achieved error) when the subdivision budget runs out.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureSpec& spec = {});

} // namespace abcil

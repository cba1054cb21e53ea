#pragma once

#include <abcil/quadrature.hpp>

namespace abcil {

double std_normal_pdf(double x);
double std_normal_cdf(double x);

/// Inverse of the standard normal CDF, accurate to well below 1e-9
/// absolute. Throws DomainError unless 0 < u < 1.
double std_normal_quantile(double u);

/// 2F1(1, S + 1/2; 3; 1 - e^psi) for a matched pair with S = R0 + R1 in
/// {0, 1, 2}, from the Euler integral
///
///   B(S+1/2, 5/2-S)^{-1} * int_0^1 w^{S-1/2} (1-w)^{3/2-S} / (1 - w (1 - e^psi)) dw
///
/// evaluated by adaptive quadrature, so it is valid for every real psi
/// (including 1 - e^psi < -1, outside the disc of the power series).
/// Returns exactly 1 at psi = 0.
double gauss_2f1_matched(int pair_sum, double psi, const QuadratureSpec& spec = {});

/// Natural log of gauss_2f1_matched.
double log_gauss_2f1_matched(int pair_sum, double psi, const QuadratureSpec& spec = {});

} // namespace abcil

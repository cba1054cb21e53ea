#include <abcil/error.hpp>
#include <abcil/special.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace abcil {

double std_normal_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation for the lower half, u in (0, 0.5].
double lower_quantile_rational(double u)
{
    constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                            1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                            6.680131188771972e+01,  -1.328068155288572e+01};
    constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                            -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                            3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (u < p_low) {
        const double q = std::sqrt(-2.0 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = u - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double std_normal_quantile(double u)
{
    if (!(u > 0.0 && u < 1.0))
        throw DomainError("std_normal_quantile: u = " + std::to_string(u) + " outside (0, 1)");
    if (u == 0.5)
        return 0.0;
    // 1 - u is exact for u >= 0.5, so the upper half mirrors the lower half.
    if (u > 0.5)
        return -std_normal_quantile(1.0 - u);

    double x = lower_quantile_rational(u);
    // One Halley step against the erfc-based CDF, which is accurate in the lower tail.
    const double e = std_normal_cdf(x) - u;
    const double step = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= step / (1.0 + 0.5 * x * step);
    return x;
}

double gauss_2f1_matched(int pair_sum, double psi, const QuadratureSpec& spec)
{
    if (pair_sum < 0 || pair_sum > 2)
        throw DomainError("gauss_2f1_matched: pair sum must be 0, 1 or 2, got " + std::to_string(pair_sum));
    if (!std::isfinite(psi))
        throw DomainError("gauss_2f1_matched: psi must be finite");
    if (psi == 0.0)
        return 1.0;

    // w = sin^2(t) maps [0, pi/2] onto [0, 1] and turns the endpoint factors
    // w^{S-1/2} (1-w)^{3/2-S} dw into the smooth 2 sin^{2S} t cos^{4-2S} t dt.
    // The denominator 1 - w (1 - e^psi) = cos^2 t + e^psi sin^2 t stays positive.
    const double e_psi = std::exp(psi);
    const int sin_power = 2 * pair_sum;
    const int cos_power = 4 - 2 * pair_sum;
    auto integrand = [=](double t) {
        const double s = std::sin(t);
        const double c = std::cos(t);
        const double s2 = s * s;
        const double c2 = c * c;
        return 2.0 * std::pow(s, sin_power) * std::pow(c, cos_power) / (c2 + e_psi * s2);
    };
    const QuadratureResult r = integrate_adaptive(integrand, 0.0, std::numbers::pi / 2.0, spec);

    // B(S + 1/2, 5/2 - S): 3 pi / 8 for S in {0, 2}, pi / 8 for S = 1.
    const double beta = (pair_sum == 1 ? 1.0 : 3.0) * std::numbers::pi / 8.0;
    return r.value / beta;
}

double log_gauss_2f1_matched(int pair_sum, double psi, const QuadratureSpec& spec)
{
    return std::log(gauss_2f1_matched(pair_sum, psi, spec));
}

} // namespace abcil

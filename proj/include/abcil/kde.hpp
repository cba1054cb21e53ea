#pragma once

#include <abcil/core.hpp>

#include <cstddef>
#include <span>

namespace abcil {

/// Univariate Gaussian-kernel density estimate: a sample plus a bandwidth.
class KdeEstimate
{
public:
    /// Requires at least two finite points and h > 0.
    KdeEstimate(Vector sample, double bandwidth);

    std::span<const double> sample() const noexcept { return sample_; }
    double bandwidth() const noexcept { return h_; }
    std::size_t size() const noexcept { return sample_.size(); }

private:
    Vector sample_;
    double h_;
};

/// 0.9 * min(sd, IQR / 1.34) * m^{-1/5}. When the IQR collapses to zero (heavy
/// ties, as in a sticky MCMC chain) the sd alone is used; zero sd throws
/// DegenerateSampleError.
double silverman_bandwidth(std::span<const double> sample);

/// c * m^{-1/(d+5)}: the rate that minimizes the ABC density-estimate MSE
/// when d summary statistics are matched.
double mse_rate_bandwidth(std::size_t m, std::size_t d, double c = 1.0);

/// m^{-4/(d+5)}: order of the minimal MSE attained at that bandwidth.
double minimal_mse_rate(std::size_t m, std::size_t d);

double kde_pdf(const KdeEstimate& est, double x);

/// First and second derivatives of the estimate, summed analytically from
/// the kernel derivatives phi'(u) = -u phi(u), phi''(u) = (u^2 - 1) phi(u).
double kde_derivative(const KdeEstimate& est, double x);
double kde_second_derivative(const KdeEstimate& est, double x);

/// kde_pdf at each grid point; bitwise identical to calling kde_pdf in a loop.
Vector kde_grid(const KdeEstimate& est, std::span<const double> grid);

enum class BandwidthRule { silverman, mse_rate };

struct BandwidthOptions
{
    BandwidthRule rule = BandwidthRule::silverman;
    double rate_constant = 1.0;       // c in c * m^{-1/(d+5)}
    std::size_t summary_dim = 1;      // d in the same
};

double select_bandwidth(std::span<const double> sample, const BandwidthOptions& opts);

enum class DensityScale { linear, log };

/// KDE optionally fitted to log(x) and mapped back with the 1/x Jacobian,
/// which removes the boundary bias at 0 for positive quantities.
class ScaledKde
{
public:
    ScaledKde(std::span<const double> sample, DensityScale scale, const BandwidthOptions& opts = {});

    double pdf(double x) const;
    Vector pdf(std::span<const double> grid) const;

    /// Second derivative of pdf with respect to x.
    double second_derivative(double x) const;

    /// Leading bias term 0.5 * h^2 * (curvature), mapped to the x scale. The
    /// curvature comes from `curvature` (same scale and sample, possibly a
    /// different pilot bandwidth).
    double leading_bias(double x, const KdeEstimate& curvature) const;

    /// Asymptotic variance f / (2 m h sqrt(pi)), mapped to the x scale.
    double asymptotic_variance(double x) const;

    const KdeEstimate& estimate() const noexcept { return est_; }
    DensityScale scale() const noexcept { return scale_; }

private:
    KdeEstimate est_;
    DensityScale scale_;
};

/// Product-Gaussian KDE for multivariate psi (rows are points).
class ProductKde
{
public:
    ProductKde(Matrix sample, Vector bandwidths);
    double pdf(std::span<const double> x) const;
    std::size_t dim() const noexcept { return sample_.cols(); }

private:
    Matrix sample_;
    Vector h_;
};

} // namespace abcil

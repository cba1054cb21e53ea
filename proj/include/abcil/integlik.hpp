#pragma once

#include <abcil/abc.hpp>
#include <abcil/kde.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace abcil {

enum class Normalization { max_one, unit_integral, raw };

std::string to_string(Normalization mode);
Normalization parse_normalization(const std::string& name);

struct CurveMeta
{
    std::string sampler;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    double posterior_bandwidth = 0.0;
    double prior_bandwidth = 0.0; // 0 when the prior density is closed form
    std::string prior_source;     // "pdf" or "sample"
    std::string density_scale;    // "linear" or "log"
    std::size_t posterior_draws = 0;
    std::size_t masked_points = 0;
};

/// An integrated-likelihood curve on a strictly increasing psi grid.
/// Masked points (prior density below the floor) carry value 0 and are
/// flagged, never interpolated.
struct LikelihoodCurve
{
    Vector psi;
    Vector values;
    std::vector<bool> masked;
    Normalization normalization = Normalization::raw;
    CurveMeta meta;

    std::size_t size() const noexcept { return psi.size(); }
    std::size_t masked_count() const;
    /// Grid value with the largest ordinate among unmasked points.
    double argmax() const;
};

struct PriorSample
{
    Vector draws;
};

struct PriorPdf
{
    std::function<double(double)> pdf;
};

using PriorPsi = std::variant<PriorSample, PriorPdf>;

struct IntegLikOptions
{
    Normalization normalization = Normalization::max_one;
    DensityScale scale = DensityScale::linear;
    BandwidthOptions bandwidth;
    double prior_floor = 1e-8; // relative to the largest prior density on the grid
};

/// L(psi) proportional to posterior density / prior density, with both
/// densities estimated by Gaussian KDE (the prior may instead be supplied in
/// closed form).
LikelihoodCurve abc_integrated_likelihood(std::span<const double> posterior_psi, const PriorPsi& prior,
                                          std::span<const double> grid, const IntegLikOptions& opts = {});

LikelihoodCurve abc_integrated_likelihood(const AbcDraws& posterior, const PriorPsi& prior,
                                          std::span<const double> grid, const IntegLikOptions& opts = {});

/// max-one divides by the maximum, unit-integral by the trapezoid integral,
/// raw leaves values alone. Idempotent. Throws DomainError on an all-zero
/// curve.
LikelihoodCurve normalize_curve(LikelihoodCurve curve, Normalization mode);

struct GridSpec
{
    std::size_t points = 512;
    double coverage = 0.999;
    std::optional<double> lo;
    std::optional<double> hi;
};

/// Equally spaced grid over the central `coverage` mass of the pooled draws,
/// unless explicit bounds are given.
Vector make_grid(std::span<const double> posterior, std::span<const double> prior, const GridSpec& spec);

Vector linspace(double lo, double hi, std::size_t points);

struct RatioDiagnostics
{
    Vector psi;
    Vector posterior_density;
    Vector prior_density;
    Vector posterior_bias;  // 0.5 h_x^2 * curvature of the posterior estimate
    Vector prior_bias;      // 0.5 h_pi^2 * curvature of the prior estimate; 0 for a closed-form prior
    Vector ratio_bias;      // first-order bias of the density ratio
    Vector ratio_variance;  // plug-in variance of the density ratio
    double posterior_bandwidth = 0.0;
    double prior_bandwidth = 0.0;
    double minimal_mse_rate = 0.0; // m^{-4/(d+5)}
};

struct DiagnosticsOptions
{
    std::size_t summary_dim = 1;
    /// Bandwidth for the curvature (second-derivative) estimates. Unset:
    /// use each estimate's own bandwidth.
    std::optional<double> curvature_bandwidth;
};

using PriorEstimate = std::variant<ScaledKde, PriorPdf>;

/// Plug-in bias and variance of the posterior/prior density ratio on the
/// grid, from the second-order Gaussian-kernel expansion.
RatioDiagnostics ratio_error_diagnostics(const ScaledKde& posterior, const PriorEstimate& prior,
                                         std::span<const double> grid, const DiagnosticsOptions& opts = {});

/// sup |a - b| over a shared grid, optionally restricted to [lo, hi].
double sup_norm_distance(const LikelihoodCurve& a, const LikelihoodCurve& b,
                         double lo = -std::numeric_limits<double>::infinity(),
                         double hi = std::numeric_limits<double>::infinity());

/// Linear re-interpolation of `curve` onto `grid`; points outside the curve's
/// range get value 0 and are masked.
LikelihoodCurve resample_curve(const LikelihoodCurve& curve, std::span<const double> grid);

/// Exact curve from a closed-form log likelihood, normalized like ABC curves.
LikelihoodCurve curve_from_loglik(std::span<const double> grid, const std::function<double(double)>& loglik,
                                  Normalization mode = Normalization::max_one);

} // namespace abcil

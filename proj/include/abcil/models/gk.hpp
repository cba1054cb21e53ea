#pragma once

#include <abcil/abc.hpp>
#include <abcil/core.hpp>

#include <cstdint>

namespace abcil {

inline constexpr double kGkDefaultC = 0.8;

/// g-and-k quantile function
///   Q(u) = A + B [1 + c (1 - e^{-g z}) / (1 + e^{-g z})] (1 + z^2)^k z,  z = Phi^{-1}(u).
/// Throws DomainError for u outside (0, 1), B <= 0 or k <= -1/2.
double gk_quantile(double u, double A, double B, double g, double k, double c = kGkDefaultC);

/// Same function with the standard-normal quantile already computed.
double gk_quantile_from_z(double z, double A, double B, double g, double k, double c = kGkDefaultC);

/// Scans dQ/dz over the z range reachable in double precision and reports
/// whether Q is strictly increasing there.
bool gk_is_monotone(double A, double B, double g, double k, double c = kGkDefaultC);

/// n draws by inversion: Q(u_i) with u_i iid Uniform(0, 1). Single column.
Dataset gk_simulate(std::size_t n, double A, double B, double g, double k, double c, std::uint64_t seed);

/// (mean, sd, skewness, kurtosis) from central moments with divisor n:
/// sd = sqrt(m2), skewness = m3 / m2^{3/2}, kurtosis = m4 / m2^2 (normal: 3).
/// Throws DimensionError for n < 4 and DegenerateSampleError for m2 = 0.
SummaryVector gk_summaries(const Dataset& data);

/// Replaces the psi column of draws over (A, B, g, k) by Q(u0; theta).
AbcDraws gk_psi_transform(AbcDraws draws, double u0, double c = kGkDefaultC);

/// theta = (A, B, g, k), iid Uniform(0, prior_upper) priors, one column of
/// observations. psi = Q(u0; theta) for a chosen quantile level u0.
class GkModel final : public GenerativeModel
{
public:
    explicit GkModel(double u0 = 0.5, double c = kGkDefaultC, double prior_upper = 10.0);

    std::string name() const override { return "gk"; }
    std::size_t parameter_dim() const override { return 4; }
    std::size_t summary_dim() const override { return 4; }

    Vector sample_prior(std::uint64_t seed) const override;
    double log_prior(std::span<const double> theta) const override;
    Dataset simulate(std::span<const double> theta, std::size_t n, std::uint64_t seed) const override;
    SummaryVector summarize(const Dataset& data) const override;

    const InterestMap& interest() const override { return interest_; }
    /// Random-walk variance 0.1 on every coordinate.
    Vector default_kernel_scale() const override;

    double level() const noexcept { return u0_; }
    double asymmetry() const noexcept { return c_; }

private:
    double u0_;
    double c_;
    double upper_;
    InterestMap interest_;
};

} // namespace abcil

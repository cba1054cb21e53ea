#pragma once

#include <abcil/core.hpp>

#include <cstdint>

namespace abcil {

/// Two independent Poisson samples of size n with means theta1, theta2 and
/// interest parameter psi = theta1 / theta2 (nuisance lambda = theta2).
/// Dataset columns: (x, y). Summaries: (mean x, mean y).
class PoissonRatioModel final : public GenerativeModel
{
public:
    /// theta1, theta2 iid Gamma(shape, rate).
    explicit PoissonRatioModel(double prior_shape = 0.1, double prior_rate = 0.1);

    std::string name() const override { return "poisson_ratio"; }
    std::size_t parameter_dim() const override { return 2; }
    std::size_t summary_dim() const override { return 2; }

    Vector sample_prior(std::uint64_t seed) const override;
    double log_prior(std::span<const double> theta) const override;
    Dataset simulate(std::span<const double> theta, std::size_t n, std::uint64_t seed) const override;
    SummaryVector summarize(const Dataset& data) const override;
    /// Draws the two sums directly as Poisson(n theta): same law as the
    /// summaries of a full simulation.
    SummaryVector simulate_summary(std::span<const double> theta, std::size_t n, std::uint64_t seed) const override;

    const InterestMap& interest() const override { return interest_; }

    /// The ratio of two iid Gamma(a, b) draws is beta-prime(a, a).
    std::optional<double> prior_psi_pdf(double psi) const override;
    bool has_prior_psi_pdf() const override { return true; }

    Vector default_kernel_scale() const override;
    bool psi_positive() const override { return true; }

    double prior_shape() const noexcept { return shape_; }
    double prior_rate() const noexcept { return rate_; }

private:
    double shape_;
    double rate_;
    InterestMap interest_;
};

/// log of psi^{n xbar} / (1 + psi)^{n (xbar + ybar)}: the integrated,
/// profile and conditional likelihood of the ratio all share this form.
/// Throws DomainError for psi <= 0.
double poisson_exact_log_likelihood(double psi, double xbar, double ybar, std::size_t n);

/// exp of the above.
double poisson_exact_integrated_likelihood(double psi, double xbar, double ybar, std::size_t n);

} // namespace abcil

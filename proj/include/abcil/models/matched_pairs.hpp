#pragma once

#include <abcil/core.hpp>
#include <abcil/quadrature.hpp>

#include <array>
#include <cstdint>

namespace abcil {

/// Matched pairs of Bernoulli observations with
///   logit P(R_i0 = 1) = lambda_i,  logit P(R_i1 = 1) = lambda_i + psi.
///
/// theta = (psi, lambda_1, ..., lambda_k). Prior: psi ~ Normal(mean, sd);
/// omega_i = logistic(lambda_i) ~ Beta(1/2, 1/2) independently of psi.
/// Dataset columns: (R0, R1). Summaries: (mean R0, mean R1).
class MatchedPairsModel final : public GenerativeModel
{
public:
    explicit MatchedPairsModel(std::size_t k_pairs, double psi_prior_mean = 0.0, double psi_prior_sd = 10.0);

    std::string name() const override { return "matched_pairs"; }
    std::size_t parameter_dim() const override { return k_ + 1; }
    std::size_t summary_dim() const override { return 2; }

    Vector sample_prior(std::uint64_t seed) const override;
    double log_prior(std::span<const double> theta) const override;
    /// n must equal k_pairs.
    Dataset simulate(std::span<const double> theta, std::size_t n, std::uint64_t seed) const override;
    SummaryVector summarize(const Dataset& data) const override;

    const InterestMap& interest() const override { return interest_; }
    std::optional<double> prior_psi_pdf(double psi) const override;
    bool has_prior_psi_pdf() const override { return true; }
    Vector default_kernel_scale() const override;

    std::size_t k_pairs() const noexcept { return k_; }

    /// Synthetic data at a true psi, with omega_i ~ Uniform(0, 1).
    Dataset generate_observed(double psi_true, std::uint64_t seed) const;

private:
    std::size_t k_;
    double psi_mean_;
    double psi_sd_;
    InterestMap interest_;
};

/// n_jl = number of pairs with (R0, R1) = (j, l).
struct PairCounts
{
    std::array<std::array<std::size_t, 2>, 2> n{};

    std::size_t discordant() const { return n[0][1] + n[1][0]; } // b: pairs with S = 1
    std::size_t discordant_successes() const { return n[0][1]; } // T restricted to S = 1 pairs
    std::size_t total() const { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }
};

PairCounts count_pairs(const Dataset& data);

/// Location of a likelihood maximum; `boundary` is set when the supremum is
/// approached as psi -> +-infinity (T = 0 or T = b), with `psi` = +-inf.
struct ArgmaxResult
{
    double psi = 0.0;
    bool boundary = false;
};

// Closed-form partial likelihoods on the b discordant pairs, T of which have
// R1 = 1. All throw DomainError when b = 0 or T > b.

/// psi T - 2 b log(1 + e^{psi/2}).
double matched_pairs_profile_loglik(double psi, std::size_t T, std::size_t b);
double matched_pairs_profile(double psi, std::size_t T, std::size_t b);
/// Conditional MLE of lambda_i on a discordant pair at fixed psi.
double matched_pairs_lambda_hat(double psi);
ArgmaxResult matched_pairs_profile_argmax(std::size_t T, std::size_t b);

/// Profile times the correction e^{b psi / 4} / (1 + e^{psi/2})^b.
double matched_pairs_modified_profile_loglik(double psi, std::size_t T, std::size_t b);
double matched_pairs_modified_profile(double psi, std::size_t T, std::size_t b);
double matched_pairs_modification_factor(double psi, std::size_t b);
ArgmaxResult matched_pairs_modified_profile_argmax(std::size_t T, std::size_t b);

/// log C(b, T) + psi T - b log(1 + e^psi) (binomial law of T given S_i = 1).
double matched_pairs_conditional_loglik(double psi, std::size_t T, std::size_t b);
double matched_pairs_conditional(double psi, std::size_t T, std::size_t b);
ArgmaxResult matched_pairs_conditional_argmax(std::size_t T, std::size_t b);

/// Sum over all pairs (concordant included) of
/// n_jl [log 2F1(1, j + l + 1/2; 3; 1 - e^psi) + l psi].
double matched_pairs_integrated_loglik(double psi, const PairCounts& counts, const QuadratureSpec& spec = {});
double matched_pairs_integrated(double psi, const PairCounts& counts, const QuadratureSpec& spec = {});

} // namespace abcil

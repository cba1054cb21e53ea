#pragma once

#include <abcil/core.hpp>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace abcil {

enum class SamplerKind { rejection, mcmc_movestay, mcmc_retry };

std::string to_string(SamplerKind kind);
/// Accepts "rejection", "mcmc_movestay", "mcmc_retry"; throws ConfigError otherwise.
SamplerKind parse_sampler(const std::string& name);

struct AbcConfig
{
    double epsilon = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 1;

    // Rejection sampler. target_accepts == 0 switches to a fixed-proposal
    // run that evaluates exactly max_proposals draws and keeps every accept.
    std::size_t target_accepts = 1000;
    std::size_t max_proposals = 100'000'000;
    std::size_t chunk_size = 4096;
    std::size_t workers = 1;

    // MCMC samplers.
    std::size_t chain_length = 10'000;
    std::optional<std::size_t> burn_in; // default: 10% of chain_length
    std::size_t chains = 1;
    Vector kernel_scale;                // empty: model default
    std::size_t init_budget = 10'000'000;
    std::size_t retry_budget = 1'000'000;

    // Per-component summary scaling; empty means plain Euclidean distance.
    Vector summary_scale;

    std::size_t effective_burn_in() const;
    void validate() const;
};

/// Output of a sampler: accepted (or recorded) draws plus run metadata.
struct AbcDraws
{
    std::string sampler;
    Matrix theta;                           // M x d
    Matrix psi;                             // M x k
    Vector distances;                       // one per row, all <= epsilon
    std::vector<std::size_t> proposal_index; // rejection only: position in the proposal stream
    double epsilon = 0.0;
    double acceptance_rate = 0.0;           // accepted / proposed
    std::size_t n_accepted = 0;
    std::size_t n_proposals = 0;
    std::size_t n_simulations = 0;
    std::size_t init_attempts = 0;          // MCMC only, summed over chains
    std::uint64_t seed = 0;
    double min_distance = std::numeric_limits<double>::infinity();
    bool budget_exhausted = false;          // rejection stopped short of target_accepts

    std::size_t size() const noexcept { return psi.rows(); }
    Vector psi_column(std::size_t j = 0) const { return psi.column(j); }
};

AbcDraws rejection_abc(const GenerativeModel& model, const Dataset& observed, const AbcConfig& cfg);

/// ABC-MCMC where a proposal whose simulation misses the tolerance leaves
/// the chain at its previous state.
AbcDraws abc_mcmc_movestay(const GenerativeModel& model, const Dataset& observed, const AbcConfig& cfg);

/// ABC-MCMC where a proposal whose simulation misses the tolerance is
/// discarded and replaced by a fresh proposal from the same state.
AbcDraws abc_mcmc_retry(const GenerativeModel& model, const Dataset& observed, const AbcConfig& cfg);

AbcDraws run_sampler(SamplerKind kind, const GenerativeModel& model, const Dataset& observed, const AbcConfig& cfg);

struct CalibrationResult
{
    double epsilon = 0.0;
    double quantile = 0.0;
    std::size_t pilot_n = 0;
    Vector distances; // every pilot distance in proposal order; failures are +inf
};

/// Prior-predictive pilot: simulates pilot_n datasets, records the distance
/// of each to the observed summaries and returns their q-th order-statistic
/// quantile as the tolerance.
CalibrationResult calibrate_tolerance(const GenerativeModel& model, const Dataset& observed, std::size_t pilot_n,
                                      double q, std::uint64_t seed, const Vector& summary_scale = {},
                                      std::size_t workers = 1);

/// Per-component median absolute deviation of prior-predictive summaries.
/// Components with zero MAD get scale 1.
Vector mad_summary_scale(const GenerativeModel& model, std::size_t n, std::size_t pilot_n, std::uint64_t seed);

/// m draws of psi from its marginal prior.
Vector sample_prior_psi(const GenerativeModel& model, std::size_t m, std::uint64_t seed);

struct Histogram
{
    Vector edges;                   // bins + 1 edges
    std::vector<std::size_t> counts;
};

/// Equal-width histogram of the finite values in x over [min, max].
Histogram make_histogram(std::span<const double> x, std::size_t bins);

} // namespace abcil

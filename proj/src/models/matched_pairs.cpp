#include <abcil/models/matched_pairs.hpp>
#include <abcil/special.hpp>

#include "distributions.hpp"

#include <cmath>
#include <limits>

namespace abcil {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_discordant(std::size_t T, std::size_t b)
{
    if (b == 0)
        throw DomainError("matched pairs: no discordant pairs (b = 0), the likelihood is undefined");
    if (T > b)
        throw DomainError("matched pairs: T = " + std::to_string(T) + " exceeds b = " + std::to_string(b));
}

double logit(double p)
{
    return std::log(p) - std::log1p(-p);
}

} // namespace

MatchedPairsModel::MatchedPairsModel(std::size_t k_pairs, double psi_prior_mean, double psi_prior_sd)
    : k_(k_pairs), psi_mean_(psi_prior_mean), psi_sd_(psi_prior_sd), interest_(InterestMap::coordinates({0}))
{
    if (k_ == 0)
        throw ConfigError("matched_pairs: need at least one pair");
    if (!(psi_sd_ > 0.0))
        throw ConfigError("matched_pairs: psi prior sd must be positive");
}

Vector MatchedPairsModel::sample_prior(std::uint64_t seed) const
{
    Rng rng = make_rng(seed);
    Vector theta(k_ + 1);
    theta[0] = psi_mean_ + psi_sd_ * std::normal_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t i = 1; i <= k_; ++i) {
        double lambda;
        do {
            lambda = logit(detail::beta_draw(rng, 0.5, 0.5));
        } while (!std::isfinite(lambda));
        theta[i] = lambda;
    }
    return theta;
}

double MatchedPairsModel::log_prior(std::span<const double> theta) const
{
    if (theta.size() != k_ + 1)
        throw DimensionError("matched_pairs: theta has wrong dimension");
    double lp = detail::log_normal_pdf(theta[0], psi_mean_, psi_sd_);
    // Density of lambda = logit(omega) with omega ~ Beta(1/2, 1/2):
    // omega^{1/2} (1 - omega)^{1/2} / pi.
    for (std::size_t i = 1; i <= k_; ++i) {
        const double l = theta[i];
        if (!std::isfinite(l))
            return detail::kNegInf;
        lp += -0.5 * detail::log1p_exp(-l) - 0.5 * detail::log1p_exp(l) - std::log(std::numbers::pi);
    }
    return lp;
}

Dataset MatchedPairsModel::simulate(std::span<const double> theta, std::size_t n, std::uint64_t seed) const
{
    if (theta.size() != k_ + 1)
        throw DimensionError("matched_pairs: theta has wrong dimension");
    if (n != k_)
        throw DimensionError("matched_pairs: simulated size must equal the number of pairs");
    Rng rng = make_rng(seed);
    Matrix obs(k_, 2);
    const double psi = theta[0];
    for (std::size_t i = 0; i < k_; ++i) {
        const double lambda = theta[i + 1];
        obs(i, 0) = uniform_open(rng) < detail::logistic(lambda) ? 1.0 : 0.0;
        obs(i, 1) = uniform_open(rng) < detail::logistic(lambda + psi) ? 1.0 : 0.0;
    }
    return Dataset(std::move(obs));
}

SummaryVector MatchedPairsModel::summarize(const Dataset& data) const
{
    if (data.width() != 2)
        throw DimensionError("matched_pairs: dataset must have columns (R0, R1)");
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        s0 += data.observations()(i, 0);
        s1 += data.observations()(i, 1);
    }
    const double n = static_cast<double>(data.n());
    return SummaryVector({s0 / n, s1 / n});
}

std::optional<double> MatchedPairsModel::prior_psi_pdf(double psi) const
{
    return std::exp(detail::log_normal_pdf(psi, psi_mean_, psi_sd_));
}

Vector MatchedPairsModel::default_kernel_scale() const
{
    // logit(Beta(1/2, 1/2)) has standard deviation pi.
    Vector scale(k_ + 1, 0.1 * std::numbers::pi);
    scale[0] = 0.1 * psi_sd_;
    return scale;
}

Dataset MatchedPairsModel::generate_observed(double psi_true, std::uint64_t seed) const
{
    Rng rng = make_rng(seed);
    Vector theta(k_ + 1);
    theta[0] = psi_true;
    for (std::size_t i = 1; i <= k_; ++i)
        theta[i] = logit(uniform_open(rng));
    return simulate(theta, k_, derive_seed(seed, 1));
}

PairCounts count_pairs(const Dataset& data)
{
    if (data.width() != 2)
        throw DimensionError("count_pairs: dataset must have columns (R0, R1)");
    PairCounts c;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double r0 = data.observations()(i, 0);
        const double r1 = data.observations()(i, 1);
        if ((r0 != 0.0 && r0 != 1.0) || (r1 != 0.0 && r1 != 1.0))
            throw DomainError("count_pairs: responses must be 0 or 1");
        c.n[static_cast<int>(r0)][static_cast<int>(r1)]++;
    }
    return c;
}

double matched_pairs_profile_loglik(double psi, std::size_t T, std::size_t b)
{
    check_discordant(T, b);
    return psi * static_cast<double>(T) - 2.0 * static_cast<double>(b) * detail::log1p_exp(0.5 * psi);
}

double matched_pairs_profile(double psi, std::size_t T, std::size_t b)
{
    return std::exp(matched_pairs_profile_loglik(psi, T, b));
}

double matched_pairs_lambda_hat(double psi)
{
    return -0.5 * psi;
}

ArgmaxResult matched_pairs_profile_argmax(std::size_t T, std::size_t b)
{
    check_discordant(T, b);
    if (T == 0)
        return {-kInf, true};
    if (T == b)
        return {kInf, true};
    return {2.0 * std::log(static_cast<double>(T) / static_cast<double>(b - T)), false};
}

double matched_pairs_modification_factor(double psi, std::size_t b)
{
    const double bb = static_cast<double>(b);
    return std::exp(bb * psi / 4.0 - bb * detail::log1p_exp(0.5 * psi));
}

double matched_pairs_modified_profile_loglik(double psi, std::size_t T, std::size_t b)
{
    const double bb = static_cast<double>(b);
    return matched_pairs_profile_loglik(psi, T, b) + bb * psi / 4.0 - bb * detail::log1p_exp(0.5 * psi);
}

double matched_pairs_modified_profile(double psi, std::size_t T, std::size_t b)
{
    return std::exp(matched_pairs_modified_profile_loglik(psi, T, b));
}

ArgmaxResult matched_pairs_modified_profile_argmax(std::size_t T, std::size_t b)
{
    check_discordant(T, b);
    // Stationarity: T + b/4 = (3b/2) * logistic(psi/2), always interior.
    const double p = (4.0 * static_cast<double>(T) + static_cast<double>(b)) / (6.0 * static_cast<double>(b));
    return {2.0 * logit(p), false};
}

double matched_pairs_conditional_loglik(double psi, std::size_t T, std::size_t b)
{
    check_discordant(T, b);
    const double bb = static_cast<double>(b);
    const double tt = static_cast<double>(T);
    const double log_choose = std::lgamma(bb + 1.0) - std::lgamma(tt + 1.0) - std::lgamma(bb - tt + 1.0);
    return log_choose + psi * tt - bb * detail::log1p_exp(psi);
}

double matched_pairs_conditional(double psi, std::size_t T, std::size_t b)
{
    return std::exp(matched_pairs_conditional_loglik(psi, T, b));
}

ArgmaxResult matched_pairs_conditional_argmax(std::size_t T, std::size_t b)
{
    check_discordant(T, b);
    if (T == 0)
        return {-kInf, true};
    if (T == b)
        return {kInf, true};
    return {std::log(static_cast<double>(T) / static_cast<double>(b - T)), false};
}

double matched_pairs_integrated_loglik(double psi, const PairCounts& counts, const QuadratureSpec& spec)
{
    if (counts.total() == 0)
        throw DomainError("matched pairs integrated likelihood: no pairs");
    double ll = 0.0;
    for (int j = 0; j < 2; ++j) {
        for (int l = 0; l < 2; ++l) {
            const auto njl = counts.n[j][l];
            if (njl == 0)
                continue;
            ll += static_cast<double>(njl) * (log_gauss_2f1_matched(j + l, psi, spec) + l * psi);
        }
    }
    return ll;
}

double matched_pairs_integrated(double psi, const PairCounts& counts, const QuadratureSpec& spec)
{
    return std::exp(matched_pairs_integrated_loglik(psi, counts, spec));
}

} // namespace abcil

#include <abcil/models/poisson_ratio.hpp>

#include "distributions.hpp"

#include <cmath>

namespace abcil {

namespace {

int poisson_draw(Rng& rng, double mean)
{
    if (!(mean > 0.0))
        return 0;
    return std::poisson_distribution<int>(mean)(rng);
}

} // namespace

PoissonRatioModel::PoissonRatioModel(double prior_shape, double prior_rate)
    : shape_(prior_shape), rate_(prior_rate),
      interest_(InterestMap::transform("ratio", 1, [](std::span<const double> t) {
          if (t.size() != 2)
              throw ConfigError("ratio transform needs theta = (theta1, theta2)");
          return Vector{t[0] / t[1]};
      }))
{
    if (!(shape_ > 0.0) || !(rate_ > 0.0))
        throw ConfigError("Gamma prior parameters must be positive");
}

Vector PoissonRatioModel::sample_prior(std::uint64_t seed) const
{
    Rng rng = make_rng(seed);
    Vector theta(2);
    // Gamma draws with a tiny shape can underflow to zero; redraw those.
    for (double& t : theta) {
        do {
            t = detail::gamma_draw(rng, shape_, rate_);
        } while (!(t > 0.0));
    }
    return theta;
}

double PoissonRatioModel::log_prior(std::span<const double> theta) const
{
    return detail::log_gamma_pdf(theta[0], shape_, rate_) + detail::log_gamma_pdf(theta[1], shape_, rate_);
}

Dataset PoissonRatioModel::simulate(std::span<const double> theta, std::size_t n, std::uint64_t seed) const
{
    if (theta.size() != 2)
        throw DimensionError("poisson_ratio: theta must have two entries");
    if (theta[0] < 0.0 || theta[1] < 0.0)
        throw DomainError("poisson_ratio: Poisson means must be nonnegative");
    Rng rng = make_rng(seed);
    Matrix obs(n, 2);
    for (std::size_t i = 0; i < n; ++i)
        obs(i, 0) = poisson_draw(rng, theta[0]);
    for (std::size_t i = 0; i < n; ++i)
        obs(i, 1) = poisson_draw(rng, theta[1]);
    return Dataset(std::move(obs));
}

SummaryVector PoissonRatioModel::summarize(const Dataset& data) const
{
    if (data.width() != 2)
        throw DimensionError("poisson_ratio: dataset must have columns (x, y)");
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        sx += data.observations()(i, 0);
        sy += data.observations()(i, 1);
    }
    const double n = static_cast<double>(data.n());
    return SummaryVector({sx / n, sy / n});
}

SummaryVector PoissonRatioModel::simulate_summary(std::span<const double> theta, std::size_t n,
                                                  std::uint64_t seed) const
{
    if (theta[0] < 0.0 || theta[1] < 0.0)
        throw DomainError("poisson_ratio: Poisson means must be nonnegative");
    Rng rng = make_rng(seed);
    const double nn = static_cast<double>(n);
    const double sx = poisson_draw(rng, nn * theta[0]);
    const double sy = poisson_draw(rng, nn * theta[1]);
    return SummaryVector({sx / nn, sy / nn});
}

std::optional<double> PoissonRatioModel::prior_psi_pdf(double psi) const
{
    if (!(psi > 0.0))
        return 0.0;
    const double log_beta = 2.0 * std::lgamma(shape_) - std::lgamma(2.0 * shape_);
    return std::exp((shape_ - 1.0) * std::log(psi) - 2.0 * shape_ * std::log1p(psi) - log_beta);
}

Vector PoissonRatioModel::default_kernel_scale() const
{
    const double sd = std::sqrt(shape_) / rate_;
    return {0.1 * sd, 0.1 * sd};
}

double poisson_exact_log_likelihood(double psi, double xbar, double ybar, std::size_t n)
{
    if (!(psi > 0.0))
        throw DomainError("poisson exact likelihood: psi must be positive");
    if (xbar < 0.0 || ybar < 0.0)
        throw DomainError("poisson exact likelihood: sample means must be nonnegative");
    const double nn = static_cast<double>(n);
    const double sx = nn * xbar;
    return (sx > 0.0 ? sx * std::log(psi) : 0.0) - nn * (xbar + ybar) * std::log1p(psi);
}

double poisson_exact_integrated_likelihood(double psi, double xbar, double ybar, std::size_t n)
{
    return std::exp(poisson_exact_log_likelihood(psi, xbar, ybar, n));
}

} // namespace abcil

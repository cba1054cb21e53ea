#include <abcil/kde.hpp>
#include <abcil/stats.hpp>

#include <cmath>
#include <numbers>

namespace abcil {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

inline double phi(double u)
{
    return kInvSqrt2Pi * std::exp(-0.5 * u * u);
}

Vector to_estimation_scale(std::span<const double> sample, DensityScale scale)
{
    Vector out(sample.begin(), sample.end());
    if (scale == DensityScale::log) {
        for (double& v : out) {
            if (!(v > 0.0))
                throw DomainError("log-scale KDE requires strictly positive draws");
            v = std::log(v);
        }
    }
    return out;
}

} // namespace

KdeEstimate::KdeEstimate(Vector sample, double bandwidth) : sample_(std::move(sample)), h_(bandwidth)
{
    if (sample_.size() < 2)
        throw DimensionError("KDE needs at least two sample points");
    if (!(h_ > 0.0) || !std::isfinite(h_))
        throw DomainError("KDE bandwidth must be positive and finite");
    for (double v : sample_)
        if (!std::isfinite(v))
            throw DomainError("KDE sample contains a non-finite value");
}

double silverman_bandwidth(std::span<const double> sample)
{
    if (sample.size() < 2)
        throw DimensionError("silverman_bandwidth: need at least two points");
    for (double v : sample)
        if (!std::isfinite(v))
            throw DomainError("silverman_bandwidth: non-finite sample value");
    const double sd = stats::sample_sd(sample);
    if (!(sd > 0.0))
        throw DegenerateSampleError("silverman_bandwidth: sample has zero spread");
    const double iqr = stats::quantile(sample, 0.75) - stats::quantile(sample, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(sample.size()), -0.2);
}

double mse_rate_bandwidth(std::size_t m, std::size_t d, double c)
{
    if (m < 2 || d < 1)
        throw DomainError("mse_rate_bandwidth: need m >= 2 and d >= 1");
    if (!(c > 0.0))
        throw DomainError("mse_rate_bandwidth: constant must be positive");
    return c * std::pow(static_cast<double>(m), -1.0 / static_cast<double>(d + 5));
}

double minimal_mse_rate(std::size_t m, std::size_t d)
{
    if (m < 2 || d < 1)
        throw DomainError("minimal_mse_rate: need m >= 2 and d >= 1");
    return std::pow(static_cast<double>(m), -4.0 / static_cast<double>(d + 5));
}

double kde_pdf(const KdeEstimate& est, double x)
{
    const double h = est.bandwidth();
    double acc = 0.0;
    for (double s : est.sample())
        acc += phi((x - s) / h);
    return acc / (static_cast<double>(est.size()) * h);
}

double kde_derivative(const KdeEstimate& est, double x)
{
    const double h = est.bandwidth();
    double acc = 0.0;
    for (double s : est.sample()) {
        const double u = (x - s) / h;
        acc -= u * phi(u);
    }
    return acc / (static_cast<double>(est.size()) * h * h);
}

double kde_second_derivative(const KdeEstimate& est, double x)
{
    const double h = est.bandwidth();
    double acc = 0.0;
    for (double s : est.sample()) {
        const double u = (x - s) / h;
        acc += (u * u - 1.0) * phi(u);
    }
    return acc / (static_cast<double>(est.size()) * h * h * h);
}

Vector kde_grid(const KdeEstimate& est, std::span<const double> grid)
{
    if (grid.empty())
        throw DimensionError("kde_grid: empty grid");
    Vector out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = kde_pdf(est, grid[i]);
    return out;
}

double select_bandwidth(std::span<const double> sample, const BandwidthOptions& opts)
{
    switch (opts.rule) {
    case BandwidthRule::silverman:
        return silverman_bandwidth(sample);
    case BandwidthRule::mse_rate:
        return mse_rate_bandwidth(sample.size(), opts.summary_dim, opts.rate_constant);
    }
    throw ConfigError("unknown bandwidth rule");
}

ScaledKde::ScaledKde(std::span<const double> sample, DensityScale scale, const BandwidthOptions& opts)
    : est_([&] {
          Vector t = to_estimation_scale(sample, scale);
          const double h = select_bandwidth(t, opts);
          return KdeEstimate(std::move(t), h);
      }()),
      scale_(scale)
{
}

double ScaledKde::pdf(double x) const
{
    if (scale_ == DensityScale::linear)
        return kde_pdf(est_, x);
    if (!(x > 0.0))
        return 0.0;
    return kde_pdf(est_, std::log(x)) / x;
}

Vector ScaledKde::pdf(std::span<const double> grid) const
{
    Vector out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = pdf(grid[i]);
    return out;
}

double ScaledKde::second_derivative(double x) const
{
    if (scale_ == DensityScale::linear)
        return kde_second_derivative(est_, x);
    if (!(x > 0.0))
        return 0.0;
    // f(x) = g(y) e^{-y} with y = log x gives f'' = (g'' - 3 g' + 2 g) e^{-3y}.
    const double y = std::log(x);
    const double g0 = kde_pdf(est_, y);
    const double g1 = kde_derivative(est_, y);
    const double g2 = kde_second_derivative(est_, y);
    return (g2 - 3.0 * g1 + 2.0 * g0) / (x * x * x);
}

double ScaledKde::leading_bias(double x, const KdeEstimate& curvature) const
{
    const double h = est_.bandwidth();
    if (scale_ == DensityScale::linear)
        return 0.5 * h * h * kde_second_derivative(curvature, x);
    if (!(x > 0.0))
        return 0.0;
    return 0.5 * h * h * kde_second_derivative(curvature, std::log(x)) / x;
}

double ScaledKde::asymptotic_variance(double x) const
{
    const double h = est_.bandwidth();
    const double m = static_cast<double>(est_.size());
    const double denom = 2.0 * m * h * std::sqrt(std::numbers::pi);
    if (scale_ == DensityScale::linear)
        return kde_pdf(est_, x) / denom;
    if (!(x > 0.0))
        return 0.0;
    return kde_pdf(est_, std::log(x)) / denom / (x * x);
}

ProductKde::ProductKde(Matrix sample, Vector bandwidths) : sample_(std::move(sample)), h_(std::move(bandwidths))
{
    if (sample_.rows() < 2)
        throw DimensionError("ProductKde needs at least two points");
    if (h_.size() != sample_.cols())
        throw DimensionError("ProductKde: one bandwidth per dimension required");
    for (double h : h_)
        if (!(h > 0.0))
            throw DomainError("ProductKde: bandwidths must be positive");
}

double ProductKde::pdf(std::span<const double> x) const
{
    if (x.size() != dim())
        throw DimensionError("ProductKde: point dimension mismatch");
    double norm = static_cast<double>(sample_.rows());
    for (double h : h_)
        norm *= h;
    double acc = 0.0;
    for (std::size_t r = 0; r < sample_.rows(); ++r) {
        double k = 1.0;
        for (std::size_t c = 0; c < dim(); ++c)
            k *= phi((x[c] - sample_(r, c)) / h_[c]);
        acc += k;
    }
    return acc / norm;
}

} // namespace abcil

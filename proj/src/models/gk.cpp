#include <abcil/models/gk.hpp>
#include <abcil/rng.hpp>
#include <abcil/special.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace abcil {

namespace {

void check_gk(double B, double k)
{
    if (!(B > 0.0))
        throw DomainError("g-and-k: B must be positive");
    if (!(k > -0.5))
        throw DomainError("g-and-k: k must exceed -1/2");
}

// Largest |z| reachable from u in (0, 1) with uniform_open: Phi^{-1}(2^-54).
constexpr double kZMax = 8.3;

} // namespace

double gk_quantile_from_z(double z, double A, double B, double g, double k, double c)
{
    check_gk(B, k);
    // (1 - e^{-gz}) / (1 + e^{-gz}) = tanh(gz / 2), which does not overflow.
    const double skew = 1.0 + c * std::tanh(0.5 * g * z);
    return A + B * skew * std::pow(1.0 + z * z, k) * z;
}

double gk_quantile(double u, double A, double B, double g, double k, double c)
{
    if (!(u > 0.0 && u < 1.0))
        throw DomainError("g-and-k quantile: u must lie in (0, 1)");
    return gk_quantile_from_z(std_normal_quantile(u), A, B, g, k, c);
}

bool gk_is_monotone(double A, double B, double g, double k, double c)
{
    (void)A;
    check_gk(B, k);
    constexpr int steps = 4000;
    for (int i = 0; i <= steps; ++i) {
        const double z = -kZMax + 2.0 * kZMax * i / steps;
        const double th = std::tanh(0.5 * g * z);
        const double p = std::pow(1.0 + z * z, k - 1.0);
        // dQ/dz / B
        const double d = 0.5 * c * g * (1.0 - th * th) * (1.0 + z * z) * p * z +
                         (1.0 + c * th) * p * (1.0 + (2.0 * k + 1.0) * z * z);
        if (!(d > 0.0))
            return false;
    }
    return true;
}

Dataset gk_simulate(std::size_t n, double A, double B, double g, double k, double c, std::uint64_t seed)
{
    check_gk(B, k);
    if (n == 0)
        throw DimensionError("gk_simulate: n must be positive");
    Rng rng = make_rng(seed);
    Matrix obs(n, 1);
    for (std::size_t i = 0; i < n; ++i)
        obs(i, 0) = gk_quantile_from_z(std_normal_quantile(uniform_open(rng)), A, B, g, k, c);
    return Dataset(std::move(obs));
}

SummaryVector gk_summaries(const Dataset& data)
{
    if (data.width() != 1)
        throw DimensionError("gk_summaries: expected a single column");
    const std::size_t n = data.n();
    if (n < 4)
        throw DimensionError("gk_summaries: need at least 4 observations");
    const auto x = data.observations().data();
    double sum = 0.0;
    for (double v : x)
        sum += v;
    const double mean = sum / static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double nn = static_cast<double>(n);
    m2 /= nn;
    m3 /= nn;
    m4 /= nn;
    if (!(m2 > 0.0))
        throw DegenerateSampleError("gk_summaries: zero variance");
    return SummaryVector({mean, std::sqrt(m2), m3 / std::pow(m2, 1.5), m4 / (m2 * m2)});
}

AbcDraws gk_psi_transform(AbcDraws draws, double u0, double c)
{
    if (!(u0 > 0.0 && u0 < 1.0))
        throw DomainError("gk_psi_transform: u0 must lie in (0, 1)");
    if (draws.theta.cols() != 4)
        throw DimensionError("gk_psi_transform: draws must be over (A, B, g, k)");
    const double z = std_normal_quantile(u0);
    Matrix psi(draws.theta.rows(), 1);
    for (std::size_t i = 0; i < psi.rows(); ++i) {
        const auto t = draws.theta.row(i);
        psi(i, 0) = gk_quantile_from_z(z, t[0], t[1], t[2], t[3], c);
    }
    draws.psi = std::move(psi);
    return draws;
}

GkModel::GkModel(double u0, double c, double prior_upper)
    : u0_(u0), c_(c), upper_(prior_upper),
      interest_(InterestMap::transform(
          [&] {
              std::ostringstream os;
              os << "gk_quantile(" << u0 << ")";
              return os.str();
          }(),
          1,
          [z = (u0 > 0.0 && u0 < 1.0) ? std_normal_quantile(u0) : 0.0, c](std::span<const double> t) {
              if (t.size() != 4)
                  throw ConfigError("g-and-k quantile transform needs theta = (A, B, g, k)");
              return Vector{gk_quantile_from_z(z, t[0], t[1], t[2], t[3], c)};
          }))
{
    if (!(u0 > 0.0 && u0 < 1.0))
        throw ConfigError("gk: quantile level must lie in (0, 1)");
    if (!(prior_upper > 0.0))
        throw ConfigError("gk: prior upper bound must be positive");
    if (!(c >= 0.0))
        throw ConfigError("gk: c must be nonnegative");
}

Vector GkModel::sample_prior(std::uint64_t seed) const
{
    Rng rng = make_rng(seed);
    Vector theta(4);
    for (double& t : theta)
        t = upper_ * uniform_open(rng);
    return theta;
}

double GkModel::log_prior(std::span<const double> theta) const
{
    if (theta.size() != 4)
        throw DimensionError("gk: theta must have four entries");
    for (double t : theta)
        if (!(t > 0.0 && t < upper_))
            return -std::numeric_limits<double>::infinity();
    return -4.0 * std::log(upper_);
}

Dataset GkModel::simulate(std::span<const double> theta, std::size_t n, std::uint64_t seed) const
{
    if (theta.size() != 4)
        throw DimensionError("gk: theta must have four entries");
    return gk_simulate(n, theta[0], theta[1], theta[2], theta[3], c_, seed);
}

SummaryVector GkModel::summarize(const Dataset& data) const
{
    return gk_summaries(data);
}

Vector GkModel::default_kernel_scale() const
{
    return Vector(4, std::sqrt(0.1));
}

} // namespace abcil

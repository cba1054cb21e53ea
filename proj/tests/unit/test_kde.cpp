#include <doctest.h>

#include <abcil/kde.hpp>
#include <abcil/rng.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace abcil;

namespace {

double phi(double u)
{
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

Vector normal_sample(std::size_t m, std::uint64_t seed, double mu = 0.0, double sd = 1.0)
{
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> d(mu, sd);
    Vector x(m);
    for (double& v : x)
        v = d(eng);
    return x;
}

} // namespace

TEST_CASE("silverman bandwidth on 1..10")
{
    Vector x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    // sd = sqrt(55/6); IQR (type 7) = 7.75 - 3.25 = 4.5, and 4.5 / 1.34 > sd.
    const double expected = 0.9 * std::sqrt(55.0 / 6.0) * std::pow(10.0, -0.2);
    CHECK(silverman_bandwidth(x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("silverman bandwidth falls back to the sd when the IQR collapses")
{
    Vector x(20, 1.0);
    x[0] = 0.0;
    x[19] = 2.0;
    // mean 1, sum of squared deviations 2
    const double sd = std::sqrt(2.0 / 19.0);
    CHECK(silverman_bandwidth(x) == doctest::Approx(0.9 * sd * std::pow(20.0, -0.2)));

    CHECK_THROWS_AS(silverman_bandwidth(Vector(5, 3.0)), DegenerateSampleError);
}

TEST_CASE("rate bandwidth and minimal mse rate")
{
    CHECK(mse_rate_bandwidth(64, 1, 1.0) == 0.5);
    CHECK(mse_rate_bandwidth(64, 1, 2.0) == 1.0);
    CHECK(minimal_mse_rate(10000, 4) == doctest::Approx(std::pow(10.0, -16.0 / 9.0)).epsilon(1e-14));
}

TEST_CASE("kde value from the kernel sum")
{
    const KdeEstimate est({-1.0, 1.0}, 1.0);
    CHECK(kde_pdf(est, 0.0) == doctest::Approx(phi(1.0)));
    CHECK(kde_pdf(est, 1.0) == doctest::Approx(0.5 * (phi(2.0) + phi(0.0))));
}

TEST_CASE("kde construction errors")
{
    CHECK_THROWS_AS(KdeEstimate({1.0}, 1.0), DimensionError);
    CHECK_THROWS_AS(KdeEstimate({1.0, 2.0}, 0.0), DomainError);
    CHECK_THROWS_AS(KdeEstimate({1.0, std::nan("")}, 1.0), DomainError);
}

TEST_CASE("kde integrates to one")
{
    const Vector x = normal_sample(500, 3, 2.0, 0.7);
    const KdeEstimate est(x, silverman_bandwidth(x));
    double sum = 0.0;
    const double step = 0.001;
    for (double t = -6.0; t <= 10.0; t += step)
        sum += kde_pdf(est, t) * step;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("kde derivatives match finite differences")
{
    const Vector x = normal_sample(50, 5);
    const KdeEstimate est(x, 0.4);
    const double d = 1e-4;
    for (double t : {-1.3, 0.0, 0.7, 2.2}) {
        const double fd1 = (kde_pdf(est, t + d) - kde_pdf(est, t - d)) / (2 * d);
        const double fd2 = (kde_pdf(est, t + d) - 2 * kde_pdf(est, t) + kde_pdf(est, t - d)) / (d * d);
        CHECK(kde_derivative(est, t) == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(kde_second_derivative(est, t) == doctest::Approx(fd2).epsilon(1e-4));
    }
}

TEST_CASE("grid evaluation is bitwise identical to pointwise evaluation")
{
    const Vector x = normal_sample(100, 8);
    const KdeEstimate est(x, 0.3);
    const Vector grid{-2.0, -0.5, 0.1, 1.9};
    const Vector values = kde_grid(est, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(values[i] == kde_pdf(est, grid[i]));
}

TEST_CASE("log-scale estimate: zero on the non-positive axis, unit mass")
{
    const Vector y = normal_sample(400, 11, 0.0, 0.5);
    Vector x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        x[i] = std::exp(y[i]);
    const ScaledKde k(x, DensityScale::log);
    CHECK(k.pdf(0.0) == 0.0);
    CHECK(k.pdf(-1.0) == 0.0);
    // the log-scale estimate is the change of variables of the y-scale one
    CHECK(k.pdf(2.0) == doctest::Approx(kde_pdf(k.estimate(), std::log(2.0)) / 2.0));
    double sum = 0.0;
    const double step = 1e-4;
    for (double t = step / 2; t < 40.0; t += step)
        sum += k.pdf(t) * step;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("log-scale second derivative matches finite differences")
{
    const Vector y = normal_sample(60, 12, 0.0, 0.4);
    Vector x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        x[i] = std::exp(y[i]);
    const ScaledKde k(x, DensityScale::log);
    const double d = 1e-4;
    for (double t : {0.6, 1.0, 1.7}) {
        const double fd2 = (k.pdf(t + d) - 2 * k.pdf(t) + k.pdf(t - d)) / (d * d);
        CHECK(k.second_derivative(t) == doctest::Approx(fd2).epsilon(1e-4));
    }
}

TEST_CASE("bandwidth selection")
{
    const Vector x = normal_sample(256, 2);
    CHECK(select_bandwidth(x, {}) == silverman_bandwidth(x));
    BandwidthOptions rate{BandwidthRule::mse_rate, 2.0, 3};
    CHECK(select_bandwidth(x, rate) == doctest::Approx(2.0 * std::pow(256.0, -1.0 / 8.0)));
}

TEST_CASE("product kernel factorizes")
{
    Matrix s(2, 2);
    s(0, 0) = 0.0;
    s(0, 1) = 0.0;
    s(1, 0) = 1.0;
    s(1, 1) = 2.0;
    const ProductKde k(s, {0.5, 2.0});
    const double pt[] = {0.3, 0.8};
    const double expected = 0.5 * (phi(0.3 / 0.5) / 0.5 * phi(0.8 / 2.0) / 2.0 +
                                   phi(-0.7 / 0.5) / 0.5 * phi(-1.2 / 2.0) / 2.0);
    CHECK(k.pdf(pt) == doctest::Approx(expected));
    CHECK_THROWS_AS(ProductKde(s, {1.0}), DimensionError);
}

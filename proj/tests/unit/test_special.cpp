#include <doctest.h>

#include <abcil/error.hpp>
#include <abcil/quadrature.hpp>
#include <abcil/special.hpp>

#include <cmath>
#include <numbers>

using namespace abcil;

namespace {

// Truncated power series of 2F1(1, b; 3; z) for |z| < 1.
double series_2f1(double b, double z)
{
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 2000; ++k) {
        term *= (1.0 + k) * (b + k) / ((3.0 + k) * (1.0 + k)) * z;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum))
            break;
    }
    return sum;
}

double reference_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

} // namespace

TEST_CASE("normal quantile at tabulated points")
{
    CHECK(std_normal_quantile(0.5) == 0.0);
    CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK(std_normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-13));
    CHECK(std_normal_quantile(0.841344746068543) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std_normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-11));
}

TEST_CASE("normal quantile inverts the erfc-based CDF")
{
    for (double u = 1e-6; u < 1.0; u += 0.0137) {
        const double x = std_normal_quantile(u);
        CHECK(std::abs(reference_cdf(x) - u) < 1e-14 + 1e-12 * u);
    }
}

TEST_CASE("normal quantile domain")
{
    CHECK_THROWS_AS(std_normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(std_normal_quantile(1.0), DomainError);
    CHECK_THROWS_AS(std_normal_quantile(std::nan("")), DomainError);
}

TEST_CASE("normal pdf and cdf")
{
    CHECK(std_normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(-1.0) == doctest::Approx(reference_cdf(-1.0)).epsilon(1e-14));
}

TEST_CASE("hypergeometric factor equals one at psi = 0")
{
    for (int s = 0; s <= 2; ++s) {
        CHECK(gauss_2f1_matched(s, 0.0) == 1.0);
        CHECK(log_gauss_2f1_matched(s, 0.0) == 0.0);
    }
}

TEST_CASE("hypergeometric factor agrees with the power series inside the unit disc")
{
    for (int s = 0; s <= 2; ++s) {
        for (double psi = -0.65; psi <= 0.4; psi += 0.05) {
            const double z = 1.0 - std::exp(psi);
            CAPTURE(s);
            CAPTURE(psi);
            CHECK(std::abs(gauss_2f1_matched(s, psi) - series_2f1(s + 0.5, z)) < 1e-10);
        }
    }
}

TEST_CASE("hypergeometric factor satisfies the Pfaff reflection")
{
    // 2F1(1, b; 3; 1 - e^psi) = e^{-psi} 2F1(1, 3 - b; 3; 1 - e^{-psi}),
    // which pairs S = 1 with itself and S = 0 with S = 2.
    for (double psi = -12.0; psi <= 12.0; psi += 0.75) {
        CAPTURE(psi);
        const double f1 = gauss_2f1_matched(1, psi);
        CHECK(f1 == doctest::Approx(std::exp(-psi) * gauss_2f1_matched(1, -psi)).epsilon(1e-10));
        const double f0 = gauss_2f1_matched(0, psi);
        CHECK(f0 == doctest::Approx(std::exp(-psi) * gauss_2f1_matched(2, -psi)).epsilon(1e-10));
    }
}

TEST_CASE("hypergeometric factor closed form for S = 1")
{
    // 2F1(1, 3/2; 3; z) = 4 / (1 + sqrt(1 - z))^2 (from the Euler integral),
    // so with 1 - z = e^psi it equals 4 / (1 + e^{psi/2})^2.
    for (double psi = -20.0; psi <= 20.0; psi += 1.3)
        CHECK(gauss_2f1_matched(1, psi) == doctest::Approx(4.0 / std::pow(1.0 + std::exp(psi / 2), 2)).epsilon(1e-10));
}

TEST_CASE("hypergeometric factor domain")
{
    CHECK_THROWS_AS(gauss_2f1_matched(3, 0.1), DomainError);
    CHECK_THROWS_AS(gauss_2f1_matched(1, std::nan("")), DomainError);
}

TEST_CASE("adaptive quadrature")
{
    CHECK(integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0).value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 2.0).value ==
          doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-13));
    // integrable endpoint singularity
    CHECK(integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-12, 1e-10, 2000}).value ==
          doctest::Approx(2.0).epsilon(1e-8));

    QuadratureSpec tight{1e-300, 1e-300, 2};
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return std::sin(50 * x); }, 0.0, 10.0, tight), NumericalError);
    CHECK_THROWS_AS((QuadratureSpec{0.0, 1e-8, 10}.validate()), ConfigError);
}

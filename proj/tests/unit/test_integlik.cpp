#include <doctest.h>

#include <abcil/integlik.hpp>
#include <abcil/stats.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace abcil;

namespace {

double normal_pdf(double x, double mu, double sd)
{
    const double u = (x - mu) / sd;
    return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

Vector normal_sample(std::size_t m, std::uint64_t seed, double mu, double sd)
{
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> d(mu, sd);
    Vector x(m);
    for (double& v : x)
        v = d(eng);
    return x;
}

PriorPdf normal_prior(double mu, double sd)
{
    return {[=](double x) { return normal_pdf(x, mu, sd); }};
}

} // namespace

TEST_CASE("normalization modes")
{
    LikelihoodCurve c;
    c.psi = {0.0, 1.0, 2.0};
    c.values = {1.0, 4.0, 1.0};
    const LikelihoodCurve m = normalize_curve(c, Normalization::max_one);
    CHECK(m.values == Vector{0.25, 1.0, 0.25});
    CHECK(normalize_curve(m, Normalization::max_one).values == m.values);

    const LikelihoodCurve u = normalize_curve(c, Normalization::unit_integral);
    CHECK(stats::trapezoid(u.psi, u.values) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(normalize_curve(c, Normalization::raw).values == c.values);

    c.values = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(normalize_curve(c, Normalization::max_one), DomainError);

    for (auto mode : {Normalization::max_one, Normalization::unit_integral, Normalization::raw})
        CHECK(parse_normalization(to_string(mode)) == mode);
    CHECK_THROWS_AS(parse_normalization("peak"), ConfigError);
}

TEST_CASE("gaussian posterior over gaussian prior")
{
    // N(1, 0.5^2) / N(0, 2^2) is proportional to a normal with precision
    // 1/0.25 - 1/4 = 3.75 and mean (1/0.25) / 3.75. Kernel smoothing inflates
    // the posterior variance by h^2, which the oracle accounts for.
    const Vector post = normal_sample(20000, 17, 1.0, 0.5);
    const Vector grid = linspace(-1.0, 3.0, 801);
    const LikelihoodCurve curve = abc_integrated_likelihood(post, normal_prior(0.0, 2.0), grid);
    const double h = curve.meta.posterior_bandwidth;
    const double v = 0.25 + h * h;
    const double mode = (1.0 / v) / (1.0 / v - 0.25);
    CHECK(curve.argmax() == doctest::Approx(mode).epsilon(0.03));
    CHECK(curve.meta.prior_source == "pdf");
    CHECK(curve.meta.prior_bandwidth == 0.0);
    CHECK(*std::max_element(curve.values.begin(), curve.values.end()) == 1.0);

    const LikelihoodCurve oracle = curve_from_loglik(grid, [&](double x) {
        return std::log(normal_pdf(x, 1.0, std::sqrt(v))) - std::log(normal_pdf(x, 0.0, 2.0));
    });
    CHECK(sup_norm_distance(curve, oracle, 0.0, 2.0) < 0.05);
}

TEST_CASE("posterior equal to the prior gives a flat curve")
{
    const Vector post = normal_sample(5000, 1, 0.0, 1.0);
    const Vector prior = normal_sample(5000, 2, 0.0, 1.0);
    const Vector grid = linspace(stats::quantile(post, 0.05), stats::quantile(post, 0.95), 200);
    const LikelihoodCurve curve = abc_integrated_likelihood(post, PriorSample{prior}, grid);
    const auto [lo, hi] = std::minmax_element(curve.values.begin(), curve.values.end());
    CHECK(*hi / *lo < 1.5);
    CHECK(curve.meta.prior_source == "sample");
    CHECK(curve.meta.prior_bandwidth > 0.0);
}

TEST_CASE("prior floor masks points")
{
    const Vector post = normal_sample(500, 3, 0.5, 0.2);
    const PriorPdf box{[](double x) { return (x > 0.0 && x < 1.0) ? 1.0 : 0.0; }};
    const Vector grid = linspace(-0.5, 1.5, 21);
    const LikelihoodCurve curve = abc_integrated_likelihood(post, box, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool inside = grid[i] > 0.0 && grid[i] < 1.0;
        CHECK(curve.masked[i] == !inside);
        if (!inside)
            CHECK(curve.values[i] == 0.0);
    }
    CHECK(curve.masked_count() == curve.meta.masked_points);

    const PriorPdf nowhere{[](double) { return 0.0; }};
    CHECK_THROWS_AS(abc_integrated_likelihood(post, nowhere, grid), DomainError);
}

TEST_CASE("grid validation")
{
    const Vector post{0.1, 0.2, 0.3};
    CHECK_THROWS_AS(abc_integrated_likelihood(post, normal_prior(0, 1), Vector{}), DimensionError);
    CHECK_THROWS_AS(abc_integrated_likelihood(post, normal_prior(0, 1), Vector{0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(abc_integrated_likelihood(Vector{}, normal_prior(0, 1), Vector{0.0, 1.0}), DimensionError);
}

TEST_CASE("unit-integral curves integrate to one")
{
    const Vector post = normal_sample(1000, 5, 0.0, 1.0);
    IntegLikOptions opts;
    opts.normalization = Normalization::unit_integral;
    const Vector grid = linspace(-3.0, 3.0, 301);
    const LikelihoodCurve c = abc_integrated_likelihood(post, normal_prior(0.0, 3.0), grid, opts);
    const double area = stats::trapezoid(c.psi, c.values);
    CHECK(area >= 1.0 - 1e-6);
    CHECK(area <= 1.0 + 1e-6);
}

TEST_CASE("grid construction")
{
    const Vector g = linspace(0.0, 1.0, 5);
    CHECK(g == Vector{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK_THROWS_AS(linspace(1.0, 0.0, 5), DomainError);

    Vector post(101);
    for (std::size_t i = 0; i <= 100; ++i)
        post[i] = static_cast<double>(i);
    GridSpec spec;
    spec.points = 11;
    spec.coverage = 0.9;
    const Vector central = make_grid(post, {}, spec);
    CHECK(central.front() == doctest::Approx(5.0));
    CHECK(central.back() == doctest::Approx(95.0));

    spec.lo = -1.0;
    spec.hi = 1.0;
    CHECK(make_grid(post, {}, spec) == linspace(-1.0, 1.0, 11));
}

TEST_CASE("sup norm and resampling")
{
    const Vector grid = linspace(0.0, 1.0, 11);
    const LikelihoodCurve a = curve_from_loglik(grid, [](double x) { return -x; });
    const LikelihoodCurve b = curve_from_loglik(grid, [](double x) { return -2 * x; });
    double expected = 0.0;
    for (double x : grid)
        expected = std::max(expected, std::exp(-x) - std::exp(-2 * x));
    CHECK(sup_norm_distance(a, b) == doctest::Approx(expected));
    CHECK(sup_norm_distance(a, a) == 0.0);

    const Vector other = linspace(0.0, 1.0, 21);
    CHECK_THROWS_AS(sup_norm_distance(a, curve_from_loglik(other, [](double) { return 0.0; })), DimensionError);

    const Vector wider = linspace(-0.5, 1.0, 31);
    const LikelihoodCurve r = resample_curve(a, wider);
    CHECK(r.masked[0]);
    CHECK(r.values[0] == 0.0);
    CHECK_FALSE(r.masked[30]);
    // linear interpolation between grid points 0.0 and 0.1
    CHECK(r.values[11] == doctest::Approx(0.5 * (1.0 + std::exp(-0.1))));
}

TEST_CASE("curve from a log likelihood handles -inf")
{
    const Vector grid = linspace(-1.0, 1.0, 5);
    const LikelihoodCurve c = curve_from_loglik(grid, [](double x) {
        return x < 0 ? -std::numeric_limits<double>::infinity() : x;
    });
    CHECK(c.values[0] == 0.0);
    CHECK(c.values[4] == 1.0);
    CHECK(c.argmax() == 1.0);
}

TEST_CASE("ratio diagnostics with a closed-form prior")
{
    const Vector post = normal_sample(2000, 9, 0.0, 1.0);
    const ScaledKde kde(post, DensityScale::linear);
    const Vector grid = linspace(-2.0, 2.0, 9);
    DiagnosticsOptions opts;
    opts.summary_dim = 2;
    const RatioDiagnostics d = ratio_error_diagnostics(kde, normal_prior(0.0, 2.0), grid, opts);
    const double h = kde.estimate().bandwidth();
    CHECK(d.posterior_bandwidth == h);
    CHECK(d.prior_bandwidth == 0.0);
    CHECK(d.minimal_mse_rate == doctest::Approx(std::pow(2000.0, -4.0 / 7.0)));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        const double g = normal_pdf(x, 0.0, 2.0);
        CHECK(d.prior_bias[i] == 0.0);
        CHECK(d.posterior_bias[i] == doctest::Approx(0.5 * h * h * kde_second_derivative(kde.estimate(), x)));
        CHECK(d.ratio_bias[i] == doctest::Approx(d.posterior_bias[i] / g).epsilon(1e-9));
        // variance of a ratio with an exact denominator: f / (2 m h sqrt(pi)) / g^2
        const double f = kde.pdf(x);
        CHECK(d.ratio_variance[i] ==
              doctest::Approx(f / (2.0 * 2000.0 * h * std::sqrt(std::numbers::pi)) / (g * g)).epsilon(1e-9));
    }
}

TEST_CASE("ratio diagnostics with an estimated prior")
{
    const Vector post = normal_sample(1000, 10, 0.0, 1.0);
    const Vector prior = normal_sample(1000, 11, 0.0, 2.0);
    const ScaledKde pk(post, DensityScale::linear);
    const ScaledKde qk(prior, DensityScale::linear);
    const Vector grid = linspace(-1.0, 1.0, 5);
    const RatioDiagnostics d = ratio_error_diagnostics(pk, qk, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(d.prior_bias[i] != 0.0);
        CHECK(d.ratio_variance[i] > 0.0);
        const double f = d.posterior_density[i], g = d.prior_density[i];
        CHECK(d.ratio_bias[i] ==
              doctest::Approx((f + d.posterior_bias[i]) / (g + d.prior_bias[i]) - f / g).epsilon(1e-12));
    }
}

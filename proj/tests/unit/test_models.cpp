#include <doctest.h>

#include <abcil/models/gk.hpp>
#include <abcil/models/matched_pairs.hpp>
#include <abcil/models/poisson_ratio.hpp>
#include <abcil/models/semipar.hpp>
#include <abcil/quadrature.hpp>
#include <abcil/rng.hpp>
#include <abcil/special.hpp>
#include <abcil/stats.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace abcil;

namespace {

// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <class F>
double golden_max(F f, double lo, double hi)
{
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    for (int i = 0; i < 200; ++i) {
        const double c = b - r * (b - a), d = a + r * (b - a);
        (f(c) > f(d) ? b : a) = (f(c) > f(d) ? d : c);
    }
    return 0.5 * (a + b);
}

// log P(R0 = j, R1 = l | psi) integrated over omega ~ Beta(1/2, 1/2), by
// quadrature in t with omega = sin^2 t (which absorbs the arcsine density).
double pair_log_marginal(int j, int l, double psi)
{
    auto f = [=](double t) {
        const double w = std::sin(t) * std::sin(t);
        const double w1 = w * std::exp(psi) / (1.0 - w + w * std::exp(psi));
        const double p0 = j ? w : 1.0 - w;
        const double p1 = l ? w1 : 1.0 - w1;
        return p0 * p1 * 2.0 / std::numbers::pi;
    };
    return std::log(integrate_adaptive(f, 0.0, std::numbers::pi / 2).value);
}

} // namespace

// ---------------------------------------------------------------- Poisson

TEST_CASE("poisson exact likelihood maximizes at xbar / ybar")
{
    std::mt19937_64 eng(1);
    std::uniform_real_distribution<double> mean(0.5, 6.0);
    for (int rep = 0; rep < 50; ++rep) {
        const double xbar = std::round(10 * mean(eng)) / 10, ybar = std::round(10 * mean(eng)) / 10;
        const double best = golden_max([&](double p) { return poisson_exact_log_likelihood(p, xbar, ybar, 10); },
                                        1e-3, 50.0);
        CHECK(best == doctest::Approx(xbar / ybar).epsilon(1e-6));
    }
    CHECK_THROWS_AS(poisson_exact_log_likelihood(0.0, 1.0, 1.0, 10), DomainError);
    // xbar = 0: decreasing in psi
    CHECK(poisson_exact_log_likelihood(0.5, 0.0, 2.0, 10) > poisson_exact_log_likelihood(1.0, 0.0, 2.0, 10));
    CHECK(poisson_exact_integrated_likelihood(1.0, 2.0, 2.0, 10) == doctest::Approx(std::pow(2.0, -40.0)));
}

TEST_CASE("poisson ratio prior density integrates to one and is symmetric in log psi")
{
    const PoissonRatioModel m(0.5, 0.5);
    auto on_log_scale = [&](double y) { return *m.prior_psi_pdf(std::exp(y)) * std::exp(y); };
    CHECK(integrate_adaptive(on_log_scale, -200.0, 200.0, {1e-12, 1e-10, 2000}).value ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(on_log_scale(1.7) == doctest::Approx(on_log_scale(-1.7)));
    CHECK(*m.prior_psi_pdf(-1.0) == 0.0);

    // against sampled ratios
    Vector psi(20000);
    for (std::size_t i = 0; i < psi.size(); ++i)
        psi[i] = m.psi(m.sample_prior(i))[0];
    const double p_below_2 = integrate_adaptive(on_log_scale, -200.0, std::log(2.0), {1e-12, 1e-10, 2000}).value;
    CHECK(stats::empirical_cdf(psi, 2.0) == doctest::Approx(p_below_2).epsilon(0.02));
}

TEST_CASE("poisson summaries: direct sums have the law of full simulations")
{
    const PoissonRatioModel m;
    const double theta[] = {2.0, 4.0};
    double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
    const int reps = 4000;
    for (int i = 0; i < reps; ++i) {
        const SummaryVector s = m.simulate_summary(theta, 10, i);
        const SummaryVector t = m.summarize(m.simulate(theta, 10, 100000 + i));
        a0 += s[0];
        a1 += s[1];
        b0 += t[0];
        b1 += t[1];
    }
    CHECK(a0 / reps == doctest::Approx(2.0).epsilon(0.02));
    CHECK(b0 / reps == doctest::Approx(2.0).epsilon(0.02));
    CHECK(a1 / reps == doctest::Approx(4.0).epsilon(0.02));
    CHECK(b1 / reps == doctest::Approx(4.0).epsilon(0.02));
    CHECK(m.simulate(theta, 10, 5) == m.simulate(theta, 10, 5));
    CHECK(m.log_prior(std::vector<double>{-1.0, 1.0}) == -std::numeric_limits<double>::infinity());
}

// ---------------------------------------------------------- matched pairs

TEST_CASE("profile argmax is twice the conditional argmax")
{
    for (std::size_t b = 1; b <= 50; ++b) {
        for (std::size_t T = 0; T <= b; ++T) {
            const ArgmaxResult p = matched_pairs_profile_argmax(T, b);
            const ArgmaxResult c = matched_pairs_conditional_argmax(T, b);
            CHECK(p.boundary == c.boundary);
            CHECK(p.psi == 2.0 * c.psi);
        }
    }
    CHECK(matched_pairs_profile_argmax(0, 5).psi == -std::numeric_limits<double>::infinity());
    CHECK(matched_pairs_conditional_argmax(5, 5).psi == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(matched_pairs_profile_argmax(0, 0), DomainError);
    CHECK_THROWS_AS(matched_pairs_conditional_argmax(6, 5), DomainError);
}

TEST_CASE("closed-form argmaxes match numerical maximization")
{
    for (auto [T, b] : {std::pair<std::size_t, std::size_t>{3, 10}, {7, 9}, {20, 30}, {1, 2}}) {
        const double prof = golden_max([&](double p) { return matched_pairs_profile_loglik(p, T, b); }, -20, 20);
        const double cond = golden_max([&](double p) { return matched_pairs_conditional_loglik(p, T, b); }, -20, 20);
        const double mod =
            golden_max([&](double p) { return matched_pairs_modified_profile_loglik(p, T, b); }, -20, 20);
        CHECK(matched_pairs_profile_argmax(T, b).psi == doctest::Approx(prof).epsilon(1e-6));
        CHECK(matched_pairs_conditional_argmax(T, b).psi == doctest::Approx(cond).epsilon(1e-6));
        CHECK(matched_pairs_modified_profile_argmax(T, b).psi == doctest::Approx(mod).epsilon(1e-6));
    }
    // the modification keeps the maximum finite at T = b
    CHECK(std::isfinite(matched_pairs_modified_profile_argmax(4, 4).psi));
}

TEST_CASE("profile likelihood pieces")
{
    CHECK(matched_pairs_lambda_hat(1.4) == doctest::Approx(-0.7));
    const double psi = 0.8;
    CHECK(matched_pairs_profile_loglik(psi, 3, 7) ==
          doctest::Approx(psi * 3 - 14 * std::log(1 + std::exp(psi / 2))));
    CHECK(matched_pairs_modified_profile(psi, 3, 7) ==
          doctest::Approx(matched_pairs_profile(psi, 3, 7) * matched_pairs_modification_factor(psi, 7)));
    // binomial pmf sums to one over T
    double total = 0.0;
    for (std::size_t T = 0; T <= 7; ++T)
        total += matched_pairs_conditional(psi, T, 7);
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("integrated likelihood is zero on the log scale at psi = 0")
{
    PairCounts c;
    c.n = {{{4, 7}, {2, 9}}};
    CHECK(matched_pairs_integrated_loglik(0.0, c) == 0.0);
    CHECK(matched_pairs_integrated(0.0, c) == 1.0);
    CHECK_THROWS_AS(matched_pairs_integrated_loglik(0.0, PairCounts{}), DomainError);
}

TEST_CASE("integrated likelihood matches direct integration over the nuisance")
{
    PairCounts c;
    c.n = {{{3, 5}, {2, 6}}};
    for (double psi : {-3.0, -0.7, 0.4, 1.9, 5.0}) {
        double direct = 0.0;
        for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l)
                direct += c.n[j][l] * (pair_log_marginal(j, l, psi) - pair_log_marginal(j, l, 0.0));
        CHECK(matched_pairs_integrated_loglik(psi, c) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("matched pairs simulation, counts and summaries")
{
    const MatchedPairsModel m(30, 0.0, 10.0);
    CHECK(m.parameter_dim() == 31);
    const Dataset d = m.generate_observed(1.0, 11);
    CHECK(d.n() == 30);
    CHECK(d.width() == 2);
    const PairCounts c = count_pairs(d);
    CHECK(c.total() == 30);
    const SummaryVector s = m.summarize(d);
    CHECK(s[0] == doctest::Approx(static_cast<double>(c.n[1][0] + c.n[1][1]) / 30));
    CHECK(s[1] == doctest::Approx(static_cast<double>(c.n[0][1] + c.n[1][1]) / 30));
    CHECK(m.generate_observed(1.0, 11) == d);

    const Vector theta = m.sample_prior(3);
    CHECK_THROWS_AS(m.simulate(theta, 29, 1), DimensionError);
    CHECK(*m.prior_psi_pdf(0.0) == doctest::Approx(1.0 / (10.0 * std::sqrt(2 * std::numbers::pi))));
}

TEST_CASE("matched pairs prior: lambda density is the logistic image of Beta(1/2, 1/2)")
{
    const MatchedPairsModel m(1, 0.0, 1.0);
    // omega ~ Beta(1/2, 1/2) => lambda density 1 / (pi sqrt(omega (1 - omega))) * omega (1 - omega)
    const double lambda = 0.6;
    const double w = 1.0 / (1.0 + std::exp(-lambda));
    const double expected =
        -0.5 * std::log(2 * std::numbers::pi) + std::log(std::sqrt(w * (1 - w)) / std::numbers::pi);
    CHECK(m.log_prior(std::vector<double>{0.0, lambda}) == doctest::Approx(expected));
}

// --------------------------------------------------------------- g-and-k

TEST_CASE("g-and-k quantile function")
{
    CHECK(gk_quantile(0.5, 3.0, 1.0, 2.0, 0.5) == 3.0);
    for (double u : {0.01, 0.2, 0.7, 0.99})
        CHECK(gk_quantile(u, 1.0, 2.0, 0.0, 0.0) == doctest::Approx(1.0 + 2.0 * std_normal_quantile(u)).epsilon(1e-14));
    // hand evaluation at z = 1: A + B (1 + c tanh(g/2)) 2^k
    const double z = 1.0;
    CHECK(gk_quantile_from_z(z, 3, 1, 2, 0.5) ==
          doctest::Approx(3 + (1 + 0.8 * (1 - std::exp(-2.0)) / (1 + std::exp(-2.0))) * std::sqrt(2.0)));
    CHECK_THROWS_AS(gk_quantile(0.0, 3, 1, 2, 0.5), DomainError);
    CHECK_THROWS_AS(gk_quantile(0.5, 3, 0, 2, 0.5), DomainError);
    CHECK_THROWS_AS(gk_quantile(0.5, 3, 1, 2, -0.5), DomainError);
    CHECK(gk_is_monotone(3, 1, 2, 0.5));
    CHECK(gk_is_monotone(0, 1, 0, 0));
    CHECK_FALSE(gk_is_monotone(0, 1, 10, 0, 2.0)); // c > 1 breaks monotonicity for large g
}

TEST_CASE("g-and-k summaries")
{
    Matrix m(4, 1);
    const double x[] = {1, 2, 3, 10};
    for (int i = 0; i < 4; ++i)
        m(i, 0) = x[i];
    const SummaryVector s = gk_summaries(Dataset(m));
    const double mean = 4.0;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        m2 += std::pow(v - mean, 2) / 4;
        m3 += std::pow(v - mean, 3) / 4;
        m4 += std::pow(v - mean, 4) / 4;
    }
    CHECK(s[0] == mean);
    CHECK(s[1] == doctest::Approx(std::sqrt(m2)));
    CHECK(s[2] == doctest::Approx(m3 / std::pow(m2, 1.5)));
    CHECK(s[3] == doctest::Approx(m4 / (m2 * m2)));
    CHECK_THROWS_AS(gk_summaries(Dataset(Matrix(3, 1, 1.0))), DimensionError);
    CHECK_THROWS_AS(gk_summaries(Dataset(Matrix(5, 1, 1.0))), DegenerateSampleError);
}

TEST_CASE("g-and-k simulation follows the quantile function")
{
    const Dataset d = gk_simulate(20000, 3, 1, 2, 0.5, 0.8, 4);
    const Vector x = d.column(0);
    for (double u : {0.1, 0.5, 0.9})
        CHECK(stats::empirical_cdf(x, gk_quantile(u, 3, 1, 2, 0.5)) == doctest::Approx(u).epsilon(0.05));
    CHECK(gk_simulate(100, 3, 1, 2, 0.5, 0.8, 4) == gk_simulate(100, 3, 1, 2, 0.5, 0.8, 4));
}

TEST_CASE("g-and-k model and psi transform")
{
    const GkModel m(0.25);
    CHECK(m.level() == 0.25);
    CHECK(m.log_prior(std::vector<double>{3, 1, 2, 0.5}) == doctest::Approx(-4 * std::log(10.0)));
    CHECK(m.log_prior(std::vector<double>{3, 1, 2, 11}) == -std::numeric_limits<double>::infinity());
    const Vector theta{3, 1, 2, 0.5};
    CHECK(m.psi(theta)[0] == gk_quantile(0.25, 3, 1, 2, 0.5));
    CHECK(m.default_kernel_scale() == Vector(4, std::sqrt(0.1)));

    AbcDraws draws;
    for (int i = 0; i < 5; ++i) {
        const Vector t = m.sample_prior(i);
        draws.theta.append_row(t);
        draws.psi.append_row(Vector{0.0});
    }
    const AbcDraws at_median = gk_psi_transform(draws, 0.5);
    CHECK(at_median.psi.column(0) == draws.theta.column(0));
}

// -------------------------------------------------------- semiparametric

TEST_CASE("gaussian process covariance by hand")
{
    const double z[] = {0.0, 1.0, 2.0};
    const Eigen::MatrixXd K = gp_covariance(z, 2.0, 1.0);
    CHECK(K(0, 0) == 2.0);
    CHECK(K(0, 1) == doctest::Approx(2 * std::exp(-0.5)));
    CHECK(K(0, 2) == doctest::Approx(2 * std::exp(-2.0)));
    CHECK(K(2, 0) == K(0, 2));
    CHECK_THROWS_AS(gp_covariance(z, 0.0, 1.0), DomainError);
}

TEST_CASE("integrated log likelihood special cases")
{
    Eigen::MatrixXd X(3, 2);
    X << 1, 0, 1, 1, 1, 2;
    const Eigen::VectorXd beta = Eigen::Vector2d(1.0, 0.5);
    const Eigen::VectorXd Y = X * beta;
    CHECK(semipar_integrated_loglik(beta, Y, X, Eigen::MatrixXd::Identity(3, 3)) == 0.0);

    Eigen::VectorXd Y2 = Y;
    Y2(1) += 1.0;
    const double s2 = 2.5;
    const double direct = -1.5 * std::log(s2) - 0.5 * 1.0 / s2;
    CHECK(semipar_integrated_loglik(beta, Y2, X, s2 * Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(direct));

    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
    bad(2, 2) = -1.0;
    CHECK_THROWS_AS(semipar_integrated_loglik(beta, Y, X, bad), NumericalError);
}

TEST_CASE("gls agrees with the explicit normal equations and with ols at V = I")
{
    std::mt19937_64 eng(3);
    std::normal_distribution<double> nd;
    const int n = 12;
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd Y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1;
        X(i, 1) = nd(eng);
        X(i, 2) = nd(eng);
        Y(i) = nd(eng);
    }
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = nd(eng);
    const Eigen::MatrixXd V = A * A.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd Vi = V.inverse();
    const Eigen::VectorXd explicit_gls = (X.transpose() * Vi * X).inverse() * X.transpose() * Vi * Y;
    CHECK((gls_estimate(Y, X, V) - explicit_gls).norm() < 1e-10);

    const Eigen::VectorXd ols = (X.transpose() * X).ldlt().solve(X.transpose() * Y);
    CHECK((gls_estimate(Y, X, Eigen::MatrixXd::Identity(n, n)) - ols).norm() < 1e-12);

    Eigen::MatrixXd collinear = X;
    collinear.col(2) = 2 * collinear.col(1);
    CHECK_THROWS_AS(gls_estimate(Y, collinear, V), NumericalError);
}

TEST_CASE("semiparametric summaries")
{
    const SemiparDesign design = make_semipar_design(30, 5);
    CHECK(std::is_sorted(design.z.begin(), design.z.end()));
    Matrix m(30, 3);
    for (int i = 0; i < 30; ++i) {
        const double x = design.x[i], z = design.z[i];
        m(i, 0) = 2 * x + 3 * z - z * z;
        m(i, 1) = x;
        m(i, 2) = z;
    }
    const SummaryVector s = semipar_summaries(Dataset(m));
    CHECK(s[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(s[1] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(s[2] == doctest::Approx(-1.0).epsilon(1e-10));

    Matrix shifted = m;
    for (int i = 0; i < 30; ++i)
        shifted(i, 0) += 7.0;
    const SummaryVector t = semipar_summaries(Dataset(shifted));
    for (int k = 0; k < 3; ++k)
        CHECK(t[k] == doctest::Approx(s[k]).epsilon(1e-9));

    // noisy data against a normal-equations oracle
    const SemiparTruth truth;
    const Dataset noisy = semipar_generate(design, truth, 9);
    Eigen::MatrixXd D(30, 4);
    Eigen::VectorXd Y(30);
    for (int i = 0; i < 30; ++i) {
        D.row(i) << 1, design.x[i], design.z[i], design.z[i] * design.z[i];
        Y(i) = noisy.observations()(i, 0);
    }
    const Eigen::VectorXd coef = (D.transpose() * D).inverse() * D.transpose() * Y;
    const SummaryVector u = semipar_summaries(noisy);
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(u[k] - coef(k + 1)) < 1e-10 * std::max(1.0, std::abs(coef(k + 1))));

    CHECK_THROWS_AS(semipar_summaries(Dataset(Matrix(4, 3, 1.0))), DimensionError);
}

TEST_CASE("semiparametric model priors")
{
    const SemiparGpModel model(make_semipar_design(40, 17));
    CHECK(model.alpha_scale() == doctest::Approx((model.design().z.back() - model.design().z.front()) /
                                                 (-2.0 * std::log(0.05))));
    CHECK(model.has_prior_psi_pdf());

    // The beta1 prior is a t mixture with about 0.02 degrees of freedom, so
    // its mass spreads over many orders of magnitude. Compare interval
    // probabilities with sampled beta1 values instead of total mass.
    auto pdf = [&](double b) { return *model.prior_psi_pdf(b); };
    CHECK(pdf(0.3) == doctest::Approx(pdf(-0.3)));
    Vector b1(20000);
    for (std::size_t i = 0; i < b1.size(); ++i)
        b1[i] = model.psi(model.sample_prior(i))[0];
    for (double r : {1.0, 50.0}) {
        const double p = integrate_adaptive(pdf, -r, r, {1e-10, 1e-8, 4000}).value;
        const double empirical = stats::empirical_cdf(b1, r) - stats::empirical_cdf(b1, -r);
        CHECK(empirical == doctest::Approx(p).epsilon(0.05));
    }

    const Vector theta{0.5, 1.0, 0.25, 1.0, 0.05, 20.0};
    CHECK(std::isfinite(model.log_prior(theta)));
    Vector outside = theta;
    outside[5] = 100.0; // g above 2n
    CHECK(model.log_prior(outside) == -std::numeric_limits<double>::infinity());
    outside = theta;
    outside[2] = -0.1;
    CHECK(model.log_prior(outside) == -std::numeric_limits<double>::infinity());

    SemiparPriorOptions uniform;
    uniform.noise = NoisePrior::uniform;
    CHECK_FALSE(SemiparGpModel(make_semipar_design(40, 17), uniform).has_prior_psi_pdf());
}

TEST_CASE("semiparametric simulation is reproducible")
{
    const SemiparGpModel model(make_semipar_design(25, 2));
    const Vector theta{0.5, 1.0, 0.25, 1.0, 0.05, 20.0};
    CHECK(model.simulate(theta, 25, 8) == model.simulate(theta, 25, 8));
    CHECK_THROWS_AS(model.simulate(theta, 24, 8), DimensionError);
}

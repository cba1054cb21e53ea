#include <abcil/models/semipar.hpp>
#include <abcil/quadrature.hpp>

#include "distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace abcil {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Lower Cholesky factor of a covariance matrix. Kernel matrices of smooth
// processes are often numerically singular, so a growing diagonal jitter is
// tried before giving up.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& A)
{
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success)
        return llt.matrixL();
    double jitter = 1e-12 * std::max(A.diagonal().mean(), 1e-300);
    for (int attempt = 0; attempt < 8; ++attempt, jitter *= 10.0) {
        Eigen::MatrixXd B = A;
        B.diagonal().array() += jitter;
        llt.compute(B);
        if (llt.info() == Eigen::Success)
            return llt.matrixL();
    }
    throw NumericalError("covariance matrix is not positive definite even after jitter");
}

Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> v)
{
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

Eigen::VectorXd standard_normals(Rng& rng, std::size_t n)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w(i) = normal(rng);
    return w;
}

Dataset pack(const Eigen::VectorXd& Y, const SemiparDesign& design)
{
    Matrix obs(design.x.size(), 3);
    for (std::size_t i = 0; i < design.x.size(); ++i) {
        obs(i, 0) = Y(static_cast<Eigen::Index>(i));
        obs(i, 1) = design.x[i];
        obs(i, 2) = design.z[i];
    }
    return Dataset(std::move(obs));
}

} // namespace

Eigen::MatrixXd gp_covariance(std::span<const double> z, double tau2, double alpha)
{
    if (!(tau2 > 0.0) || !std::isfinite(tau2))
        throw DomainError("gp_covariance: tau2 must be positive and finite");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw DomainError("gp_covariance: alpha must be positive and finite");
    for (double v : z)
        if (!std::isfinite(v))
            throw DomainError("gp_covariance: z must be finite");
    const auto n = static_cast<Eigen::Index>(z.size());
    Eigen::MatrixXd S(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        S(i, i) = tau2;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = z[i] - z[j];
            S(i, j) = S(j, i) = tau2 * std::exp(-0.5 * d * d / alpha);
        }
    }
    return S;
}

double semipar_integrated_loglik(const Eigen::VectorXd& beta, const Eigen::VectorXd& Y, const Eigen::MatrixXd& X,
                                 const Eigen::MatrixXd& V)
{
    if (X.rows() != Y.size() || X.cols() != beta.size() || V.rows() != Y.size() || V.cols() != Y.size())
        throw DimensionError("semipar_integrated_loglik: inconsistent dimensions");
    Eigen::LLT<Eigen::MatrixXd> llt(V);
    if (llt.info() != Eigen::Success)
        throw NumericalError("semipar_integrated_loglik: V is not positive definite");
    const Eigen::VectorXd r = Y - X * beta;
    const Eigen::VectorXd u = llt.matrixL().solve(r);
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * log_det - 0.5 * u.squaredNorm();
}

Eigen::VectorXd gls_estimate(const Eigen::VectorXd& Y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& V)
{
    if (X.rows() != Y.size() || V.rows() != Y.size() || V.cols() != Y.size())
        throw DimensionError("gls_estimate: inconsistent dimensions");
    Eigen::LLT<Eigen::MatrixXd> llt(V);
    if (llt.info() != Eigen::Success)
        throw NumericalError("gls_estimate: V is not positive definite");
    // Whitening by L^{-1} turns GLS into OLS, solved by pivoted QR.
    const Eigen::MatrixXd Xw = llt.matrixL().solve(X);
    const Eigen::VectorXd Yw = llt.matrixL().solve(Y);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
    if (qr.rank() < X.cols())
        throw NumericalError("gls_estimate: X' V^{-1} X is singular");
    return qr.solve(Yw);
}

SummaryVector semipar_summaries(const Dataset& data)
{
    if (data.width() != 3)
        throw DimensionError("semipar_summaries: dataset must have columns (Y, x, z)");
    const std::size_t n = data.n();
    if (n <= 4)
        throw DimensionError("semipar_summaries: need more than 4 observations");
    const Matrix& obs = data.observations();
    Eigen::MatrixXd D(static_cast<Eigen::Index>(n), 4);
    Eigen::VectorXd Y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double z = obs(i, 2);
        Y(r) = obs(i, 0);
        D(r, 0) = 1.0;
        D(r, 1) = obs(i, 1);
        D(r, 2) = z;
        D(r, 3) = z * z;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
    if (qr.rank() < 4)
        throw DegenerateSampleError("semipar_summaries: design (1, x, z, z^2) is rank deficient");
    const Eigen::VectorXd coef = qr.solve(Y);
    return SummaryVector({coef(1), coef(2), coef(3)});
}

SemiparDesign make_semipar_design(std::size_t n, std::uint64_t seed)
{
    if (n < 5)
        throw ConfigError("semipar design: n must be at least 5");
    Rng rng = make_rng(seed);
    SemiparDesign d;
    d.x.resize(n);
    d.z.resize(n);
    for (double& v : d.x)
        v = 2.0 * uniform_open(rng);
    for (double& v : d.z)
        v = uniform_open(rng);
    std::sort(d.z.begin(), d.z.end());
    return d;
}

Dataset semipar_generate(const SemiparDesign& design, const SemiparTruth& truth, std::uint64_t seed)
{
    if (design.x.size() != design.z.size() || design.x.empty())
        throw DimensionError("semipar_generate: x and z must have the same positive length");
    if (!(truth.sigma2 > 0.0))
        throw DomainError("semipar_generate: sigma2 must be positive");
    Rng rng = make_rng(seed);
    const Eigen::MatrixXd L = jittered_cholesky(gp_covariance(design.z, truth.tau2, truth.alpha));
    const Eigen::VectorXd gamma = L * standard_normals(rng, design.z.size());
    const Eigen::VectorXd noise = std::sqrt(truth.sigma2) * standard_normals(rng, design.z.size());
    const Eigen::VectorXd Y =
        (truth.beta0 + truth.beta1 * as_eigen(design.x).array()).matrix() + gamma + noise;
    return pack(Y, design);
}

SemiparGpModel::SemiparGpModel(SemiparDesign design, SemiparPriorOptions prior)
    : design_(std::move(design)), prior_(prior), interest_(InterestMap::coordinates({1}))
{
    const std::size_t n = design_.x.size();
    if (n < 5 || design_.z.size() != n)
        throw ConfigError("semipar: x and z must have the same length, at least 5");
    for (double v : {prior_.sigma2_shape, prior_.sigma2_scale, prior_.sigma2_upper, prior_.tau2_shape,
                     prior_.tau2_scale, prior_.alpha_shape})
        if (!(v > 0.0))
            throw ConfigError("semipar: prior hyperparameters must be positive");

    X_.resize(static_cast<Eigen::Index>(n), 2);
    X_.col(0).setOnes();
    X_.col(1) = as_eigen(design_.x);
    xtx_ = X_.transpose() * X_;
    xtx_llt_.compute(xtx_);
    if (xtx_llt_.info() != Eigen::Success)
        throw ConfigError("semipar: X'X is singular (constant x?)");
    log_det_xtx_ = 2.0 * xtx_llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();

    const auto [zmin, zmax] = std::minmax_element(design_.z.begin(), design_.z.end());
    const double rho0 = *zmax - *zmin;
    if (!(rho0 > 0.0))
        throw ConfigError("semipar: z must not be constant");
    nu_ = rho0 / (-2.0 * std::log(0.05));
}

Vector SemiparGpModel::sample_prior(std::uint64_t seed) const
{
    Rng rng = make_rng(seed);
    const double n = static_cast<double>(design_.x.size());
    const double g = 2.0 * n * uniform_open(rng);
    double sigma2;
    if (prior_.noise == NoisePrior::uniform) {
        sigma2 = prior_.sigma2_upper * uniform_open(rng);
    } else {
        do {
            sigma2 = detail::inverse_gamma_draw(rng, prior_.sigma2_shape, prior_.sigma2_scale);
        } while (!(sigma2 > 0.0 && std::isfinite(sigma2)));
    }
    // beta = sqrt(g sigma2) U^{-1} w with X'X = U'U has covariance g sigma2 (X'X)^{-1}.
    const Eigen::VectorXd w = standard_normals(rng, 2);
    const Eigen::VectorXd beta = std::sqrt(g * sigma2) * xtx_llt_.matrixU().solve(w);
    double tau2, alpha;
    do {
        tau2 = detail::inverse_gamma_draw(rng, prior_.tau2_shape, prior_.tau2_scale);
    } while (!(tau2 > 0.0 && std::isfinite(tau2)));
    do {
        alpha = detail::inverse_gamma_draw(rng, prior_.alpha_shape, nu_);
    } while (!(alpha > 0.0 && std::isfinite(alpha)));
    return {beta(0), beta(1), sigma2, tau2, alpha, g};
}

double SemiparGpModel::log_prior(std::span<const double> theta) const
{
    if (theta.size() != 6)
        throw DimensionError("semipar: theta must have six entries");
    const double n = static_cast<double>(design_.x.size());
    const double sigma2 = theta[2], tau2 = theta[3], alpha = theta[4], g = theta[5];
    if (!(g > 0.0 && g < 2.0 * n) || !(sigma2 > 0.0) || !(tau2 > 0.0) || !(alpha > 0.0))
        return kNegInf;
    double lp = -std::log(2.0 * n);
    if (prior_.noise == NoisePrior::uniform) {
        if (!(sigma2 < prior_.sigma2_upper))
            return kNegInf;
        lp -= std::log(prior_.sigma2_upper);
    } else {
        lp += detail::log_inverse_gamma_pdf(sigma2, prior_.sigma2_shape, prior_.sigma2_scale);
    }
    const Eigen::Vector2d beta(theta[0], theta[1]);
    const double v = g * sigma2;
    lp += -std::log(2.0 * std::numbers::pi * v) + 0.5 * log_det_xtx_ - beta.dot(xtx_ * beta) / (2.0 * v);
    lp += detail::log_inverse_gamma_pdf(tau2, prior_.tau2_shape, prior_.tau2_scale);
    lp += detail::log_inverse_gamma_pdf(alpha, prior_.alpha_shape, nu_);
    return lp;
}

Dataset SemiparGpModel::simulate(std::span<const double> theta, std::size_t n, std::uint64_t seed) const
{
    if (theta.size() != 6)
        throw DimensionError("semipar: theta must have six entries");
    if (n != design_.x.size())
        throw DimensionError("semipar: simulated size must equal the design size");
    const double sigma2 = theta[2];
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw DomainError("semipar: sigma2 must be positive and finite");
    // gamma(z) + noise ~ N(0, Sigma + sigma2 I), drawn in one step.
    Eigen::MatrixXd C = gp_covariance(design_.z, theta[3], theta[4]);
    C.diagonal().array() += sigma2;
    if (!C.allFinite())
        throw DomainError("semipar: covariance overflow");
    Rng rng = make_rng(seed);
    const Eigen::VectorXd Y =
        (theta[0] + theta[1] * as_eigen(design_.x).array()).matrix() + jittered_cholesky(C) * standard_normals(rng, n);
    return pack(Y, design_);
}

SummaryVector SemiparGpModel::summarize(const Dataset& data) const
{
    return semipar_summaries(data);
}

std::optional<double> SemiparGpModel::prior_psi_pdf(double psi) const
{
    if (prior_.noise != NoisePrior::inverse_gamma)
        return std::nullopt;
    // beta1 | g ~ Student t with 2a degrees of freedom and squared scale
    // g c11 b / a, c11 = [(X'X)^{-1}]_{11}. With g = 2n s^2 the uniform
    // mixture over g becomes a smooth integral over s in (0, 1).
    const double n = static_cast<double>(design_.x.size());
    const double c11 = xtx_llt_.solve(Eigen::Matrix2d::Identity())(1, 1);
    const double dof = 2.0 * prior_.sigma2_shape;
    const double K = std::sqrt(2.0 * n * c11 * prior_.sigma2_scale / prior_.sigma2_shape);
    const double log_c = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) - 0.5 * std::log(dof * std::numbers::pi);
    const double front = 2.0 * std::exp(log_c) / K;
    if (psi == 0.0)
        return front;
    const double x2 = psi * psi / (dof * K * K);
    auto integrand = [&](double s) { return std::exp(-0.5 * (dof + 1.0) * std::log1p(x2 / (s * s))); };
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    spec.abs_tol = 1e-300;
    return front * integrate_adaptive(integrand, 0.0, 1.0, spec).value;
}

Vector SemiparGpModel::default_kernel_scale() const
{
    const double n = static_cast<double>(design_.x.size());
    const Eigen::Matrix2d cov = xtx_llt_.solve(Eigen::Matrix2d::Identity());
    return {0.1 * std::sqrt(n * cov(0, 0)), 0.1 * std::sqrt(n * cov(1, 1)), 0.05, 0.1, 0.2 * nu_, 0.1 * n};
}

} // namespace abcil

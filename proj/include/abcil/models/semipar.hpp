#pragma once

#include <abcil/core.hpp>

#include <Eigen/Dense>

#include <cstdint>

namespace abcil {

/// Squared-exponential covariance: Sigma_ij = tau2 exp(-(z_i - z_j)^2 / (2 alpha)).
/// Throws DomainError for non-positive or non-finite tau2, alpha or z.
Eigen::MatrixXd gp_covariance(std::span<const double> z, double tau2, double alpha);

/// -1/2 log|V| - 1/2 r' V^{-1} r with r = Y - X beta, via Cholesky of V.
/// Throws NumericalError when V is not positive definite.
double semipar_integrated_loglik(const Eigen::VectorXd& beta, const Eigen::VectorXd& Y, const Eigen::MatrixXd& X,
                                 const Eigen::MatrixXd& V);

/// (X' V^{-1} X)^{-1} X' V^{-1} Y. Throws NumericalError when V is not
/// positive definite or the normal matrix is singular.
Eigen::VectorXd gls_estimate(const Eigen::VectorXd& Y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& V);

/// OLS fit of Y on (1, x, z, z^2) for a dataset with columns (Y, x, z).
/// Returns the coefficients of x, z and z^2. Throws DimensionError for
/// n <= 4 and DegenerateSampleError for a rank-deficient design.
SummaryVector semipar_summaries(const Dataset& data);

/// Fixed covariates: a linear predictor x and a smooth-effect location z.
struct SemiparDesign
{
    Vector x;
    Vector z;
};

/// x ~ Uniform(0, 2) and z ~ Uniform(0, 1), z sorted.
SemiparDesign make_semipar_design(std::size_t n, std::uint64_t seed);

struct SemiparTruth
{
    double beta0 = 0.5;
    double beta1 = 1.0;
    double sigma2 = 0.25;
    double tau2 = 1.0;
    double alpha = 0.05;
};

/// Y = beta0 + beta1 x + gamma(z) + noise with gamma a zero-mean Gaussian
/// process draw. Columns (Y, x, z).
Dataset semipar_generate(const SemiparDesign& design, const SemiparTruth& truth, std::uint64_t seed);

enum class NoisePrior { inverse_gamma, uniform };

struct SemiparPriorOptions
{
    NoisePrior noise = NoisePrior::inverse_gamma;
    double sigma2_shape = 0.01;
    double sigma2_scale = 0.01;
    double sigma2_upper = 10.0; // uniform noise prior only
    double tau2_shape = 0.01;
    double tau2_scale = 0.01;
    double alpha_shape = 2.0;
};

/// Partially linear regression with a Gaussian-process smooth term.
///
/// theta = (beta0, beta1, sigma2, tau2, alpha, g); psi = beta1.
/// Priors: beta | g, sigma2 ~ N(0, g sigma2 (X'X)^{-1}), g ~ Uniform(0, 2n),
/// sigma2 ~ IG or Uniform, tau2 ~ IG, alpha ~ IG(alpha_shape, nu) with
/// nu = max|z_i - z_j| / (-2 log 0.05).
class SemiparGpModel final : public GenerativeModel
{
public:
    explicit SemiparGpModel(SemiparDesign design, SemiparPriorOptions prior = {});

    std::string name() const override { return "semipar"; }
    std::size_t parameter_dim() const override { return 6; }
    std::size_t summary_dim() const override { return 3; }

    Vector sample_prior(std::uint64_t seed) const override;
    double log_prior(std::span<const double> theta) const override;
    /// n must equal the design size.
    Dataset simulate(std::span<const double> theta, std::size_t n, std::uint64_t seed) const override;
    SummaryVector summarize(const Dataset& data) const override;

    const InterestMap& interest() const override { return interest_; }

    /// Marginal prior of beta1: with an inverse-gamma noise prior this is a
    /// scale mixture of Student t over g, integrated numerically.
    std::optional<double> prior_psi_pdf(double psi) const override;
    bool has_prior_psi_pdf() const override { return prior_.noise == NoisePrior::inverse_gamma; }

    Vector default_kernel_scale() const override;

    const SemiparDesign& design() const noexcept { return design_; }
    const Eigen::MatrixXd& design_matrix() const noexcept { return X_; }
    double alpha_scale() const noexcept { return nu_; }

private:
    SemiparDesign design_;
    SemiparPriorOptions prior_;
    Eigen::MatrixXd X_;
    Eigen::MatrixXd xtx_;
    Eigen::LLT<Eigen::MatrixXd> xtx_llt_;
    double log_det_xtx_ = 0.0;
    double nu_ = 0.0;
    InterestMap interest_;
};

} // namespace abcil

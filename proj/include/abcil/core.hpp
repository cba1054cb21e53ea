#pragma once

#include <abcil/error.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace abcil {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Used for datasets and draw tables.
class Matrix
{
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    Vector column(std::size_t c) const;
    void append_row(std::span<const double> values);

    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Maps a full parameter vector theta to the interest parameter psi(theta).
///
/// Either a coordinate projection or a named transform. Extraction is a
/// pure function of theta.
class InterestMap
{
public:
    using Transform = std::function<Vector(std::span<const double>)>;

    static InterestMap coordinates(std::vector<std::size_t> indices);
    static InterestMap transform(std::string name, std::size_t dim, Transform fn);

    /// Throws ConfigError if the descriptor does not fit theta.
    Vector operator()(std::span<const double> theta) const;

    std::size_t dim() const noexcept { return dim_; }
    const std::string& name() const noexcept { return name_; }

private:
    InterestMap() = default;

    std::string name_;
    std::size_t dim_ = 0;
    std::vector<std::size_t> indices_;
    Transform fn_;
};

struct ParameterPoint
{
    Vector theta;
    std::shared_ptr<const InterestMap> interest;
};

Vector extract_psi(const ParameterPoint& p);

class Dataset
{
public:
    /// Throws DimensionError for an empty matrix and DomainError for
    /// non-finite entries.
    explicit Dataset(Matrix observations);

    const Matrix& observations() const noexcept { return obs_; }
    std::size_t n() const noexcept { return obs_.rows(); }
    std::size_t width() const noexcept { return obs_.cols(); }
    Vector column(std::size_t c) const { return obs_.column(c); }

    bool operator==(const Dataset&) const = default;

private:
    Matrix obs_;
};

class SummaryVector
{
public:
    /// Throws DomainError on non-finite entries.
    explicit SummaryVector(Vector values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    Vector values_;
};

/// Plain Euclidean distance between two summary vectors.
double euclidean_distance(const SummaryVector& a, const SummaryVector& b);

/// Euclidean distance after dividing component i by scale[i].
double scaled_distance(const SummaryVector& a, const SummaryVector& b, std::span<const double> scale);

/// The contract every example model implements.
///
/// Implementations must be immutable after construction: samplers call the
/// const members concurrently from several workers.
class GenerativeModel
{
public:
    virtual ~GenerativeModel() = default;

    virtual std::string name() const = 0;
    virtual std::size_t parameter_dim() const = 0;
    virtual std::size_t summary_dim() const = 0;

    /// Draw theta from the (proper) prior.
    virtual Vector sample_prior(std::uint64_t seed) const = 0;

    /// log pi(theta); -infinity outside the prior support.
    virtual double log_prior(std::span<const double> theta) const = 0;

    /// Pure function of (theta, n, seed).
    virtual Dataset simulate(std::span<const double> theta, std::size_t n, std::uint64_t seed) const = 0;

    virtual SummaryVector summarize(const Dataset& data) const = 0;

    /// Summary of a simulated dataset. Models whose summaries have a cheaper
    /// sampling route with the same law may override this.
    virtual SummaryVector simulate_summary(std::span<const double> theta, std::size_t n, std::uint64_t seed) const
    {
        return summarize(simulate(theta, n, seed));
    }

    virtual const InterestMap& interest() const = 0;

    Vector psi(std::span<const double> theta) const { return interest()(theta); }

    ParameterPoint point(Vector theta) const;

    /// Closed-form marginal prior density of a scalar psi, when known.
    virtual std::optional<double> prior_psi_pdf(double /*psi*/) const { return std::nullopt; }
    virtual bool has_prior_psi_pdf() const { return false; }

    /// Random-walk standard deviations used when the run does not set them.
    virtual Vector default_kernel_scale() const = 0;

    /// True when psi lives on (0, inf) and density estimation should happen
    /// on the log scale.
    virtual bool psi_positive() const { return false; }
};

} // namespace abcil

#include <abcil/core.hpp>

#include <cmath>
#include <utility>

namespace abcil {

Vector Matrix::column(std::size_t c) const
{
    if (c >= cols_)
        throw DimensionError("column index " + std::to_string(c) + " out of range");
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r] = data_[r * cols_ + c];
    return out;
}

void Matrix::append_row(std::span<const double> values)
{
    if (rows_ == 0 && cols_ == 0)
        cols_ = values.size();
    if (values.size() != cols_)
        throw DimensionError("row width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

InterestMap InterestMap::coordinates(std::vector<std::size_t> indices)
{
    if (indices.empty())
        throw ConfigError("interest descriptor selects no coordinates");
    InterestMap m;
    m.name_ = "coordinates";
    m.dim_ = indices.size();
    m.indices_ = std::move(indices);
    return m;
}

InterestMap InterestMap::transform(std::string name, std::size_t dim, Transform fn)
{
    if (dim == 0 || !fn)
        throw ConfigError("interest transform '" + name + "' is empty");
    InterestMap m;
    m.name_ = std::move(name);
    m.dim_ = dim;
    m.fn_ = std::move(fn);
    return m;
}

Vector InterestMap::operator()(std::span<const double> theta) const
{
    if (fn_) {
        Vector out = fn_(theta);
        if (out.size() != dim_)
            throw ConfigError("interest transform '" + name_ + "' returned wrong dimension");
        return out;
    }
    Vector out;
    out.reserve(indices_.size());
    for (std::size_t i : indices_) {
        if (i >= theta.size())
            throw ConfigError("interest coordinate " + std::to_string(i) + " outside theta of dimension " +
                              std::to_string(theta.size()));
        out.push_back(theta[i]);
    }
    return out;
}

Vector extract_psi(const ParameterPoint& p)
{
    if (!p.interest)
        throw ConfigError("parameter point has no interest descriptor");
    return (*p.interest)(p.theta);
}

Dataset::Dataset(Matrix observations) : obs_(std::move(observations))
{
    if (obs_.rows() == 0 || obs_.cols() == 0)
        throw DimensionError("dataset must have at least one observation");
    for (double v : obs_.data())
        if (!std::isfinite(v))
            throw DomainError("dataset contains a non-finite entry");
}

SummaryVector::SummaryVector(Vector values) : values_(std::move(values))
{
    for (double v : values_)
        if (!std::isfinite(v))
            throw DomainError("summary statistic is not finite");
}

double euclidean_distance(const SummaryVector& a, const SummaryVector& b)
{
    if (a.size() != b.size())
        throw DimensionError("summary vectors differ in length: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double scaled_distance(const SummaryVector& a, const SummaryVector& b, std::span<const double> scale)
{
    if (a.size() != b.size() || scale.size() != a.size())
        throw DimensionError("summary/scale length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = (a[i] - b[i]) / scale[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

ParameterPoint GenerativeModel::point(Vector theta) const
{
    if (theta.size() != parameter_dim())
        throw DimensionError(name() + ": theta has dimension " + std::to_string(theta.size()) + ", expected " +
                             std::to_string(parameter_dim()));
    // Non-owning alias: the model outlives the points it hands out.
    return {std::move(theta), std::shared_ptr<const InterestMap>(std::shared_ptr<void>{}, &interest())};
}

} // namespace abcil

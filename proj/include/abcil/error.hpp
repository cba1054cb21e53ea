#pragma once

#include <stdexcept>
#include <string>

namespace abcil {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class DimensionError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "dimension"; }
};

/// Invalid descriptor, option or configuration value.
class ConfigError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

class DegenerateSampleError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "degenerate"; }
};

/// Quadrature, factorization or other numerical failure.
class NumericalError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numerical"; }
};

/// A model produced unusable output (e.g. no finite distance at all).
class ModelError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "model"; }
};

/// A simulation budget ran out before the sampler could produce output.
/// `best_distance` is the smallest distance observed before giving up.
class BudgetExhaustedError : public Error
{
public:
    BudgetExhaustedError(const std::string& what, double best_distance)
        : Error(what), best_distance_(best_distance)
    {
    }
    const char* kind() const noexcept override { return "budget"; }
    double best_distance() const noexcept { return best_distance_; }

private:
    double best_distance_;
};

} // namespace abcil

#include <abcil/error.hpp>
#include <abcil/stats.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace abcil::stats {

namespace {

std::vector<double> sorted_copy(std::span<const double> x)
{
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    return s;
}

void require_nonempty(std::span<const double> x, const char* what)
{
    if (x.empty())
        throw DimensionError(std::string(what) + ": empty sample");
}

} // namespace

double mean(std::span<const double> x)
{
    require_nonempty(x, "mean");
    double acc = 0.0;
    for (double v : x)
        acc += v;
    return acc / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x)
{
    if (x.size() < 2)
        throw DimensionError("sample_sd: need at least two values");
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x)
        acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

double central_moment(std::span<const double> x, int order)
{
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x)
        acc += std::pow(v - m, order);
    return acc / static_cast<double>(x.size());
}

double quantile(std::span<const double> x, double q)
{
    require_nonempty(x, "quantile");
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("quantile level must lie in [0, 1]");
    const auto s = sorted_copy(x);
    const double h = (static_cast<double>(s.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double order_statistic_quantile(std::span<const double> x, double q)
{
    require_nonempty(x, "order_statistic_quantile");
    if (!(q > 0.0 && q <= 1.0))
        throw DomainError("quantile level must lie in (0, 1]");
    const auto s = sorted_copy(x);
    const double n = static_cast<double>(s.size());
    // Guard against q * n landing a hair above an integer in floating point.
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, s.size());
    return s[rank - 1];
}

double empirical_cdf(std::span<const double> x, double t)
{
    require_nonempty(x, "empirical_cdf");
    const auto n = std::count_if(x.begin(), x.end(), [t](double v) { return v <= t; });
    return static_cast<double>(n) / static_cast<double>(x.size());
}

double ks_two_sample(std::span<const double> a, std::span<const double> b)
{
    require_nonempty(a, "ks_two_sample");
    require_nonempty(b, "ks_two_sample");
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double t = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= t)
            ++i;
        while (j < sb.size() && sb[j] <= t)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf)
{
    require_nonempty(x, "ks_one_sample");
    const auto s = sorted_copy(x);
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_pvalue(double d, double n_eff)
{
    // Kolmogorov limiting distribution with the Stephens small-sample correction.
    const double sq = std::sqrt(n_eff);
    const double lambda = (sq + 0.12 + 0.11 / sq) * d;
    if (lambda < 1e-3)
        return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16)
            break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double lag1_autocorrelation(std::span<const double> x)
{
    if (x.size() < 3)
        throw DimensionError("lag1_autocorrelation: need at least three values");
    const double m = mean(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - m) * (x[i] - m);
        if (i + 1 < x.size())
            num += (x[i] - m) * (x[i + 1] - m);
    }
    return den > 0.0 ? num / den : 1.0;
}

double trapezoid(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw DimensionError("trapezoid: grid and values differ in length");
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return acc;
}

std::size_t argmax(std::span<const double> y)
{
    require_nonempty(y, "argmax");
    return static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
}

} // namespace abcil::stats

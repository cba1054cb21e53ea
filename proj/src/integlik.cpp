#include <abcil/integlik.hpp>
#include <abcil/stats.hpp>

#include <algorithm>
#include <cmath>

namespace abcil {

namespace {

void validate_grid(std::span<const double> grid)
{
    if (grid.empty())
        throw DimensionError("psi grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw DomainError("psi grid contains a non-finite point");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw DomainError("psi grid must be strictly increasing");
    }
}

bool same_grid(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double tol = 1e-12 * std::max({1.0, std::abs(a[i]), std::abs(b[i])});
        if (std::abs(a[i] - b[i]) > tol)
            return false;
    }
    return true;
}

} // namespace

std::string to_string(Normalization mode)
{
    switch (mode) {
    case Normalization::max_one:
        return "max-one";
    case Normalization::unit_integral:
        return "unit-integral";
    case Normalization::raw:
        return "raw";
    }
    return "unknown";
}

Normalization parse_normalization(const std::string& name)
{
    if (name == "max-one")
        return Normalization::max_one;
    if (name == "unit-integral")
        return Normalization::unit_integral;
    if (name == "raw")
        return Normalization::raw;
    throw ConfigError("unknown normalization '" + name + "' (expected max-one, unit-integral or raw)");
}

std::size_t LikelihoodCurve::masked_count() const
{
    return static_cast<std::size_t>(std::count(masked.begin(), masked.end(), true));
}

double LikelihoodCurve::argmax() const
{
    std::size_t best = size();
    for (std::size_t i = 0; i < size(); ++i)
        if (!masked[i] && (best == size() || values[i] > values[best]))
            best = i;
    if (best == size())
        throw DomainError("curve has no unmasked point");
    return psi[best];
}

LikelihoodCurve abc_integrated_likelihood(std::span<const double> posterior_psi, const PriorPsi& prior,
                                          std::span<const double> grid, const IntegLikOptions& opts)
{
    validate_grid(grid);
    if (posterior_psi.empty())
        throw DimensionError("no posterior draws");
    if (!(opts.prior_floor >= 0.0))
        throw ConfigError("prior_floor must be nonnegative");

    LikelihoodCurve curve;
    curve.psi.assign(grid.begin(), grid.end());
    curve.meta.posterior_draws = posterior_psi.size();
    curve.meta.density_scale = opts.scale == DensityScale::log ? "log" : "linear";

    const ScaledKde post(posterior_psi, opts.scale, opts.bandwidth);
    curve.meta.posterior_bandwidth = post.estimate().bandwidth();
    const Vector numerator = post.pdf(grid);

    Vector denominator;
    if (const auto* pdf = std::get_if<PriorPdf>(&prior)) {
        curve.meta.prior_source = "pdf";
        denominator.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            denominator[i] = pdf->pdf(grid[i]);
    } else {
        const auto& sample = std::get<PriorSample>(prior);
        curve.meta.prior_source = "sample";
        BandwidthOptions prior_bw = opts.bandwidth;
        // The prior sample is exact, not an ABC output: no summary-dimension rate.
        prior_bw.summary_dim = 1;
        const ScaledKde prior_kde(sample.draws, opts.scale, prior_bw);
        curve.meta.prior_bandwidth = prior_kde.estimate().bandwidth();
        denominator = prior_kde.pdf(grid);
    }

    double max_prior = 0.0;
    for (double v : denominator) {
        if (!std::isfinite(v) || v < 0.0)
            throw NumericalError("prior density is negative or non-finite on the grid");
        max_prior = std::max(max_prior, v);
    }
    const double floor = opts.prior_floor * max_prior;
    curve.values.assign(grid.size(), 0.0);
    curve.masked.assign(grid.size(), false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(denominator[i] > 0.0) || denominator[i] < floor) {
            curve.masked[i] = true;
            continue;
        }
        curve.values[i] = numerator[i] / denominator[i];
    }
    curve.meta.masked_points = curve.masked_count();
    if (curve.meta.masked_points == grid.size())
        throw DomainError("prior density is below the floor on the entire grid");
    return normalize_curve(std::move(curve), opts.normalization);
}

LikelihoodCurve abc_integrated_likelihood(const AbcDraws& posterior, const PriorPsi& prior,
                                          std::span<const double> grid, const IntegLikOptions& opts)
{
    if (posterior.psi.cols() != 1)
        throw DimensionError("abc_integrated_likelihood: psi must be scalar");
    LikelihoodCurve curve = abc_integrated_likelihood(posterior.psi_column(0), prior, grid, opts);
    curve.meta.sampler = posterior.sampler;
    curve.meta.epsilon = posterior.epsilon;
    curve.meta.seed = posterior.seed;
    return curve;
}

LikelihoodCurve normalize_curve(LikelihoodCurve curve, Normalization mode)
{
    if (curve.values.size() != curve.psi.size())
        throw DimensionError("curve grid and values differ in length");
    if (curve.masked.empty())
        curve.masked.assign(curve.values.size(), false);
    double max_value = 0.0;
    for (double v : curve.values) {
        if (!std::isfinite(v) || v < 0.0)
            throw DomainError("curve values must be finite and nonnegative");
        max_value = std::max(max_value, v);
    }
    if (!(max_value > 0.0))
        throw DomainError("cannot normalize an all-zero curve");

    double divisor = 1.0;
    switch (mode) {
    case Normalization::max_one:
        divisor = max_value;
        break;
    case Normalization::unit_integral:
        divisor = stats::trapezoid(curve.psi, curve.values);
        if (!(divisor > 0.0))
            throw DomainError("curve has zero integral");
        break;
    case Normalization::raw:
        break;
    }
    if (divisor != 1.0)
        for (double& v : curve.values)
            v /= divisor;
    curve.normalization = mode;
    return curve;
}

Vector linspace(double lo, double hi, std::size_t points)
{
    if (points < 2 || !(hi > lo))
        throw DomainError("linspace needs hi > lo and at least two points");
    Vector out(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

Vector make_grid(std::span<const double> posterior, std::span<const double> prior, const GridSpec& spec)
{
    if (spec.lo && spec.hi)
        return linspace(*spec.lo, *spec.hi, spec.points);
    if (!(spec.coverage > 0.0 && spec.coverage <= 1.0))
        throw ConfigError("grid coverage must lie in (0, 1]");
    Vector pooled(posterior.begin(), posterior.end());
    pooled.insert(pooled.end(), prior.begin(), prior.end());
    if (pooled.empty())
        throw DimensionError("make_grid: no draws to span");
    const double tail = 0.5 * (1.0 - spec.coverage);
    const double lo = spec.lo.value_or(stats::quantile(pooled, tail));
    const double hi = spec.hi.value_or(stats::quantile(pooled, 1.0 - tail));
    return linspace(lo, hi, spec.points);
}

RatioDiagnostics ratio_error_diagnostics(const ScaledKde& posterior, const PriorEstimate& prior,
                                         std::span<const double> grid, const DiagnosticsOptions& opts)
{
    validate_grid(grid);
    auto curvature_of = [&](const KdeEstimate& est) {
        return opts.curvature_bandwidth ? KdeEstimate(Vector(est.sample().begin(), est.sample().end()),
                                                      *opts.curvature_bandwidth)
                                        : est;
    };
    const KdeEstimate post_curv = curvature_of(posterior.estimate());
    const ScaledKde* prior_kde = std::get_if<ScaledKde>(&prior);
    const std::optional<KdeEstimate> prior_curv =
        prior_kde ? std::optional<KdeEstimate>(curvature_of(prior_kde->estimate())) : std::nullopt;

    RatioDiagnostics out;
    out.psi.assign(grid.begin(), grid.end());
    out.posterior_bandwidth = posterior.estimate().bandwidth();
    out.prior_bandwidth = prior_kde ? prior_kde->estimate().bandwidth() : 0.0;
    out.minimal_mse_rate = minimal_mse_rate(posterior.estimate().size(), opts.summary_dim);

    const std::size_t n = grid.size();
    for (Vector* v : {&out.posterior_density, &out.prior_density, &out.posterior_bias, &out.prior_bias,
                      &out.ratio_bias, &out.ratio_variance})
        v->resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid[i];
        const double f = posterior.pdf(x);
        const double bias_x = posterior.leading_bias(x, post_curv);
        const double var_x = posterior.asymptotic_variance(x);

        double g, bias_pi = 0.0, var_pi = 0.0;
        if (prior_kde) {
            g = prior_kde->pdf(x);
            bias_pi = prior_kde->leading_bias(x, *prior_curv);
            var_pi = prior_kde->asymptotic_variance(x);
        } else {
            g = std::get<PriorPdf>(prior).pdf(x);
        }

        const double num = f + bias_x;
        const double den = g + bias_pi;
        out.posterior_density[i] = f;
        out.prior_density[i] = g;
        out.posterior_bias[i] = bias_x;
        out.prior_bias[i] = bias_pi;
        out.ratio_bias[i] = num / den - f / g;
        const double level = num / den;
        out.ratio_variance[i] = level * level * (var_x / (num * num) + var_pi / (den * den));
    }
    return out;
}

double sup_norm_distance(const LikelihoodCurve& a, const LikelihoodCurve& b, double lo, double hi)
{
    if (!same_grid(a.psi, b.psi))
        throw DimensionError("sup_norm_distance: curves are on different grids");
    double sup = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.psi[i] < lo || a.psi[i] > hi || a.masked[i] || b.masked[i])
            continue;
        sup = std::max(sup, std::abs(a.values[i] - b.values[i]));
        any = true;
    }
    if (!any)
        throw DomainError("sup_norm_distance: no comparable grid points");
    return sup;
}

LikelihoodCurve resample_curve(const LikelihoodCurve& curve, std::span<const double> grid)
{
    validate_grid(grid);
    LikelihoodCurve out;
    out.psi.assign(grid.begin(), grid.end());
    out.values.assign(grid.size(), 0.0);
    out.masked.assign(grid.size(), true);
    out.normalization = curve.normalization;
    out.meta = curve.meta;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        if (x < curve.psi.front() || x > curve.psi.back())
            continue;
        auto it = std::upper_bound(curve.psi.begin(), curve.psi.end(), x);
        std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - curve.psi.begin()), curve.size() - 1);
        std::size_t lo = hi == 0 ? 0 : hi - 1;
        if (curve.masked[lo] || curve.masked[hi])
            continue;
        const double span = curve.psi[hi] - curve.psi[lo];
        const double w = span > 0.0 ? (x - curve.psi[lo]) / span : 0.0;
        out.values[i] = (1.0 - w) * curve.values[lo] + w * curve.values[hi];
        out.masked[i] = false;
    }
    out.meta.masked_points = out.masked_count();
    return out;
}

LikelihoodCurve curve_from_loglik(std::span<const double> grid, const std::function<double(double)>& loglik,
                                  Normalization mode)
{
    validate_grid(grid);
    LikelihoodCurve curve;
    curve.psi.assign(grid.begin(), grid.end());
    curve.masked.assign(grid.size(), false);
    Vector ll(grid.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ll[i] = loglik(grid[i]);
        if (std::isnan(ll[i]))
            throw NumericalError("log-likelihood is NaN on the grid");
        top = std::max(top, ll[i]);
    }
    if (!std::isfinite(top))
        throw NumericalError("log-likelihood has no finite value on the grid");
    curve.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        curve.values[i] = std::exp(ll[i] - top);
    curve.meta.sampler = "exact";
    return normalize_curve(std::move(curve), mode);
}

} // namespace abcil

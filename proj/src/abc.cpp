#include <abcil/abc.hpp>
#include <abcil/rng.hpp>
#include <abcil/stats.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace abcil {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream tags for derive_seed so the prior, simulator and kernel streams of
// one run never share seeds.
enum Stream : std::uint64_t {
    prior_stream = 1,
    sim_stream = 2,
    init_prior_stream = 3,
    init_sim_stream = 4,
    kernel_stream = 5,
    chain_stream = 6,
    pilot_prior_stream = 7,
    pilot_sim_stream = 8,
};

class DistanceTo
{
public:
    DistanceTo(const GenerativeModel& model, const Dataset& observed, const Vector& scale)
        : observed_(model.summarize(observed)), scale_(scale)
    {
        if (!scale_.empty() && scale_.size() != observed_.size())
            throw DimensionError("summary_scale length does not match the summary dimension");
        for (double s : scale_)
            if (!(s > 0.0))
                throw ConfigError("summary_scale entries must be positive");
    }

    double operator()(const SummaryVector& s) const
    {
        return scale_.empty() ? euclidean_distance(s, observed_) : scaled_distance(s, observed_, scale_);
    }

private:
    SummaryVector observed_;
    Vector scale_;
};

// Simulated distance; simulation failures on extreme parameters count as
// infinitely far rather than aborting the run.
double simulate_distance(const GenerativeModel& model, const DistanceTo& dist, std::span<const double> theta,
                         std::size_t n, std::uint64_t seed)
{
    try {
        const double d = dist(model.simulate_summary(theta, n, seed));
        return std::isnan(d) ? kInf : d;
    } catch (const DomainError&) {
        return kInf;
    } catch (const NumericalError&) {
        return kInf;
    } catch (const DegenerateSampleError&) {
        return kInf;
    }
}

// Runs body(i) for i in [begin, end) across `workers` threads. Each index is
// handled by exactly one thread; the first exception is rethrown.
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, std::size_t workers, Body&& body)
{
    const std::size_t count = end - begin;
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = begin; i < end; ++i)
            body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = begin + w; i < end; i += workers)
                    body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

void append_draw(AbcDraws& out, const GenerativeModel& model, std::span<const double> theta, double distance)
{
    out.theta.append_row(theta);
    out.psi.append_row(model.psi(theta));
    out.distances.push_back(distance);
}

Vector kernel_scale_for(const GenerativeModel& model, const AbcConfig& cfg)
{
    Vector scale = cfg.kernel_scale.empty() ? model.default_kernel_scale() : cfg.kernel_scale;
    if (scale.size() != model.parameter_dim())
        throw DimensionError("kernel_scale has " + std::to_string(scale.size()) + " entries, model has " +
                             std::to_string(model.parameter_dim()) + " parameters");
    for (double s : scale)
        if (!(s > 0.0) || !std::isfinite(s))
            throw ConfigError("kernel_scale entries must be positive and finite");
    return scale;
}

struct ChainResult
{
    Matrix theta;
    Vector distances;
    std::size_t proposals = 0;
    std::size_t accepted = 0;
    std::size_t simulations = 0;
    std::size_t init_attempts = 0;
};

// Prior draws until one simulation lands within epsilon.
std::pair<Vector, double> initialize_chain(const GenerativeModel& model, const DistanceTo& dist, std::size_t n,
                                           const AbcConfig& cfg, std::uint64_t chain_seed, std::size_t& attempts)
{
    const std::uint64_t prior_seed = derive_seed(chain_seed, init_prior_stream);
    const std::uint64_t sim_seed = derive_seed(chain_seed, init_sim_stream);
    double best = kInf;
    for (std::size_t k = 0; k < cfg.init_budget; ++k) {
        Vector theta = model.sample_prior(derive_seed(prior_seed, k));
        if (!std::isfinite(model.log_prior(theta)))
            continue;
        const double d = simulate_distance(model, dist, theta, n, derive_seed(sim_seed, k));
        best = std::min(best, d);
        if (d <= cfg.epsilon) {
            attempts = k + 1;
            return {std::move(theta), d};
        }
    }
    throw BudgetExhaustedError("ABC-MCMC initialization: no prior draw within epsilon = " +
                                   std::to_string(cfg.epsilon) + " after " + std::to_string(cfg.init_budget) +
                                   " attempts (smallest distance " + std::to_string(best) + ")",
                               best);
}

ChainResult run_chain(const GenerativeModel& model, const DistanceTo& dist, std::size_t n, const AbcConfig& cfg,
                      const Vector& scale, std::uint64_t chain_seed, bool retry)
{
    ChainResult out;
    auto [theta, current_distance] = initialize_chain(model, dist, n, cfg, chain_seed, out.init_attempts);
    double current_lp = model.log_prior(theta);

    Rng rng = make_rng(derive_seed(chain_seed, kernel_stream));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::uint64_t sim_seed = derive_seed(chain_seed, sim_stream);
    const std::size_t burn_in = cfg.effective_burn_in();
    const std::size_t d = theta.size();
    Vector proposal(d);

    for (std::size_t t = 1; t <= cfg.chain_length; ++t) {
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt >= cfg.retry_budget)
                throw BudgetExhaustedError("ABC-MCMC retry: step " + std::to_string(t) + " found no proposal within "
                                               "epsilon after " + std::to_string(cfg.retry_budget) + " tries",
                                           current_distance);
            for (std::size_t j = 0; j < d; ++j)
                proposal[j] = theta[j] + scale[j] * normal(rng);
            // The uniform is drawn up front in both variants so that, when the
            // tolerance never binds, they consume identical random streams.
            const double u = uniform_open(rng);
            ++out.proposals;

            const double lp = model.log_prior(proposal);
            // Symmetric kernel: h = min(1, pi(prop) / pi(current)); h = 0 off-support.
            const bool metropolis_ok = std::isfinite(lp) && std::log(u) < lp - current_lp;

            if (!retry && !metropolis_ok)
                break; // stays; the simulation could not change the outcome
            if (!std::isfinite(lp))
                break; // h = 0: the Metropolis step repeats the state

            const double dz = simulate_distance(model, dist, proposal, n, derive_seed(sim_seed, out.simulations++));
            if (dz > cfg.epsilon) {
                if (retry)
                    continue;
                break;
            }
            if (metropolis_ok) {
                theta = proposal;
                current_lp = lp;
                current_distance = dz;
                ++out.accepted;
            }
            break;
        }
        if (t > burn_in) {
            out.theta.append_row(theta);
            out.distances.push_back(current_distance);
        }
    }
    return out;
}

AbcDraws run_mcmc(const GenerativeModel& model, const Dataset& observed, const AbcConfig& cfg, bool retry)
{
    cfg.validate();
    const DistanceTo dist(model, observed, cfg.summary_scale);
    const Vector scale = kernel_scale_for(model, cfg);

    std::vector<ChainResult> chains(cfg.chains);
    parallel_for(0, cfg.chains, cfg.workers, [&](std::size_t c) {
        const std::uint64_t chain_seed = cfg.chains == 1 ? cfg.seed : derive_seed(cfg.seed, chain_stream + 16 * c);
        chains[c] = run_chain(model, dist, observed.n(), cfg, scale, chain_seed, retry);
    });

    AbcDraws out;
    out.sampler = retry ? "mcmc_retry" : "mcmc_movestay";
    out.epsilon = cfg.epsilon;
    out.seed = cfg.seed;
    for (const ChainResult& c : chains) {
        for (std::size_t r = 0; r < c.theta.rows(); ++r)
            append_draw(out, model, c.theta.row(r), c.distances[r]);
        out.n_proposals += c.proposals;
        out.n_accepted += c.accepted;
        out.n_simulations += c.simulations;
        out.init_attempts += c.init_attempts;
    }
    out.n_simulations += out.init_attempts;
    out.acceptance_rate =
        out.n_proposals > 0 ? static_cast<double>(out.n_accepted) / static_cast<double>(out.n_proposals) : 0.0;
    for (double d : out.distances)
        out.min_distance = std::min(out.min_distance, d);
    return out;
}

} // namespace

std::string to_string(SamplerKind kind)
{
    switch (kind) {
    case SamplerKind::rejection:
        return "rejection";
    case SamplerKind::mcmc_movestay:
        return "mcmc_movestay";
    case SamplerKind::mcmc_retry:
        return "mcmc_retry";
    }
    return "unknown";
}

SamplerKind parse_sampler(const std::string& name)
{
    if (name == "rejection")
        return SamplerKind::rejection;
    if (name == "mcmc_movestay")
        return SamplerKind::mcmc_movestay;
    if (name == "mcmc_retry")
        return SamplerKind::mcmc_retry;
    throw ConfigError("unknown sampler '" + name + "' (expected rejection, mcmc_movestay or mcmc_retry)");
}

std::size_t AbcConfig::effective_burn_in() const
{
    return burn_in.value_or(chain_length / 10);
}

void AbcConfig::validate() const
{
    if (!(epsilon >= 0.0))
        throw ConfigError("epsilon must be nonnegative");
    if (chain_length == 0)
        throw ConfigError("chain_length must be positive");
    if (effective_burn_in() >= chain_length)
        throw ConfigError("burn_in must be smaller than chain_length");
    if (chains == 0 || workers == 0 || chunk_size == 0)
        throw ConfigError("chains, workers and chunk_size must be positive");
    if (max_proposals == 0 || init_budget == 0 || retry_budget == 0)
        throw ConfigError("simulation budgets must be positive");
}

AbcDraws rejection_abc(const GenerativeModel& model, const Dataset& observed, const AbcConfig& cfg)
{
    cfg.validate();
    const DistanceTo dist(model, observed, cfg.summary_scale);
    const std::size_t n = observed.n();
    const std::size_t d = model.parameter_dim();
    const std::uint64_t prior_seed = derive_seed(cfg.seed, prior_stream);
    const std::uint64_t sim_seed = derive_seed(cfg.seed, sim_stream);
    const bool fixed_proposals = cfg.target_accepts == 0;

    AbcDraws out;
    out.sampler = "rejection";
    out.epsilon = cfg.epsilon;
    out.seed = cfg.seed;

    Matrix chunk_theta;
    Vector chunk_dist;
    std::size_t next = 0;
    bool done = false;
    while (!done && next < cfg.max_proposals) {
        const std::size_t len = std::min(cfg.chunk_size, cfg.max_proposals - next);
        chunk_theta = Matrix(len, d);
        chunk_dist.assign(len, kInf);
        parallel_for(0, len, cfg.workers, [&](std::size_t i) {
            const std::size_t index = next + i;
            const Vector theta = model.sample_prior(derive_seed(prior_seed, index));
            std::copy(theta.begin(), theta.end(), chunk_theta.row(i).begin());
            chunk_dist[i] = simulate_distance(model, dist, theta, n, derive_seed(sim_seed, index));
        });
        out.n_simulations += len;

        // Sequential merge in proposal order keeps the result independent of
        // the worker count.
        for (std::size_t i = 0; i < len; ++i) {
            ++out.n_proposals;
            out.min_distance = std::min(out.min_distance, chunk_dist[i]);
            if (chunk_dist[i] <= cfg.epsilon) {
                append_draw(out, model, chunk_theta.row(i), chunk_dist[i]);
                out.proposal_index.push_back(next + i);
                if (!fixed_proposals && out.size() == cfg.target_accepts) {
                    done = true;
                    break;
                }
            }
        }
        next += len;
    }

    out.n_accepted = out.size();
    if (out.n_accepted == 0)
        throw BudgetExhaustedError("rejection ABC: no proposal within epsilon = " + std::to_string(cfg.epsilon) +
                                       " among " + std::to_string(out.n_proposals) +
                                       " proposals (smallest distance " + std::to_string(out.min_distance) + ")",
                                   out.min_distance);
    out.budget_exhausted = !fixed_proposals && out.n_accepted < cfg.target_accepts;
    out.acceptance_rate = static_cast<double>(out.n_accepted) / static_cast<double>(out.n_proposals);
    return out;
}

AbcDraws abc_mcmc_movestay(const GenerativeModel& model, const Dataset& observed, const AbcConfig& cfg)
{
    return run_mcmc(model, observed, cfg, false);
}

AbcDraws abc_mcmc_retry(const GenerativeModel& model, const Dataset& observed, const AbcConfig& cfg)
{
    return run_mcmc(model, observed, cfg, true);
}

AbcDraws run_sampler(SamplerKind kind, const GenerativeModel& model, const Dataset& observed, const AbcConfig& cfg)
{
    switch (kind) {
    case SamplerKind::rejection:
        return rejection_abc(model, observed, cfg);
    case SamplerKind::mcmc_movestay:
        return abc_mcmc_movestay(model, observed, cfg);
    case SamplerKind::mcmc_retry:
        return abc_mcmc_retry(model, observed, cfg);
    }
    throw ConfigError("unknown sampler kind");
}

CalibrationResult calibrate_tolerance(const GenerativeModel& model, const Dataset& observed, std::size_t pilot_n,
                                      double q, std::uint64_t seed, const Vector& summary_scale, std::size_t workers)
{
    if (pilot_n < 100)
        throw ConfigError("calibrate_tolerance: pilot_n must be at least 100");
    if (!(q > 0.0 && q < 1.0))
        throw ConfigError("calibrate_tolerance: quantile must lie in (0, 1)");
    const DistanceTo dist(model, observed, summary_scale);
    const std::uint64_t prior_seed = derive_seed(seed, pilot_prior_stream);
    const std::uint64_t sim_seed = derive_seed(seed, pilot_sim_stream);

    CalibrationResult out;
    out.quantile = q;
    out.pilot_n = pilot_n;
    out.distances.assign(pilot_n, kInf);
    parallel_for(0, pilot_n, workers, [&](std::size_t i) {
        const Vector theta = model.sample_prior(derive_seed(prior_seed, i));
        out.distances[i] = simulate_distance(model, dist, theta, observed.n(), derive_seed(sim_seed, i));
    });
    if (std::none_of(out.distances.begin(), out.distances.end(), [](double v) { return std::isfinite(v); }))
        throw ModelError("calibrate_tolerance: every pilot distance is non-finite");
    out.epsilon = stats::order_statistic_quantile(out.distances, q);
    return out;
}

Vector mad_summary_scale(const GenerativeModel& model, std::size_t n, std::size_t pilot_n, std::uint64_t seed)
{
    if (pilot_n < 2)
        throw ConfigError("mad_summary_scale: pilot_n must be at least 2");
    const std::uint64_t prior_seed = derive_seed(seed, pilot_prior_stream);
    const std::uint64_t sim_seed = derive_seed(seed, pilot_sim_stream);
    std::vector<Vector> columns(model.summary_dim());
    for (std::size_t i = 0; i < pilot_n; ++i) {
        const Vector theta = model.sample_prior(derive_seed(prior_seed, i));
        try {
            const SummaryVector s = model.simulate_summary(theta, n, derive_seed(sim_seed, i));
            for (std::size_t j = 0; j < s.size(); ++j)
                columns[j].push_back(s[j]);
        } catch (const DomainError&) {
        } catch (const NumericalError&) {
        } catch (const DegenerateSampleError&) {
        }
    }
    Vector scale(columns.size(), 1.0);
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].empty())
            continue;
        const double med = stats::quantile(columns[j], 0.5);
        Vector dev(columns[j].size());
        for (std::size_t i = 0; i < dev.size(); ++i)
            dev[i] = std::abs(columns[j][i] - med);
        const double mad = stats::quantile(dev, 0.5);
        if (mad > 0.0)
            scale[j] = mad;
    }
    return scale;
}

Vector sample_prior_psi(const GenerativeModel& model, std::size_t m, std::uint64_t seed)
{
    if (model.interest().dim() != 1)
        throw DimensionError("sample_prior_psi: psi must be scalar");
    const std::uint64_t prior_seed = derive_seed(seed, prior_stream);
    Vector out(m);
    for (std::size_t i = 0; i < m; ++i)
        out[i] = model.psi(model.sample_prior(derive_seed(prior_seed, i)))[0];
    return out;
}

Histogram make_histogram(std::span<const double> x, std::size_t bins)
{
    if (bins == 0)
        throw ConfigError("histogram needs at least one bin");
    Vector finite;
    for (double v : x)
        if (std::isfinite(v))
            finite.push_back(v);
    Histogram h;
    h.counts.assign(bins, 0);
    if (finite.empty())
        return h;
    const auto [lo_it, hi_it] = std::minmax_element(finite.begin(), finite.end());
    const double lo = *lo_it;
    const double hi = *hi_it > lo ? *hi_it : lo + 1.0;
    const double width = (hi - lo) / static_cast<double>(bins);
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        h.edges[b] = lo + width * static_cast<double>(b);
    h.edges[bins] = hi;
    for (double v : finite) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        h.counts[std::min(b, bins - 1)]++;
    }
    return h;
}

} // namespace abcil

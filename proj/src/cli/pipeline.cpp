#include "cli/pipeline.hpp"
#include "cli/curve_io.hpp"

#include <abcil/integlik.hpp>
#include <abcil/models/gk.hpp>
#include <abcil/models/matched_pairs.hpp>
#include <abcil/models/poisson_ratio.hpp>
#include <abcil/models/semipar.hpp>
#include <abcil/rng.hpp>
#include <abcil/stats.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace abcil::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream tags for the seeds derived from the run seed.
enum : std::uint64_t { data_stream = 11, pilot_stream = 21, prior_psi_stream = 31, mad_stream = 41 };

// JSON has no infinity; encode non-finite values as strings.
Json num(double x)
{
    if (std::isfinite(x))
        return x;
    return format_double(x);
}

Json vec(std::span<const double> v)
{
    Json a = Json::array();
    for (double x : v)
        a.push_back(num(x));
    return a;
}

const Json* find(const Json& obj, const std::string& key)
{
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_double(const Json& obj, const std::string& section, const std::string& key, double fallback)
{
    const Json* v = find(obj, key);
    if (!v)
        return fallback;
    if (!v->is_number())
        throw ConfigError(section + "." + key + " must be a number");
    return v->get<double>();
}

std::size_t get_count(const Json& obj, const std::string& section, const std::string& key, std::size_t fallback)
{
    const Json* v = find(obj, key);
    if (!v)
        return fallback;
    if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<long long>() < 0))
        throw ConfigError(section + "." + key + " must be a nonnegative integer");
    return v->get<std::size_t>();
}

Vector get_vector(const Json& obj, const std::string& section, const std::string& key, Vector fallback)
{
    const Json* v = find(obj, key);
    if (!v)
        return fallback;
    if (!v->is_array())
        throw ConfigError(section + "." + key + " must be an array of numbers");
    Vector out;
    for (const auto& e : *v) {
        if (!e.is_number())
            throw ConfigError(section + "." + key + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

std::uint64_t data_seed(const RunConfig& cfg)
{
    const Json* s = find(cfg.data, "seed");
    if (!s)
        return derive_seed(cfg.seed, data_stream);
    if (!s->is_number_unsigned())
        throw ConfigError("data.seed must be a nonnegative integer");
    return s->get<std::uint64_t>();
}

// Numeric CSV with an optional header line; '#' lines are comments.
Matrix read_numeric_csv(const std::string& path, std::size_t expected_cols)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open data file '" + path + "'");
    Matrix m(0, expected_cols);
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string field;
        bool numeric = true;
        while (std::getline(ls, field, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(field, &used));
                while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
                    ++used;
                numeric = numeric && used == field.size();
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (first && !numeric) {
            first = false;
            continue; // header
        }
        first = false;
        if (!numeric)
            throw DomainError(path + ":" + std::to_string(lineno) + ": non-numeric field");
        if (row.size() != expected_cols)
            throw DimensionError(path + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(expected_cols) + " columns");
        m.append_row(row);
    }
    if (m.rows() == 0)
        throw DimensionError("data file '" + path + "' has no rows");
    return m;
}

Experiment build_poisson(const RunConfig& cfg)
{
    check_keys(cfg.model, "model", {"prior_shape", "prior_rate"});
    check_keys(cfg.data, "data", {"n", "theta", "seed", "file"});
    Experiment ex;
    auto model = std::make_unique<PoissonRatioModel>(get_double(cfg.model, "model", "prior_shape", 0.1),
                                                     get_double(cfg.model, "model", "prior_rate", 0.1));
    if (const Json* f = find(cfg.data, "file")) {
        ex.observed = Dataset(read_numeric_csv(f->get<std::string>(), 2));
        ex.data_report["file"] = f->get<std::string>();
    } else {
        const std::size_t n = get_count(cfg.data, "data", "n", 10);
        const Vector theta = get_vector(cfg.data, "data", "theta", {2.0, 4.0});
        if (theta.size() != 2)
            throw ConfigError("data.theta must have two entries");
        const std::uint64_t seed = data_seed(cfg);
        ex.observed = model->simulate(theta, n, seed);
        ex.data_report["theta"] = vec(theta);
        ex.data_report["true_psi"] = theta[0] / theta[1];
        ex.data_report["seed"] = seed;
    }
    const double n = static_cast<double>(ex.observed.n());
    const SummaryVector s = model->summarize(ex.observed);
    const double xbar = s[0], ybar = s[1];
    ex.data_report["n"] = ex.observed.n();
    ex.data_report["xbar"] = xbar;
    ex.data_report["ybar"] = ybar;
    if (ybar > 0.0)
        ex.data_report["exact_argmax"] = xbar / ybar;
    const std::size_t nn = static_cast<std::size_t>(n);
    ex.oracles.push_back({"exact", [=](double psi) {
                              return psi > 0.0 ? poisson_exact_log_likelihood(psi, xbar, ybar, nn) : -kInf;
                          }});
    ex.model = std::move(model);
    return ex;
}

Experiment build_matched_pairs(const RunConfig& cfg)
{
    check_keys(cfg.model, "model", {"k_pairs", "psi_prior_mean", "psi_prior_sd"});
    check_keys(cfg.data, "data", {"psi_true", "seed", "file"});
    Experiment ex;
    Matrix file_rows;
    std::size_t k = get_count(cfg.model, "model", "k_pairs", 30);
    if (const Json* f = find(cfg.data, "file")) {
        file_rows = read_numeric_csv(f->get<std::string>(), 2);
        k = file_rows.rows();
        ex.data_report["file"] = f->get<std::string>();
    }
    auto model = std::make_unique<MatchedPairsModel>(k, get_double(cfg.model, "model", "psi_prior_mean", 0.0),
                                                     get_double(cfg.model, "model", "psi_prior_sd", 10.0));
    if (!file_rows.empty()) {
        ex.observed = Dataset(std::move(file_rows));
    } else {
        const double psi_true = get_double(cfg.data, "data", "psi_true", 1.0);
        const std::uint64_t seed = data_seed(cfg);
        ex.observed = model->generate_observed(psi_true, seed);
        ex.data_report["true_psi"] = psi_true;
        ex.data_report["seed"] = seed;
    }
    const PairCounts counts = count_pairs(ex.observed);
    const std::size_t T = counts.discordant_successes();
    const std::size_t b = counts.discordant();
    ex.data_report["k_pairs"] = k;
    ex.data_report["counts"] = {{"n00", counts.n[0][0]}, {"n01", counts.n[0][1]},
                                {"n10", counts.n[1][0]}, {"n11", counts.n[1][1]}};
    ex.data_report["T"] = T;
    ex.data_report["b"] = b;

    ex.oracles.push_back({"integrated", [counts](double psi) { return matched_pairs_integrated_loglik(psi, counts); }});
    if (b > 0) {
        auto report_argmax = [&](const std::string& name, ArgmaxResult r) {
            ex.data_report["argmax"][name] = r.boundary ? Json(format_double(r.psi)) : Json(r.psi);
        };
        report_argmax("profile", matched_pairs_profile_argmax(T, b));
        report_argmax("modified_profile", matched_pairs_modified_profile_argmax(T, b));
        report_argmax("conditional", matched_pairs_conditional_argmax(T, b));
        ex.oracles.push_back({"profile", [T, b](double psi) { return matched_pairs_profile_loglik(psi, T, b); }});
        ex.oracles.push_back({"modified_profile",
                              [T, b](double psi) { return matched_pairs_modified_profile_loglik(psi, T, b); }});
        ex.oracles.push_back(
            {"conditional", [T, b](double psi) { return matched_pairs_conditional_loglik(psi, T, b); }});
    }
    ex.model = std::move(model);
    return ex;
}

Experiment build_gk(const RunConfig& cfg)
{
    check_keys(cfg.model, "model", {"c", "prior_upper", "levels"});
    check_keys(cfg.data, "data", {"n", "theta", "seed", "file"});
    Experiment ex;
    const double c = get_double(cfg.model, "model", "c", kGkDefaultC);
    ex.levels = get_vector(cfg.model, "model", "levels", {0.05, 0.10, 0.25, 0.50});
    if (ex.levels.empty())
        throw ConfigError("model.levels must not be empty");
    for (double u : ex.levels)
        if (!(u > 0.0 && u < 1.0))
            throw ConfigError("model.levels must lie in (0, 1)");
    auto model = std::make_unique<GkModel>(ex.levels.front(), c, get_double(cfg.model, "model", "prior_upper", 10.0));
    if (const Json* f = find(cfg.data, "file")) {
        ex.observed = Dataset(read_numeric_csv(f->get<std::string>(), 1));
        ex.data_report["file"] = f->get<std::string>();
    } else {
        const std::size_t n = get_count(cfg.data, "data", "n", 1000);
        const Vector theta = get_vector(cfg.data, "data", "theta", {3.0, 1.0, 2.0, 0.5});
        if (theta.size() != 4)
            throw ConfigError("data.theta must have four entries (A, B, g, k)");
        if (!gk_is_monotone(theta[0], theta[1], theta[2], theta[3], c))
            throw ModelError("data.theta gives a quantile function that is not increasing");
        const std::uint64_t seed = data_seed(cfg);
        ex.observed = gk_simulate(n, theta[0], theta[1], theta[2], theta[3], c, seed);
        ex.data_report["theta"] = vec(theta);
        ex.data_report["seed"] = seed;
        Json q = Json::object();
        for (double u : ex.levels)
            q[format_double(u)] = gk_quantile(u, theta[0], theta[1], theta[2], theta[3], c);
        ex.data_report["true_quantiles"] = q;
    }
    ex.data_report["n"] = ex.observed.n();
    ex.model = std::move(model);
    return ex;
}

Experiment build_semipar(const RunConfig& cfg)
{
    check_keys(cfg.model, "model",
               {"n", "design_seed", "noise_prior", "sigma2_shape", "sigma2_scale", "sigma2_upper", "tau2_shape",
                "tau2_scale", "alpha_shape"});
    check_keys(cfg.data, "data", {"truth", "seed", "file"});
    Experiment ex;
    SemiparPriorOptions prior;
    if (const Json* np = find(cfg.model, "noise_prior")) {
        const std::string s = np->is_string() ? np->get<std::string>() : "";
        if (s == "inverse_gamma")
            prior.noise = NoisePrior::inverse_gamma;
        else if (s == "uniform")
            prior.noise = NoisePrior::uniform;
        else
            throw ConfigError("model.noise_prior must be \"inverse_gamma\" or \"uniform\"");
    }
    prior.sigma2_shape = get_double(cfg.model, "model", "sigma2_shape", prior.sigma2_shape);
    prior.sigma2_scale = get_double(cfg.model, "model", "sigma2_scale", prior.sigma2_scale);
    prior.sigma2_upper = get_double(cfg.model, "model", "sigma2_upper", prior.sigma2_upper);
    prior.tau2_shape = get_double(cfg.model, "model", "tau2_shape", prior.tau2_shape);
    prior.tau2_scale = get_double(cfg.model, "model", "tau2_scale", prior.tau2_scale);
    prior.alpha_shape = get_double(cfg.model, "model", "alpha_shape", prior.alpha_shape);

    SemiparDesign design;
    if (const Json* f = find(cfg.data, "file")) {
        const Matrix rows = read_numeric_csv(f->get<std::string>(), 3);
        design.x = rows.column(1);
        design.z = rows.column(2);
        ex.observed = Dataset(rows);
        ex.data_report["file"] = f->get<std::string>();
    } else {
        const std::size_t n = get_count(cfg.model, "model", "n", 50);
        const std::uint64_t dseed = [&] {
            const Json* s = find(cfg.model, "design_seed");
            return s ? s->get<std::uint64_t>() : derive_seed(cfg.seed, data_stream + 1);
        }();
        design = make_semipar_design(n, dseed);
        SemiparTruth truth;
        if (const Json* t = find(cfg.data, "truth")) {
            check_keys(*t, "data.truth", {"beta0", "beta1", "sigma2", "tau2", "alpha"});
            truth.beta0 = get_double(*t, "data.truth", "beta0", truth.beta0);
            truth.beta1 = get_double(*t, "data.truth", "beta1", truth.beta1);
            truth.sigma2 = get_double(*t, "data.truth", "sigma2", truth.sigma2);
            truth.tau2 = get_double(*t, "data.truth", "tau2", truth.tau2);
            truth.alpha = get_double(*t, "data.truth", "alpha", truth.alpha);
        }
        const std::uint64_t seed = data_seed(cfg);
        ex.observed = semipar_generate(design, truth, seed);
        ex.data_report["truth"] = {{"beta0", truth.beta0}, {"beta1", truth.beta1}, {"sigma2", truth.sigma2},
                                   {"tau2", truth.tau2}, {"alpha", truth.alpha}};
        ex.data_report["true_psi"] = truth.beta1;
        ex.data_report["seed"] = seed;
        ex.data_report["design_seed"] = dseed;
    }
    ex.data_report["n"] = ex.observed.n();
    ex.model = std::make_unique<SemiparGpModel>(std::move(design), prior);
    return ex;
}

struct Tolerance
{
    double epsilon = kInf;
    std::optional<CalibrationResult> pilot;
};

Vector summary_scale_for(const RunConfig& cfg, const Experiment& ex)
{
    if (!cfg.summary_scaling)
        return {};
    return mad_summary_scale(*ex.model, ex.observed.n(), std::max<std::size_t>(cfg.pilot_n, 2),
                             derive_seed(cfg.seed, mad_stream));
}

Json pilot_report(const CalibrationResult& pilot)
{
    std::size_t non_finite = 0;
    for (double d : pilot.distances)
        non_finite += std::isfinite(d) ? 0 : 1;
    Json quantiles = Json::object();
    for (double q : {0.01, 0.039, 0.05, 0.1, 0.25, 0.5})
        quantiles[format_double(q)] = num(stats::order_statistic_quantile(pilot.distances, q));
    return {{"n", pilot.pilot_n},
            {"quantile", pilot.quantile},
            {"epsilon", num(pilot.epsilon)},
            {"non_finite", non_finite},
            {"quantiles", quantiles}};
}

std::string with_suffix(const std::string& file, const std::string& suffix)
{
    const fs::path p(file);
    return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

struct CurveJob
{
    std::string label; // "" or "u0.05"
    const GenerativeModel* model;
    Vector posterior;
    std::optional<double> truth;
};

} // namespace

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const BudgetExhaustedError*>(&e))
        return exit_budget;
    if (dynamic_cast<const ConfigError*>(&e))
        return exit_usage;
    if (dynamic_cast<const fs::filesystem_error*>(&e))
        return exit_usage;
    return exit_numerical;
}

std::string error_kind(const std::exception& e)
{
    if (const auto* err = dynamic_cast<const Error*>(&e))
        return err->kind();
    if (dynamic_cast<const fs::filesystem_error*>(&e))
        return "io";
    return "internal";
}

Experiment build_experiment(const RunConfig& cfg)
{
    switch (cfg.example) {
    case Example::poisson_ratio: return build_poisson(cfg);
    case Example::matched_pairs: return build_matched_pairs(cfg);
    case Example::gk: return build_gk(cfg);
    case Example::semipar: return build_semipar(cfg);
    }
    throw ConfigError("unknown example");
}

PipelineResult run_calibration(const RunConfig& cfg, std::optional<double> quantile)
{
    const Experiment ex = build_experiment(cfg);
    const double q = quantile ? *quantile : (cfg.epsilon.automatic ? cfg.epsilon.quantile : 0.05);
    if (!(q > 0.0 && q < 1.0))
        throw ConfigError("calibration quantile must lie in (0, 1)");
    const Vector scale = summary_scale_for(cfg, ex);
    const CalibrationResult pilot = calibrate_tolerance(*ex.model, ex.observed, cfg.pilot_n, q,
                                                        derive_seed(cfg.seed, pilot_stream), scale, cfg.abc.workers);
    const std::string hash = config_hash(cfg.raw);

    PipelineResult out;
    out.report = {{"command", "calibrate"},
                  {"config_hash", hash},
                  {"seed", cfg.seed},
                  {"example", to_string(cfg.example)},
                  {"data", ex.data_report},
                  {"observed_summaries", vec(ex.model->summarize(ex.observed).values())},
                  {"pilot", pilot_report(pilot)}};
    if (!scale.empty())
        out.report["summary_scale"] = vec(scale);
    if (!cfg.histogram_file.empty()) {
        out.files.push_back({cfg.histogram_file,
                             histogram_to_csv(make_histogram(pilot.distances, cfg.histogram_bins), hash, cfg.seed)});
        out.report["files"].push_back(cfg.histogram_file);
    }
    out.report["files"].push_back(cfg.report_file);
    out.files.push_back({cfg.report_file, out.report.dump(2) + "\n"});
    return out;
}

PipelineResult run_experiment(const RunConfig& cfg)
{
    const Experiment ex = build_experiment(cfg);
    const std::string hash = config_hash(cfg.raw);
    const GenerativeModel& model = *ex.model;
    PipelineResult out;
    Json report = {{"command", "run"},
                   {"config_hash", hash},
                   {"seed", cfg.seed},
                   {"example", to_string(cfg.example)},
                   {"sampler", to_string(cfg.sampler)},
                   {"data", ex.data_report},
                   {"observed_summaries", vec(model.summarize(ex.observed).values())}};
    Json files = Json::array();

    // Tolerance.
    AbcConfig abc = cfg.abc;
    abc.seed = cfg.seed;
    abc.summary_scale = summary_scale_for(cfg, ex);
    if (!abc.summary_scale.empty())
        report["summary_scale"] = vec(abc.summary_scale);
    if (cfg.epsilon.automatic) {
        const CalibrationResult pilot =
            calibrate_tolerance(model, ex.observed, cfg.pilot_n, cfg.epsilon.quantile,
                                derive_seed(cfg.seed, pilot_stream), abc.summary_scale, cfg.abc.workers);
        abc.epsilon = pilot.epsilon;
        report["epsilon"] = {{"value", num(abc.epsilon)}, {"source", "auto"}};
        report["pilot"] = pilot_report(pilot);
        if (!cfg.histogram_file.empty()) {
            out.files.push_back({cfg.histogram_file, histogram_to_csv(make_histogram(pilot.distances,
                                                                                     cfg.histogram_bins),
                                                                      hash, cfg.seed)});
            files.push_back(cfg.histogram_file);
        }
    } else {
        abc.epsilon = cfg.epsilon.value;
        report["epsilon"] = {{"value", num(abc.epsilon)}, {"source", "fixed"}};
    }

    // Sampling.
    const AbcDraws draws = run_sampler(cfg.sampler, model, ex.observed, abc);
    double max_dist = 0.0;
    for (double d : draws.distances)
        max_dist = std::max(max_dist, d);
    report["sampler_stats"] = {{"draws", draws.size()},
                               {"acceptance_rate", draws.acceptance_rate},
                               {"n_accepted", draws.n_accepted},
                               {"n_proposals", draws.n_proposals},
                               {"n_simulations", draws.n_simulations},
                               {"init_attempts", draws.init_attempts},
                               {"min_distance", num(draws.min_distance)},
                               {"max_accepted_distance", num(max_dist)},
                               {"budget_exhausted", draws.budget_exhausted}};
    if (draws.size() < 2)
        throw DegenerateSampleError("sampler produced fewer than two draws; cannot estimate a density");

    // One curve per interest parameter (several quantile levels for gk).
    std::vector<std::unique_ptr<GkModel>> level_models;
    std::vector<CurveJob> jobs;
    if (cfg.example == Example::gk) {
        const auto& gk = static_cast<const GkModel&>(model);
        for (double u : ex.levels) {
            level_models.push_back(std::make_unique<GkModel>(u, gk.asymmetry()));
            const AbcDraws t = gk_psi_transform(draws, u, gk.asymmetry());
            std::optional<double> truth;
            if (ex.data_report.contains("true_quantiles"))
                truth = ex.data_report["true_quantiles"][format_double(u)].get<double>();
            jobs.push_back({"u" + format_double(u), level_models.back().get(), t.psi_column(0), truth});
        }
    } else {
        std::optional<double> truth;
        if (ex.data_report.contains("true_psi"))
            truth = ex.data_report["true_psi"].get<double>();
        jobs.push_back({"", &model, draws.psi_column(0), truth});
    }

    IntegLikOptions opts;
    opts.normalization = cfg.normalization;
    opts.bandwidth = cfg.bandwidth;
    if (opts.bandwidth.summary_dim == 0)
        opts.bandwidth.summary_dim = model.summary_dim();
    opts.prior_floor = cfg.prior_floor;

    Json curves = Json::array();
    for (const CurveJob& job : jobs) {
        const GenerativeModel& m = *job.model;
        const DensityScale scale = cfg.density_scale == "log"      ? DensityScale::log
                                   : cfg.density_scale == "linear" ? DensityScale::linear
                                   : m.psi_positive()              ? DensityScale::log
                                                                   : DensityScale::linear;
        opts.scale = scale;

        const bool use_pdf = cfg.prior_source == "pdf" || (cfg.prior_source == "auto" && m.has_prior_psi_pdf());
        if (use_pdf && !m.has_prior_psi_pdf())
            throw ConfigError("prior_psi.source = pdf, but this model has no closed-form prior for psi");
        Vector prior_draws;
        if (!use_pdf)
            prior_draws = sample_prior_psi(m, cfg.prior_draws, derive_seed(cfg.seed, prior_psi_stream));

        const Vector grid =
            make_grid(job.posterior, cfg.grid_span == GridSpan::pooled ? std::span<const double>(prior_draws)
                                                                       : std::span<const double>(),
                      cfg.grid);
        PriorPsi prior = use_pdf ? PriorPsi(PriorPdf{[&m](double x) { return *m.prior_psi_pdf(x); }})
                                 : PriorPsi(PriorSample{prior_draws});
        LikelihoodCurve curve = abc_integrated_likelihood(job.posterior, prior, grid, opts);
        curve.meta.sampler = draws.sampler;
        curve.meta.epsilon = draws.epsilon;
        curve.meta.seed = draws.seed;

        const std::string suffix = job.label.empty() ? "" : "_" + job.label;
        const std::string curve_name = with_suffix(cfg.curve_file, suffix);
        out.files.push_back({curve_name, curve_to_csv(curve, hash, cfg.seed)});
        files.push_back(curve_name);

        Json c = {{"file", curve_name},
                  {"argmax", curve.argmax()},
                  {"posterior_mean", stats::mean(job.posterior)},
                  {"posterior_sd", stats::sample_sd(job.posterior)},
                  {"posterior_bandwidth", curve.meta.posterior_bandwidth},
                  {"prior_bandwidth", curve.meta.prior_bandwidth},
                  {"prior_source", curve.meta.prior_source},
                  {"density_scale", curve.meta.density_scale},
                  {"normalization", to_string(curve.normalization)},
                  {"masked_points", curve.meta.masked_points},
                  {"grid", {{"lo", grid.front()}, {"hi", grid.back()}, {"points", grid.size()}}}};
        if (!job.label.empty())
            c["level"] = std::stod(job.label.substr(1));
        if (job.truth)
            c["truth"] = *job.truth;

        if (cfg.oracles) {
            for (const Oracle& o : ex.oracles) {
                const LikelihoodCurve exact = curve_from_loglik(grid, o.loglik, cfg.normalization);
                const std::string name = with_suffix(cfg.curve_file, suffix + "_oracle_" + o.name);
                out.files.push_back({name, curve_to_csv(exact, hash, cfg.seed)});
                files.push_back(name);
                c["oracles"][o.name] = {{"file", name},
                                        {"argmax", exact.argmax()},
                                        {"sup_norm", sup_norm_distance(curve, exact)}};
            }
        }

        if (cfg.diagnostics) {
            const ScaledKde post(job.posterior, scale, opts.bandwidth);
            BandwidthOptions prior_bw = opts.bandwidth;
            prior_bw.summary_dim = 1;
            const PriorEstimate prior_est = use_pdf ? PriorEstimate(std::get<PriorPdf>(prior))
                                                    : PriorEstimate(ScaledKde(prior_draws, scale, prior_bw));
            DiagnosticsOptions dopts;
            dopts.summary_dim = model.summary_dim();
            const RatioDiagnostics d = ratio_error_diagnostics(post, prior_est, grid, dopts);
            const std::string name = with_suffix(cfg.curve_file, suffix + "_diagnostics");
            out.files.push_back({name, diagnostics_to_csv(d, hash, cfg.seed)});
            files.push_back(name);
            double max_bias = 0.0, max_sd = 0.0;
            for (std::size_t i = 0; i < d.psi.size(); ++i) {
                if (curve.masked[i])
                    continue;
                if (std::isfinite(d.ratio_bias[i]))
                    max_bias = std::max(max_bias, std::abs(d.ratio_bias[i]));
                if (std::isfinite(d.ratio_variance[i]))
                    max_sd = std::max(max_sd, std::sqrt(d.ratio_variance[i]));
            }
            c["diagnostics"] = {{"file", name},
                                {"posterior_bandwidth", d.posterior_bandwidth},
                                {"prior_bandwidth", d.prior_bandwidth},
                                {"minimal_mse_rate", d.minimal_mse_rate},
                                {"mse_rate_bandwidth", mse_rate_bandwidth(job.posterior.size(), model.summary_dim(),
                                                                          cfg.bandwidth.rate_constant)},
                                {"max_abs_ratio_bias", max_bias},
                                {"max_ratio_sd", max_sd}};
        }
        curves.push_back(std::move(c));
    }
    report["curves"] = std::move(curves);
    files.push_back(cfg.report_file);
    report["files"] = std::move(files);
    out.report = std::move(report);
    out.files.push_back({cfg.report_file, out.report.dump(2) + "\n"});
    return out;
}

Json compare_curves(const std::vector<std::string>& paths, const CompareOptions& opts)
{
    if (paths.size() < 2)
        throw ConfigError("compare needs at least two curve files");
    std::vector<LikelihoodCurve> curves;
    for (const auto& p : paths)
        curves.push_back(read_curve_csv(p));
    const double lo = opts.lo.value_or(-kInf);
    const double hi = opts.hi.value_or(kInf);

    Json pairs = Json::array();
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (std::size_t j = i + 1; j < curves.size(); ++j) {
            const LikelihoodCurve& a = curves[i];
            LikelihoodCurve b = curves[j];
            bool interpolated = false;
            bool same = a.psi.size() == b.psi.size();
            for (std::size_t k = 0; same && k < a.psi.size(); ++k)
                same = a.psi[k] == b.psi[k];
            if (!same) {
                if (!opts.interpolate)
                    throw DimensionError("curves '" + paths[i] + "' and '" + paths[j] +
                                         "' use different grids and interpolation is disabled");
                b = resample_curve(b, a.psi);
                interpolated = true;
            }
            const double argmax_a = a.argmax();
            const double argmax_b = curves[j].argmax();
            pairs.push_back({{"a", paths[i]},
                             {"b", paths[j]},
                             {"sup_norm", sup_norm_distance(a, b, lo, hi)},
                             {"argmax_a", argmax_a},
                             {"argmax_b", argmax_b},
                             {"argmax_difference", argmax_b - argmax_a},
                             {"interpolated", interpolated}});
        }
    }
    Json out = {{"command", "compare"}, {"files", paths}, {"pairs", pairs}};
    if (opts.lo)
        out["lo"] = *opts.lo;
    if (opts.hi)
        out["hi"] = *opts.hi;
    return out;
}

std::string resolve_output_dir(const RunConfig& cfg)
{
    if (!cfg.output_dir.empty())
        return cfg.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env)
        return env;
    return ".";
}

void commit_files(const std::string& dir, const std::vector<OutputFile>& files)
{
    std::vector<std::pair<fs::path, fs::path>> staged;
    auto discard = [&] {
        std::error_code ec;
        for (const auto& [tmp, _] : staged)
            fs::remove(tmp, ec);
    };
    try {
        for (const OutputFile& f : files) {
            const fs::path target = fs::path(dir) / f.name;
            fs::create_directories(target.parent_path());
            const fs::path tmp = target.parent_path() /
                                 ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            staged.emplace_back(tmp, target);
            if (!out)
                throw ConfigError("cannot write '" + tmp.string() + "'");
            out << f.content;
            out.close();
            if (!out)
                throw ConfigError("failed writing '" + tmp.string() + "'");
        }
        for (const auto& [tmp, target] : staged)
            fs::rename(tmp, target);
    } catch (...) {
        discard();
        throw;
    }
}

} // namespace abcil::cli

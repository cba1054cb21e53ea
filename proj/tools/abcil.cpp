// abcil: run, calibrate and compare ABC integrated-likelihood experiments.

#include "cli/config.hpp"
#include "cli/pipeline.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

using namespace abcil::cli;

namespace {

struct CommonArgs
{
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> epsilon;
    std::optional<std::string> sampler;
    std::optional<std::string> output_dir;
    std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("config", args.config, "JSON run configuration")->required();
    cmd->add_option("--set", args.sets, "Override a config key, e.g. --set abc.target_accepts=500");
    cmd->add_option("--seed", args.seed, "Override the run seed");
    cmd->add_option("--epsilon", args.epsilon, "Override the tolerance: number, inf or auto(q)");
    cmd->add_option("--sampler", args.sampler, "rejection, mcmc_movestay or mcmc_retry");
    cmd->add_option("--output-dir", args.output_dir, "Directory for output files");
    cmd->add_option("--workers", args.workers, "Worker threads for simulation");
}

RunConfig load_config(const CommonArgs& args)
{
    Json j = load_json_file(args.config);
    for (const auto& s : args.sets)
        apply_override(j, s);
    if (args.seed)
        j["seed"] = *args.seed;
    if (args.epsilon) {
        try {
            j["epsilon"] = std::stod(*args.epsilon);
        } catch (const std::exception&) {
            j["epsilon"] = *args.epsilon;
        }
    }
    if (args.sampler)
        j["sampler"] = *args.sampler;
    if (args.workers)
        j["abc"]["workers"] = *args.workers;
    RunConfig cfg = parse_run_config(j);
    // The output directory does not change results, so it stays out of the hash.
    if (args.output_dir)
        cfg.output_dir = *args.output_dir;
    return cfg;
}

void print_summary(const std::string& dir, const PipelineResult& r, double seconds)
{
    for (const auto& f : r.files)
        std::cerr << "wrote " << (std::filesystem::path(dir) / f.name).string() << "\n";
    std::cerr << "runtime_seconds " << seconds << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ABC approximation of integrated likelihoods"};
    app.require_subcommand(1);

    CommonArgs run_args;
    auto* run = app.add_subcommand("run", "Calibrate (if requested), sample, and write curves and a report");
    add_common(run, run_args);

    CommonArgs cal_args;
    std::optional<double> quantile;
    auto* cal = app.add_subcommand("calibrate", "Pilot simulations: tolerance quantile and distance histogram");
    add_common(cal, cal_args);
    cal->add_option("--quantile", quantile, "Pilot quantile (default: the config's auto(q), else 0.05)");

    std::vector<std::string> curve_paths;
    bool no_interpolate = false;
    std::optional<double> lo, hi;
    std::string compare_out;
    auto* cmp = app.add_subcommand("compare", "Sup-norm distances and argmax differences between curve CSVs");
    cmp->add_option("curves", curve_paths, "Curve CSV files")->required()->expected(2, -1);
    cmp->add_flag("--no-interpolate", no_interpolate, "Fail instead of re-interpolating differing grids");
    cmp->add_option("--lo", lo, "Restrict the comparison to psi >= lo");
    cmp->add_option("--hi", hi, "Restrict the comparison to psi <= hi");
    cmp->add_option("-o,--output", compare_out, "Write the JSON report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        };
        if (*run || *cal) {
            const RunConfig cfg = load_config(*run ? run_args : cal_args);
            PipelineResult result = *run ? run_experiment(cfg) : run_calibration(cfg, quantile);
            const double seconds = elapsed();
            if (cfg.include_runtime) {
                result.report["runtime_seconds"] = seconds;
                result.files.back().content = result.report.dump(2) + "\n";
            }
            const std::string dir = resolve_output_dir(cfg);
            commit_files(dir, result.files);
            print_summary(dir, result, seconds);
            if (result.report.contains("sampler_stats") && result.report["sampler_stats"]["budget_exhausted"])
                std::cerr << "warning: proposal budget ran out before the target number of accepts\n";
        } else if (*cmp) {
            CompareOptions opts;
            opts.interpolate = !no_interpolate;
            opts.lo = lo;
            opts.hi = hi;
            const std::string text = compare_curves(curve_paths, opts).dump(2) + "\n";
            if (compare_out.empty()) {
                std::cout << text;
            } else {
                const auto p = std::filesystem::path(compare_out);
                commit_files(p.parent_path().empty() ? "." : p.parent_path().string(),
                             {{p.filename().string(), text}});
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error[" << error_kind(e) << "]: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return exit_ok;
}

#pragma once

#include "cli/config.hpp"

#include <abcil/core.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace abcil::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_numerical = 2, exit_budget = 3 };

/// Maps an exception to the exit status it should produce.
int exit_code_for(const std::exception& e);

/// Error class name printed on the diagnostic stream.
std::string error_kind(const std::exception& e);

struct Oracle
{
    std::string name;
    std::function<double(double)> loglik; // -inf where undefined
};

/// The model, observed data and reference curves of one configured example.
struct Experiment
{
    std::unique_ptr<GenerativeModel> model;
    Dataset observed{Matrix(1, 1)}; // replaced by the builder
    Vector levels;                  // gk: quantile orders of interest
    std::vector<Oracle> oracles;    // closed-form likelihoods, when known
    Json data_report = Json::object();
};

Experiment build_experiment(const RunConfig& cfg);

struct OutputFile
{
    std::string name;
    std::string content;
};

struct PipelineResult
{
    std::vector<OutputFile> files;
    Json report;
};

/// Calibration, sampling, curve estimation, oracles and diagnostics. Pure:
/// nothing touches the file system.
PipelineResult run_experiment(const RunConfig& cfg);

/// Pilot-only run: tolerance at quantile q plus a distance histogram.
PipelineResult run_calibration(const RunConfig& cfg, std::optional<double> quantile = std::nullopt);

struct CompareOptions
{
    bool interpolate = true;
    std::optional<double> lo;
    std::optional<double> hi;
};

/// Pairwise sup-norm distances and argmax differences between curves. When
/// grids differ the second curve of a pair is linearly re-interpolated onto
/// the first curve's grid, unless interpolation is disabled (DimensionError).
Json compare_curves(const std::vector<std::string>& paths, const CompareOptions& opts = {});

/// Resolves the output directory: config value, else $ABCIL_OUTPUT_DIR, else ".".
std::string resolve_output_dir(const RunConfig& cfg);

/// Writes every file to a temporary name first and renames them only once all
/// writes succeeded, so a failure leaves no partial outputs behind.
void commit_files(const std::string& dir, const std::vector<OutputFile>& files);

} // namespace abcil::cli

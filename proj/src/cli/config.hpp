#pragma once

#include <abcil/abc.hpp>
#include <abcil/integlik.hpp>
#include <abcil/kde.hpp>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace abcil::cli {

using Json = nlohmann::json;

enum class Example { poisson_ratio, matched_pairs, gk, semipar };

std::string to_string(Example e);
Example parse_example(const std::string& name);

/// "0.5", "inf" or "auto(q)".
struct EpsilonSpec
{
    bool automatic = false;
    double value = 0.0;    // fixed tolerance
    double quantile = 0.0; // pilot quantile when automatic
};

EpsilonSpec parse_epsilon(const Json& value);

enum class GridSpan { pooled, posterior };

/// A validated run configuration. Example-specific `model` and `data`
/// sections are kept as JSON and interpreted by the pipeline.
struct RunConfig
{
    Json raw; // the effective configuration, overrides applied

    Example example = Example::poisson_ratio;
    SamplerKind sampler = SamplerKind::rejection;
    EpsilonSpec epsilon;
    std::uint64_t seed = 1;

    std::size_t pilot_n = 10'000;
    bool summary_scaling = false;
    AbcConfig abc; // epsilon and seed are filled in at run time

    GridSpec grid;
    GridSpan grid_span = GridSpan::pooled;
    BandwidthOptions bandwidth;
    std::string density_scale = "auto"; // auto, linear, log
    std::string prior_source = "auto";  // auto, pdf, sample
    std::size_t prior_draws = 10'000;
    Normalization normalization = Normalization::max_one;
    double prior_floor = 1e-8;

    std::string output_dir;
    std::string curve_file = "curve.csv";
    std::string report_file = "report.json";
    std::string histogram_file = "pilot_histogram.csv";
    std::size_t histogram_bins = 50;
    bool diagnostics = true;
    bool oracles = true;
    bool include_runtime = false;

    Json model = Json::object();
    Json data = Json::object();
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig parse_run_config(const Json& j);

/// Reads and parses a JSON file; ConfigError on I/O or syntax errors.
Json load_json_file(const std::string& path);

/// Applies "a.b.c=value". The value is parsed as JSON when possible and
/// taken as a string otherwise; intermediate objects are created.
void apply_override(Json& j, const std::string& assignment);

/// FNV-1a 64-bit hash of the canonical (sorted-key, compact) dump, as 16
/// lowercase hex digits.
std::string config_hash(const Json& j);

/// Environment variable consulted for the output directory when the
/// configuration does not set one.
inline constexpr const char* kOutputDirEnv = "ABCIL_OUTPUT_DIR";

} // namespace abcil::cli

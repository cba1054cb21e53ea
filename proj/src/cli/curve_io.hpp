#pragma once

#include <abcil/abc.hpp>
#include <abcil/integlik.hpp>

#include <cstdint>
#include <string>

namespace abcil::cli {

/// Shortest round-trip decimal form of x ("inf", "-inf", "nan" for the
/// special values).
std::string format_double(double x);

/// "# config_hash=<hash> seed=<seed>\n": header line shared by every CSV.
std::string provenance_line(const std::string& hash, std::uint64_t seed);

/// Curve CSV: provenance comment, then `psi,value,masked` rows.
std::string curve_to_csv(const LikelihoodCurve& curve, const std::string& hash, std::uint64_t seed);

/// Parses a curve CSV; comment lines start with '#'. Throws ConfigError on
/// I/O problems and DomainError on malformed content.
LikelihoodCurve read_curve_csv(const std::string& path);
LikelihoodCurve parse_curve_csv(const std::string& text, const std::string& origin = "<string>");

/// Histogram CSV: `lower,upper,count`.
std::string histogram_to_csv(const Histogram& h, const std::string& hash, std::uint64_t seed);

/// Per-grid ratio diagnostics as CSV.
std::string diagnostics_to_csv(const RatioDiagnostics& d, const std::string& hash, std::uint64_t seed);

} // namespace abcil::cli

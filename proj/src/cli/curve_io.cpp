#include "cli/curve_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace abcil::cli {

namespace {

double parse_number(const std::string& field, const std::string& origin, std::size_t line)
{
    if (field == "inf")
        return std::numeric_limits<double>::infinity();
    if (field == "-inf")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw DomainError(origin + ":" + std::to_string(line) + ": cannot parse number '" + field + "'");
    return v;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string provenance_line(const std::string& hash, std::uint64_t seed)
{
    return "# config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
}

std::string curve_to_csv(const LikelihoodCurve& curve, const std::string& hash, std::uint64_t seed)
{
    std::string out = provenance_line(hash, seed);
    out += "psi,value,masked\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out += format_double(curve.psi[i]);
        out += ',';
        out += format_double(curve.values[i]);
        out += ',';
        out += (!curve.masked.empty() && curve.masked[i]) ? '1' : '0';
        out += '\n';
    }
    return out;
}

LikelihoodCurve parse_curve_csv(const std::string& text, const std::string& origin)
{
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    LikelihoodCurve curve;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            if (line != "psi,value,masked")
                throw DomainError(origin + ": expected header 'psi,value,masked', got '" + line + "'");
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ','))
            fields.push_back(trim(f));
        if (fields.size() != 3)
            throw DomainError(origin + ":" + std::to_string(lineno) + ": expected 3 fields");
        curve.psi.push_back(parse_number(fields[0], origin, lineno));
        curve.values.push_back(parse_number(fields[1], origin, lineno));
        if (fields[2] != "0" && fields[2] != "1")
            throw DomainError(origin + ":" + std::to_string(lineno) + ": masked flag must be 0 or 1");
        curve.masked.push_back(fields[2] == "1");
    }
    if (!header_seen)
        throw DomainError(origin + ": missing header");
    if (curve.psi.empty())
        throw DomainError(origin + ": no rows");
    for (std::size_t i = 1; i < curve.psi.size(); ++i)
        if (!(curve.psi[i] > curve.psi[i - 1]))
            throw DomainError(origin + ": psi grid must be strictly increasing");
    return curve;
}

LikelihoodCurve read_curve_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open curve file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_curve_csv(ss.str(), path);
}

std::string histogram_to_csv(const Histogram& h, const std::string& hash, std::uint64_t seed)
{
    std::string out = provenance_line(hash, seed);
    out += "lower,upper,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out += format_double(h.edges[i]) + "," + format_double(h.edges[i + 1]) + "," + std::to_string(h.counts[i]) +
               "\n";
    return out;
}

std::string diagnostics_to_csv(const RatioDiagnostics& d, const std::string& hash, std::uint64_t seed)
{
    std::string out = provenance_line(hash, seed);
    out += "psi,posterior_density,prior_density,posterior_bias,prior_bias,ratio_bias,ratio_variance\n";
    for (std::size_t i = 0; i < d.psi.size(); ++i) {
        out += format_double(d.psi[i]) + "," + format_double(d.posterior_density[i]) + "," +
               format_double(d.prior_density[i]) + "," + format_double(d.posterior_bias[i]) + "," +
               format_double(d.prior_bias[i]) + "," + format_double(d.ratio_bias[i]) + "," +
               format_double(d.ratio_variance[i]) + "\n";
    }
    return out;
}

} // namespace abcil::cli

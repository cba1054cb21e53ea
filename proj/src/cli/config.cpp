#include "cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

namespace abcil::cli {

namespace {

void check_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed)
{
    if (!obj.is_object())
        throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

const Json* find(const Json& obj, const std::string& key)
{
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_double(const Json& v, const std::string& name)
{
    if (!v.is_number())
        throw ConfigError(name + " must be a number");
    return v.get<double>();
}

std::size_t get_count(const Json& v, const std::string& name)
{
    if (v.is_number_unsigned())
        return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0)
        return static_cast<std::size_t>(v.get<long long>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19)
            return static_cast<std::size_t>(d);
    }
    throw ConfigError(name + " must be a nonnegative integer");
}

bool get_bool(const Json& v, const std::string& name)
{
    if (!v.is_boolean())
        throw ConfigError(name + " must be true or false");
    return v.get<bool>();
}

std::string get_string(const Json& v, const std::string& name)
{
    if (!v.is_string())
        throw ConfigError(name + " must be a string");
    return v.get<std::string>();
}

template <class T, class F>
void read(const Json& obj, const std::string& section, const std::string& key, T& out, F&& getter)
{
    if (const Json* v = find(obj, key))
        out = getter(*v, section.empty() ? key : section + "." + key);
}

} // namespace

std::string to_string(Example e)
{
    switch (e) {
    case Example::poisson_ratio: return "poisson_ratio";
    case Example::matched_pairs: return "matched_pairs";
    case Example::gk: return "gk";
    case Example::semipar: return "semipar";
    }
    return "unknown";
}

Example parse_example(const std::string& name)
{
    if (name == "poisson_ratio")
        return Example::poisson_ratio;
    if (name == "matched_pairs")
        return Example::matched_pairs;
    if (name == "gk")
        return Example::gk;
    if (name == "semipar")
        return Example::semipar;
    throw ConfigError("unknown example '" + name + "' (expected poisson_ratio, matched_pairs, gk or semipar)");
}

EpsilonSpec parse_epsilon(const Json& value)
{
    EpsilonSpec spec;
    if (value.is_number()) {
        spec.value = value.get<double>();
    } else if (value.is_string()) {
        const std::string s = value.get<std::string>();
        static const std::regex auto_re(R"(\s*auto\s*\(\s*([0-9eE.+-]+)\s*\)\s*)");
        std::smatch m;
        if (s == "inf" || s == "infinity") {
            spec.value = std::numeric_limits<double>::infinity();
        } else if (std::regex_match(s, m, auto_re)) {
            spec.automatic = true;
            try {
                std::size_t used = 0;
                spec.quantile = std::stod(m[1].str(), &used);
                if (used != m[1].str().size())
                    throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ConfigError("epsilon: cannot parse quantile in '" + s + "'");
            }
            if (!(spec.quantile > 0.0 && spec.quantile < 1.0))
                throw ConfigError("epsilon: auto quantile must lie in (0, 1)");
            return spec;
        } else {
            try {
                std::size_t used = 0;
                spec.value = std::stod(s, &used);
                if (used != s.size())
                    throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ConfigError("epsilon must be a number, \"inf\" or \"auto(q)\", got '" + s + "'");
            }
        }
    } else {
        throw ConfigError("epsilon must be a number, \"inf\" or \"auto(q)\"");
    }
    if (!(spec.value >= 0.0))
        throw ConfigError("epsilon must be nonnegative");
    return spec;
}

RunConfig parse_run_config(const Json& j)
{
    check_keys(j, "config",
               {"description", "example", "sampler", "epsilon", "seed", "pilot", "abc", "kde", "prior_psi", "grid",
                "normalization", "output", "model", "data"});
    RunConfig cfg;
    cfg.raw = j;

    const Json* ex = find(j, "example");
    if (!ex)
        throw ConfigError("config must name an example");
    cfg.example = parse_example(get_string(*ex, "example"));
    if (const Json* s = find(j, "sampler"))
        cfg.sampler = parse_sampler(get_string(*s, "sampler"));
    if (const Json* e = find(j, "epsilon"))
        cfg.epsilon = parse_epsilon(*e);
    else
        cfg.epsilon.value = std::numeric_limits<double>::infinity();
    if (const Json* s = find(j, "seed")) {
        if (!s->is_number_integer() || (s->is_number_integer() && !s->is_number_unsigned() && s->get<long long>() < 0))
            throw ConfigError("seed must be a nonnegative integer");
        cfg.seed = s->get<std::uint64_t>();
    }

    if (const Json* p = find(j, "pilot")) {
        check_keys(*p, "pilot", {"n", "summary_scaling"});
        read(*p, "pilot", "n", cfg.pilot_n, get_count);
        read(*p, "pilot", "summary_scaling", cfg.summary_scaling, get_bool);
    }
    if (cfg.epsilon.automatic && cfg.pilot_n < 100)
        throw ConfigError("pilot.n must be at least 100");

    if (const Json* a = find(j, "abc")) {
        check_keys(*a, "abc",
                   {"target_accepts", "max_proposals", "chunk_size", "workers", "chain_length", "burn_in", "chains",
                    "kernel_scale", "init_budget", "retry_budget"});
        read(*a, "abc", "target_accepts", cfg.abc.target_accepts, get_count);
        read(*a, "abc", "max_proposals", cfg.abc.max_proposals, get_count);
        read(*a, "abc", "chunk_size", cfg.abc.chunk_size, get_count);
        read(*a, "abc", "workers", cfg.abc.workers, get_count);
        read(*a, "abc", "chain_length", cfg.abc.chain_length, get_count);
        read(*a, "abc", "chains", cfg.abc.chains, get_count);
        read(*a, "abc", "init_budget", cfg.abc.init_budget, get_count);
        read(*a, "abc", "retry_budget", cfg.abc.retry_budget, get_count);
        if (const Json* b = find(*a, "burn_in"))
            cfg.abc.burn_in = get_count(*b, "abc.burn_in");
        if (const Json* k = find(*a, "kernel_scale")) {
            if (!k->is_array())
                throw ConfigError("abc.kernel_scale must be an array of numbers");
            for (const auto& v : *k)
                cfg.abc.kernel_scale.push_back(get_double(v, "abc.kernel_scale"));
        }
    }
    cfg.abc.validate();

    if (const Json* k = find(j, "kde")) {
        check_keys(*k, "kde", {"bandwidth", "rate_constant", "summary_dim", "scale"});
        if (const Json* b = find(*k, "bandwidth")) {
            const std::string rule = get_string(*b, "kde.bandwidth");
            if (rule == "silverman")
                cfg.bandwidth.rule = BandwidthRule::silverman;
            else if (rule == "mse_rate")
                cfg.bandwidth.rule = BandwidthRule::mse_rate;
            else
                throw ConfigError("kde.bandwidth must be \"silverman\" or \"mse_rate\"");
        }
        read(*k, "kde", "rate_constant", cfg.bandwidth.rate_constant, get_double);
        cfg.bandwidth.summary_dim = 0; // 0: the model's summary dimension
        read(*k, "kde", "summary_dim", cfg.bandwidth.summary_dim, get_count);
        read(*k, "kde", "scale", cfg.density_scale, get_string);
    } else {
        cfg.bandwidth.summary_dim = 0;
    }
    if (!(cfg.bandwidth.rate_constant > 0.0))
        throw ConfigError("kde.rate_constant must be positive");
    if (cfg.density_scale != "auto" && cfg.density_scale != "linear" && cfg.density_scale != "log")
        throw ConfigError("kde.scale must be \"auto\", \"linear\" or \"log\"");

    if (const Json* p = find(j, "prior_psi")) {
        check_keys(*p, "prior_psi", {"source", "draws", "floor"});
        read(*p, "prior_psi", "source", cfg.prior_source, get_string);
        read(*p, "prior_psi", "draws", cfg.prior_draws, get_count);
        read(*p, "prior_psi", "floor", cfg.prior_floor, get_double);
    }
    if (cfg.prior_source != "auto" && cfg.prior_source != "pdf" && cfg.prior_source != "sample")
        throw ConfigError("prior_psi.source must be \"auto\", \"pdf\" or \"sample\"");
    if (cfg.prior_draws < 2)
        throw ConfigError("prior_psi.draws must be at least 2");
    if (!(cfg.prior_floor >= 0.0))
        throw ConfigError("prior_psi.floor must be nonnegative");

    if (const Json* g = find(j, "grid")) {
        check_keys(*g, "grid", {"points", "coverage", "lo", "hi", "span"});
        read(*g, "grid", "points", cfg.grid.points, get_count);
        read(*g, "grid", "coverage", cfg.grid.coverage, get_double);
        if (const Json* lo = find(*g, "lo"))
            cfg.grid.lo = get_double(*lo, "grid.lo");
        if (const Json* hi = find(*g, "hi"))
            cfg.grid.hi = get_double(*hi, "grid.hi");
        if (const Json* s = find(*g, "span")) {
            const std::string span = get_string(*s, "grid.span");
            if (span == "pooled")
                cfg.grid_span = GridSpan::pooled;
            else if (span == "posterior")
                cfg.grid_span = GridSpan::posterior;
            else
                throw ConfigError("grid.span must be \"pooled\" or \"posterior\"");
        }
    }
    if (cfg.grid.points < 2)
        throw ConfigError("grid.points must be at least 2");
    if (!(cfg.grid.coverage > 0.0 && cfg.grid.coverage <= 1.0))
        throw ConfigError("grid.coverage must lie in (0, 1]");
    if (cfg.grid.lo && cfg.grid.hi && !(*cfg.grid.lo < *cfg.grid.hi))
        throw ConfigError("grid.lo must be below grid.hi");

    if (const Json* n = find(j, "normalization"))
        cfg.normalization = parse_normalization(get_string(*n, "normalization"));

    if (const Json* o = find(j, "output")) {
        check_keys(*o, "output",
                   {"dir", "curve", "report", "histogram", "histogram_bins", "diagnostics", "oracles",
                    "include_runtime"});
        read(*o, "output", "dir", cfg.output_dir, get_string);
        read(*o, "output", "curve", cfg.curve_file, get_string);
        read(*o, "output", "report", cfg.report_file, get_string);
        read(*o, "output", "histogram", cfg.histogram_file, get_string);
        read(*o, "output", "histogram_bins", cfg.histogram_bins, get_count);
        read(*o, "output", "diagnostics", cfg.diagnostics, get_bool);
        read(*o, "output", "oracles", cfg.oracles, get_bool);
        read(*o, "output", "include_runtime", cfg.include_runtime, get_bool);
    }
    if (cfg.histogram_bins == 0)
        throw ConfigError("output.histogram_bins must be positive");
    if (cfg.curve_file.empty() || cfg.report_file.empty())
        throw ConfigError("output file names must not be empty");

    if (const Json* m = find(j, "model")) {
        if (!m->is_object())
            throw ConfigError("model must be an object");
        cfg.model = *m;
    }
    if (const Json* d = find(j, "data")) {
        if (!d->is_object())
            throw ConfigError("data must be an object");
        cfg.data = *d;
    }
    return cfg;
}

Json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
}

void apply_override(Json& j, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key.path=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }

    Json* node = &j;
    std::stringstream ss(path);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(ss, key, '.')) {
        if (key.empty())
            throw ConfigError("override key '" + path + "' has an empty component");
        keys.push_back(key);
    }
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
        if (!node->is_object())
            throw ConfigError("override '" + path + "' descends into a non-object");
        node = &(*node)[keys[i]];
        if (node->is_null())
            *node = Json::object();
    }
    if (!node->is_object())
        throw ConfigError("override '" + path + "' descends into a non-object");
    (*node)[keys.back()] = std::move(value);
}

std::string config_hash(const Json& j)
{
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace abcil::cli

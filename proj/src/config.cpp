#include "lgt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace lgt {

std::string ObservableSpec::param_string() const
{
    std::string s;
    for (const auto& [k, v] : params) {
        if (!s.empty())
            s += ';';
        s += k + "=" + v;
    }
    return s;
}

namespace {

std::string trim(const std::string& s)
{
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg)
{
    throw ConfigError(fmt::format("line {}: {}", line, msg));
}

double to_double(const std::string& v, int line, const std::string& key)
{
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos == v.size() && std::isfinite(d))
            return d;
    } catch (const std::exception&) {
    }
    fail(line, fmt::format("'{}' expects a number, got '{}'", key, v));
}

long to_long(const std::string& v, int line, const std::string& key)
{
    try {
        std::size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos == v.size())
            return d;
    } catch (const std::exception&) {
    }
    fail(line, fmt::format("'{}' expects an integer, got '{}'", key, v));
}

bool to_bool(const std::string& v, int line, const std::string& key)
{
    if (v == "true" || v == "yes" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "0")
        return false;
    fail(line, fmt::format("'{}' expects true/false, got '{}'", key, v));
}

const std::set<std::string> observable_names = {"hamiltonian", "phi2", "wick", "curvature2", "loop",
                                                "holder"};

} // namespace

ExperimentSpec parse_config(const std::string& text)
{
    ExperimentSpec spec;
    std::set<std::string> seen;
    std::string section;
    int obs_line = 0;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty())
            continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section == "observable") {
                spec.observables.push_back({});
                obs_line = line;
            } else if (section == "refinement") {
                if (!spec.refinement)
                    spec.refinement = RefinementSpec{};
            } else if (section != "sim" && section != "initial" && section != "output") {
                fail(line, fmt::format("unknown section [{}]", section));
            }
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos)
            fail(line, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
        if (key.empty() || val.empty())
            fail(line, "empty key or value");
        if (section.empty())
            fail(line, fmt::format("key '{}' outside of any section", key));
        std::string full = section + "." + key;
        if (section != "observable" && !seen.insert(full).second)
            fail(line, fmt::format("duplicate key '{}'", full));

        if (section == "sim") {
            auto& c = spec.sim;
            if (key == "n")
                c.n = int(to_long(val, line, key));
            else if (key == "lambda")
                c.lambda = to_double(val, line, key);
            else if (key == "dt") {
                spec.dt_auto = val == "auto";
                if (!spec.dt_auto)
                    c.dt = to_double(val, line, key);
            } else if (key == "t_final")
                c.t_final = to_double(val, line, key);
            else if (key == "c_eps_mode") {
                if (val == "zero")
                    c.c_eps_mode = CEpsMode::zero;
                else if (val == "computed")
                    c.c_eps_mode = CEpsMode::computed;
                else if (val == "explicit")
                    c.c_eps_mode = CEpsMode::explicit_value;
                else
                    fail(line, fmt::format("c_eps_mode must be zero, computed or explicit, got '{}'", val));
            } else if (key == "c_eps")
                c.c_eps = to_double(val, line, key);
            else if (key == "seed")
                c.seed = std::uint64_t(to_long(val, line, key));
            else if (key == "system") {
                if (val == "original")
                    c.system = System::original;
                else if (val == "gauge_fixed")
                    c.system = System::gauge_fixed;
                else if (val == "polynomial")
                    c.system = System::polynomial;
                else
                    fail(line, fmt::format("system must be original, gauge_fixed or polynomial, got '{}'", val));
            } else if (key == "ensemble")
                spec.ensemble = int(to_long(val, line, key));
            else
                fail(line, fmt::format("unknown key '{}' in [sim]", key));
        } else if (section == "initial") {
            if (key == "kind") {
                if (val == "zero")
                    spec.initial = InitialKind::zero;
                else if (val == "smooth")
                    spec.initial = InitialKind::smooth;
                else if (val == "gff")
                    spec.initial = InitialKind::gff;
                else
                    fail(line, fmt::format("initial kind must be zero, smooth or gff, got '{}'", val));
            } else if (key == "eta")
                spec.initial_eta = to_double(val, line, key);
            else if (key == "a")
                spec.initial_a = to_double(val, line, key);
            else if (key == "b")
                spec.initial_b = to_double(val, line, key);
            else if (key == "m1")
                spec.initial_m1 = int(to_long(val, line, key));
            else if (key == "m2")
                spec.initial_m2 = int(to_long(val, line, key));
            else
                fail(line, fmt::format("unknown key '{}' in [initial]", key));
        } else if (section == "observable") {
            auto& o = spec.observables.back();
            if (key == "name") {
                if (!observable_names.count(val))
                    fail(line, fmt::format("unknown observable '{}'", val));
                o.name = val;
            } else if (key == "stride")
                o.stride = to_long(val, line, key);
            else if (o.params.count(key))
                fail(line, fmt::format("duplicate observable parameter '{}'", key));
            else
                o.params[key] = val;
        } else if (section == "refinement") {
            auto& r = *spec.refinement;
            if (key == "n_min")
                r.n_min = int(to_long(val, line, key));
            else if (key == "n_max")
                r.n_max = int(to_long(val, line, key));
            else if (key == "coupled")
                r.coupled = to_bool(val, line, key);
            else if (key == "snapshots")
                r.snapshots = int(to_long(val, line, key));
            else if (key == "alpha")
                r.alpha = to_double(val, line, key);
            else if (key == "delta")
                r.delta = to_double(val, line, key);
            else if (key == "eta")
                r.eta = to_double(val, line, key);
            else if (key == "smoothness")
                r.smoothness = int(to_long(val, line, key));
            else
                fail(line, fmt::format("unknown key '{}' in [refinement]", key));
        } else if (section == "output") {
            if (key == "dir")
                spec.output = val;
            else if (key == "format") {
                if (val == "csv")
                    spec.format = Format::csv;
                else if (val == "binary")
                    spec.format = Format::binary;
                else
                    fail(line, fmt::format("format must be csv or binary, got '{}'", val));
            } else if (key == "snapshot_stride")
                spec.snapshot_stride = to_long(val, line, key);
            else
                fail(line, fmt::format("unknown key '{}' in [output]", key));
        }
    }

    // validation
    std::vector<std::string> missing;
    for (const char* k : {"sim.n", "sim.lambda"})
        if (!seen.count(k))
            missing.push_back(k);
    if (!missing.empty()) {
        std::string list;
        for (auto& m : missing)
            list += (list.empty() ? "" : ", ") + m;
        throw ConfigError("missing required keys: " + list + " (required: sim.n, sim.lambda)");
    }
    auto& c = spec.sim;
    if (c.n < 1 || c.n > 14)
        throw ConfigError(fmt::format("sim.n = {} outside [1, 14]", c.n));
    const double eps = std::ldexp(1.0, -c.n);
    const double bound = stability_factor * eps * eps;
    if (spec.dt_auto)
        c.dt = bound;
    else if (!(c.dt > 0))
        throw ConfigError("sim.dt must be positive or 'auto'");
    else if (c.dt > bound)
        throw ConfigError(fmt::format("sim.dt = {} exceeds the stability bound eps^2/8 = {} at n = {}", c.dt,
                                      bound, c.n));
    if (!seen.count("sim.t_final"))
        c.t_final = 100 * c.dt;
    if (!(c.t_final >= 0))
        throw ConfigError("sim.t_final must be >= 0");
    if (c.c_eps_mode == CEpsMode::explicit_value && !seen.count("sim.c_eps"))
        throw ConfigError("c_eps_mode = explicit requires sim.c_eps");
    if (spec.ensemble < 1)
        throw ConfigError("sim.ensemble must be >= 1");
    for (auto& o : spec.observables) {
        if (o.name.empty())
            throw ConfigError(fmt::format("line {}: [observable] without name", obs_line));
        if (o.stride < 1)
            throw ConfigError(fmt::format("observable '{}': stride must be >= 1", o.name));
    }
    if (spec.snapshot_stride < 0)
        throw ConfigError("output.snapshot_stride must be >= 0");
    if (spec.refinement) {
        auto& r = *spec.refinement;
        if (!(r.n_min >= 1 && r.n_min < r.n_max && r.n_max <= 14))
            throw ConfigError(fmt::format("refinement needs 1 <= n_min < n_max <= 14, got {}..{}", r.n_min,
                                          r.n_max));
        if (!spec.dt_auto)
            throw ConfigError("refinement uses dt = eps^2/8 per level; set sim.dt = auto");
        if (r.snapshots < 1)
            throw ConfigError("refinement.snapshots must be >= 1");
        if (!(r.delta > 0) || r.eta > 0)
            throw ConfigError("refinement needs delta > 0 and eta <= 0");
    }
    return spec;
}

ExperimentSpec load_config(const std::string& path, std::string* text_out)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    if (text_out)
        *text_out = ss.str();
    return parse_config(ss.str());
}

} // namespace lgt

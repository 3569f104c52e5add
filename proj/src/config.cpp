#include "mbpcn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mbpcn/csv.hpp"
#include "mbpcn/experiments.hpp"

namespace mbpcn {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double require_double(const std::string& key, const std::string& value) {
    try {
        return parse_double_token(value);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

long require_long(const std::string& key, const std::string& value) {
    long v = 0;
    const char* first = value.data();
    const char* last = first + value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    return v;
}

std::uint64_t require_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const char* first = value.data();
    const char* last = first + value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + value + "'");
    return v;
}

bool require_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + value + "'");
}

} // namespace

void apply_override(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "side_length") c.side_length = require_double(key, value);
    else if (key == "cells_per_side") c.cells_per_side = static_cast<int>(require_long(key, value));
    else if (key == "centered") c.centered = require_bool(key, value);
    else if (key == "mobility") c.mobility = value;
    else if (key == "mobility_scale") c.mobility_scale = require_double(key, value);
    else if (key == "eps") c.eps = require_double(key, value);
    else if (key == "s1") c.s1 = require_double(key, value);
    else if (key == "auto_s1") c.auto_s1 = require_bool(key, value);
    else if (key == "s2") c.s2 = require_double(key, value);
    else if (key == "auto_s2") c.auto_s2 = require_bool(key, value);
    else if (key == "stepping") c.stepping = value;
    else if (key == "n_steps") c.n_steps = static_cast<int>(require_long(key, value));
    else if (key == "mesh_seed") c.mesh_seed = require_u64(key, value);
    else if (key == "mesh_perturbation") c.mesh_perturbation = require_double(key, value);
    else if (key == "tau_min") c.tau_min = require_double(key, value);
    else if (key == "tau_max") c.tau_max = require_double(key, value);
    else if (key == "alpha") c.alpha = require_double(key, value);
    else if (key == "horizon") c.horizon = require_double(key, value);
    else if (key == "initial") c.initial = value;
    else if (key == "init_seed") c.init_seed = require_u64(key, value);
    else if (key == "init_amplitude") c.init_amplitude = require_double(key, value);
    else if (key == "bubble_radius") c.bubble_radius = require_double(key, value);
    else if (key == "timeseries") c.timeseries = value;
    else if (key == "snapshot_prefix") c.snapshot_prefix = value;
    else if (key == "snapshot_every") c.snapshot_every = require_double(key, value);
    else if (key == "binary_snapshots") c.binary_snapshots = require_bool(key, value);
    else if (key == "strict_mbp") c.strict_mbp = require_bool(key, value);
    else if (key == "solver.rel_tol") c.solver.rel_tol = require_double(key, value);
    else if (key == "solver.abs_tol") c.solver.abs_tol = require_double(key, value);
    else if (key == "solver.max_iters") c.solver.max_iters = static_cast<int>(require_long(key, value));
    else throw ConfigError("unknown key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        apply_override(config, key, value);
    }
    return config;
}

void validate(const RunConfig& c) {
    if (!(c.side_length > 0.0)) throw ConfigError("key 'side_length': must be positive");
    if (c.cells_per_side < 2) throw ConfigError("key 'cells_per_side': must be at least 2");
    if (c.mobility != "constant" && c.mobility != "degenerate")
        throw ConfigError("key 'mobility': must be constant or degenerate");
    if (!(c.mobility_scale > 0.0)) throw ConfigError("key 'mobility_scale': must be positive");
    if (!(c.eps > 0.0)) throw ConfigError("key 'eps': must be positive");
    if (c.s1 && c.auto_s1) throw ConfigError("keys 's1' and 'auto_s1' are mutually exclusive");
    if (c.s2 && c.auto_s2) throw ConfigError("keys 's2' and 'auto_s2' are mutually exclusive");
    if (c.s1 && *c.s1 < 0.0) throw ConfigError("key 's1': must be nonnegative");
    if (c.s2 && *c.s2 < 0.0) throw ConfigError("key 's2': must be nonnegative");
    if (c.stepping != "uniform" && c.stepping != "nonuniform" && c.stepping != "adaptive")
        throw ConfigError("key 'stepping': must be uniform, nonuniform, or adaptive");
    if (c.stepping != "adaptive" && c.n_steps < 1)
        throw ConfigError("key 'n_steps': must be at least 1");
    if (c.mesh_perturbation < 0.0 || c.mesh_perturbation >= 1.0)
        throw ConfigError("key 'mesh_perturbation': must lie in [0,1)");
    if (c.stepping == "adaptive") {
        if (!(c.tau_min > 0.0)) throw ConfigError("key 'tau_min': must be positive");
        if (!(c.tau_max >= c.tau_min)) throw ConfigError("key 'tau_max': must be >= tau_min");
        if (!(c.alpha > 0.0)) throw ConfigError("key 'alpha': must be positive");
    }
    if (!(c.horizon > 0.0)) throw ConfigError("key 'horizon': must be positive");
    if (c.initial != "trig" && c.initial != "random" && c.initial != "bubble")
        throw ConfigError("key 'initial': must be trig, random, or bubble");
    if (c.init_amplitude < 0.0 || c.init_amplitude > 1.0)
        throw ConfigError("key 'init_amplitude': must lie in [0,1]");
    if (c.initial == "bubble" && !(c.bubble_radius > 0.0 && c.bubble_radius < 0.5 * c.side_length))
        throw ConfigError("key 'bubble_radius': must lie in (0, side_length/2)");
    if (c.snapshot_every < 0.0) throw ConfigError("key 'snapshot_every': must be nonnegative");
    if (!(c.solver.rel_tol > 0.0)) throw ConfigError("key 'solver.rel_tol': must be positive");
    if (!(c.solver.abs_tol > 0.0)) throw ConfigError("key 'solver.abs_tol': must be positive");
    if (c.solver.max_iters < 0) throw ConfigError("key 'solver.max_iters': must be nonnegative");
}

ResolvedRun resolve(const RunConfig& c) {
    validate(c);
    ResolvedRun r;
    r.domain = Domain2D(c.side_length, c.cells_per_side);
    r.model = (c.mobility == "constant") ? MobilityModel::constant(c.mobility_scale)
                                         : MobilityModel::degenerate();
    r.params.eps = c.eps;
    r.params.s1 = c.s1 ? *c.s1 : s1_lower_bound(r.model);
    r.params.s2 = c.s2 ? *c.s2
                       : s2_lower_bound(r.params.s1, r.model.range_max(), c.eps, r.domain.spacing);
    r.params.solver = c.solver;
    r.origin = c.centered ? -0.5 * c.side_length : 0.0;
    r.horizon = c.horizon;

    if (c.initial == "trig")
        r.initial = init_trig(r.domain, r.origin);
    else if (c.initial == "random")
        r.initial = init_random(r.domain, c.init_seed, c.init_amplitude);
    else
        r.initial = init_bubble(r.domain, c.bubble_radius);

    if (c.stepping == "uniform")
        r.grid = TimeGrid::uniform(c.horizon, c.n_steps);
    else if (c.stepping == "nonuniform")
        r.grid = perturbed_mesh(c.horizon, c.n_steps, c.mesh_perturbation, c.mesh_seed);
    else
        r.adaptive = AdaptiveParams{c.tau_min, c.tau_max, c.alpha};
    return r;
}

std::string echo_resolved(const RunConfig& c, const ResolvedRun& r) {
    std::ostringstream out;
    out << "side_length = " << format_double(c.side_length) << '\n';
    out << "cells_per_side = " << c.cells_per_side << '\n';
    out << "centered = " << (c.centered ? "true" : "false") << '\n';
    out << "mobility = " << c.mobility << '\n';
    if (c.mobility == "constant") out << "mobility_scale = " << format_double(c.mobility_scale) << '\n';
    out << "eps = " << format_double(c.eps) << '\n';
    out << "s1 = " << format_double(r.params.s1) << (c.s1 ? "\n" : " # resolved\n");
    out << "s2 = " << format_double(r.params.s2) << (c.s2 ? "\n" : " # resolved\n");
    out << "stepping = " << c.stepping << '\n';
    if (c.stepping == "adaptive") {
        out << "tau_min = " << format_double(c.tau_min) << '\n';
        out << "tau_max = " << format_double(c.tau_max) << '\n';
        out << "alpha = " << format_double(c.alpha) << '\n';
    } else {
        out << "n_steps = " << c.n_steps << '\n';
        if (c.stepping == "nonuniform") {
            out << "mesh_seed = " << c.mesh_seed << '\n';
            out << "mesh_perturbation = " << format_double(c.mesh_perturbation) << '\n';
        }
    }
    out << "horizon = " << format_double(c.horizon) << '\n';
    out << "initial = " << c.initial << '\n';
    if (c.initial == "random") {
        out << "init_seed = " << c.init_seed << '\n';
        out << "init_amplitude = " << format_double(c.init_amplitude) << '\n';
    }
    if (c.initial == "bubble") out << "bubble_radius = " << format_double(c.bubble_radius) << '\n';
    out << "strict_mbp = " << (c.strict_mbp ? "true" : "false") << '\n';
    out << "solver.rel_tol = " << format_double(c.solver.rel_tol) << '\n';
    out << "solver.abs_tol = " << format_double(c.solver.abs_tol) << '\n';
    out << "solver.max_iters = " << c.solver.max_iters << '\n';
    return out.str();
}

} // namespace mbpcn

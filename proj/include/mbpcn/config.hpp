#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "mbpcn/grid.hpp"
#include "mbpcn/linsolve.hpp"
#include "mbpcn/mobility.hpp"
#include "mbpcn/scheme.hpp"
#include "mbpcn/stepping.hpp"

namespace mbpcn {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Flat key=value run description. Stabilizers may be given explicitly or
// resolved from the mobility bounds (auto_s1/auto_s2); giving both forms for
// the same parameter is rejected.
struct RunConfig {
    // domain
    double side_length = 1.0;
    int cells_per_side = 256;
    bool centered = false; // sample initial data on (-L/2, L/2)^2

    // model
    std::string mobility = "constant"; // constant | degenerate
    double mobility_scale = 1.0;

    // scheme
    double eps = 0.01;
    std::optional<double> s1;
    bool auto_s1 = false;
    std::optional<double> s2;
    bool auto_s2 = false;

    // stepping
    std::string stepping = "uniform"; // uniform | nonuniform | adaptive
    int n_steps = 100;
    std::uint64_t mesh_seed = 1;
    double mesh_perturbation = 0.4;
    double tau_min = 1e-5;
    double tau_max = 0.1;
    double alpha = 1e5;
    double horizon = 1.0;

    // initial condition
    std::string initial = "trig"; // trig | random | bubble
    std::uint64_t init_seed = 1;
    double init_amplitude = 0.1;
    double bubble_radius = 0.2;

    // output
    std::string timeseries;      // path; empty = do not write
    std::string snapshot_prefix; // "<prefix><step>.csv"; empty = no snapshots
    double snapshot_every = 0.0; // simulation-time cadence; 0 = off
    bool binary_snapshots = false;
    bool strict_mbp = false;

    SolverConfig solver;
};

// Parse a config file; unknown keys and malformed values are rejected with
// the offending key named. Does not validate cross-field constraints.
RunConfig parse_config_file(const std::string& path);

// Apply "key=value" overrides (the CLI flag channel) on top of a config.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Check all constraints, naming the offending key on failure.
void validate(const RunConfig& config);

// Everything a run needs, with auto stabilizers resolved.
struct ResolvedRun {
    Domain2D domain;
    MobilityModel model = MobilityModel::constant();
    SchemeParams params;
    CellField initial;
    double origin = 0.0; // coordinate shift used for initial sampling
    std::optional<TimeGrid> grid;            // uniform / nonuniform
    std::optional<AdaptiveParams> adaptive;  // adaptive
    double horizon = 0.0;
};

ResolvedRun resolve(const RunConfig& config);

// key=value echo of the fully resolved configuration
std::string echo_resolved(const RunConfig& config, const ResolvedRun& resolved);

} // namespace mbpcn

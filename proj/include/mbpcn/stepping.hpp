#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mbpcn/grid.hpp"
#include "mbpcn/mobility.hpp"
#include "mbpcn/scheme.hpp"

namespace mbpcn {

// Ordered positive step sizes spanning [0, T].
struct TimeGrid {
    std::vector<double> step_sizes;

    double horizon() const;
    double max_step() const;
    double max_ratio() const; // max tau_n / tau_{n-1}, 1 for a single step

    static TimeGrid uniform(double horizon, int n_steps);
};

// Uniform mesh with each step perturbed by amplitude * sigma_k, sigma_k drawn
// uniformly from (-1,1), then rescaled so the steps sum exactly to horizon.
// Deterministic for a given seed.
TimeGrid perturbed_mesh(double horizon, int n_steps, double amplitude, std::uint64_t seed);

struct AdaptiveParams {
    double tau_min = 1e-5;
    double tau_max = 0.1;
    double alpha = 1e5;
};

struct StepRow {
    long step = 0;
    double t = 0.0;
    double tau = 0.0;
    double sup_norm = 0.0;
    double energy = 0.0;
    int pred_iters = 0;
    int corr_iters = 0;
    double mbp_margin = 0.0; // 1 - sup_norm
};

// Time series of per-step monitors plus the terminal state. Row 0 holds the
// initial condition. A blow-up (non-finite state or energy) truncates the
// series; the offending step is recorded rather than raised.
struct RunRecord {
    std::vector<StepRow> rows;
    CellField terminal;
    bool blew_up = false;
    long blow_up_step = -1;
    double blow_up_time = 0.0;
    bool stopped_on_mbp = false; // strict-mode early stop

    const StepRow& last_row() const { return rows.back(); }
};

struct RunOptions {
    double mbp_slack = 1e-8;
    bool stop_on_mbp_violation = false;
    // called after each accepted step (not for row 0)
    std::function<void(const StepRow&, const CellField&)> on_step;
};

// E_h(u) = (eps^2/2) [grad u, grad u] + <F(u), 1>
double discrete_energy(const CellField& state, double eps);

// tau = max(tau_min, tau_max / sqrt(1 + alpha * energy_rate^2))
double adaptive_tau(const AdaptiveParams& ap, double energy_rate);

RunRecord run(const CellField& initial, const TimeGrid& grid, const SchemeParams& params,
              const MobilityModel& model, const RunOptions& opts = {});

// Energy-variation adaptive driver: the first step uses tau_min, afterwards
//   tau = max(tau_min, tau_max / sqrt(1 + alpha * Edot^2))
// with Edot the backward difference of the discrete energy over the previous
// step. The final step is clipped to land exactly on the horizon.
RunRecord run_adaptive(const CellField& initial, double horizon, const AdaptiveParams& ap,
                       const SchemeParams& params, const MobilityModel& model,
                       const RunOptions& opts = {});

} // namespace mbpcn

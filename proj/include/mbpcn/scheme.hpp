#pragma once

#include <utility>

#include "mbpcn/grid.hpp"
#include "mbpcn/linsolve.hpp"
#include "mbpcn/mobility.hpp"

namespace mbpcn {

struct SchemeParams {
    double eps = 0.01; // interface width
    double s1 = 0.0;   // first stabilizer (averaged-state term)
    double s2 = 0.0;   // second stabilizer (increment term, scaled by tau)
    SolverConfig solver;
};

struct StepOutput {
    CellField half_state; // predictor output at t_n + tau/2
    CellField next_state;
    SolveReport predictor_report;
    SolveReport corrector_report;
};

// Stabilized implicit Euler step: solve
//   [(1/tau + S1) I - eps^2 Lam^n D] u = (1/tau + S1) state - f(state)
// with the mobility frozen at the current state.
std::pair<CellField, SolveReport> bdf1_step(const CellField& state, double tau,
                                            const SchemeParams& params, const MobilityModel& model);

// Doubly stabilized Crank-Nicolson step: a half-step BDF1 predictor freezes
// the mobility and reaction, then the trapezoidal corrector solves
//   [(1/tau + S1/2 + S2 tau) I - (eps^2/2) Lam D] u
//     = [(1/tau - S1/2 + S2 tau) I + (eps^2/2) Lam D] state + S1 half - f(half).
StepOutput cn_step(const CellField& state, double tau, const SchemeParams& params,
                   const MobilityModel& model);

} // namespace mbpcn

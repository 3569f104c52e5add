#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mbpcn/grid.hpp"
#include "mbpcn/mobility.hpp"
#include "mbpcn/stepping.hpp"

namespace mbpcn {

// phi0(x,y) = 0.1 (cos 3x cos 2y + cos 5x cos 5y) sampled at cell centers;
// origin shifts the coordinates (pass -L/2 for a centered domain).
CellField init_trig(const Domain2D& dom, double origin = 0.0);

// independent uniform draws on [-amplitude, amplitude], row-major SplitMix64
CellField init_random(const Domain2D& dom, std::uint64_t seed, double amplitude = 0.1);

// +1 inside the disc of the given radius about the domain center, -1 outside
CellField init_bubble(const Domain2D& dom, double radius = 0.2);

// positive-area equivalent radius sqrt(A+ / pi), A+ = h^2 #{phi > 0}
double bubble_radius(const CellField& state);

struct ConvergenceRow {
    int n_steps = 0;
    double max_ratio = 1.0; // max adjacent step ratio of the N-step mesh
    double err_h1 = 0.0;    // ||u_N - u_2N||_H1 at the horizon
    double err_sup = 0.0;   // ||u_N - u_2N||_sup
    double order_h1 = 0.0;  // log2(err(N/2)/err(N)), defined from the second row
    double order_sup = 0.0;
};

struct ConvergenceConfig {
    Domain2D domain{1.0, 256};
    double eps = 0.01;
    MobilityModel model = MobilityModel::constant();
    double s1 = 2.0;
    double s2 = 2.0;
    SolverConfig solver;
    double horizon = 1.0;
    std::vector<int> ladder{10, 20, 40, 80, 160};
    bool perturbed = false;        // seeded 40% perturbed meshes instead of uniform
    double perturb_amplitude = 0.4;
    std::uint64_t mesh_seed = 2024;
    // test hook: replaces the CN step when set (state, tau) -> state
    std::function<CellField(const CellField&, double)> step_override;
    // observer called once per distinct step count with the full run record
    std::function<void(int, const RunRecord&)> on_run;
};

// Run each ladder entry at N and 2N steps from the trig initial state and
// difference the terminal states; terminal states are cached so a doubling
// ladder costs one run per distinct N.
std::vector<ConvergenceRow> convergence_study(const ConvergenceConfig& config);

struct BubbleSample {
    double t = 0.0;
    double measured_radius = 0.0;
    double predicted_radius = 0.0; // sqrt(R0^2 - 2 eps^2 t), NaN once the argument is negative
};

struct BubbleConfig {
    Domain2D domain{1.0, 256}; // realized as (-L/2, L/2)^2
    double eps = 0.01;
    double radius0 = 0.2;
    AdaptiveParams adaptive{1e-5, 0.01, 1e5};
    std::optional<double> s1; // empty = stabilizer bound for the constant mobility
    std::optional<double> s2; // empty = unconditional bound
    SolverConfig solver;
    double horizon = 220.0;
    double sample_interval = 1.0; // radius sampling cadence in simulation time
};

struct BubbleReport {
    std::vector<BubbleSample> series;
    double vanish_time = 0.0; // NaN if the bubble survives the horizon
    RunRecord record;
};

BubbleReport bubble_benchmark(const BubbleConfig& config);

struct CoarseningConfig {
    Domain2D domain{1.0, 256};
    double eps = 1.0 / 256;
    std::optional<double> s1; // empty = stabilizer bound for the degenerate mobility (0.8)
    std::optional<double> s2; // empty = unconditional bound; set 0 for the conditional regime
    SolverConfig solver;
    std::uint64_t init_seed = 42;
    double init_amplitude = 0.1;
    double horizon = 100.0;
    double tau = 0.5;                       // uniform stepping unless adaptive is set
    std::optional<AdaptiveParams> adaptive; // energy-variation adaptive stepping
    RunOptions run_options;
};

// Degenerate-mobility coarsening from seeded random data. With s2 = 0 and a
// step size above the conditional ceiling this reproduces the finite-time
// blow-up, which comes back as a recorded outcome on the RunRecord.
RunRecord coarsening_benchmark(const CoarseningConfig& config);

} // namespace mbpcn

#include "mbpcn/stepping.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mbpcn/splitmix64.hpp"

namespace mbpcn {

double TimeGrid::horizon() const {
    double t = 0.0;
    for (double tau : step_sizes) t += tau;
    return t;
}

double TimeGrid::max_step() const {
    double m = 0.0;
    for (double tau : step_sizes) m = std::max(m, tau);
    return m;
}

double TimeGrid::max_ratio() const {
    double m = 1.0;
    for (std::size_t n = 1; n < step_sizes.size(); ++n)
        m = std::max(m, step_sizes[n] / step_sizes[n - 1]);
    return m;
}

TimeGrid TimeGrid::uniform(double horizon, int n_steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid::uniform: horizon must be positive");
    if (n_steps < 1) throw std::invalid_argument("TimeGrid::uniform: need at least one step");
    return TimeGrid{std::vector<double>(static_cast<std::size_t>(n_steps), horizon / n_steps)};
}

TimeGrid perturbed_mesh(double horizon, int n_steps, double amplitude, std::uint64_t seed) {
    if (!(horizon > 0.0)) throw std::invalid_argument("perturbed_mesh: horizon must be positive");
    if (n_steps < 1) throw std::invalid_argument("perturbed_mesh: need at least one step");
    if (amplitude < 0.0 || amplitude >= 1.0)
        throw std::invalid_argument("perturbed_mesh: amplitude must lie in [0,1)");
    if (amplitude == 0.0) return TimeGrid::uniform(horizon, n_steps);
    SplitMix64 rng(seed);
    std::vector<double> raw(static_cast<std::size_t>(n_steps));
    double total = 0.0;
    for (auto& w : raw) {
        w = (1.0 + amplitude * rng.next_symmetric()) / n_steps;
        total += w;
    }
    const double scale = horizon / total;
    for (auto& w : raw) w *= scale;
    return TimeGrid{std::move(raw)};
}

double discrete_energy(const CellField& state, double eps) {
    const double h = state.h();
    double potential = 0.0;
    for (double v : state.data()) potential += PotentialModel::value(v);
    return 0.5 * eps * eps * seminorm_h1_sq(state) + h * h * potential;
}

double adaptive_tau(const AdaptiveParams& ap, double energy_rate) {
    return std::max(ap.tau_min, ap.tau_max / std::sqrt(1.0 + ap.alpha * energy_rate * energy_rate));
}

namespace {

StepRow make_row(long step, double t, double tau, const CellField& state, double eps,
                 int pred_iters, int corr_iters) {
    StepRow row;
    row.step = step;
    row.t = t;
    row.tau = tau;
    row.sup_norm = norm_sup(state);
    row.energy = discrete_energy(state, eps);
    row.pred_iters = pred_iters;
    row.corr_iters = corr_iters;
    row.mbp_margin = 1.0 - row.sup_norm;
    return row;
}

// One monitored CN step shared by the uniform and adaptive drivers.
// Returns false when the trajectory must stop (blow-up or strict-MBP stop).
bool advance(CellField& state, double& t, long step_index, double tau, const SchemeParams& params,
             const MobilityModel& model, const RunOptions& opts, RunRecord& rec) {
    StepOutput out;
    try {
        out = cn_step(state, tau, params, model);
    } catch (const SolveFailure&) {
        // Solver stagnation on an already out-of-bounds or non-finite state is
        // the blow-up signature; on a sane state it is a genuine solver error.
        if (!is_finite(state) || norm_sup(state) > 1.0 + opts.mbp_slack) {
            rec.blew_up = true;
            rec.blow_up_step = step_index;
            rec.blow_up_time = t + tau;
            return false;
        }
        throw;
    }
    t += tau;

    const double energy = is_finite(out.next_state)
                              ? discrete_energy(out.next_state, params.eps)
                              : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(energy)) {
        rec.blew_up = true;
        rec.blow_up_step = step_index;
        rec.blow_up_time = t;
        return false;
    }

    state = std::move(out.next_state);
    StepRow row = make_row(step_index, t, tau, state, params.eps, out.predictor_report.iterations,
                           out.corrector_report.iterations);
    rec.rows.push_back(row);
    if (opts.on_step) opts.on_step(row, state);
    if (opts.stop_on_mbp_violation && row.sup_norm > 1.0 + opts.mbp_slack) {
        rec.stopped_on_mbp = true;
        return false;
    }
    return true;
}

} // namespace

RunRecord run(const CellField& initial, const TimeGrid& grid, const SchemeParams& params,
              const MobilityModel& model, const RunOptions& opts) {
    if (grid.step_sizes.empty()) throw std::invalid_argument("run: time grid is empty");
    for (double tau : grid.step_sizes)
        if (!(tau > 0.0)) throw std::invalid_argument("run: step sizes must be positive");
    if (!is_finite(initial)) throw std::invalid_argument("run: initial state is not finite");

    RunRecord rec;
    rec.rows.push_back(make_row(0, 0.0, 0.0, initial, params.eps, 0, 0));
    CellField state = initial;
    double t = 0.0;
    for (std::size_t n = 0; n < grid.step_sizes.size(); ++n) {
        if (!advance(state, t, static_cast<long>(n) + 1, grid.step_sizes[n], params, model, opts, rec))
            break;
    }
    rec.terminal = std::move(state);
    return rec;
}

RunRecord run_adaptive(const CellField& initial, double horizon, const AdaptiveParams& ap,
                       const SchemeParams& params, const MobilityModel& model,
                       const RunOptions& opts) {
    if (!(horizon > 0.0)) throw std::invalid_argument("run_adaptive: horizon must be positive");
    if (!(ap.tau_min > 0.0) || !(ap.tau_max >= ap.tau_min) || !(ap.alpha > 0.0))
        throw std::invalid_argument("run_adaptive: need 0 < tau_min <= tau_max and alpha > 0");
    if (!is_finite(initial)) throw std::invalid_argument("run_adaptive: initial state is not finite");

    RunRecord rec;
    rec.rows.push_back(make_row(0, 0.0, 0.0, initial, params.eps, 0, 0));
    CellField state = initial;
    double t = 0.0;
    double energy_prev = rec.rows.front().energy;
    double tau_next = ap.tau_min; // no energy history yet: start conservatively
    long step = 0;

    while (horizon - t > 1e-12 * horizon) {
        const double tau = std::min(tau_next, horizon - t); // land exactly on T
        ++step;
        if (!advance(state, t, step, tau, params, model, opts, rec)) break;

        const double energy = rec.rows.back().energy;
        const double edot = (energy - energy_prev) / tau;
        energy_prev = energy;
        tau_next = adaptive_tau(ap, edot);
    }
    rec.terminal = std::move(state);
    return rec;
}

} // namespace mbpcn

#include "mbpcn/experiments.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "mbpcn/splitmix64.hpp"

namespace mbpcn {

CellField init_trig(const Domain2D& dom, double origin) {
    CellField out(dom);
    const int m = dom.cells_per_side;
    for (int i = 0; i < m; ++i) {
        const double x = origin + dom.cell_center(i);
        for (int j = 0; j < m; ++j) {
            const double y = origin + dom.cell_center(j);
            out(i, j) = 0.1 * (std::cos(3.0 * x) * std::cos(2.0 * y) +
                               std::cos(5.0 * x) * std::cos(5.0 * y));
        }
    }
    return out;
}

CellField init_random(const Domain2D& dom, std::uint64_t seed, double amplitude) {
    if (amplitude > 1.0) throw std::invalid_argument("init_random: amplitude must not exceed 1");
    CellField out(dom);
    SplitMix64 rng(seed);
    for (double& v : out.data()) v = amplitude * rng.next_symmetric();
    return out;
}

CellField init_bubble(const Domain2D& dom, double radius) {
    if (!(radius < 0.5 * dom.side_length))
        throw std::invalid_argument("init_bubble: radius must be smaller than half the side length");
    CellField out(dom);
    const int m = dom.cells_per_side;
    const double half = 0.5 * dom.side_length;
    const double r2 = radius * radius;
    for (int i = 0; i < m; ++i) {
        const double dx = dom.cell_center(i) - half;
        for (int j = 0; j < m; ++j) {
            const double dy = dom.cell_center(j) - half;
            out(i, j) = (dx * dx + dy * dy < r2) ? 1.0 : -1.0;
        }
    }
    return out;
}

double bubble_radius(const CellField& state) {
    const double h = state.h();
    long positive = 0;
    for (double v : state.data())
        if (v > 0.0) ++positive;
    return std::sqrt(static_cast<double>(positive) * h * h / M_PI);
}

namespace {

CellField terminal_state(const ConvergenceConfig& config, int n_steps) {
    const TimeGrid grid =
        config.perturbed
            ? perturbed_mesh(config.horizon, n_steps, config.perturb_amplitude,
                             config.mesh_seed + static_cast<std::uint64_t>(n_steps))
            : TimeGrid::uniform(config.horizon, n_steps);

    CellField state = init_trig(config.domain);
    if (config.step_override) {
        for (double tau : grid.step_sizes) state = config.step_override(state, tau);
        return state;
    }
    SchemeParams params{config.eps, config.s1, config.s2, config.solver};
    RunRecord rec = run(state, grid, params, config.model);
    if (rec.blew_up)
        throw std::runtime_error("convergence_study: trajectory blew up at step " +
                                 std::to_string(rec.blow_up_step));
    if (config.on_run) config.on_run(n_steps, rec);
    return std::move(rec.terminal);
}

} // namespace

std::vector<ConvergenceRow> convergence_study(const ConvergenceConfig& config) {
    if (config.ladder.empty()) throw std::invalid_argument("convergence_study: empty ladder");
    for (std::size_t k = 1; k < config.ladder.size(); ++k)
        if (config.ladder[k] <= config.ladder[k - 1])
            throw std::invalid_argument("convergence_study: ladder must be strictly increasing");

    std::map<int, CellField> cache;
    auto state_for = [&](int n) -> const CellField& {
        auto it = cache.find(n);
        if (it == cache.end()) it = cache.emplace(n, terminal_state(config, n)).first;
        return it->second;
    };

    std::vector<ConvergenceRow> rows;
    rows.reserve(config.ladder.size());
    for (std::size_t k = 0; k < config.ladder.size(); ++k) {
        const int n = config.ladder[k];
        const CellField& coarse = state_for(n);
        const CellField& fine = state_for(2 * n);

        CellField diff(coarse.domain());
        {
            const auto a = coarse.data();
            const auto b = fine.data();
            auto d = diff.data();
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
        }

        ConvergenceRow row;
        row.n_steps = n;
        row.max_ratio = config.perturbed
                            ? perturbed_mesh(config.horizon, n, config.perturb_amplitude,
                                             config.mesh_seed + static_cast<std::uint64_t>(n))
                                  .max_ratio()
                            : 1.0;
        row.err_h1 = norm_h1(diff);
        row.err_sup = norm_sup(diff);
        if (k > 0) {
            row.order_h1 = std::log2(rows.back().err_h1 / row.err_h1);
            row.order_sup = std::log2(rows.back().err_sup / row.err_sup);
        } else {
            row.order_h1 = std::numeric_limits<double>::quiet_NaN();
            row.order_sup = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

BubbleReport bubble_benchmark(const BubbleConfig& config) {
    const MobilityModel model = MobilityModel::constant();
    const double h = config.domain.spacing;
    SchemeParams params;
    params.eps = config.eps;
    params.s1 = config.s1 ? *config.s1 : s1_lower_bound(model);
    params.s2 = config.s2 ? *config.s2 : s2_lower_bound(params.s1, model.range_max(), config.eps, h);
    params.solver = config.solver;

    const CellField initial = init_bubble(config.domain, config.radius0);
    const double r0sq = config.radius0 * config.radius0;
    const double shrink = 2.0 * config.eps * config.eps;

    BubbleReport report;
    report.vanish_time = std::numeric_limits<double>::quiet_NaN();

    auto sample = [&](double t, const CellField& state) {
        BubbleSample s;
        s.t = t;
        s.measured_radius = bubble_radius(state);
        const double arg = r0sq - shrink * t;
        s.predicted_radius = arg >= 0.0 ? std::sqrt(arg) : std::numeric_limits<double>::quiet_NaN();
        report.series.push_back(s);
    };
    sample(0.0, initial);

    double next_sample = config.sample_interval;
    RunOptions opts;
    opts.on_step = [&](const StepRow& row, const CellField& state) {
        if (std::isnan(report.vanish_time)) {
            double max_v = -std::numeric_limits<double>::infinity();
            for (double v : state.data()) max_v = std::max(max_v, v);
            if (max_v < 0.0) report.vanish_time = row.t;
        }
        if (row.t + 1e-12 >= next_sample) {
            sample(row.t, state);
            while (next_sample <= row.t + 1e-12) next_sample += config.sample_interval;
        }
    };

    report.record = run_adaptive(initial, config.horizon, config.adaptive, params, model, opts);
    return report;
}

RunRecord coarsening_benchmark(const CoarseningConfig& config) {
    const MobilityModel model = MobilityModel::degenerate();
    const double h = config.domain.spacing;
    SchemeParams params;
    params.eps = config.eps;
    params.s1 = config.s1 ? *config.s1 : s1_lower_bound(model);
    params.s2 = config.s2 ? *config.s2 : s2_lower_bound(params.s1, model.range_max(), config.eps, h);
    params.solver = config.solver;

    const CellField initial = init_random(config.domain, config.init_seed, config.init_amplitude);
    if (config.adaptive)
        return run_adaptive(initial, config.horizon, *config.adaptive, params, model,
                            config.run_options);
    const int n_steps = static_cast<int>(std::ceil(config.horizon / config.tau - 1e-9));
    TimeGrid grid{std::vector<double>(static_cast<std::size_t>(n_steps), config.tau)};
    // trim the final step so the grid spans exactly the horizon
    const double partial = config.horizon - config.tau * (n_steps - 1);
    grid.step_sizes.back() = partial;
    return run(initial, grid, params, model, config.run_options);
}

} // namespace mbpcn

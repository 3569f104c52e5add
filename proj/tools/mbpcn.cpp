// Command-line front end: simulation runs, the benchmark drivers, stabilizer
// bound queries, and the dense verification suite.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mbpcn/config.hpp"
#include "mbpcn/csv.hpp"
#include "mbpcn/experiments.hpp"
#include "mbpcn/oracle.hpp"
#include "mbpcn/splitmix64.hpp"

using namespace mbpcn;

namespace {

// exit codes: 0 ok, 2 config, 3 solver, 4 strict-MBP violation, 5 blow-up
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitMbp = 4;
constexpr int kExitBlowUp = 5;

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolveFailure& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

double min_margin(const RunRecord& rec) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& row : rec.rows) m = std::min(m, row.mbp_margin);
    return m;
}

void print_summary(const RunRecord& rec) {
    const StepRow& last = rec.last_row();
    std::printf("steps: %ld   final t: %s   sup-norm: %s   energy: %s   min margin: %s\n",
                last.step, format_double(last.t).c_str(), format_double(last.sup_norm).c_str(),
                format_double(last.energy).c_str(), format_double(min_margin(rec)).c_str());
    if (rec.blew_up)
        std::printf("blow-up recorded at step %ld (t = %s): state left the finite range\n",
                    rec.blow_up_step, format_double(rec.blow_up_time).c_str());
}

RunOptions make_output_options(const RunConfig& cfg) {
    RunOptions opts;
    opts.stop_on_mbp_violation = cfg.strict_mbp;
    if (!cfg.snapshot_prefix.empty() && cfg.snapshot_every > 0.0) {
        auto next = std::make_shared<double>(cfg.snapshot_every);
        opts.on_step = [&cfg, next](const StepRow& row, const CellField& state) {
            if (row.t + 1e-12 < *next) return;
            const std::string base = cfg.snapshot_prefix + std::to_string(row.step);
            write_snapshot(state, row.t, base + ".csv");
            if (cfg.binary_snapshots) write_snapshot_binary(state, base + ".f64");
            while (*next <= row.t + 1e-12) *next += cfg.snapshot_every;
        };
    }
    return opts;
}

int finish_run(const RunConfig& cfg, const RunRecord& rec) {
    if (!cfg.timeseries.empty()) {
        write_timeseries(rec, cfg.timeseries);
        std::printf("time series written to %s\n", cfg.timeseries.c_str());
    }
    if (!cfg.snapshot_prefix.empty() && cfg.snapshot_every <= 0.0 && !rec.rows.empty()) {
        const std::string base = cfg.snapshot_prefix + "final";
        write_snapshot(rec.terminal, rec.last_row().t, base + ".csv");
        if (cfg.binary_snapshots) write_snapshot_binary(rec.terminal, base + ".f64");
    }
    print_summary(rec);
    if (rec.blew_up) return kExitBlowUp;
    if (cfg.strict_mbp && min_margin(rec) < -1e-8) {
        std::fprintf(stderr, "strict-mbp: bound exceeded by %s\n",
                     format_double(-min_margin(rec)).c_str());
        return kExitMbp;
    }
    return 0;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + kv + "': expected key=value");
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    const ResolvedRun r = resolve(cfg);
    std::fputs(echo_resolved(cfg, r).c_str(), stdout);

    const RunOptions opts = make_output_options(cfg);
    const RunRecord rec = r.grid ? run(r.initial, *r.grid, r.params, r.model, opts)
                                 : run_adaptive(r.initial, r.horizon, *r.adaptive, r.params,
                                                r.model, opts);
    return finish_run(cfg, rec);
}

int cmd_converge(const std::string& mobility, const std::string& grid_kind,
                 std::vector<int> ladder, int cells, double eps, double s1, double s2,
                 double horizon, std::uint64_t seed, const std::string& out_path) {
    ConvergenceConfig cc;
    cc.domain = Domain2D(1.0, cells);
    cc.model = (mobility == "degenerate") ? MobilityModel::degenerate() : MobilityModel::constant();
    cc.eps = eps;
    cc.s1 = s1;
    cc.s2 = s2;
    cc.horizon = horizon;
    if (!ladder.empty()) cc.ladder = std::move(ladder);
    cc.perturbed = (grid_kind == "perturbed");
    cc.mesh_seed = seed;

    const auto rows = convergence_study(cc);
    std::printf("%8s %10s %12s %8s %12s %8s\n", "N", "max_ratio", "err_H1", "order", "err_sup",
                "order");
    for (const auto& r : rows)
        std::printf("%8d %10.4f %12.4e %8.2f %12.4e %8.2f\n", r.n_steps, r.max_ratio, r.err_h1,
                    r.order_h1, r.err_sup, r.order_sup);
    if (!out_path.empty()) {
        write_convergence_table(rows, out_path);
        std::printf("table written to %s\n", out_path.c_str());
    }
    return 0;
}

int cmd_coarsen(double tau, bool unstable, bool conditional, double s2, bool has_s2,
                bool adaptive, double tau_min, double tau_max, double alpha, double horizon,
                int cells, std::uint64_t seed, const std::string& out_path,
                const std::string& snap_prefix, double snap_every) {
    CoarseningConfig kc;
    kc.domain = Domain2D(1.0, cells);
    kc.eps = kc.domain.spacing; // interface width at the grid scale
    kc.horizon = horizon;
    kc.init_seed = seed;
    kc.tau = tau;
    if (has_s2) kc.s2 = s2;
    if (conditional) kc.s2 = 0.0;
    if (unstable) { // the deliberate blow-up demonstration
        kc.s2 = 0.0;
        kc.tau = 2.0;
    }
    if (adaptive) kc.adaptive = AdaptiveParams{tau_min, tau_max, alpha};

    RunConfig out_cfg; // reuse the snapshot plumbing
    out_cfg.snapshot_prefix = snap_prefix;
    out_cfg.snapshot_every = snap_every;
    kc.run_options = make_output_options(out_cfg);

    const RunRecord rec = coarsening_benchmark(kc);
    if (!out_path.empty()) {
        write_timeseries(rec, out_path);
        std::printf("time series written to %s\n", out_path.c_str());
    }
    print_summary(rec);
    return rec.blew_up ? kExitBlowUp : 0;
}

int cmd_bubble(int cells, double eps, double radius, double horizon, double sample_every,
               double tau_min, double tau_max, double alpha, const std::string& out_path,
               const std::string& timeseries_path) {
    BubbleConfig bc;
    bc.domain = Domain2D(1.0, cells);
    bc.eps = eps;
    bc.radius0 = radius;
    bc.horizon = horizon;
    bc.sample_interval = sample_every;
    bc.adaptive = AdaptiveParams{tau_min, tau_max, alpha};

    const BubbleReport report = bubble_benchmark(bc);
    double worst = 0.0;
    for (const auto& s : report.series)
        if (!std::isnan(s.predicted_radius))
            worst = std::max(worst, std::fabs(s.measured_radius - s.predicted_radius));
    std::printf("vanish time: %s (radius law predicts %s)\n",
                format_double(report.vanish_time).c_str(),
                format_double(radius * radius / (2.0 * eps * eps)).c_str());
    std::printf("max |measured - predicted| radius while defined: %s\n",
                format_double(worst).c_str());
    if (!out_path.empty()) {
        write_bubble_series(report, out_path);
        std::printf("radius series written to %s\n", out_path.c_str());
    }
    if (!timeseries_path.empty()) {
        write_timeseries(report.record, timeseries_path);
        std::printf("time series written to %s\n", timeseries_path.c_str());
    }
    print_summary(report.record);
    return report.record.blew_up ? kExitBlowUp : 0;
}

int cmd_bounds(const std::string& mobility, double scale, double eps, int cells, double side,
               double s1_given, bool has_s1) {
    const MobilityModel model =
        (mobility == "degenerate") ? MobilityModel::degenerate() : MobilityModel::constant(scale);
    const double h = side / cells;
    const double s1_min = s1_lower_bound(model);
    const double s1 = has_s1 ? s1_given : s1_min;
    std::printf("mobility = %s   L = %s   M0 = %s\n", model.name().c_str(),
                format_double(model.range_max()).c_str(), format_double(model.range_min()).c_str());
    std::printf("s1_lower_bound      = %s\n", format_double(s1_min).c_str());
    std::printf("s1 (in use)         = %s%s\n", format_double(s1).c_str(),
                s1 < s1_min - 1e-12 ? "  [below the bound]" : "");
    std::printf("s2_lower_bound      = %s\n",
                format_double(s2_lower_bound(s1, model.range_max(), eps, h)).c_str());
    std::printf("tau_max_conditional = %s\n",
                format_double(tau_max_conditional(s1, model.range_max(), eps, h)).c_str());
    const auto rep = check_stabilized_bound(model, s1);
    std::printf("|s1*rho - f(rho)| max = %s at rho = %s (bound %s): %s\n",
                format_double(rep.max_deviation).c_str(), format_double(rep.worst_rho).c_str(),
                format_double(rep.bound).c_str(), rep.pass ? "pass" : "FAIL");
    return rep.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify: dense ground-truth suite
// ---------------------------------------------------------------------------

struct CheckLine {
    std::string name;
    bool pass;
    double margin; // measured worst value (meaning depends on the check)
};

CellField random_field(const Domain2D& dom, SplitMix64& rng, double amplitude = 0.9) {
    CellField f(dom);
    for (double& v : f.data()) v = amplitude * rng.next_symmetric();
    return f;
}

double rel_err(std::span<const double> got, std::span<const double> want) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) {
        num = std::max(num, std::fabs(got[k] - want[k]));
        den = std::max(den, std::fabs(want[k]));
    }
    return num / std::max(den, 1e-300);
}

int cmd_verify(int trials, std::uint64_t seed) {
    std::vector<CheckLine> checks;
    SplitMix64 rng(seed);
    auto push = [&checks](const std::string& name, bool pass, double margin) {
        checks.push_back({name, pass, margin});
    };

    { // 1D operator structure
        double worst_rowsum = 0.0, worst_asym = 0.0, worst_eig = -1e300;
        for (int m = 2; m <= 16; ++m) {
            const auto g = assemble_gh(m, 1.0 / m);
            for (int r = 0; r < m; ++r) worst_rowsum = std::max(worst_rowsum, std::fabs(g.row_sum(r)));
            worst_asym = std::max(worst_asym, g.max_abs_asymmetry());
            const auto ev = symmetric_eigenvalues(g);
            worst_eig = std::max(worst_eig, ev.back()); // eigenvalues must be <= 0
        }
        push("gh row sums vanish", worst_rowsum <= 1e-11, worst_rowsum);
        push("gh symmetric", worst_asym == 0.0, worst_asym);
        push("gh negative semidefinite", worst_eig <= 1e-10, worst_eig);
    }
    { // 2D Kronecker sum structure
        double worst_rowsum = 0.0, worst_asym = 0.0, worst_eig = -1e300;
        for (int m = 2; m <= 8; ++m) {
            const auto d = assemble_dh(m, 1.0 / m);
            for (int r = 0; r < m * m; ++r)
                worst_rowsum = std::max(worst_rowsum, std::fabs(d.row_sum(r)));
            worst_asym = std::max(worst_asym, d.max_abs_asymmetry());
            const auto ev = symmetric_eigenvalues(d);
            worst_eig = std::max(worst_eig, ev.back());
        }
        push("dh row sums vanish", worst_rowsum <= 1e-10, worst_rowsum);
        push("dh symmetric", worst_asym == 0.0, worst_asym);
        push("dh negative semidefinite", worst_eig <= 1e-10, worst_eig);
    }
    { // matrix-free kernels against dense assembly
        double worst_lap = 0.0, worst_apply = 0.0;
        for (int t = 0; t < trials; ++t) {
            const int m = 2 + static_cast<int>(rng.next() % 7);
            const Domain2D dom(1.0, m);
            const auto d = assemble_dh(m, dom.spacing);
            const CellField u = random_field(dom, rng);
            worst_lap = std::max(worst_lap, rel_err(laplacian(u).data(), d.multiply(u.data())));

            CellField lam(dom);
            for (double& v : lam.data()) v = 0.05 + rng.next_unit();
            const double c = 0.1 + 10.0 * rng.next_unit();
            const double kappa = rng.next_unit();
            const HelmholtzOperator op(c, kappa, lam);
            const auto dense = assemble_helmholtz(c, kappa, lam);
            worst_apply =
                std::max(worst_apply, rel_err(op.apply(u).data(), dense.multiply(u.data())));
        }
        push("laplacian matches dense", worst_lap <= 1e-13, worst_lap);
        push("helmholtz apply matches dense", worst_apply <= 1e-13, worst_apply);
    }
    { // discrete Green identity, operator symmetry, conservation
        double worst_sbp = 0.0, worst_sym = 0.0, worst_cons = 0.0;
        for (int t = 0; t < trials; ++t) {
            const int m = 2 + static_cast<int>(rng.next() % 7);
            const Domain2D dom(1.0, m);
            const CellField u = random_field(dom, rng);
            const CellField v = random_field(dom, rng);
            const auto [gux, guy] = gradient(u);
            const auto [gvx, gvy] = gradient(v);
            const double edge = inner_edge(gux, gvx, guy, gvy);
            worst_sbp = std::max(worst_sbp, std::fabs(-inner_l2(laplacian(u), v) - edge) /
                                                (1.0 + std::fabs(edge)));
            worst_sym = std::max(worst_sym, std::fabs(inner_l2(laplacian(u), v) -
                                                      inner_l2(u, laplacian(v))));
            const CellField ones(dom, 1.0);
            worst_cons = std::max(worst_cons, std::fabs(inner_l2(laplacian(u), ones)) /
                                                  std::max(norm_l2(u), 1e-300));
        }
        push("summation by parts", worst_sbp <= 1e-12, worst_sbp);
        push("laplacian self-adjoint", worst_sym <= 1e-12, worst_sym);
        push("neumann conservation", worst_cons <= 1e-12, worst_cons);
    }
    { // time steps against the dense direct solve
        double worst_bdf1 = 0.0, worst_half = 0.0, worst_cn = 0.0;
        for (int t = 0; t < trials; ++t) {
            const int m = 2 + static_cast<int>(rng.next() % 7);
            const Domain2D dom(1.0, m);
            const MobilityModel model =
                (t % 2 == 0) ? MobilityModel::constant() : MobilityModel::degenerate();
            SchemeParams p;
            p.eps = 0.02 + 0.2 * rng.next_unit();
            p.s1 = s1_lower_bound(model);
            p.s2 = s2_lower_bound(p.s1, model.range_max(), p.eps, dom.spacing);
            const double tau = 0.01 + rng.next_unit();
            const CellField state = random_field(dom, rng);

            const auto [fast_b, rep_b] = bdf1_step(state, tau, p, model);
            const CellField slow_b = dense_step(state, tau, p, model, StepKind::Bdf1);
            worst_bdf1 = std::max(worst_bdf1, rel_err(fast_b.data(), slow_b.data()));

            const StepOutput out = cn_step(state, tau, p, model);
            const CellField slow_half = dense_step(state, 0.5 * tau, p, model, StepKind::Bdf1);
            const CellField slow_cn = dense_step(state, tau, p, model, StepKind::CrankNicolson);
            worst_half = std::max(worst_half, rel_err(out.half_state.data(), slow_half.data()));
            worst_cn = std::max(worst_cn, rel_err(out.next_state.data(), slow_cn.data()));
        }
        push("bdf1 matches dense solve", worst_bdf1 <= 1e-10, worst_bdf1);
        push("cn predictor matches dense solve", worst_half <= 1e-10, worst_half);
        push("cn corrector matches dense solve", worst_cn <= 1e-10, worst_cn);
    }
    { // symmetrized operator is SPD; mobility-scaled rows still sum to zero
        double worst_min_eig = 1e300, worst_rowsum = 0.0;
        for (int m = 2; m <= 6; ++m) {
            const Domain2D dom(1.0, m);
            CellField lam(dom);
            for (double& v : lam.data()) v = 0.1 + rng.next_unit();
            const double c = 0.5 + rng.next_unit();
            const double kappa = 0.3 * rng.next_unit();
            DenseMatrix b(m * m);
            const auto d = assemble_dh(m, dom.spacing);
            const auto lv = lam.data();
            for (int r = 0; r < m * m; ++r) {
                for (int cc = 0; cc < m * m; ++cc) b(r, cc) = -kappa * d(r, cc);
                b(r, r) += c / lv[r];
            }
            const auto ev = symmetric_eigenvalues(b);
            worst_min_eig = std::min(worst_min_eig, ev.front());

            const auto a = assemble_helmholtz(1.0, 1.0, lam); // I - Lam D
            for (int r = 0; r < m * m; ++r)
                worst_rowsum = std::max(worst_rowsum, std::fabs(a.row_sum(r) - 1.0));
        }
        push("symmetrized operator SPD", worst_min_eig > 0.0, worst_min_eig);
        push("mobility-scaled row sums vanish", worst_rowsum <= 1e-12, worst_rowsum);
    }
    { // transfer-matrix nonnegativity in the two admissible regimes
        const Domain2D dom(1.0, 5);
        const MobilityModel model = MobilityModel::degenerate();
        SchemeParams p;
        p.eps = 0.05;
        p.s1 = s1_lower_bound(model);
        CellField lam(dom);
        for (double& v : lam.data()) v = rng.next_unit(); // admissible: in [0, L]

        p.s2 = s2_lower_bound(p.s1, model.range_max(), p.eps, dom.spacing);
        const auto rep_u = check_q_matrix(q_matrix(7.3, p, lam), 7.3, p); // arbitrary large tau
        push("q nonnegative (unconditional)", rep_u.nonnegative && rep_u.row_sums_ok,
             rep_u.min_entry);

        p.s2 = 0.0;
        const double tau_c = tau_max_conditional(p.s1, model.range_max(), p.eps, dom.spacing);
        const auto rep_c = check_q_matrix(q_matrix(tau_c, p, lam), tau_c, p);
        push("q nonnegative (conditional, tau at ceiling)", rep_c.nonnegative && rep_c.row_sums_ok,
             rep_c.min_entry);

        CellField lam_max(dom, model.range_max());
        const auto rep_bad = check_q_matrix(q_matrix(10.0 * tau_c, p, lam_max), 10.0 * tau_c, p);
        push("q loses nonnegativity (inadmissible)", rep_bad.min_entry < 0.0, rep_bad.min_entry);
    }
    { // stabilizer bound at the computed constants
        const auto rep_const = check_stabilized_bound(MobilityModel::constant(), 2.0);
        push("stabilizer bound holds (constant, s1=2)", rep_const.pass, rep_const.max_deviation);
        const auto rep_deg = check_stabilized_bound(MobilityModel::degenerate(), 0.8);
        push("stabilizer bound holds (degenerate, s1=0.8)", rep_deg.pass, rep_deg.max_deviation);
    }

    bool all = true;
    for (const auto& c : checks) {
        std::printf("[%s] %-46s margin %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    format_double(c.margin).c_str());
        all = all && c.pass;
    }
    std::printf("%s: %zu checks\n", all ? "all passed" : "FAILURES PRESENT", checks.size());
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("MBPCN_THREADS")) {
        const int n = std::atoi(env);
        set_thread_cap(n > 0 ? n : 0);
    }

    CLI::App app{"Structure-preserving Allen-Cahn solver (stabilized Crank-Nicolson, general mobility)"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "config-driven simulation");
    std::string config_path;
    std::vector<std::string> sets;
    run_cmd->add_option("-c,--config", config_path, "flat key=value config file");
    run_cmd->add_option("-s,--set", sets, "override, e.g. --set eps=0.01 (repeatable)");
    // sugar flags forwarded through the same override channel
    std::vector<std::pair<std::string, std::string>> sugar = {
        {"--eps", "eps"},           {"--s1", "s1"},
        {"--s2", "s2"},             {"--cells", "cells_per_side"},
        {"--horizon", "horizon"},   {"--steps", "n_steps"},
        {"--stepping", "stepping"}, {"--initial", "initial"},
        {"--mobility", "mobility"}, {"--timeseries", "timeseries"},
        {"--init-seed", "init_seed"}};
    auto sugar_values = std::make_shared<std::map<std::string, std::string>>();
    for (const auto& [flag, key] : sugar) {
        run_cmd->add_option_function<std::string>(
            flag, [sugar_values, key = key](const std::string& v) { (*sugar_values)[key] = v; },
            "sets " + key);
    }
    bool flag_auto_s1 = false, flag_auto_s2 = false, flag_strict = false, flag_binary = false;
    run_cmd->add_flag("--auto-s1", flag_auto_s1, "resolve s1 from the mobility bound");
    run_cmd->add_flag("--auto-s2", flag_auto_s2, "resolve s2 from the unconditional bound");
    run_cmd->add_flag("--strict-mbp", flag_strict, "exit 4 when the bound is violated");
    run_cmd->add_flag("--binary", flag_binary, "write raw float64 sidecars next to snapshots");

    // converge
    auto* conv_cmd = app.add_subcommand("converge", "temporal convergence ladder");
    std::string conv_mobility = "constant", conv_grid = "uniform", conv_out;
    std::vector<int> conv_ladder;
    int conv_cells = 256;
    double conv_eps = 0.01, conv_s1 = 2.0, conv_s2 = 2.0, conv_horizon = 1.0;
    std::uint64_t conv_seed = 2024;
    conv_cmd->add_option("--mobility", conv_mobility, "constant | degenerate")
        ->check(CLI::IsMember({"constant", "degenerate"}));
    conv_cmd->add_option("--grid", conv_grid, "uniform | perturbed")
        ->check(CLI::IsMember({"uniform", "perturbed"}));
    conv_cmd->add_option("--ladder", conv_ladder, "step counts, e.g. --ladder 10 20 40 80 160");
    conv_cmd->add_option("--cells", conv_cells, "cells per side");
    conv_cmd->add_option("--eps", conv_eps, "interface width");
    conv_cmd->add_option("--s1", conv_s1, "first stabilizer");
    conv_cmd->add_option("--s2", conv_s2, "second stabilizer");
    conv_cmd->add_option("--horizon", conv_horizon, "terminal time");
    conv_cmd->add_option("--mesh-seed", conv_seed, "seed for perturbed meshes");
    conv_cmd->add_option("-o,--out", conv_out, "write the table as CSV");

    // coarsen
    auto* coarsen_cmd = app.add_subcommand("coarsen", "degenerate-mobility grain coarsening");
    double co_tau = 2.0, co_s2 = 0.0, co_tau_min = 1e-5, co_tau_max = 0.1, co_alpha = 1e5;
    double co_horizon = 100.0, co_snap_every = 0.0;
    bool co_unstable = false, co_conditional = false, co_adaptive = false;
    int co_cells = 256;
    std::uint64_t co_seed = 42;
    std::string co_out, co_snap_prefix;
    coarsen_cmd->add_option("--tau", co_tau, "uniform step size");
    auto* co_s2_opt = coarsen_cmd->add_option("--s2", co_s2, "second stabilizer (default: unconditional bound)");
    coarsen_cmd->add_flag("--conditional", co_conditional, "run with s2 = 0");
    coarsen_cmd->add_flag("--unstable", co_unstable, "blow-up demonstration: s2 = 0, tau = 2");
    coarsen_cmd->add_flag("--adaptive", co_adaptive, "energy-variation adaptive stepping");
    coarsen_cmd->add_option("--tau-min", co_tau_min, "adaptive floor");
    coarsen_cmd->add_option("--tau-max", co_tau_max, "adaptive ceiling");
    coarsen_cmd->add_option("--alpha", co_alpha, "adaptive sensitivity");
    coarsen_cmd->add_option("--horizon", co_horizon, "terminal time");
    coarsen_cmd->add_option("--cells", co_cells, "cells per side");
    coarsen_cmd->add_option("--seed", co_seed, "initial-data seed");
    coarsen_cmd->add_option("-o,--out", co_out, "time-series CSV path");
    coarsen_cmd->add_option("--snapshot-prefix", co_snap_prefix, "field snapshot path prefix");
    coarsen_cmd->add_option("--snapshot-every", co_snap_every, "snapshot cadence (sim time)");

    // bubble
    auto* bubble_cmd = app.add_subcommand("bubble", "shrinking bubble with the radius law");
    int bu_cells = 256;
    double bu_eps = 0.01, bu_radius = 0.2, bu_horizon = 220.0, bu_sample = 1.0;
    double bu_tau_min = 1e-5, bu_tau_max = 0.01, bu_alpha = 1e5;
    std::string bu_out, bu_timeseries;
    bubble_cmd->add_option("--cells", bu_cells, "cells per side");
    bubble_cmd->add_option("--eps", bu_eps, "interface width");
    bubble_cmd->add_option("--radius", bu_radius, "initial bubble radius");
    bubble_cmd->add_option("--horizon", bu_horizon, "terminal time");
    bubble_cmd->add_option("--sample-every", bu_sample, "radius sampling cadence");
    bubble_cmd->add_option("--tau-min", bu_tau_min, "adaptive floor");
    bubble_cmd->add_option("--tau-max", bu_tau_max, "adaptive ceiling");
    bubble_cmd->add_option("--alpha", bu_alpha, "adaptive sensitivity");
    bubble_cmd->add_option("-o,--out", bu_out, "radius series CSV path");
    bubble_cmd->add_option("--timeseries", bu_timeseries, "monitor time-series CSV path");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "dense ground-truth verification suite");
    int ve_trials = 50;
    std::uint64_t ve_seed = 7;
    verify_cmd->add_option("--trials", ve_trials, "random trials per check");
    verify_cmd->add_option("--seed", ve_seed, "random seed");

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "print stabilizer and step-size bounds");
    std::string bo_mobility = "constant";
    double bo_scale = 1.0, bo_eps = 0.01, bo_side = 1.0, bo_s1 = 0.0;
    int bo_cells = 256;
    bounds_cmd->add_option("--mobility", bo_mobility, "constant | degenerate")
        ->check(CLI::IsMember({"constant", "degenerate"}));
    bounds_cmd->add_option("--mobility-scale", bo_scale, "scale for the constant mobility");
    bounds_cmd->add_option("--eps", bo_eps, "interface width");
    bounds_cmd->add_option("--cells", bo_cells, "cells per side");
    bounds_cmd->add_option("--side", bo_side, "domain side length");
    auto* bo_s1_opt = bounds_cmd->add_option("--s1", bo_s1, "evaluate with this s1 instead of the bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (run_cmd->parsed()) {
        for (const auto& [key, value] : *sugar_values) sets.push_back(key + "=" + value);
        if (flag_auto_s1) sets.push_back("auto_s1=true");
        if (flag_auto_s2) sets.push_back("auto_s2=true");
        if (flag_strict) sets.push_back("strict_mbp=true");
        if (flag_binary) sets.push_back("binary_snapshots=true");
        return guarded([&] { return cmd_run(config_path, sets); });
    }
    if (conv_cmd->parsed())
        return guarded([&] {
            return cmd_converge(conv_mobility, conv_grid, conv_ladder, conv_cells, conv_eps,
                                conv_s1, conv_s2, conv_horizon, conv_seed, conv_out);
        });
    if (coarsen_cmd->parsed())
        return guarded([&] {
            return cmd_coarsen(co_tau, co_unstable, co_conditional, co_s2, co_s2_opt->count() > 0,
                               co_adaptive, co_tau_min, co_tau_max, co_alpha, co_horizon, co_cells,
                               co_seed, co_out, co_snap_prefix, co_snap_every);
        });
    if (bubble_cmd->parsed())
        return guarded([&] {
            return cmd_bubble(bu_cells, bu_eps, bu_radius, bu_horizon, bu_sample, bu_tau_min,
                              bu_tau_max, bu_alpha, bu_out, bu_timeseries);
        });
    if (verify_cmd->parsed()) return guarded([&] { return cmd_verify(ve_trials, ve_seed); });
    if (bounds_cmd->parsed())
        return guarded([&] {
            return cmd_bounds(bo_mobility, bo_scale, bo_eps, bo_cells, bo_side, bo_s1,
                              bo_s1_opt->count() > 0);
        });
    return 0;
}

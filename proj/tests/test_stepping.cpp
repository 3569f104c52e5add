#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <thread>

#include "mbpcn/oracle.hpp"
#include "mbpcn/splitmix64.hpp"
#include "mbpcn/stepping.hpp"

using namespace mbpcn;

TEST_CASE("splitmix64 reference stream") {
    // fixed update/output function; values cross-checked against an
    // independent implementation
    SplitMix64 a(1234567);
    CHECK(a.next() == 6457827717110365317ULL);
    CHECK(a.next() == 3203168211198807973ULL);
    CHECK(a.next() == 9817491932198370423ULL);
    SplitMix64 b(0);
    CHECK(b.next() == 0xe220a8397b1dcdafULL);
    CHECK(b.next() == 0x6e789e6aa1b965f4ULL);
    SplitMix64 c(42);
    CHECK(c.next_unit() == doctest::Approx(0.7415648787718233).epsilon(1e-16));
    for (int k = 0; k < 1000; ++k) {
        const double u = c.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double s = c.next_symmetric();
        CHECK(s >= -1.0);
        CHECK(s < 1.0);
    }
}

TEST_CASE("uniform time grid") {
    const TimeGrid grid = TimeGrid::uniform(2.0, 8);
    CHECK(grid.step_sizes.size() == 8);
    for (double tau : grid.step_sizes) CHECK(tau == 0.25);
    CHECK(grid.horizon() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(grid.max_ratio() == 1.0);
    CHECK_THROWS_AS(TimeGrid::uniform(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::uniform(1.0, 0), std::invalid_argument);
}

TEST_CASE("perturbed mesh") {
    SUBCASE("zero amplitude gives the uniform grid exactly") {
        const TimeGrid grid = perturbed_mesh(1.0, 10, 0.0, 99);
        for (double tau : grid.step_sizes) CHECK(tau == 0.1);
    }
    SUBCASE("deterministic for a fixed seed") {
        const TimeGrid a = perturbed_mesh(1.0, 25, 0.4, 7);
        const TimeGrid b = perturbed_mesh(1.0, 25, 0.4, 7);
        REQUIRE(a.step_sizes.size() == b.step_sizes.size());
        for (std::size_t k = 0; k < a.step_sizes.size(); ++k)
            CHECK(a.step_sizes[k] == b.step_sizes[k]);
        const TimeGrid c = perturbed_mesh(1.0, 25, 0.4, 8);
        bool differs = false;
        for (std::size_t k = 0; k < a.step_sizes.size(); ++k)
            differs = differs || (a.step_sizes[k] != c.step_sizes[k]);
        CHECK(differs);
    }
    SUBCASE("step ratios stay inside the perturbation envelope") {
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            const TimeGrid grid = perturbed_mesh(1.0, 10, 0.4, seed);
            CHECK(std::fabs(grid.horizon() - 1.0) <= 1e-12);
            for (std::size_t k = 1; k < grid.step_sizes.size(); ++k) {
                const double ratio = grid.step_sizes[k] / grid.step_sizes[k - 1];
                CHECK(ratio >= 3.0 / 7.0 - 1e-12);
                CHECK(ratio <= 7.0 / 3.0 + 1e-12);
            }
            for (double tau : grid.step_sizes) CHECK(tau > 0.0);
        }
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(perturbed_mesh(1.0, 10, 1.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(perturbed_mesh(1.0, 10, -0.1, 1), std::invalid_argument);
        CHECK_THROWS_AS(perturbed_mesh(1.0, 0, 0.4, 1), std::invalid_argument);
    }
}

TEST_CASE("discrete energy") {
    const Domain2D dom(1.0, 8);
    CHECK(discrete_energy(CellField(dom, 1.0), 0.1) == 0.0);
    CHECK(discrete_energy(CellField(dom, -1.0), 0.1) == 0.0);
    // F(0) = 1/4 over the unit area
    CHECK(discrete_energy(CellField(dom), 0.1) == doctest::Approx(0.25).epsilon(1e-14));

    // random field against the quadratic-form expression through the dense assembly
    SplitMix64 rng(51);
    for (int m = 2; m <= 8; ++m) {
        const Domain2D d(1.0, m);
        CellField u(d);
        for (double& v : u.data()) v = rng.next_symmetric();
        const double eps = 0.05 + rng.next_unit();
        const DenseMatrix dh = assemble_dh(m, d.spacing);
        const auto dv = dh.multiply(u.data());
        double quad = 0.0, pot = 0.0;
        for (std::size_t k = 0; k < dv.size(); ++k) {
            quad += u.data()[k] * dv[k];
            pot += PotentialModel::value(u.data()[k]);
        }
        const double h2 = d.spacing * d.spacing;
        const double want = -0.5 * h2 * eps * eps * quad + h2 * pot;
        CHECK(discrete_energy(u, eps) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("adaptive step formula") {
    const AdaptiveParams ap{1e-5, 0.1, 1e5};
    CHECK(adaptive_tau(ap, 0.0) == 0.1);
    CHECK(adaptive_tau(ap, 0.01) == doctest::Approx(0.1 / std::sqrt(11.0)).epsilon(1e-14));
    CHECK(adaptive_tau(ap, 1e9) == 1e-5);
}

TEST_CASE("run from the zero state stays at the metastable point") {
    const Domain2D dom(1.0, 16);
    SchemeParams p;
    p.eps = 0.05;
    p.s1 = 2.0;
    p.s2 = 2.0;
    const RunRecord rec = run(CellField(dom), TimeGrid::uniform(1.0, 10), p, MobilityModel::constant());
    CHECK(rec.rows.size() == 11); // initial row plus one per step
    for (const auto& row : rec.rows) {
        CHECK(row.sup_norm == 0.0);
        CHECK(row.energy == doctest::Approx(0.25).epsilon(1e-13));
        CHECK(row.mbp_margin == 1.0);
    }
    CHECK(!rec.blew_up);
}

TEST_CASE("run records consistent monitors") {
    const Domain2D dom(1.0, 16);
    SplitMix64 rng(52);
    CellField initial(dom);
    for (double& v : initial.data()) v = 0.5 * rng.next_symmetric();
    SchemeParams p;
    p.eps = 0.05;
    p.s1 = 2.0;
    p.s2 = s2_lower_bound(2.0, 1.0, p.eps, dom.spacing);
    const TimeGrid grid = perturbed_mesh(0.5, 12, 0.4, 3);
    const RunRecord rec = run(initial, grid, p, MobilityModel::constant());

    REQUIRE(rec.rows.size() == 13);
    CHECK(rec.rows[0].t == 0.0);
    CHECK(rec.rows[0].energy == doctest::Approx(discrete_energy(initial, p.eps)));
    double t = 0.0;
    for (std::size_t n = 1; n < rec.rows.size(); ++n) {
        t += grid.step_sizes[n - 1];
        const auto& row = rec.rows[n];
        CHECK(row.step == static_cast<long>(n));
        CHECK(row.t == doctest::Approx(t).epsilon(1e-14));
        CHECK(row.tau == grid.step_sizes[n - 1]);
        CHECK(std::isfinite(row.energy));
        CHECK(row.mbp_margin == doctest::Approx(1.0 - row.sup_norm));
        CHECK(row.pred_iters > 0);
        CHECK(row.corr_iters > 0);
    }
    CHECK(norm_sup(rec.terminal) == rec.rows.back().sup_norm);
}

TEST_CASE("adaptive run floors, caps, and lands on the horizon") {
    const Domain2D dom(1.0, 16);
    SplitMix64 rng(53);
    CellField initial(dom);
    for (double& v : initial.data()) v = 0.1 * rng.next_symmetric();
    SchemeParams p;
    p.eps = 0.05;
    p.s1 = 2.0;
    p.s2 = s2_lower_bound(2.0, 1.0, p.eps, dom.spacing);
    const AdaptiveParams ap{1e-3, 0.05, 1e4};
    const double horizon = 0.4;
    const RunRecord rec = run_adaptive(initial, horizon, ap, p, MobilityModel::constant());

    CHECK(!rec.blew_up);
    REQUIRE(rec.rows.size() >= 3);
    CHECK(rec.rows[1].tau == ap.tau_min); // first step starts at the floor
    for (std::size_t n = 1; n + 1 < rec.rows.size(); ++n) {
        CHECK(rec.rows[n].tau >= ap.tau_min - 1e-15);
        CHECK(rec.rows[n].tau <= ap.tau_max + 1e-15);
    }
    CHECK(rec.rows.back().tau <= ap.tau_max + 1e-15); // final step may clip below the floor
    CHECK(std::fabs(rec.rows.back().t - horizon) <= 1e-12 * horizon);
}

TEST_CASE("flat energy drives the step to the ceiling") {
    const Domain2D dom(1.0, 8);
    SchemeParams p;
    p.eps = 0.05;
    p.s1 = 2.0;
    p.s2 = 1.0;
    const AdaptiveParams ap{1e-4, 0.25, 1e5};
    // the zero state keeps the energy exactly flat
    const RunRecord rec = run_adaptive(CellField(dom), 1.0, ap, p, MobilityModel::constant());
    REQUIRE(rec.rows.size() >= 3);
    CHECK(rec.rows[1].tau == ap.tau_min);
    CHECK(rec.rows[2].tau == ap.tau_max);
}

TEST_CASE("blow-up is recorded, not raised") {
    const Domain2D dom(1.0, 16);
    SchemeParams p;
    p.eps = dom.spacing; // interface width at the grid scale
    p.s1 = 0.0;
    p.s2 = 0.0;
    // start far outside the admissible band; the degenerate mobility is
    // negative there and the iteration amplifies without bound
    const CellField initial(dom, 2.0);
    const RunRecord rec =
        run(initial, TimeGrid::uniform(100.0, 50), p, MobilityModel::degenerate());
    CHECK(rec.blew_up);
    CHECK(rec.blow_up_step >= 1);
    CHECK(rec.blow_up_time <= 100.0);
    for (const auto& row : rec.rows) CHECK(std::isfinite(row.energy));
}

TEST_CASE("non-finite initial states are rejected") {
    const Domain2D dom(1.0, 4);
    CellField bad(dom);
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    SchemeParams p;
    CHECK_THROWS_AS(run(bad, TimeGrid::uniform(1.0, 2), p, MobilityModel::constant()),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_adaptive(bad, 1.0, {1e-3, 0.1, 1e4}, p, MobilityModel::constant()),
                    std::invalid_argument);
}

TEST_CASE("solver failure on a sane state propagates") {
    const Domain2D dom(1.0, 16);
    SplitMix64 rng(54);
    CellField initial(dom);
    for (double& v : initial.data()) v = 0.5 * rng.next_symmetric();
    SchemeParams p;
    p.eps = 0.5;
    p.s1 = 2.0;
    p.s2 = 0.0;
    p.solver.max_iters = 1;
    CHECK_THROWS_AS(run(initial, TimeGrid::uniform(1.0, 4), p, MobilityModel::constant()),
                    SolveFailure);
}

TEST_CASE("concurrent trajectories reproduce the serial results") {
    const Domain2D dom(1.0, 24);
    SchemeParams p;
    p.eps = 0.05;
    p.s1 = 2.0;
    p.s2 = s2_lower_bound(2.0, 1.0, p.eps, dom.spacing);
    const auto model = MobilityModel::constant();
    const TimeGrid grid = TimeGrid::uniform(0.2, 8);

    auto make_initial = [&](std::uint64_t seed) {
        SplitMix64 rng(seed);
        CellField f(dom);
        for (double& v : f.data()) v = 0.5 * rng.next_symmetric();
        return f;
    };
    const RunRecord serial_a = run(make_initial(1), grid, p, model);
    const RunRecord serial_b = run(make_initial(2), grid, p, model);

    RunRecord par_a, par_b;
    std::thread ta([&] { par_a = run(make_initial(1), grid, p, model); });
    std::thread tb([&] { par_b = run(make_initial(2), grid, p, model); });
    ta.join();
    tb.join();

    REQUIRE(par_a.rows.size() == serial_a.rows.size());
    for (std::size_t k = 0; k < par_a.rows.size(); ++k) {
        CHECK(par_a.rows[k].energy == serial_a.rows[k].energy);
        CHECK(par_b.rows[k].energy == serial_b.rows[k].energy);
    }
    for (std::size_t k = 0; k < par_a.terminal.data().size(); ++k) {
        CHECK(par_a.terminal.data()[k] == serial_a.terminal.data()[k]);
        CHECK(par_b.terminal.data()[k] == serial_b.terminal.data()[k]);
    }
}

TEST_CASE("strict mode stops at the first violation") {
    const Domain2D dom(1.0, 16);
    SchemeParams p;
    p.eps = dom.spacing;
    p.s1 = 0.0; // deliberately below the stabilizer bound
    p.s2 = 0.0;
    SplitMix64 rng(55);
    CellField initial(dom);
    for (double& v : initial.data()) v = 0.99 * rng.next_symmetric();
    RunOptions opts;
    opts.stop_on_mbp_violation = true;
    const RunRecord rec =
        run(initial, TimeGrid::uniform(100.0, 50), p, MobilityModel::degenerate(), opts);
    // either the bound broke (strict stop) or it blew up outright
    CHECK((rec.stopped_on_mbp || rec.blew_up));
}

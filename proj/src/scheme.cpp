#include "mbpcn/scheme.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace mbpcn {

namespace {

void validate_step_inputs(const CellField& state, double tau) {
    if (state.empty()) throw std::invalid_argument("time step: state field is empty");
    if (!(tau > 0.0)) throw std::invalid_argument("time step: tau must be positive");
}

} // namespace

std::pair<CellField, SolveReport> bdf1_step(const CellField& state, double tau,
                                            const SchemeParams& params, const MobilityModel& model) {
    validate_step_inputs(state, tau);
    const double c = 1.0 / tau + params.s1;

    CellField lam;
    model.evaluate_field(state, lam);

    CellField rhs(state.domain());
    {
        const auto u = state.data();
        const auto mv = lam.data();
        auto b = rhs.data();
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double fu = mv[k] * (u[k] * u[k] * u[k] - u[k]);
            b[k] = c * u[k] - fu;
        }
    }

    HelmholtzOperator op(c, params.eps * params.eps, std::move(lam));
    return solve(op, rhs, params.solver);
}

StepOutput cn_step(const CellField& state, double tau, const SchemeParams& params,
                   const MobilityModel& model) {
    validate_step_inputs(state, tau);

    CellField half;
    SolveReport predictor_report;
    try {
        std::tie(half, predictor_report) = bdf1_step(state, 0.5 * tau, params, model);
    } catch (const SolveFailure& e) {
        throw SolveFailure("predictor " + e.context(), e.report());
    }

    CellField lam;
    model.evaluate_field(half, lam);

    const double c = 1.0 / tau + 0.5 * params.s1 + params.s2 * tau;
    const double q_shift = 1.0 / tau - 0.5 * params.s1 + params.s2 * tau;
    const double half_kappa = 0.5 * params.eps * params.eps;

    CellField rhs(state.domain());
    {
        CellField lap_state = laplacian(state);
        const auto u = state.data();
        const auto w = half.data();
        const auto mv = lam.data();
        const auto lp = lap_state.data();
        auto b = rhs.data();
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double f_half = mv[k] * (w[k] * w[k] * w[k] - w[k]);
            b[k] = q_shift * u[k] + half_kappa * mv[k] * lp[k] + params.s1 * w[k] - f_half;
        }
    }

    HelmholtzOperator op(c, half_kappa, std::move(lam));
    StepOutput out;
    out.predictor_report = predictor_report;
    try {
        auto [next, corrector_report] = solve(op, rhs, params.solver);
        out.next_state = std::move(next);
        out.corrector_report = corrector_report;
    } catch (const SolveFailure& e) {
        throw SolveFailure("corrector " + e.context(), e.report());
    }
    out.half_state = std::move(half);
    return out;
}

} // namespace mbpcn

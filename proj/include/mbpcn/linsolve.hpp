#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "mbpcn/grid.hpp"

namespace mbpcn {

// Matrix-free shifted diffusion operator  A u = c u - kappa * Lam .* lap(u),
// the left-hand side of every implicit solve. Lam holds the mobility frozen
// at the predictor or previous state.
class HelmholtzOperator {
public:
    HelmholtzOperator(double shift, double diffusion_scale, CellField mobility);

    double shift() const { return shift_; }
    double diffusion_scale() const { return diffusion_scale_; }
    const CellField& mobility() const { return mobility_; }
    const Domain2D& domain() const { return mobility_.domain(); }

    CellField apply(const CellField& u) const;
    void apply_into(const CellField& u, CellField& out) const;

private:
    double shift_;
    double diffusion_scale_;
    CellField mobility_;
};

struct SolverConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    int max_iters = 0; // 0 = 10 * M^2
};

enum class SolveMethod { SymmetrizedCG, StabilizedBiCG };

std::string to_string(SolveMethod m);

struct SolveReport {
    int iterations = 0;
    double final_relative_residual = 0.0;
    SolveMethod method_used = SolveMethod::SymmetrizedCG;
};

class SolveFailure : public std::runtime_error {
public:
    SolveFailure(std::string context, SolveReport report);
    const SolveReport& report() const { return report_; }
    const std::string& context() const { return context_; }

private:
    std::string context_;
    SolveReport report_;
};

// Solve A x = rhs to ||A x - rhs||_2 <= rel_tol ||rhs||_2 + abs_tol.
//
// When the mobility is strictly positive the system is symmetrized by the
// mobility inverse, (c Lam^-1 - kappa D) x = Lam^-1 rhs, which is SPD and
// solved by Jacobi-preconditioned conjugate gradients. Mobilities touching
// zero (or negative, once the bound is lost) take a Jacobi-preconditioned
// BiCGStab on the original system instead.
//
// Every solve starts from the zero vector, so results are independent of
// trajectory history. Throws SolveFailure when the iteration budget runs out
// or the iteration stalls.
std::pair<CellField, SolveReport> solve(const HelmholtzOperator& op, const CellField& rhs,
                                        const SolverConfig& cfg);

} // namespace mbpcn

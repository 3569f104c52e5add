#pragma once

#include <span>
#include <vector>

#include "mbpcn/grid.hpp"
#include "mbpcn/mobility.hpp"
#include "mbpcn/scheme.hpp"

namespace mbpcn {

// Dense ground truth for desk-scale verification. Everything here is built
// explicitly and solved directly so the matrix-free kernels have an
// independent reference. Dimensions are hard-capped at 64^2.
class DenseMatrix {
public:
    explicit DenseMatrix(int n);

    int size() const { return n_; }
    double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }

    std::vector<double> multiply(std::span<const double> x) const;
    double row_sum(int r) const;
    double min_entry() const;
    double max_abs_asymmetry() const; // max |A - A^T| entry

private:
    int n_;
    std::vector<double> a_;
};

// 1D Neumann difference matrix: tridiagonal, diagonal (-1,-2,...,-2,-1)/h^2,
// off-diagonals 1/h^2. Rows sum to zero.
DenseMatrix assemble_gh(int m, double h);

// 2D Kronecker sum I (x) G + G (x) I on the row-major cell ordering.
DenseMatrix assemble_dh(int m, double h);

// c I - kappa Lam D, the dense counterpart of HelmholtzOperator.
DenseMatrix assemble_helmholtz(double shift, double diffusion_scale, const CellField& mobility);

// Transfer matrix of the corrector right-hand side:
//   Q = (1/tau - S1/2 + S2 tau) I + (eps^2/2) Lam D
// Entrywise nonnegativity of Q is what makes the scheme bound-preserving.
DenseMatrix q_matrix(double tau, const SchemeParams& params, const CellField& mobility);

struct QMatrixReport {
    double min_entry = 0.0;
    double expected_row_sum = 0.0; // 1/tau - S1/2 + S2 tau
    double max_row_sum_deviation = 0.0;
    bool nonnegative = false;  // min_entry >= -1e-14
    bool row_sums_ok = false;  // deviations within 1e-12
};

QMatrixReport check_q_matrix(const DenseMatrix& q, double tau, const SchemeParams& params);

// LU with partial pivoting; throws on a numerically singular pivot.
std::vector<double> lu_solve(DenseMatrix a, std::vector<double> b);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(DenseMatrix a);

enum class StepKind { Bdf1, CrankNicolson };

// Reference step through assembled matrices and a dense direct solve.
CellField dense_step(const CellField& state, double tau, const SchemeParams& params,
                     const MobilityModel& model, StepKind which);

} // namespace mbpcn

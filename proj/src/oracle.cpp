#include "mbpcn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mbpcn {

namespace {
constexpr int kMaxDim = 64 * 64;
}

DenseMatrix::DenseMatrix(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("DenseMatrix: dimension must be positive");
    if (n > kMaxDim) throw std::invalid_argument("DenseMatrix: dimension exceeds the 64^2 cap");
    a_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r) {
        double s = 0.0;
        for (int c = 0; c < n_; ++c) s += (*this)(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

double DenseMatrix::row_sum(int r) const {
    double s = 0.0;
    for (int c = 0; c < n_; ++c) s += (*this)(r, c);
    return s;
}

double DenseMatrix::min_entry() const {
    return *std::min_element(a_.begin(), a_.end());
}

double DenseMatrix::max_abs_asymmetry() const {
    double m = 0.0;
    for (int r = 0; r < n_; ++r)
        for (int c = r + 1; c < n_; ++c)
            m = std::max(m, std::fabs((*this)(r, c) - (*this)(c, r)));
    return m;
}

DenseMatrix assemble_gh(int m, double h) {
    if (m < 2) throw std::invalid_argument("assemble_gh: need m >= 2");
    if (m > 64) throw std::invalid_argument("assemble_gh: m exceeds the dense-oracle cap of 64");
    if (!(h > 0.0)) throw std::invalid_argument("assemble_gh: spacing must be positive");
    DenseMatrix g(m);
    const double w = 1.0 / (h * h);
    for (int i = 0; i < m; ++i) {
        const bool interior = (i > 0 && i + 1 < m);
        g(i, i) = interior ? -2.0 * w : -1.0 * w;
        if (i > 0) g(i, i - 1) = w;
        if (i + 1 < m) g(i, i + 1) = w;
    }
    return g;
}

DenseMatrix assemble_dh(int m, double h) {
    const DenseMatrix g = assemble_gh(m, h);
    DenseMatrix d(m * m);
    // I (x) G: couples the fast (j) index inside each row block
    for (int i = 0; i < m; ++i)
        for (int j1 = 0; j1 < m; ++j1)
            for (int j2 = 0; j2 < m; ++j2)
                d(i * m + j1, i * m + j2) += g(j1, j2);
    // G (x) I: couples the slow (i) index across blocks
    for (int j = 0; j < m; ++j)
        for (int i1 = 0; i1 < m; ++i1)
            for (int i2 = 0; i2 < m; ++i2)
                d(i1 * m + j, i2 * m + j) += g(i1, i2);
    return d;
}

DenseMatrix assemble_helmholtz(double shift, double diffusion_scale, const CellField& mobility) {
    const int m = mobility.m();
    const DenseMatrix d = assemble_dh(m, mobility.h());
    const auto lam = mobility.data();
    DenseMatrix a(m * m);
    for (int r = 0; r < m * m; ++r) {
        for (int c = 0; c < m * m; ++c) a(r, c) = -diffusion_scale * lam[r] * d(r, c);
        a(r, r) += shift;
    }
    return a;
}

DenseMatrix q_matrix(double tau, const SchemeParams& params, const CellField& mobility) {
    if (!(tau > 0.0)) throw std::invalid_argument("q_matrix: tau must be positive");
    for (double v : mobility.data())
        if (v < 0.0) throw std::invalid_argument("q_matrix: mobility values must be nonnegative");
    const int m = mobility.m();
    const DenseMatrix d = assemble_dh(m, mobility.h());
    const auto lam = mobility.data();
    const double shift = 1.0 / tau - 0.5 * params.s1 + params.s2 * tau;
    const double half_kappa = 0.5 * params.eps * params.eps;
    DenseMatrix q(m * m);
    for (int r = 0; r < m * m; ++r) {
        for (int c = 0; c < m * m; ++c) q(r, c) = half_kappa * lam[r] * d(r, c);
        q(r, r) += shift;
    }
    return q;
}

QMatrixReport check_q_matrix(const DenseMatrix& q, double tau, const SchemeParams& params) {
    QMatrixReport rep;
    rep.expected_row_sum = 1.0 / tau - 0.5 * params.s1 + params.s2 * tau;
    rep.min_entry = q.min_entry();
    for (int r = 0; r < q.size(); ++r)
        rep.max_row_sum_deviation =
            std::max(rep.max_row_sum_deviation, std::fabs(q.row_sum(r) - rep.expected_row_sum));
    rep.nonnegative = rep.min_entry >= -1e-14;
    rep.row_sums_ok = rep.max_row_sum_deviation <= 1e-12 * std::max(1.0, std::fabs(rep.expected_row_sum));
    return rep;
}

std::vector<double> lu_solve(DenseMatrix a, std::vector<double> b) {
    const int n = a.size();
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("lu_solve: size mismatch");
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double v = std::fabs(a(r, k));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) throw std::runtime_error("lu_solve: singular matrix");
        if (piv != k) {
            for (int c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
            std::swap(b[k], b[piv]);
        }
        for (int r = k + 1; r < n; ++r) {
            const double f = a(r, k) / a(k, k);
            a(r, k) = f;
            for (int c = k + 1; c < n; ++c) a(r, c) -= f * a(k, c);
            b[r] -= f * b[k];
        }
    }
    // back substitution
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
        x[r] = s / a(r, r);
    }
    return x;
}

std::vector<double> symmetric_eigenvalues(DenseMatrix a) {
    const int n = a.size();
    // cyclic Jacobi sweeps; plenty for the desk-scale symmetric checks
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

namespace {

std::vector<double> reaction_vector(const CellField& mobility, const CellField& state) {
    const auto lam = mobility.data();
    const auto u = state.data();
    std::vector<double> f(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) f[k] = lam[k] * (u[k] * u[k] * u[k] - u[k]);
    return f;
}

CellField dense_bdf1(const CellField& state, double tau, const SchemeParams& params,
                     const MobilityModel& model) {
    CellField lam;
    model.evaluate_field(state, lam);
    const double c = 1.0 / tau + params.s1;
    const DenseMatrix a = assemble_helmholtz(c, params.eps * params.eps, lam);
    const auto u = state.data();
    std::vector<double> rhs = reaction_vector(lam, state);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = c * u[k] - rhs[k];
    const std::vector<double> x = lu_solve(a, std::move(rhs));
    CellField out(state.domain());
    std::copy(x.begin(), x.end(), out.data().begin());
    return out;
}

} // namespace

CellField dense_step(const CellField& state, double tau, const SchemeParams& params,
                     const MobilityModel& model, StepKind which) {
    if (state.domain().cell_count() > kMaxDim)
        throw std::invalid_argument("dense_step: grid exceeds the dense-oracle cap");
    if (which == StepKind::Bdf1) return dense_bdf1(state, tau, params, model);

    const CellField half = dense_bdf1(state, 0.5 * tau, params, model);
    CellField lam;
    model.evaluate_field(half, lam);
    const double c = 1.0 / tau + 0.5 * params.s1 + params.s2 * tau;
    const DenseMatrix a = assemble_helmholtz(c, 0.5 * params.eps * params.eps, lam);
    const DenseMatrix q = q_matrix(tau, params, lam);

    std::vector<double> rhs = q.multiply(state.data());
    const std::vector<double> f_half = reaction_vector(lam, half);
    const auto w = half.data();
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += params.s1 * w[k] - f_half[k];

    const std::vector<double> x = lu_solve(a, std::move(rhs));
    CellField out(state.domain());
    std::copy(x.begin(), x.end(), out.data().begin());
    return out;
}

} // namespace mbpcn

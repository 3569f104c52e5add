#include "mbpcn/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace mbpcn {

namespace {

constexpr std::size_t kDotBlock = 4096;

// fixed-block accumulation keeps reductions independent of the thread count
double dot(std::span<const double> a, std::span<const double> b) {
    double total = 0.0;
    for (std::size_t start = 0; start < a.size(); start += kDotBlock) {
        const std::size_t end = std::min(start + kDotBlock, a.size());
        double s = 0.0;
        for (std::size_t k = start; k < end; ++k) s += a[k] * b[k];
        total += s;
    }
    return total;
}

double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline int cell_degree(int i, int j, int m) {
    return (i > 0) + (i + 1 < m) + (j > 0) + (j + 1 < m);
}

// Neumann five-point row kernel: out = lap(u) restricted to row i, with the
// vertical neighbors passed in (null on the boundary rows). Branch-free in
// the inner loops so it vectorizes.
inline void lap_row(const double* row, const double* up, const double* dn, int m, double inv_h2,
                    double* out) {
    if (up && dn) {
        for (int j = 0; j < m; ++j) out[j] = up[j] + dn[j] - 2.0 * row[j];
    } else if (dn) {
        for (int j = 0; j < m; ++j) out[j] = dn[j] - row[j];
    } else {
        for (int j = 0; j < m; ++j) out[j] = up[j] - row[j];
    }
    out[0] += row[1] - row[0];
    for (int j = 1; j + 1 < m; ++j) out[j] += row[j - 1] + row[j + 1] - 2.0 * row[j];
    out[m - 1] += row[m - 2] - row[m - 1];
    for (int j = 0; j < m; ++j) out[j] *= inv_h2;
}

int resolve_max_iters(const SolverConfig& cfg, int m) {
    return cfg.max_iters > 0 ? cfg.max_iters : 10 * m * m;
}

// Reused scratch fields; a fresh 512 KiB allocation per vector per solve costs
// more in page faults than the solve itself on production grids. Contents are
// garbage on entry; every consumer overwrites before reading.
struct SolveWorkspace {
    CellField r, z, p, q, work, rhat, s, t, phat, shat, v;
    std::vector<double> inv_lam, inv_diag;

    void bind(const Domain2D& dom) {
        if (r.domain() == dom) return;
        r = z = p = q = work = rhat = s = t = phat = shat = v = CellField(dom);
        inv_lam.assign(static_cast<std::size_t>(dom.cell_count()), 0.0);
        inv_diag.assign(static_cast<std::size_t>(dom.cell_count()), 0.0);
    }
};

SolveWorkspace& workspace(const Domain2D& dom) {
    static thread_local SolveWorkspace ws;
    ws.bind(dom);
    return ws;
}

double true_residual_norm(const HelmholtzOperator& op, const CellField& x, const CellField& rhs,
                          CellField& work) {
    op.apply_into(x, work);
    const auto r = rhs.data();
    auto w = work.data();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = r[k] - w[k];
    return nrm2(work.data());
}

struct CgResult {
    CellField x;
    SolveReport report;
    bool converged = false;
};

// CG on the mobility-symmetrized system (c Lam^-1 - kappa D) x = Lam^-1 rhs.
// Convergence is monitored on the residual of the ORIGINAL system, which is
// Lam .* (transformed residual) and rides along the fused update pass.
CgResult solve_symmetrized_cg(const HelmholtzOperator& op, const CellField& rhs,
                              const SolverConfig& cfg, double target) {
    const Domain2D dom = op.domain();
    const int m = dom.cells_per_side;
    const double h = dom.spacing;
    const double inv_h2 = 1.0 / (h * h);
    const double c = op.shift();
    const double kappa = op.diffusion_scale();
    const auto lam = op.mobility().data();
    const int max_iters = resolve_max_iters(cfg, m);

    CgResult out{CellField(dom), {0, 0.0, SolveMethod::SymmetrizedCG}, false};
    SolveWorkspace& ws = workspace(dom);
    CellField& r_field = ws.r;
    CellField& z_field = ws.z;
    CellField& p_field = ws.p;
    CellField& q_field = ws.q;
    CellField& work = ws.work;
    auto r = r_field.data();
    auto z = z_field.data();
    auto p = p_field.data();
    auto q = q_field.data();
    auto x = out.x.data();
    const auto b = rhs.data();
    const std::size_t n = b.size();

    const double rhs_norm = nrm2(b);
    if (rhs_norm <= target) {
        out.converged = true;
        return out; // x = 0 already meets the contract
    }

    // reciprocals once per solve: the apply path multiplies instead of divides
    std::vector<double>& inv_lam = ws.inv_lam;
    std::vector<double>& inv_diag = ws.inv_diag;
    for (std::size_t k = 0; k < n; ++k) inv_lam[k] = 1.0 / lam[k];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * m + j;
            inv_diag[k] = 1.0 / (c * inv_lam[k] + kappa * cell_degree(i, j, m) * inv_h2);
        }

    auto transformed_apply = [&](const CellField& in, CellField& result) {
        const auto src = in.data();
        auto dst = result.data();
#pragma omp parallel for schedule(static) if (m >= 128)
        for (int i = 0; i < m; ++i) {
            const double* row = src.data() + static_cast<std::size_t>(i) * m;
            const double* up = i > 0 ? row - m : nullptr;
            const double* dn = i + 1 < m ? row + m : nullptr;
            double* o = dst.data() + static_cast<std::size_t>(i) * m;
            lap_row(row, up, dn, m, inv_h2, o);
            const double* il = inv_lam.data() + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) o[j] = c * row[j] * il[j] - kappa * o[j];
        }
    };

    auto restart = [&]() {
        // r := Lam^-1 rhs - B x
        transformed_apply(out.x, q_field);
        for (std::size_t k = 0; k < n; ++k) r[k] = b[k] * inv_lam[k] - q[k];
        for (std::size_t k = 0; k < n; ++k) z[k] = r[k] * inv_diag[k];
        std::copy(z.begin(), z.end(), p.begin());
        return dot(r, z);
    };

    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] * inv_lam[k];
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] * inv_diag[k];
    std::copy(z.begin(), z.end(), p.begin());
    double rho = dot(r, z);

    for (int it = 1; it <= max_iters; ++it) {
        out.report.iterations = it;
        transformed_apply(p_field, q_field);
        const double pq = dot(p, q);
        if (!(pq > 0.0) || !std::isfinite(pq)) break; // SPD structure lost
        const double alpha = rho / pq;

        // fused: solution/residual update plus the original-system residual,
        // accumulated in fixed block order
        double res = 0.0;
        for (std::size_t start = 0; start < n; start += kDotBlock) {
            const std::size_t end = std::min(start + kDotBlock, n);
            double s = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                x[k] += alpha * p[k];
                r[k] -= alpha * q[k];
                const double orig = lam[k] * r[k];
                s += orig * orig;
            }
            res += s;
        }
        res = std::sqrt(res);
        if (!std::isfinite(res)) break;

        if (res <= target) {
            const double tres = true_residual_norm(op, out.x, rhs, work);
            out.report.final_relative_residual = tres / rhs_norm;
            if (tres <= target) {
                out.converged = true;
                return out;
            }
            rho = restart(); // recurrence drifted; rebuild from the true residual
            continue;
        }

        // fused preconditioner apply and rho update, fixed block order
        double rho_new = 0.0;
        for (std::size_t start = 0; start < n; start += kDotBlock) {
            const std::size_t end = std::min(start + kDotBlock, n);
            double s = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                z[k] = r[k] * inv_diag[k];
                s += r[k] * z[k];
            }
            rho_new += s;
        }
        const double beta = rho_new / rho;
        rho = rho_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }

    out.report.final_relative_residual = true_residual_norm(op, out.x, rhs, work) / rhs_norm;
    return out;
}

// BiCGStab on the original system; covers degenerate and sign-indefinite
// mobility diagonals where the symmetrization is unavailable.
CgResult solve_bicgstab(const HelmholtzOperator& op, const CellField& rhs,
                        const SolverConfig& cfg, double target) {
    const Domain2D dom = op.domain();
    const int m = dom.cells_per_side;
    const double h = dom.spacing;
    const double c = op.shift();
    const double kappa = op.diffusion_scale();
    const auto lam = op.mobility().data();
    const int max_iters = resolve_max_iters(cfg, m);

    CgResult out{CellField(dom), {0, 0.0, SolveMethod::StabilizedBiCG}, false};
    const auto b = rhs.data();
    const std::size_t n = b.size();
    const double rhs_norm = nrm2(b);
    if (rhs_norm <= target) {
        out.converged = true;
        return out;
    }

    SolveWorkspace& ws = workspace(dom);
    std::vector<double>& diag = ws.inv_diag; // reused storage, holds the diagonal itself here
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * m + j;
            double d = c + kappa * lam[k] * cell_degree(i, j, m) / (h * h);
            if (std::fabs(d) < 1e-300) d = 1.0;
            diag[k] = d;
        }

    CellField& r_field = ws.r;
    CellField& rhat_field = ws.rhat;
    CellField& p_field = ws.p;
    CellField& v_field = ws.v;
    CellField& s_field = ws.s;
    CellField& t_field = ws.t;
    CellField& phat_field = ws.phat;
    CellField& shat_field = ws.shat;
    CellField& work = ws.work;
    auto r = r_field.data();
    auto rhat = rhat_field.data();
    auto p = p_field.data();
    auto v = v_field.data();
    auto s = s_field.data();
    auto t = t_field.data();
    auto phat = phat_field.data();
    auto shat = shat_field.data();
    auto x = out.x.data();
    std::fill(p.begin(), p.end(), 0.0); // the first search direction reads p and v
    std::fill(v.begin(), v.end(), 0.0);

    std::copy(b.begin(), b.end(), r.begin());
    std::copy(b.begin(), b.end(), rhat.begin());
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    // stagnation guard: hopeless systems (sign-indefinite mobility during a
    // blow-up) otherwise burn the whole iteration budget
    double best_res = rhs_norm;
    int stalled = 0;
    auto stalled_out = [&](double res) {
        if (res < 0.5 * best_res) {
            best_res = res;
            stalled = 0;
            return false;
        }
        return ++stalled >= 200 && res > 10.0 * target;
    };

    auto finish_if_converged = [&]() {
        const double tres = true_residual_norm(op, out.x, rhs, work);
        out.report.final_relative_residual = tres / rhs_norm;
        if (tres <= target) {
            out.converged = true;
            return true;
        }
        // rebuild from the true residual and restart the Krylov process
        op.apply_into(out.x, work);
        for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - work.data()[k];
        std::copy(r.begin(), r.end(), rhat.begin());
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        rho = alpha = omega = 1.0;
        return false;
    };

    for (int it = 1; it <= max_iters; ++it) {
        out.report.iterations = it;
        const double rho_new = dot(rhat, r);
        if (!std::isfinite(rho_new) || rho_new == 0.0 || omega == 0.0) break;
        const double beta = (rho_new / rho) * (alpha / omega);
        for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
        for (std::size_t k = 0; k < n; ++k) phat[k] = p[k] / diag[k];
        op.apply_into(phat_field, v_field);
        const double rv = dot(rhat, v);
        if (!std::isfinite(rv) || rv == 0.0) break;
        alpha = rho_new / rv;
        for (std::size_t k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
        for (std::size_t k = 0; k < n; ++k) x[k] += alpha * phat[k];
        if (nrm2(s) <= target) {
            std::copy(s.begin(), s.end(), r.begin());
            if (finish_if_converged()) return out;
            rho = 1.0;
            continue;
        }
        for (std::size_t k = 0; k < n; ++k) shat[k] = s[k] / diag[k];
        op.apply_into(shat_field, t_field);
        const double tt = dot(t, t);
        const double ts = dot(t, s);
        if (!(tt > 0.0) || !std::isfinite(tt)) break;
        omega = ts / tt;
        for (std::size_t k = 0; k < n; ++k) x[k] += omega * shat[k];
        for (std::size_t k = 0; k < n; ++k) r[k] = s[k] - omega * t[k];
        rho = rho_new;
        const double res = nrm2(r);
        if (!std::isfinite(res)) break;
        if (res <= target) {
            if (finish_if_converged()) return out;
        } else if (stalled_out(res)) {
            break;
        }
    }

    out.report.final_relative_residual = true_residual_norm(op, out.x, rhs, work) / rhs_norm;
    return out;
}

} // namespace

HelmholtzOperator::HelmholtzOperator(double shift, double diffusion_scale, CellField mobility)
    : shift_(shift), diffusion_scale_(diffusion_scale), mobility_(std::move(mobility)) {
    if (!(shift_ > 0.0)) throw std::invalid_argument("HelmholtzOperator: shift must be positive");
    if (diffusion_scale_ < 0.0)
        throw std::invalid_argument("HelmholtzOperator: diffusion_scale must be nonnegative");
    if (mobility_.empty()) throw std::invalid_argument("HelmholtzOperator: mobility field is empty");
}

CellField HelmholtzOperator::apply(const CellField& u) const {
    CellField out(u.domain());
    apply_into(u, out);
    return out;
}

void HelmholtzOperator::apply_into(const CellField& u, CellField& out) const {
    const int m = u.m();
    const double inv_h2 = 1.0 / (u.h() * u.h());
    const double c = shift_;
    const double kappa = diffusion_scale_;
    const auto lam = mobility_.data();
    const auto src = u.data();
    auto dst = out.data();
#pragma omp parallel for schedule(static) if (m >= 128)
    for (int i = 0; i < m; ++i) {
        const double* row = src.data() + static_cast<std::size_t>(i) * m;
        const double* up = i > 0 ? row - m : nullptr;
        const double* dn = i + 1 < m ? row + m : nullptr;
        double* o = dst.data() + static_cast<std::size_t>(i) * m;
        lap_row(row, up, dn, m, inv_h2, o);
        const double* lm = lam.data() + static_cast<std::size_t>(i) * m;
        for (int j = 0; j < m; ++j) o[j] = c * row[j] - kappa * lm[j] * o[j];
    }
}

std::string to_string(SolveMethod m) {
    return m == SolveMethod::SymmetrizedCG ? "symmetrized-CG" : "stabilized-biconjugate";
}

SolveFailure::SolveFailure(std::string context, SolveReport report)
    : std::runtime_error("linear solve failed to converge (" + context + "): " +
                         std::to_string(report.iterations) + " iterations, relative residual " +
                         std::to_string(report.final_relative_residual)),
      context_(std::move(context)),
      report_(report) {}

std::pair<CellField, SolveReport> solve(const HelmholtzOperator& op, const CellField& rhs,
                                        const SolverConfig& cfg) {
    if (!is_finite(rhs)) throw SolveFailure("non-finite right-hand side", {});
    const double target = cfg.rel_tol * nrm2(rhs.data()) + cfg.abs_tol;

    double lam_min = std::numeric_limits<double>::infinity();
    for (double v : op.mobility().data()) lam_min = std::min(lam_min, v);

    CgResult res = (lam_min >= 1e-12) ? solve_symmetrized_cg(op, rhs, cfg, target)
                                      : solve_bicgstab(op, rhs, cfg, target);
    if (!res.converged) throw SolveFailure(to_string(res.report.method_used), res.report);
    return {std::move(res.x), res.report};
}

} // namespace mbpcn

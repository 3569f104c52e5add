#include "mbpcn/grid.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mbpcn {

namespace {

// below this many cells per side the parallel regions cost more than they save
constexpr int kParallelThreshold = 128;

inline double lap_at(const CellField& u, int i, int j, int m, double h) {
    const double gx_e = (i + 1 < m) ? (u(i + 1, j) - u(i, j)) / h : 0.0;
    const double gx_w = (i > 0) ? (u(i, j) - u(i - 1, j)) / h : 0.0;
    const double gy_n = (j + 1 < m) ? (u(i, j + 1) - u(i, j)) / h : 0.0;
    const double gy_s = (j > 0) ? (u(i, j) - u(i, j - 1)) / h : 0.0;
    return (gx_e - gx_w) / h + (gy_n - gy_s) / h;
}

} // namespace

Domain2D::Domain2D(double length, int cells) : side_length(length), cells_per_side(cells) {
    if (!(length > 0.0)) throw std::invalid_argument("Domain2D: side_length must be positive");
    if (cells < 2) throw std::invalid_argument("Domain2D: cells_per_side must be at least 2");
    spacing = side_length / cells_per_side;
}

std::pair<EdgeFieldX, EdgeFieldY> gradient(const CellField& u) {
    const int m = u.m();
    const double h = u.h();
    EdgeFieldX gx(u.domain()); // boundary rows stay zero
    EdgeFieldY gy(u.domain());
#pragma omp parallel for schedule(static) if (m >= kParallelThreshold)
    for (int i = 1; i < m; ++i)
        for (int j = 0; j < m; ++j)
            gx(i, j) = (u(i, j) - u(i - 1, j)) / h;
#pragma omp parallel for schedule(static) if (m >= kParallelThreshold)
    for (int i = 0; i < m; ++i)
        for (int j = 1; j < m; ++j)
            gy(i, j) = (u(i, j) - u(i, j - 1)) / h;
    return {std::move(gx), std::move(gy)};
}

CellField divergence(const EdgeFieldX& ux, const EdgeFieldY& uy) {
    const int m = ux.m();
    const double h = ux.domain().spacing;
    CellField out(ux.domain());
#pragma omp parallel for schedule(static) if (m >= kParallelThreshold)
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            out(i, j) = (ux(i + 1, j) - ux(i, j)) / h + (uy(i, j + 1) - uy(i, j)) / h;
    return out;
}

CellField laplacian(const CellField& u) {
    CellField out(u.domain());
    laplacian_into(u, out);
    return out;
}

void laplacian_into(const CellField& u, CellField& out) {
    const int m = u.m();
    const double h = u.h();
#pragma omp parallel for schedule(static) if (m >= kParallelThreshold)
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            out(i, j) = lap_at(u, i, j, m, h);
}

double inner_l2(const CellField& u, const CellField& v) {
    const double h = u.h();
    const auto a = u.data();
    const auto b = v.data();
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return h * h * s;
}

double inner_edge(const EdgeFieldX& ux, const EdgeFieldX& vx,
                  const EdgeFieldY& uy, const EdgeFieldY& vy) {
    const int m = ux.m();
    const double h = ux.domain().spacing;
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            s += 0.5 * (ux(i + 1, j) * vx(i + 1, j) + ux(i, j) * vx(i, j));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            s += 0.5 * (uy(i, j + 1) * vy(i, j + 1) + uy(i, j) * vy(i, j));
    return h * h * s;
}

double norm_l2(const CellField& u) { return std::sqrt(inner_l2(u, u)); }

double seminorm_h1_sq(const CellField& u) {
    const int m = u.m();
    const double h = u.h();
    // each interior edge difference contributes with weight 1 once the cell
    // averages are summed; boundary edges vanish
    double s = 0.0;
    for (int i = 1; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double g = (u(i, j) - u(i - 1, j)) / h;
            s += g * g;
        }
    for (int i = 0; i < m; ++i)
        for (int j = 1; j < m; ++j) {
            const double g = (u(i, j) - u(i, j - 1)) / h;
            s += g * g;
        }
    return h * h * s;
}

double seminorm_h1(const CellField& u) { return std::sqrt(seminorm_h1_sq(u)); }

double norm_h1(const CellField& u) {
    return std::sqrt(inner_l2(u, u) + seminorm_h1_sq(u));
}

double norm_sup(const CellField& u) {
    double s = 0.0;
    for (double x : u.data()) {
        const double a = std::fabs(x);
        if (a > s) s = a;
    }
    return s;
}

bool is_finite(const CellField& u) {
    for (double x : u.data())
        if (!std::isfinite(x)) return false;
    return true;
}

void set_thread_cap([[maybe_unused]] int n) {
#ifdef _OPENMP
    if (n > 0)
        omp_set_num_threads(n);
    else
        omp_set_num_threads(omp_get_num_procs());
#endif
}

} // namespace mbpcn

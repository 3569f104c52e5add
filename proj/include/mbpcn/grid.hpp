#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace mbpcn {

// Uniform cell-centered grid on a square domain (0,L)^2 with M cells per side.
// Cell centers sit at x_i = (i + 1/2) h, i = 0..M-1, h = L/M.
struct Domain2D {
    double side_length = 1.0;
    int cells_per_side = 0;
    double spacing = 0.0;

    Domain2D() = default;
    Domain2D(double length, int cells);

    double cell_center(int i) const { return (static_cast<double>(i) + 0.5) * spacing; }
    int cell_count() const { return cells_per_side * cells_per_side; }

    friend bool operator==(const Domain2D&, const Domain2D&) = default;
};

// Scalar field on cell centers, stored row-major: flat index = i*M + j.
// The flat layout coincides with the vectorization used by the dense oracle,
// so field data and oracle vectors compare index for index.
class CellField {
public:
    CellField() = default;
    explicit CellField(const Domain2D& dom, double value = 0.0)
        : dom_(dom), v_(static_cast<std::size_t>(dom.cell_count()), value) {}

    const Domain2D& domain() const { return dom_; }
    int m() const { return dom_.cells_per_side; }
    double h() const { return dom_.spacing; }
    bool empty() const { return v_.empty(); }

    double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * m() + j]; }
    double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * m() + j]; }

    std::span<double> data() { return v_; }
    std::span<const double> data() const { return v_; }

private:
    Domain2D dom_;
    std::vector<double> v_;
};

// Field on x-normal edges: (M+1) x M values. Edge (i,j) separates cells
// (i-1,j) and (i,j); edges i = 0 and i = M lie on the boundary and are zero
// for any field in the zero-flux subspace.
class EdgeFieldX {
public:
    EdgeFieldX() = default;
    explicit EdgeFieldX(const Domain2D& dom, double value = 0.0)
        : dom_(dom),
          v_(static_cast<std::size_t>(dom.cells_per_side + 1) * dom.cells_per_side, value) {}

    const Domain2D& domain() const { return dom_; }
    int m() const { return dom_.cells_per_side; }

    double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * m() + j]; }
    double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * m() + j]; }

    std::span<double> data() { return v_; }
    std::span<const double> data() const { return v_; }

private:
    Domain2D dom_;
    std::vector<double> v_;
};

// Field on y-normal edges: M x (M+1) values, symmetric to EdgeFieldX.
class EdgeFieldY {
public:
    EdgeFieldY() = default;
    explicit EdgeFieldY(const Domain2D& dom, double value = 0.0)
        : dom_(dom),
          v_(static_cast<std::size_t>(dom.cells_per_side) * (dom.cells_per_side + 1), value) {}

    const Domain2D& domain() const { return dom_; }
    int m() const { return dom_.cells_per_side; }

    double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * (m() + 1) + j]; }
    double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * (m() + 1) + j]; }

    std::span<double> data() { return v_; }
    std::span<const double> data() const { return v_; }

private:
    Domain2D dom_;
    std::vector<double> v_;
};

// Forward differences scaled by 1/h; boundary edges are zero, so the image
// lies in the zero-flux edge spaces and summation by parts holds exactly.
std::pair<EdgeFieldX, EdgeFieldY> gradient(const CellField& u);

CellField divergence(const EdgeFieldX& ux, const EdgeFieldY& uy);

// Five-point Neumann Laplacian, identical arithmetic to divergence(gradient(u)).
CellField laplacian(const CellField& u);
void laplacian_into(const CellField& u, CellField& out);

// <U,V> = h^2 sum U_ij V_ij
double inner_l2(const CellField& u, const CellField& v);

// [(Ux,Uy),(Vx,Vy)] with midpoint averaging of edge products back to cells
double inner_edge(const EdgeFieldX& ux, const EdgeFieldX& vx,
                  const EdgeFieldY& uy, const EdgeFieldY& vy);

double norm_l2(const CellField& u);
double seminorm_h1(const CellField& u);
double seminorm_h1_sq(const CellField& u); // fused, no edge-field temporaries
double norm_h1(const CellField& u);
double norm_sup(const CellField& u); // entrywise max |U_ij|

bool is_finite(const CellField& u);

// Thread cap for the data-parallel kernels; 0 restores the hardware default.
// Reductions accumulate in fixed order, so results do not depend on it.
void set_thread_cap(int n);

} // namespace mbpcn

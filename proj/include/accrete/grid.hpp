#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tensor.hpp"

namespace accrete {

enum class Edge : std::uint8_t { Left, Right, Bottom, Top };

/// Uniform tensor grid on a rectangle. Node n = j*nx + i, i fastest (x inner).
///
/// Every boundary node is flagged either Dirichlet or Neumann, never both;
/// at corners shared between edge types, Dirichlet wins.
class Grid2 {
public:
    Grid2(int nx, int ny, Vec2 origin, double lx, double ly,
          std::vector<Edge> dirichlet_edges = {Edge::Left})
        : nx_(nx), ny_(ny), origin_(origin), lx_(lx), ly_(ly) {
        if (nx < 3 || ny < 3) throw std::invalid_argument("grid: need at least 3 nodes per axis");
        if (lx <= 0.0 || ly <= 0.0) throw std::invalid_argument("grid: box lengths must be positive");
        if (dirichlet_edges.empty())
            throw std::invalid_argument("grid: at least one Dirichlet edge required");
        hx_ = lx / (nx - 1);
        hy_ = ly / (ny - 1);
        dirichlet_.assign(static_cast<std::size_t>(nx) * ny, 0);
        for (Edge e : dirichlet_edges) {
            switch (e) {
                case Edge::Left:   for (int j = 0; j < ny; ++j) dirichlet_[index(0, j)] = 1; break;
                case Edge::Right:  for (int j = 0; j < ny; ++j) dirichlet_[index(nx - 1, j)] = 1; break;
                case Edge::Bottom: for (int i = 0; i < nx; ++i) dirichlet_[index(i, 0)] = 1; break;
                case Edge::Top:    for (int i = 0; i < nx; ++i) dirichlet_[index(i, ny - 1)] = 1; break;
            }
        }
        dirichlet_edges_ = std::move(dirichlet_edges);
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int num_nodes() const { return nx_ * ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    /// Mesh size used in tolerances: max spacing.
    double h() const { return std::max(hx_, hy_); }
    Vec2 origin() const { return origin_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double area() const { return lx_ * ly_; }
    const std::vector<Edge>& dirichlet_edges() const { return dirichlet_edges_; }

    int index(int i, int j) const { return j * nx_ + i; }
    Vec2 pos(int i, int j) const { return {origin_.x + i * hx_, origin_.y + j * hy_}; }
    Vec2 pos(int n) const { return pos(n % nx_, n / nx_); }

    bool on_boundary(int i, int j) const {
        return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
    }
    bool is_dirichlet(int n) const { return dirichlet_[n] != 0; }
    bool is_dirichlet(int i, int j) const { return dirichlet_[index(i, j)] != 0; }
    bool is_neumann(int i, int j) const { return on_boundary(i, j) && !is_dirichlet(i, j); }

    /// Distance from a node to the boundary of the rectangle.
    double boundary_distance(int i, int j) const {
        const Vec2 p = pos(i, j);
        const double dx = std::min(p.x - origin_.x, origin_.x + lx_ - p.x);
        const double dy = std::min(p.y - origin_.y, origin_.y + ly_ - p.y);
        return std::min(dx, dy);
    }

    /// Trapezoidal quadrature weight of node (i,j); sums exactly to area().
    double quad_weight(int i, int j) const {
        const double wx = (i == 0 || i == nx_ - 1) ? 0.5 : 1.0;
        const double wy = (j == 0 || j == ny_ - 1) ? 0.5 : 1.0;
        return wx * wy * hx_ * hy_;
    }

private:
    int nx_, ny_;
    Vec2 origin_;
    double lx_, ly_;
    double hx_ = 0.0, hy_ = 0.0;
    std::vector<std::uint8_t> dirichlet_;
    std::vector<Edge> dirichlet_edges_;
};

}  // namespace accrete

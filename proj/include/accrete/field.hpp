#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "tensor.hpp"

namespace accrete {

/// Nodal scalar samples over a Grid2. Value semantics; the grid must outlive
/// every field built on it.
class ScalarField {
public:
    explicit ScalarField(const Grid2& g, double fill = 0.0)
        : grid_(g), v_(static_cast<std::size_t>(g.num_nodes()), fill) {}

    const Grid2& grid() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    double& operator[](int n) { return v_[n]; }
    double operator[](int n) const { return v_[n]; }
    double& at(int i, int j) { return v_[grid_.index(i, j)]; }
    double at(int i, int j) const { return v_[grid_.index(i, j)]; }
    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

private:
    Grid2 grid_;
    std::vector<double> v_;
};

/// Nodal plane-vector samples, interleaved storage [x0,y0,x1,y1,...] so the
/// raw array doubles as an optimizer state vector.
class VectorField2 {
public:
    explicit VectorField2(const Grid2& g)
        : grid_(g), v_(2 * static_cast<std::size_t>(g.num_nodes()), 0.0) {}

    const Grid2& grid() const { return grid_; }
    int num_nodes() const { return grid_.num_nodes(); }
    Vec2 get(int n) const { return {v_[2 * n], v_[2 * n + 1]}; }
    void set(int n, const Vec2& p) { v_[2 * n] = p.x; v_[2 * n + 1] = p.y; }
    Vec2 get(int i, int j) const { return get(grid_.index(i, j)); }
    void set(int i, int j, const Vec2& p) { set(grid_.index(i, j), p); }
    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

    /// Nodal positions x -> x; the reference placement.
    static VectorField2 identity(const Grid2& g) {
        VectorField2 f(g);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) f.set(i, j, g.pos(i, j));
        return f;
    }

private:
    Grid2 grid_;
    std::vector<double> v_;
};

/// Nodal 2x2 matrix samples (deformation gradients, stresses).
class Mat2Field {
public:
    explicit Mat2Field(const Grid2& g)
        : grid_(g), v_(static_cast<std::size_t>(g.num_nodes())) {}

    const Grid2& grid() const { return grid_; }
    Mat2& operator[](int n) { return v_[n]; }
    const Mat2& operator[](int n) const { return v_[n]; }

private:
    Grid2 grid_;
    std::vector<Mat2> v_;
};

/// Nodal 2x2x2 tensor samples (second gradients, hyperstresses).
class Ten3Field {
public:
    explicit Ten3Field(const Grid2& g)
        : grid_(g), v_(static_cast<std::size_t>(g.num_nodes())) {}

    const Grid2& grid() const { return grid_; }
    Ten3& operator[](int n) { return v_[n]; }
    const Ten3& operator[](int n) const { return v_[n]; }

private:
    Grid2 grid_;
    std::vector<Ten3> v_;
};

inline double sup_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.data()) m = std::max(m, std::abs(v));
    return m;
}

inline double sup_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (int n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
    return m;
}

inline double sup_diff(const VectorField2& a, const VectorField2& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k)
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

/// Trapezoid-weighted integral over the rectangle.
inline double integrate(const ScalarField& f) {
    const Grid2& g = f.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) s += g.quad_weight(i, j) * f.at(i, j);
    return s;
}

/// Trapezoid-weighted L2 norm of the nodal difference of two vector fields.
inline double l2_diff(const VectorField2& a, const VectorField2& b) {
    const Grid2& g = a.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 d = a.get(i, j) - b.get(i, j);
            s += g.quad_weight(i, j) * dot(d, d);
        }
    return std::sqrt(s);
}

/// Bilinear interpolation of nodal scalars at a point inside the rectangle.
inline double bilinear(const ScalarField& f, const Vec2& p) {
    const Grid2& g = f.grid();
    double fx = (p.x - g.origin().x) / g.hx();
    double fy = (p.y - g.origin().y) / g.hy();
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    i = std::clamp(i, 0, g.nx() - 2);
    j = std::clamp(j, 0, g.ny() - 2);
    const double ax = std::clamp(fx - i, 0.0, 1.0);
    const double ay = std::clamp(fy - j, 0.0, 1.0);
    return (1 - ax) * (1 - ay) * f.at(i, j) + ax * (1 - ay) * f.at(i + 1, j) +
           (1 - ax) * ay * f.at(i, j + 1) + ax * ay * f.at(i + 1, j + 1);
}

inline Mat2 bilinear(const Mat2Field& f, const Vec2& p) {
    const Grid2& g = f.grid();
    double fx = (p.x - g.origin().x) / g.hx();
    double fy = (p.y - g.origin().y) / g.hy();
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    i = std::clamp(i, 0, g.nx() - 2);
    j = std::clamp(j, 0, g.ny() - 2);
    const double ax = std::clamp(fx - i, 0.0, 1.0);
    const double ay = std::clamp(fy - j, 0.0, 1.0);
    Mat2 r = (1 - ax) * (1 - ay) * f[g.index(i, j)];
    r += ax * (1 - ay) * f[g.index(i + 1, j)];
    r += (1 - ax) * ay * f[g.index(i, j + 1)];
    r += ax * ay * f[g.index(i + 1, j + 1)];
    return r;
}

}  // namespace accrete

#pragma once

#include <stdexcept>

#include "field.hpp"

namespace accrete {

/// Second-order finite-difference first and second derivatives on the tensor
/// grid: central stencils inside, one-sided second-order stencils on the
/// boundary (exact on quadratics). Each operator has an exact transpose with
/// respect to the plain nodal dot product, so discrete functionals assembled
/// from these operators have exactly consistent gradients.

namespace detail {

enum class Axis { X, Y };

template <bool Adjoint, class Stencil>
ScalarField apply_1d(const ScalarField& u, Axis axis, Stencil stencil) {
    const Grid2& g = u.grid();
    ScalarField out(g, 0.0);
    const int m = (axis == Axis::X) ? g.nx() : g.ny();
    const int lines = (axis == Axis::X) ? g.ny() : g.nx();
    for (int line = 0; line < lines; ++line) {
        for (int k = 0; k < m; ++k) {
            int idx[4];
            double coef[4];
            const int cnt = stencil(k, m, idx, coef);
            const int n = (axis == Axis::X) ? g.index(k, line) : g.index(line, k);
            for (int e = 0; e < cnt; ++e) {
                const int np =
                    (axis == Axis::X) ? g.index(idx[e], line) : g.index(line, idx[e]);
                if constexpr (Adjoint)
                    out[np] += coef[e] * u[n];
                else
                    out[n] += coef[e] * u[np];
            }
        }
    }
    return out;
}

inline int stencil_d1(double h, int k, int m, int* idx, double* coef) {
    const double s = 1.0 / (2.0 * h);
    if (k == 0) {
        idx[0] = 0; idx[1] = 1; idx[2] = 2;
        coef[0] = -3.0 * s; coef[1] = 4.0 * s; coef[2] = -1.0 * s;
        return 3;
    }
    if (k == m - 1) {
        idx[0] = m - 1; idx[1] = m - 2; idx[2] = m - 3;
        coef[0] = 3.0 * s; coef[1] = -4.0 * s; coef[2] = 1.0 * s;
        return 3;
    }
    idx[0] = k - 1; idx[1] = k + 1;
    coef[0] = -s; coef[1] = s;
    return 2;
}

inline int stencil_d2(double h, int k, int m, int* idx, double* coef) {
    const double s = 1.0 / (h * h);
    if (k == 0) {
        idx[0] = 0; idx[1] = 1; idx[2] = 2; idx[3] = 3;
        coef[0] = 2.0 * s; coef[1] = -5.0 * s; coef[2] = 4.0 * s; coef[3] = -1.0 * s;
        return 4;
    }
    if (k == m - 1) {
        idx[0] = m - 1; idx[1] = m - 2; idx[2] = m - 3; idx[3] = m - 4;
        coef[0] = 2.0 * s; coef[1] = -5.0 * s; coef[2] = 4.0 * s; coef[3] = -1.0 * s;
        return 4;
    }
    idx[0] = k - 1; idx[1] = k; idx[2] = k + 1;
    coef[0] = s; coef[1] = -2.0 * s; coef[2] = s;
    return 3;
}

template <bool Adjoint>
ScalarField d1(const ScalarField& u, Axis axis) {
    const double h = (axis == Axis::X) ? u.grid().hx() : u.grid().hy();
    return apply_1d<Adjoint>(u, axis, [h](int k, int m, int* idx, double* coef) {
        return stencil_d1(h, k, m, idx, coef);
    });
}

template <bool Adjoint>
ScalarField d2(const ScalarField& u, Axis axis) {
    const Grid2& g = u.grid();
    const int m = (axis == Axis::X) ? g.nx() : g.ny();
    if (m < 4) throw std::invalid_argument("second derivative needs >= 4 nodes per axis");
    const double h = (axis == Axis::X) ? g.hx() : g.hy();
    return apply_1d<Adjoint>(u, axis, [h](int k, int mm, int* idx, double* coef) {
        return stencil_d2(h, k, mm, idx, coef);
    });
}

}  // namespace detail

inline ScalarField dx(const ScalarField& u) { return detail::d1<false>(u, detail::Axis::X); }
inline ScalarField dy(const ScalarField& u) { return detail::d1<false>(u, detail::Axis::Y); }
inline ScalarField dxx(const ScalarField& u) { return detail::d2<false>(u, detail::Axis::X); }
inline ScalarField dyy(const ScalarField& u) { return detail::d2<false>(u, detail::Axis::Y); }
inline ScalarField dx_adj(const ScalarField& u) { return detail::d1<true>(u, detail::Axis::X); }
inline ScalarField dy_adj(const ScalarField& u) { return detail::d1<true>(u, detail::Axis::Y); }
inline ScalarField dxx_adj(const ScalarField& u) { return detail::d2<true>(u, detail::Axis::X); }
inline ScalarField dyy_adj(const ScalarField& u) { return detail::d2<true>(u, detail::Axis::Y); }

/// Deformation gradient: F(k,l) = d y_k / d x_l at every node.
inline Mat2Field grad(const VectorField2& y) {
    const Grid2& g = y.grid();
    Mat2Field f(g);
    ScalarField comp(g);
    for (int k = 0; k < 2; ++k) {
        for (int n = 0; n < g.num_nodes(); ++n)
            comp[n] = (k == 0) ? y.get(n).x : y.get(n).y;
        const ScalarField gx = dx(comp);
        const ScalarField gy = dy(comp);
        for (int n = 0; n < g.num_nodes(); ++n) {
            f[n](k, 0) = gx[n];
            f[n](k, 1) = gy[n];
        }
    }
    return f;
}

/// Second gradient: G(k,l,m) = d^2 y_k / (d x_l d x_m); symmetric in (l,m)
/// exactly because the two 1-d stencils commute.
inline Ten3Field hessian(const VectorField2& y) {
    const Grid2& g = y.grid();
    Ten3Field t(g);
    ScalarField comp(g);
    for (int k = 0; k < 2; ++k) {
        for (int n = 0; n < g.num_nodes(); ++n)
            comp[n] = (k == 0) ? y.get(n).x : y.get(n).y;
        const ScalarField gxx = dxx(comp);
        const ScalarField gyy = dyy(comp);
        const ScalarField gxy = dx(dy(comp));
        for (int n = 0; n < g.num_nodes(); ++n) {
            t[n](k, 0, 0) = gxx[n];
            t[n](k, 1, 1) = gyy[n];
            t[n](k, 0, 1) = gxy[n];
            t[n](k, 1, 0) = gxy[n];
        }
    }
    return t;
}

/// Exact transpose of grad: returns the nodal vector field dual to a stress,
/// sum_n S_n : grad(z)_n == sum_n grad_adjoint(S)_n . z_n for every z.
inline VectorField2 grad_adjoint(const Mat2Field& s) {
    const Grid2& g = s.grid();
    VectorField2 out(g);
    ScalarField comp(g);
    for (int k = 0; k < 2; ++k) {
        for (int n = 0; n < g.num_nodes(); ++n) comp[n] = s[n](k, 0);
        const ScalarField ax = dx_adj(comp);
        for (int n = 0; n < g.num_nodes(); ++n) comp[n] = s[n](k, 1);
        const ScalarField ay = dy_adj(comp);
        for (int n = 0; n < g.num_nodes(); ++n) {
            Vec2 v = out.get(n);
            (k == 0 ? v.x : v.y) += ax[n] + ay[n];
            out.set(n, v);
        }
    }
    return out;
}

/// Exact transpose of hessian (both (l,m) slots of the argument are used).
inline VectorField2 hessian_adjoint(const Ten3Field& p) {
    const Grid2& g = p.grid();
    VectorField2 out(g);
    ScalarField comp(g);
    for (int k = 0; k < 2; ++k) {
        for (int n = 0; n < g.num_nodes(); ++n) comp[n] = p[n](k, 0, 0);
        const ScalarField axx = dxx_adj(comp);
        for (int n = 0; n < g.num_nodes(); ++n) comp[n] = p[n](k, 1, 1);
        const ScalarField ayy = dyy_adj(comp);
        for (int n = 0; n < g.num_nodes(); ++n) comp[n] = p[n](k, 0, 1) + p[n](k, 1, 0);
        const ScalarField axy = dy_adj(dx_adj(comp));
        for (int n = 0; n < g.num_nodes(); ++n) {
            Vec2 v = out.get(n);
            (k == 0 ? v.x : v.y) += axx[n] + ayy[n] + axy[n];
            out.set(n, v);
        }
    }
    return out;
}

}  // namespace accrete

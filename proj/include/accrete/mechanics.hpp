#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fd_ops.hpp"
#include "field.hpp"
#include "lbfgs.hpp"
#include "material.hpp"
#include "trajectory.hpp"

namespace accrete {

/// Term breakdown of the incremental functional at a given state.
struct IncrementalTerms {
    double stored = 0.0;  ///< blended stored energy
    double hyper = 0.0;   ///< second-gradient energy
    double visc = 0.0;    ///< tau * viscous dissipation of the increment
    double load = 0.0;    ///< body-force work (enters with minus sign)
    double total = 0.0;
    bool admissible = false;
    double min_det = 0.0;
};

/// One incremental minimization y_{i-1} -> y_i at time t_i: stored + hyper
/// + tau * dissipation of the increment - load, with the phase variable
/// frozen at theta - t_i. States whose nodal determinant drops to det_floor
/// evaluate to +infinity, which the line search treats as a rejected trial.
class IncrementalProblem {
public:
    IncrementalProblem(const ScalarField& theta, const VectorField2& y_prev,
                       double t_i, double tau, const MaterialParams& mp,
                       double det_floor = 1e-8)
        : grid_(&theta.grid()),
          theta_(&theta),
          y_prev_(&y_prev),
          f_prev_(grad(y_prev)),
          t_(t_i),
          tau_(tau),
          mp_(mp),
          det_floor_(det_floor) {}

    const Grid2& grid() const { return *grid_; }
    double time() const { return t_; }

    IncrementalTerms terms(const VectorField2& y) const {
        IncrementalTerms out;
        const Grid2& g = *grid_;
        const Mat2Field f = grad(y);
        out.min_det = std::numeric_limits<double>::infinity();
        for (int n = 0; n < g.num_nodes(); ++n) out.min_det = std::min(out.min_det, det(f[n]));
        if (!(out.min_det > det_floor_)) {
            out.total = std::numeric_limits<double>::infinity();
            return out;
        }
        out.admissible = true;
        const Ten3Field gg = hessian(y);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const int n = g.index(i, j);
                const double w = g.quad_weight(i, j);
                const double sigma = (*theta_)[n] - t_;
                const Mat2 rate = (1.0 / tau_) * (f[n] - f_prev_[n]);
                out.stored += w * stored_energy(sigma, f[n], mp_);
                out.hyper += w * hyper_energy(gg[n], mp_);
                out.visc += w * tau_ * dissipation(sigma, f_prev_[n], rate, mp_);
                out.load += w * dot(body_force(sigma, g.pos(i, j), mp_), y.get(n));
            }
        out.total = out.stored + out.hyper + out.visc - out.load;
        return out;
    }

    double value(const VectorField2& y) const { return terms(y).total; }

    /// Value and exact gradient of the discrete functional with respect to
    /// the nodal values (the adjoint of the same stencils that evaluate it).
    double value_and_grad(const std::vector<double>& x, std::vector<double>& grad_out) const {
        const Grid2& g = *grid_;
        const int nn = g.num_nodes();
        VectorField2 y(g);
        y.data() = x;
        const Mat2Field f = grad(y);
        double min_det = std::numeric_limits<double>::infinity();
        for (int n = 0; n < nn; ++n) min_det = std::min(min_det, det(f[n]));
        grad_out.assign(2 * nn, 0.0);
        if (!(min_det > det_floor_)) return std::numeric_limits<double>::infinity();

        const Ten3Field gg = hessian(y);
        Mat2Field stress(g);
        Ten3Field hyperstress(g);
        double val = 0.0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const int n = g.index(i, j);
                const double w = g.quad_weight(i, j);
                const double sigma = (*theta_)[n] - t_;
                const Mat2 rate = (1.0 / tau_) * (f[n] - f_prev_[n]);
                const Vec2 fb = body_force(sigma, g.pos(i, j), mp_);
                val += w * (stored_energy(sigma, f[n], mp_) + hyper_energy(gg[n], mp_) +
                            tau_ * dissipation(sigma, f_prev_[n], rate, mp_) -
                            dot(fb, y.get(n)));
                stress[n] = w * (stored_energy_deriv(sigma, f[n], mp_) +
                                 viscous_stress(sigma, f_prev_[n], rate, mp_));
                hyperstress[n] = w * hyper_energy_deriv(gg[n], mp_);
                grad_out[2 * n] -= w * fb.x;
                grad_out[2 * n + 1] -= w * fb.y;
            }
        const VectorField2 ga = grad_adjoint(stress);
        const VectorField2 ha = hessian_adjoint(hyperstress);
        for (std::size_t k = 0; k < grad_out.size(); ++k)
            grad_out[k] += ga.data()[k] + ha.data()[k];
        return val;
    }

    /// Gradient as a nodal field (zero nowhere projected; callers pairing it
    /// with fields that vanish on the Dirichlet set get the weak residual).
    VectorField2 gradient(const VectorField2& y) const {
        std::vector<double> go;
        value_and_grad(y.data(), go);
        VectorField2 out(*grid_);
        out.data() = std::move(go);
        return out;
    }

private:
    const Grid2* grid_;
    const ScalarField* theta_;
    const VectorField2* y_prev_;
    Mat2Field f_prev_;
    double t_, tau_;
    MaterialParams mp_;
    double det_floor_;
};

struct StepReport {
    int index = 0;
    double t = 0.0;
    double f_before = 0.0;  ///< incremental functional at the warm start
    double f_after = 0.0;   ///< at the accepted minimizer
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    int line_search_failures = 0;
    double min_det = 0.0;
    double stored = 0.0, hyper = 0.0, visc = 0.0, load = 0.0;
    double phase_shift = 0.0;  ///< int W(theta-t_i) - W(theta-t_{i-1}) at y_{i-1}
    double load_shift = 0.0;   ///< int (f(theta-t_i) - f(theta-t_{i-1})) . y_{i-1}
};

struct EvolveOptions {
    double det_floor = 1e-8;
    double tol_grad = 1e-6;  ///< absolute; callers usually scale by area
    int max_iters = 5000;
    int memory = 8;
};

struct EvolveResult {
    Trajectory traj;
    std::vector<StepReport> steps;
    bool all_converged = true;
    bool minimality_ok = true;    ///< per-step value never above the warm start
    bool energy_chain_ok = true;  ///< telescoped incremental energy inequality
};

inline std::vector<std::uint8_t> dirichlet_dof_mask(const Grid2& g) {
    std::vector<std::uint8_t> mask(2 * static_cast<std::size_t>(g.num_nodes()), 0);
    for (int n = 0; n < g.num_nodes(); ++n)
        if (g.is_dirichlet(n)) mask[2 * n] = mask[2 * n + 1] = 1;
    return mask;
}

/// One incremental step from y_prev at time t_i; warm-started limited-memory
/// quasi-Newton descent, so the accepted state never has a larger
/// incremental value than the warm start.
inline std::pair<VectorField2, StepReport> incremental_step(
    const ScalarField& theta, const VectorField2& y_prev, double t_i, double tau,
    const MaterialParams& mp, const EvolveOptions& opt,
    const VectorField2* predicted = nullptr) {
    const Grid2& g = theta.grid();
    IncrementalProblem prob(theta, y_prev, t_i, tau, mp, opt.det_floor);

    StepReport rep;
    rep.t = t_i;
    rep.f_before = prob.value(y_prev);
    if (!std::isfinite(rep.f_before))
        throw std::invalid_argument("incremental_step: warm start is inadmissible");

    const std::vector<std::uint8_t> fixed = dirichlet_dof_mask(g);
    lbfgs::Options lopt;
    lopt.memory = opt.memory;
    lopt.max_iters = opt.max_iters;
    lopt.tol_grad = opt.tol_grad;
    // Descent is monotone from the start, so launching from the predicted
    // state keeps f_after <= f(y_prev) only if the prediction is no worse;
    // otherwise fall back to the previous state.
    std::vector<double> x = y_prev.data();
    if (predicted) {
        const double fp = prob.value(*predicted);
        if (std::isfinite(fp) && fp <= rep.f_before) x = predicted->data();
    }
    const lbfgs::Result lres = lbfgs::minimize(
        [&prob](const std::vector<double>& xx, std::vector<double>& gg) {
            return prob.value_and_grad(xx, gg);
        },
        x, &fixed, lopt);

    VectorField2 y(g);
    y.data() = std::move(x);
    const IncrementalTerms terms = prob.terms(y);
    rep.f_after = lres.value;
    rep.grad_norm = lres.grad_norm;
    rep.iterations = lres.iterations;
    rep.converged = lres.converged;
    rep.line_search_failures = lres.line_search_failures;
    rep.min_det = terms.min_det;
    rep.stored = terms.stored;
    rep.hyper = terms.hyper;
    rep.visc = terms.visc;
    rep.load = terms.load;
    return {std::move(y), rep};
}

/// Time march over N = T/tau incremental problems with the arrival field
/// theta frozen. Records per-step functional terms and the two phase/load
/// shift integrals that close the telescoped energy inequality.
inline EvolveResult evolve(const VectorField2& y0, const ScalarField& theta, double tau,
                           double T, const MaterialParams& mp, const EvolveOptions& opt) {
    const Grid2& g = theta.grid();
    const double n_real = T / tau;
    const int n_steps = static_cast<int>(std::llround(n_real));
    if (n_steps < 1 || std::abs(n_real - n_steps) > 1e-9 * std::max(1.0, n_real))
        throw std::invalid_argument("evolve: horizon must be an integer number of steps");
    for (int n = 0; n < g.num_nodes(); ++n)
        if (g.is_dirichlet(n) && norm(y0.get(n) - g.pos(n)) > 1e-12)
            throw std::invalid_argument("evolve: initial state violates the boundary pin");

    std::vector<VectorField2> snaps;
    snaps.reserve(n_steps + 1);
    snaps.push_back(y0);
    std::vector<StepReport> reports;
    reports.reserve(n_steps);

    bool all_converged = true, minimality_ok = true, chain_ok = true;
    // Telescoped inequality bookkeeping.
    double visc_sum = 0.0, shift_sum = 0.0;
    IncrementalProblem prob0(theta, y0, 0.0, tau, mp, opt.det_floor);
    const IncrementalTerms t0 = prob0.terms(y0);
    if (!t0.admissible) throw std::invalid_argument("evolve: initial state inadmissible");
    const double e0 = t0.stored + t0.hyper - t0.load;

    for (int i = 1; i <= n_steps; ++i) {
        const double t_i = (T * i) / n_steps;
        const double t_prev = (T * (i - 1)) / n_steps;
        const VectorField2& y_prev = snaps.back();
        VectorField2 predicted(g);
        const VectorField2* start = nullptr;
        if (i >= 2) {  // linear extrapolation of the last two snapshots
            const VectorField2& y_pp = snaps[snaps.size() - 2];
            for (int n = 0; n < g.num_nodes(); ++n)
                predicted.set(n, y_prev.get(n) + (y_prev.get(n) - y_pp.get(n)));
            start = &predicted;
        }
        auto [y, rep] = incremental_step(theta, y_prev, t_i, tau, mp, opt, start);
        rep.index = i;

        // Shift integrals at the previous state.
        const Mat2Field f_prev = grad(y_prev);
        double phase_shift = 0.0, load_shift = 0.0;
        for (int jj = 0; jj < g.ny(); ++jj)
            for (int ii = 0; ii < g.nx(); ++ii) {
                const int n = g.index(ii, jj);
                const double w = g.quad_weight(ii, jj);
                const double s_new = theta[n] - t_i;
                const double s_old = theta[n] - t_prev;
                phase_shift += w * (stored_energy(s_new, f_prev[n], mp) -
                                    stored_energy(s_old, f_prev[n], mp));
                load_shift += w * dot(body_force(s_new, g.pos(ii, jj), mp) -
                                          body_force(s_old, g.pos(ii, jj), mp),
                                      y_prev.get(n));
            }
        rep.phase_shift = phase_shift;
        rep.load_shift = load_shift;

        all_converged = all_converged && rep.converged;
        const double slack = 1e-9 * (1.0 + std::abs(rep.f_before));
        if (rep.f_after > rep.f_before + slack) minimality_ok = false;

        visc_sum += rep.visc;
        shift_sum += phase_shift - load_shift;
        const double e_n = rep.stored + rep.hyper - rep.load;
        const double chain_slack = 1e-8 * (1.0 + std::abs(e0) + std::abs(visc_sum));
        if (e_n + visc_sum > e0 + shift_sum + chain_slack) chain_ok = false;

        reports.push_back(rep);
        snaps.push_back(std::move(y));
    }

    EvolveResult res{Trajectory(tau, std::move(snaps)), std::move(reports),
                     all_converged, minimality_ok, chain_ok};
    return res;
}

/// Smooth factor that vanishes on every Dirichlet edge and nowhere else.
inline double dirichlet_vanishing_factor(const Grid2& g, const Vec2& p) {
    double v = 1.0;
    const Vec2 o = g.origin();
    for (Edge e : g.dirichlet_edges()) {
        double s = 1.0;
        switch (e) {
            case Edge::Left: s = (p.x - o.x) / g.lx(); break;
            case Edge::Right: s = (o.x + g.lx() - p.x) / g.lx(); break;
            case Edge::Bottom: s = (p.y - o.y) / g.ly(); break;
            case Edge::Top: s = (o.y + g.ly() - p.y) / g.ly(); break;
        }
        v *= std::sin(0.5 * M_PI * std::clamp(s, 0.0, 1.0));
    }
    return v;
}

/// Fixed family of eight smooth vector fields vanishing on the Dirichlet
/// set; the weak-form residual is evaluated against exactly these.
inline std::vector<VectorField2> build_test_fields(const Grid2& g) {
    std::vector<VectorField2> fields;
    const Vec2 o = g.origin();
    const double pi = M_PI;
    for (int profile = 0; profile < 4; ++profile)
        for (int comp = 0; comp < 2; ++comp) {
            VectorField2 z(g);
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i) {
                    const Vec2 p = g.pos(i, j);
                    const double xi = (p.x - o.x) / g.lx();
                    const double eta = (p.y - o.y) / g.ly();
                    double w = 0.0;
                    switch (profile) {
                        case 0: w = 1.0; break;
                        case 1: w = std::cos(pi * eta); break;
                        case 2: w = std::sin(pi * xi + 0.5); break;
                        case 3: w = std::cos(pi * xi) * std::cos(2.0 * pi * eta); break;
                    }
                    w *= dirichlet_vanishing_factor(g, p);
                    z.set(i, j, comp == 0 ? Vec2{w, 0.0} : Vec2{0.0, w});
                }
            fields.push_back(std::move(z));
        }
    return fields;
}

/// Discrete W^{2,p} size used to normalize weak residuals.
inline double sobolev2p_norm(const VectorField2& z, double p) {
    const Grid2& g = z.grid();
    const Mat2Field dz = grad(z);
    const Ten3Field d2z = hessian(z);
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const int n = g.index(i, j);
            const double w = g.quad_weight(i, j);
            const Vec2 v = z.get(n);
            s += w * (std::pow(dot(v, v), 0.5 * p) + std::pow(norm2(dz[n]), 0.5 * p) +
                      std::pow(norm2(d2z[n]), 0.5 * p));
        }
    return std::pow(s, 1.0 / p);
}

/// Largest normalized residual of the time-discrete weak Euler-Lagrange
/// equation over the fixed test family: for each step the stationarity
/// gradient of the incremental functional is paired with the test field and
/// summed over the horizon with the backward/forward/affine interpolant
/// convention baked into the incremental scheme.
inline double weak_residual(const Trajectory& traj, const ScalarField& theta,
                            const MaterialParams& mp,
                            const std::vector<VectorField2>& test_fields,
                            double det_floor = 1e-8) {
    const int n_steps = traj.num_steps();
    const double tau = traj.tau();
    double worst = 0.0;
    std::vector<double> residuals(test_fields.size(), 0.0);
    for (int i = 1; i <= n_steps; ++i) {
        IncrementalProblem prob(theta, traj.snapshot(i - 1), i * tau, tau, mp, det_floor);
        const VectorField2 gr = prob.gradient(traj.snapshot(i));
        for (std::size_t k = 0; k < test_fields.size(); ++k) {
            double pairing = 0.0;
            const auto& zd = test_fields[k].data();
            const auto& gd = gr.data();
            for (std::size_t m = 0; m < zd.size(); ++m) pairing += gd[m] * zd[m];
            residuals[k] += tau * pairing;
        }
    }
    for (std::size_t k = 0; k < test_fields.size(); ++k) {
        const double nz = sobolev2p_norm(test_fields[k], mp.p);
        worst = std::max(worst, std::abs(residuals[k]) / std::max(nz, 1e-300));
    }
    return worst;
}

/// Identity plus a smooth bump that respects the boundary pin; the stock
/// non-trivial initial state.
inline VectorField2 build_initial(const Grid2& g, double amplitude) {
    VectorField2 y = VectorField2::identity(g);
    if (amplitude == 0.0) return y;
    const Vec2 o = g.origin();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 p = g.pos(i, j);
            const double xi = (p.x - o.x) / g.lx();
            const double eta = (p.y - o.y) / g.ly();
            const double v = dirichlet_vanishing_factor(g, p);
            const Vec2 bump{std::sin(M_PI * eta + 0.4) * v,
                            0.6 * std::cos(1.3 * M_PI * xi) * v};
            y.set(i, j, p + amplitude * bump);
        }
    return y;
}

}  // namespace accrete

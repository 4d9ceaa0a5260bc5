#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "eikonal.hpp"
#include "mechanics.hpp"

namespace accrete {

struct CouplingOptions {
    double tau = 0.05;
    double T = 1.0;
    double tol_theta = 1e-3;  ///< absolute sup tolerance on the arrival field
    int max_iters = 30;
    EvolveOptions evolve{};
};

struct CouplingIterationRecord {
    int k = 0;
    double dtheta = 0.0;
    double dy_rel = 0.0;
};

struct CoupledSolution {
    Trajectory traj;
    FrontState front;
    ScalarField speed;
    std::vector<CouplingIterationRecord> history;
    int iterations = 0;
    bool converged = false;
    bool no_touch = false;
    ThetaBoundsReport bounds{};
    std::vector<StepReport> steps;
    bool minimality_ok = false;
    bool energy_chain_ok = false;
    bool all_steps_converged = false;
    /// Converged, front inside the domain, slope window clean, every
    /// incremental step a genuine minimizer.
    bool accepted() const {
        return converged && no_touch && bounds.pass() && minimality_ok;
    }
};

/// Attachment speed from the undeformed initial state.
inline ScalarField initial_speed(const VectorField2& y0, const MaterialParams& mp) {
    const Grid2& g = y0.grid();
    ScalarField s(g);
    const Mat2Field f = grad(y0);
    for (int n = 0; n < g.num_nodes(); ++n) s[n] = growth_rate(y0.get(n), f[n], mp);
    return s;
}

/// Attachment speed sampled along the deformation history at the arrival
/// time of the previous front iterate, clamped to the horizon: the frozen
/// coefficient of the next front solve.
inline ScalarField speed_from_trajectory(const Trajectory& traj,
                                         const ScalarField& theta_prev,
                                         const MaterialParams& mp) {
    const Grid2& g = traj.grid();
    const double T = traj.horizon();
    ScalarField s(g);
    for (int n = 0; n < g.num_nodes(); ++n) {
        const double t = std::clamp(theta_prev[n], 0.0, T);
        Vec2 yv;
        Mat2 f;
        if (traj.num_steps() == 0) {
            yv = traj.snapshot(0).get(n);
            f = traj.grad_snapshot(0)[n];
        } else {
            const auto [i, a] = traj.bracket(t);
            yv = (1.0 - a) * traj.snapshot(i - 1).get(n) + a * traj.snapshot(i).get(n);
            f = (1.0 - a) * traj.grad_snapshot(i - 1)[n] + a * traj.grad_snapshot(i)[n];
        }
        s[n] = growth_rate(yv, f, mp);
    }
    return s;
}

/// True when every node the front reaches within the horizon keeps at least
/// one mesh width of clearance from the domain boundary.
inline bool check_no_touch(const Grid2& g, const ScalarField& theta, double T) {
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (theta.at(i, j) < T && g.boundary_distance(i, j) < g.h()) return false;
    return true;
}

/// Geometric pre-flight: every seed disk dilated by the fastest possible
/// front travel C_gamma*T must stay strictly inside the rectangle with at
/// least one mesh width to spare.
inline bool preflight_growth_fits(const Grid2& g, const std::vector<Disk>& omega0,
                                  const MaterialParams& mp, double T) {
    const double margin = g.h();
    const Vec2 o = g.origin();
    for (const Disk& d : omega0) {
        const double reach = d.radius + mp.C_gamma * T;
        if (d.center.x - reach < o.x + margin) return false;
        if (d.center.x + reach > o.x + g.lx() - margin) return false;
        if (d.center.y - reach < o.y + margin) return false;
        if (d.center.y + reach > o.y + g.ly() - margin) return false;
    }
    return true;
}

/// Alternating fixed-point correction: march the front through the current
/// deformation history, then re-minimize the history against the corrected
/// front, until both fields stop moving. The speed coefficient of iterate k
/// is evaluated along trajectory k at the clamped arrival times of front
/// k-1, so each front solve sees a plain frozen field.
inline CoupledSolution iterate(const VectorField2& y0, const std::vector<Disk>& omega0,
                               const MaterialParams& mp, const CouplingOptions& opt) {
    mp.validate();
    const Grid2& g = y0.grid();
    if (omega0.empty()) throw std::invalid_argument("coupling: empty seed geometry");
    if (mp.eps > 0.0 && !(opt.tau < mp.eps))
        throw std::invalid_argument("coupling: need tau < eps in the diffused regime");
    if (!preflight_growth_fits(g, omega0, mp, opt.T))
        throw std::invalid_argument(
            "coupling: seed set dilated by C_gamma*T does not fit inside the domain");

    const SpeedBounds bounds{mp.c_gamma, mp.C_gamma};
    FrontState front = solve_eikonal(g, initial_speed(y0, mp), omega0, bounds);

    std::vector<CouplingIterationRecord> history;
    bool converged = false;

    EvolveResult ev = evolve(y0, front.theta, opt.tau, opt.T, mp, opt.evolve);
    ScalarField speed = speed_from_trajectory(ev.traj, front.theta, mp);
    FrontState front_new = solve_eikonal(g, speed, omega0, bounds);
    double dtheta = sup_diff(front_new.theta, front.theta);
    history.push_back({1, dtheta, 0.0});
    front = std::move(front_new);
    if (dtheta == 0.0) converged = true;

    int k = 1;
    while (!converged && k < opt.max_iters) {
        ++k;
        EvolveResult ev_new = evolve(y0, front.theta, opt.tau, opt.T, mp, opt.evolve);
        double dy = 0.0;
        for (int i = 0; i <= ev_new.traj.num_steps(); ++i)
            dy = std::max(dy, sup_diff(ev_new.traj.snapshot(i), ev.traj.snapshot(i)));
        const double dy_rel = dy / std::max(g.lx(), g.ly());

        speed = speed_from_trajectory(ev_new.traj, front.theta, mp);
        front_new = solve_eikonal(g, speed, omega0, bounds);
        dtheta = sup_diff(front_new.theta, front.theta);
        history.push_back({k, dtheta, dy_rel});

        front = std::move(front_new);
        ev = std::move(ev_new);
        if (dtheta <= opt.tol_theta && dy_rel <= opt.tol_theta / opt.T) converged = true;
    }

    CoupledSolution sol{std::move(ev.traj), std::move(front), std::move(speed),
                        std::move(history), 0, false, false, {}, {}, false, false, false};
    sol.iterations = k;
    sol.converged = converged;
    sol.steps = std::move(ev.steps);
    sol.minimality_ok = ev.minimality_ok;
    sol.energy_chain_ok = ev.energy_chain_ok;
    sol.all_steps_converged = ev.all_converged;
    sol.no_touch = check_no_touch(g, sol.front.theta, opt.T);
    sol.bounds = verify_theta_bounds(g, sol.front.theta, SpeedBounds{mp.c_gamma, mp.C_gamma},
                                     sol.front.seed, &omega0);
    return sol;
}

struct SweepReport {
    std::vector<double> eps_levels;
    std::vector<double> theta_gap;  ///< sup gap between consecutive levels
    std::vector<double> y_gap;      ///< sup gap over matched snapshots
    bool theta_gaps_decreasing = false;
    std::vector<CoupledSolution> solutions;
};

/// Runs the coupled solver over a strictly decreasing blending-width ladder
/// ending at the sharp interface and reports consecutive solution gaps.
inline SweepReport sharp_limit_sweep(const VectorField2& y0,
                                     const std::vector<Disk>& omega0,
                                     MaterialParams mp, const CouplingOptions& opt,
                                     const std::vector<double>& eps_list) {
    if (eps_list.size() < 2)
        throw std::invalid_argument("sweep: need at least two eps levels");
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1]))
            throw std::invalid_argument("sweep: eps levels must strictly decrease");
    if (eps_list.back() != 0.0)
        throw std::invalid_argument("sweep: ladder must end at the sharp interface");
    for (double e : eps_list)
        if (e > 0.0 && !(opt.tau < e))
            throw std::invalid_argument("sweep: tau must stay below every positive eps");

    SweepReport rep;
    rep.eps_levels = eps_list;
    for (double e : eps_list) {
        mp.eps = e;
        rep.solutions.push_back(iterate(y0, omega0, mp, opt));
    }
    for (std::size_t i = 0; i + 1 < rep.solutions.size(); ++i) {
        const auto& a = rep.solutions[i];
        const auto& b = rep.solutions[i + 1];
        rep.theta_gap.push_back(sup_diff(a.front.theta, b.front.theta));
        double dy = 0.0;
        for (int s = 0; s <= a.traj.num_steps(); ++s)
            dy = std::max(dy, sup_diff(a.traj.snapshot(s), b.traj.snapshot(s)));
        rep.y_gap.push_back(dy);
    }
    rep.theta_gaps_decreasing = true;
    for (std::size_t i = 0; i + 1 < rep.theta_gap.size(); ++i)
        if (!(rep.theta_gap[i] > rep.theta_gap[i + 1])) rep.theta_gaps_decreasing = false;
    return rep;
}

}  // namespace accrete

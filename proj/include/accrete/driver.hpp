#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "audit.hpp"
#include "config.hpp"
#include "coupling.hpp"
#include "io.hpp"

namespace accrete {

/// Exit codes shared by every run mode.
enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_not_converged = 3,
    exit_verification_failed = 4,
};

struct DriverResult {
    nlohmann::json manifest;
    int code = exit_ok;
};

namespace detail {

inline nlohmann::json base_manifest(const std::string& mode, const RunConfig& cfg) {
    nlohmann::json m;
    m["mode"] = mode;
    m["config"] = config_to_json(cfg);
    m["config_hash"] = config_hash(cfg);
    const DerivedConstants dc = derived_constants(cfg.material);
    m["derived"] = {{"coercivity_scale", dc.coercivity_scale},
                    {"coercivity_offset", dc.coercivity_offset},
                    {"phase_gap_scale", dc.phase_gap_scale},
                    {"barrier_scale", dc.barrier_scale},
                    {"hyper_monotonicity", dc.hyper_monotonicity},
                    {"dissipation_lower", dc.dissipation_lower}};
    return m;
}

inline nlohmann::json bounds_to_json(const ThetaBoundsReport& r) {
    return {{"tol", r.tol},
            {"gradient_checked", r.gradient_checked},
            {"gradient_violations", r.gradient_violations},
            {"max_gradient_excess", r.max_gradient_excess},
            {"shock_excluded", r.shock_excluded},
            {"sandwich_checked", r.sandwich_checked},
            {"sandwich_violations", r.sandwich_violations},
            {"max_sandwich_excess", r.max_sandwich_excess},
            {"pass", r.pass()}};
}

inline nlohmann::json history_to_json(const std::vector<CouplingIterationRecord>& h) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : h)
        arr.push_back({{"k", r.k}, {"dtheta", r.dtheta}, {"dy_rel", r.dy_rel}});
    return arr;
}

inline void write_manifest(const std::filesystem::path& dir, const nlohmann::json& m) {
    std::ofstream os(dir / "manifest.json");
    os << m.dump(2) << "\n";
}

inline void write_field(const std::filesystem::path& dir, const std::string& stem,
                        const ScalarField& f, const OutputConfig& oc) {
    if (oc.csv) write_csv((dir / (stem + ".csv")).string(), f, stem);
    if (oc.vtk) write_vtk((dir / (stem + ".vtk")).string(), f, stem);
}

inline void write_field(const std::filesystem::path& dir, const std::string& stem,
                        const VectorField2& f, const OutputConfig& oc) {
    if (oc.csv) write_csv((dir / (stem + ".csv")).string(), f, stem + "_x", stem + "_y");
    if (oc.vtk) write_vtk((dir / (stem + ".vtk")).string(), f, stem);
}

inline void log_line(std::ostream* log, const std::string& s) {
    if (log) *log << s << "\n";
}

inline std::string snapshot_stem(int i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "y_%04d", i);
    return buf;
}

/// Shared tail of simulate / energy-audit: runs the coupled solver and
/// writes the standard artifact set.
inline CoupledSolution run_coupled(const RunConfig& cfg, const std::filesystem::path& dir,
                                   std::ostream* log) {
    const Grid2 g = cfg.make_grid();
    const VectorField2 y0 = build_initial(g, cfg.initial_amplitude);
    log_line(log, "coupled solve: " + std::to_string(g.nx()) + "x" + std::to_string(g.ny()) +
                      " grid, " + std::to_string(static_cast<int>(std::llround(cfg.T / cfg.tau))) +
                      " steps");
    CoupledSolution sol = iterate(y0, cfg.omega0, cfg.material, cfg.coupling_options());
    for (const auto& r : sol.history)
        log_line(log, "  fixed-point k=" + std::to_string(r.k) +
                          " dtheta=" + detail::fmt_double(r.dtheta) +
                          " dy_rel=" + detail::fmt_double(r.dy_rel));

    write_field(dir, "theta", sol.front.theta, cfg.output);
    write_field(dir, "speed", sol.speed, cfg.output);
    const int n = sol.traj.num_steps();
    for (int i = 0; i <= n; i += cfg.output.snapshot_stride)
        write_field(dir, snapshot_stem(i), sol.traj.snapshot(i), cfg.output);
    if (n % cfg.output.snapshot_stride != 0)
        write_field(dir, snapshot_stem(n), sol.traj.snapshot(n), cfg.output);
    write_step_reports((dir / "steps.jsonl").string(), sol.steps);
    return sol;
}

inline void fill_solution_manifest(nlohmann::json& m, const CoupledSolution& sol) {
    m["iterations"] = sol.iterations;
    m["history"] = history_to_json(sol.history);
    m["converged"] = sol.converged;
    m["all_steps_converged"] = sol.all_steps_converged;
    m["minimality_ok"] = sol.minimality_ok;
    m["energy_chain_ok"] = sol.energy_chain_ok;
    m["no_touch"] = sol.no_touch;
    m["front_bounds"] = bounds_to_json(sol.bounds);
    m["accepted"] = sol.accepted();
    double min_det = std::numeric_limits<double>::infinity();
    for (const auto& s : sol.steps) min_det = std::min(min_det, s.min_det);
    m["min_det"] = sol.steps.empty() ? 0.0 : min_det;
}

inline int solution_exit_code(const CoupledSolution& sol) {
    if (!sol.converged || !sol.all_steps_converged) return exit_not_converged;
    if (!sol.accepted() || !sol.energy_chain_ok) return exit_verification_failed;
    return exit_ok;
}

}  // namespace detail

/// Full coupled run: front + deformation history + audit artifacts.
inline DriverResult run_simulate(const RunConfig& cfg, const std::string& out_dir,
                                 std::ostream* log = nullptr) {
    cfg.validate();
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    nlohmann::json m = detail::base_manifest("simulate", cfg);

    CoupledSolution sol = detail::run_coupled(cfg, dir, log);
    detail::fill_solution_manifest(m, sol);

    const auto series = audit_series(sol.traj, sol.front.theta, cfg.material,
                                     cfg.audit_substeps);
    write_energy_csv((dir / "energy.csv").string(), series);
    double max_res = 0.0;
    for (const auto& r : series) max_res = std::max(max_res, std::abs(r.residual));
    m["energy"] = {{"max_abs_residual", max_res},
                   {"final_residual", series.back().residual},
                   {"final_total", series.back().e_total}};
    m["weak_residual"] =
        weak_residual(sol.traj, sol.front.theta, cfg.material,
                      build_test_fields(sol.traj.grid()), cfg.det_floor);

    DriverResult out{std::move(m), detail::solution_exit_code(sol)};
    detail::write_manifest(dir, out.manifest);
    return out;
}

/// Front solve alone on the speed induced by the initial state; verifies the
/// slope window and distance sandwich, and reports the sup error against the
/// exact cone solution whenever the speed field is spatially constant.
inline DriverResult run_eikonal(const RunConfig& cfg, const std::string& out_dir,
                                std::ostream* log = nullptr) {
    cfg.validate();
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    nlohmann::json m = detail::base_manifest("eikonal", cfg);

    const Grid2 g = cfg.make_grid();
    const VectorField2 y0 = build_initial(g, cfg.initial_amplitude);
    const ScalarField speed = initial_speed(y0, cfg.material);
    const SpeedBounds bounds{cfg.material.c_gamma, cfg.material.C_gamma};
    detail::log_line(log, "front solve on " + std::to_string(g.nx()) + "x" +
                              std::to_string(g.ny()) + " grid");
    const FrontState front = solve_eikonal(g, speed, cfg.omega0, bounds);
    const ThetaBoundsReport rep =
        verify_theta_bounds(g, front.theta, bounds, front.seed, &cfg.omega0);

    detail::write_field(dir, "theta", front.theta, cfg.output);
    detail::write_field(dir, "speed", speed, cfg.output);

    m["front_bounds"] = detail::bounds_to_json(rep);
    double lo = speed[0], hi = speed[0];
    for (int n = 0; n < g.num_nodes(); ++n) {
        lo = std::min(lo, speed[n]);
        hi = std::max(hi, speed[n]);
    }
    m["speed_constant"] = (lo == hi);
    if (lo == hi) {
        double err = 0.0;
        for (int n = 0; n < g.num_nodes(); ++n) {
            const double exact = std::max(signed_distance(cfg.omega0, g.pos(n)), 0.0) / lo;
            err = std::max(err, std::abs(front.theta[n] - exact));
        }
        m["sup_error_vs_cone"] = err;
        m["grid_h"] = g.h();
        detail::log_line(log, "constant speed: sup error vs exact cone " +
                                  detail::fmt_double(err));
    }

    DriverResult out{std::move(m), rep.pass() ? exit_ok : exit_verification_failed};
    detail::write_manifest(dir, out.manifest);
    return out;
}

/// Coupled run followed by the energy-identity audit and the two-route
/// interface-flux cross-check at each requested mollifier width.
inline DriverResult run_energy_audit(const RunConfig& cfg, const std::string& out_dir,
                                     std::ostream* log = nullptr) {
    cfg.validate();
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    nlohmann::json m = detail::base_manifest("energy-audit", cfg);

    CoupledSolution sol = detail::run_coupled(cfg, dir, log);
    detail::fill_solution_manifest(m, sol);

    const auto series = audit_series(sol.traj, sol.front.theta, cfg.material,
                                     cfg.audit_substeps);
    write_energy_csv((dir / "energy.csv").string(), series);
    double max_res = 0.0;
    for (const auto& r : series) max_res = std::max(max_res, std::abs(r.residual));
    m["energy"] = {{"max_abs_residual", max_res},
                   {"final_residual", series.back().residual},
                   {"final_total", series.back().e_total}};
    detail::log_line(log, "max |energy residual| = " + detail::fmt_double(max_res));

    nlohmann::json cc = nlohmann::json::array();
    for (double mult : cfg.delta_levels_h) {
        const CoareaCheck c =
            coarea_crosscheck(sol.traj, sol.front.theta, cfg.T, cfg.material,
                              mult * sol.traj.grid().h());
        cc.push_back({{"delta", c.delta},
                      {"volume_value", c.volume_value},
                      {"surface_value", c.surface_value},
                      {"rel_gap", c.rel_gap}});
        detail::log_line(log, "coarea delta=" + detail::fmt_double(c.delta) +
                                  " rel_gap=" + detail::fmt_double(c.rel_gap));
    }
    m["coarea"] = cc;

    DriverResult out{std::move(m), detail::solution_exit_code(sol)};
    detail::write_manifest(dir, out.manifest);
    return out;
}

/// Blending-width ladder down to the sharp interface.
inline DriverResult run_sharp_limit(const RunConfig& cfg, const std::string& out_dir,
                                    std::ostream* log = nullptr) {
    cfg.validate();
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    nlohmann::json m = detail::base_manifest("sharp-limit", cfg);

    const Grid2 g = cfg.make_grid();
    const VectorField2 y0 = build_initial(g, cfg.initial_amplitude);
    const SweepReport rep =
        sharp_limit_sweep(y0, cfg.omega0, cfg.material, cfg.coupling_options(),
                          cfg.sweep_eps);

    m["eps_levels"] = rep.eps_levels;
    m["theta_gap"] = rep.theta_gap;
    m["y_gap"] = rep.y_gap;
    m["theta_gaps_decreasing"] = rep.theta_gaps_decreasing;
    nlohmann::json levels = nlohmann::json::array();
    bool all_converged = true, all_accepted = true;
    for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
        const CoupledSolution& s = rep.solutions[i];
        all_converged = all_converged && s.converged && s.all_steps_converged;
        all_accepted = all_accepted && s.accepted();
        levels.push_back({{"eps", rep.eps_levels[i]},
                          {"iterations", s.iterations},
                          {"converged", s.converged},
                          {"accepted", s.accepted()},
                          {"front_bounds", detail::bounds_to_json(s.bounds)}});
        detail::log_line(log, "eps=" + detail::fmt_double(rep.eps_levels[i]) +
                                  " iters=" + std::to_string(s.iterations) +
                                  (s.accepted() ? " accepted" : " NOT accepted"));
    }
    m["levels"] = levels;

    detail::write_field(dir, "theta_sharp", rep.solutions.back().front.theta, cfg.output);
    const int ns = rep.solutions.back().traj.num_steps();
    detail::write_field(dir, "y_sharp_final", rep.solutions.back().traj.snapshot(ns),
                        cfg.output);

    int code = exit_ok;
    if (!all_converged)
        code = exit_not_converged;
    else if (!all_accepted || !rep.theta_gaps_decreasing)
        code = exit_verification_failed;
    DriverResult out{std::move(m), code};
    detail::write_manifest(dir, out.manifest);
    return out;
}

struct GradCheckReport {
    int states = 0;
    double max_stored_f = 0.0;      ///< deformation-gradient slot of the blended energy
    double max_stored_sigma = 0.0;  ///< phase slot of the blended energy
    double max_hyper = 0.0;
    double max_viscous = 0.0;       ///< rate slot of the dissipation density
    double max_force_sigma = 0.0;
    double max_functional = 0.0;    ///< directional check of the assembled gradient
    double tol = 1e-6;
    bool pass() const {
        return std::max({max_stored_f, max_stored_sigma, max_hyper, max_viscous,
                         max_force_sigma, max_functional}) <= tol;
    }
};

/// Central finite differences against every analytic derivative in the
/// material layer, plus a directional check of the assembled incremental
/// gradient on a small internal grid. Relative errors, guarded at unit scale.
inline GradCheckReport gradcheck_core(const MaterialParams& mp, int num_states,
                                      std::uint64_t seed) {
    GradCheckReport rep;
    rep.states = num_states;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double eps_scale = std::max(mp.eps, 0.05);
    const double step = 1e-5;
    auto rel = [](double got, double want) {
        return std::abs(got - want) / std::max(1.0, std::abs(want));
    };

    auto rand_mat = [&](double scale) {
        Mat2 a;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) a(r, c) = scale * unit(rng);
        return a;
    };
    for (int s = 0; s < num_states; ++s) {
        Mat2 f = Mat2::identity() + rand_mat(0.3);
        if (det(f) < 0.15) f += Mat2::identity();
        const double sigma = 2.0 * eps_scale * unit(rng);
        const Vec2 pos{unit(rng), unit(rng)};

        const Mat2 dir = rand_mat(1.0);
        {
            auto at = [&](double a) { return stored_energy(sigma, f + a * dir, mp); };
            const double fd = (at(step) - at(-step)) / (2.0 * step);
            const double an = inner(stored_energy_deriv(sigma, f, mp), dir);
            rep.max_stored_f = std::max(rep.max_stored_f, rel(fd, an));
        }
        {
            const double fd = (stored_energy(sigma + step, f, mp) -
                               stored_energy(sigma - step, f, mp)) /
                              (2.0 * step);
            const double an = stored_energy_sigma_slope(sigma, f, mp);
            rep.max_stored_sigma = std::max(rep.max_stored_sigma, rel(fd, an));
        }
        {
            Ten3 gt, gd;
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        gt(k, i, j) = 0.8 * unit(rng);
                        gd(k, i, j) = unit(rng);
                    }
            auto at = [&](double a) {
                Ten3 ga = gt;
                for (int k = 0; k < 2; ++k)
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) ga(k, i, j) += a * gd(k, i, j);
                return hyper_energy(ga, mp);
            };
            const double fd = (at(step) - at(-step)) / (2.0 * step);
            const double an = inner(hyper_energy_deriv(gt, mp), gd);
            rep.max_hyper = std::max(rep.max_hyper, rel(fd, an));
        }
        {
            const Mat2 rate = rand_mat(1.0);
            const Mat2 rdir = rand_mat(1.0);
            auto at = [&](double a) { return dissipation(sigma, f, rate + a * rdir, mp); };
            const double fd = (at(step) - at(-step)) / (2.0 * step);
            const double an = inner(viscous_stress(sigma, f, rate, mp), rdir);
            rep.max_viscous = std::max(rep.max_viscous, rel(fd, an));
        }
        {
            const Vec2 fp = body_force(sigma + step, pos, mp);
            const Vec2 fm = body_force(sigma - step, pos, mp);
            const Vec2 an = body_force_sigma_slope(sigma, pos, mp);
            rep.max_force_sigma =
                std::max(rep.max_force_sigma,
                         std::max(rel((fp.x - fm.x) / (2.0 * step), an.x),
                                  rel((fp.y - fm.y) / (2.0 * step), an.y)));
        }
    }

    {
        const Grid2 g(9, 7, {0.0, 0.0}, 1.0, 0.8, {Edge::Left});
        ScalarField theta(g);
        for (int n = 0; n < g.num_nodes(); ++n) {
            const Vec2 p = g.pos(n);
            theta[n] = 0.8 * std::hypot(p.x - 0.2, p.y - 0.3);
        }
        VectorField2 y_prev = build_initial(g, 0.01);
        IncrementalProblem prob(theta, y_prev, 0.3, 0.05, mp);
        for (int s = 0; s < 4; ++s) {
            std::vector<double> x(y_prev.data());
            for (double& v : x) v += 0.004 * unit(rng);
            std::vector<double> d(x.size());
            double dn = 0.0;
            for (double& v : d) {
                v = unit(rng);
                dn += v * v;
            }
            dn = std::sqrt(dn);
            for (double& v : d) v /= dn;
            std::vector<double> gr(x.size());
            prob.value_and_grad(x, gr);
            double an = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) an += gr[i] * d[i];
            std::vector<double> xp = x, xm = x;
            for (std::size_t i = 0; i < d.size(); ++i) {
                xp[i] += step * d[i];
                xm[i] -= step * d[i];
            }
            std::vector<double> scratch(x.size());
            const double fd =
                (prob.value_and_grad(xp, scratch) - prob.value_and_grad(xm, scratch)) /
                (2.0 * step);
            rep.max_functional = std::max(rep.max_functional, rel(fd, an));
        }
    }
    return rep;
}

/// Derivative self-test as a run mode; the manifest is the report.
inline DriverResult run_gradcheck(const RunConfig& cfg, const std::string& out_dir,
                                  int num_states = 100, std::ostream* log = nullptr) {
    cfg.material.validate();
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    nlohmann::json m = detail::base_manifest("gradcheck", cfg);

    const GradCheckReport rep = gradcheck_core(cfg.material, num_states, cfg.seed);
    m["gradcheck"] = {{"states", rep.states},
                      {"tol", rep.tol},
                      {"max_stored_f", rep.max_stored_f},
                      {"max_stored_sigma", rep.max_stored_sigma},
                      {"max_hyper", rep.max_hyper},
                      {"max_viscous", rep.max_viscous},
                      {"max_force_sigma", rep.max_force_sigma},
                      {"max_functional", rep.max_functional},
                      {"pass", rep.pass()}};
    detail::log_line(log, std::string("gradcheck ") + (rep.pass() ? "pass" : "FAIL") +
                              ", worst relative error " +
                              detail::fmt_double(std::max(
                                  {rep.max_stored_f, rep.max_stored_sigma, rep.max_hyper,
                                   rep.max_viscous, rep.max_force_sigma,
                                   rep.max_functional})));

    DriverResult out{std::move(m), rep.pass() ? exit_ok : exit_verification_failed};
    detail::write_manifest(dir, out.manifest);
    return out;
}

}  // namespace accrete

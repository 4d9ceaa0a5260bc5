#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coupling.hpp"
#include "grid.hpp"
#include "material.hpp"

namespace accrete {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputConfig {
    int snapshot_stride = 5;
    bool csv = true;
    bool vtk = true;
};

/// Full run description: one human-readable JSON tree, every key optional
/// with the defaults below. Parsed strictly (unknown keys are errors) and
/// echoed verbatim into the run manifest.
struct RunConfig {
    int nx = 65, ny = 65;
    Vec2 origin{0.0, 0.0};
    double lx = 1.0, ly = 1.0;
    std::vector<Edge> dirichlet_edges{Edge::Left};

    double T = 1.0;
    double tau = 0.05;

    MaterialParams material{};
    std::vector<Disk> omega0{{{0.5, 0.5}, 0.12}};
    double initial_amplitude = 0.0;

    double tol_theta_rel = 1e-3;  ///< front tolerance as a fraction of T
    double tol_grad_rel = 1e-6;   ///< gradient tolerance as a fraction of |U|
    double det_floor = 1e-8;
    int max_coupling_iters = 30;
    int max_newton_iters = 5000;

    int audit_substeps = 8;
    std::vector<double> delta_levels_h{4.0, 2.0, 1.0};  ///< mollifier widths, units of h

    std::vector<double> sweep_eps{0.2, 0.1, 0.05, 0.0};

    OutputConfig output{};
    std::uint64_t seed = 20240101;

    Grid2 make_grid() const { return Grid2(nx, ny, origin, lx, ly, dirichlet_edges); }

    CouplingOptions coupling_options() const {
        CouplingOptions opt;
        opt.tau = tau;
        opt.T = T;
        opt.tol_theta = tol_theta_rel * T;
        opt.max_iters = max_coupling_iters;
        opt.evolve.det_floor = det_floor;
        opt.evolve.tol_grad = tol_grad_rel * (lx * ly);
        opt.evolve.max_iters = max_newton_iters;
        return opt;
    }

    void validate() const {
        material.validate();
        if (nx < 3 || ny < 3) throw ConfigError("config: grid.nx/ny must be >= 3");
        if (!(lx > 0.0 && ly > 0.0)) throw ConfigError("config: grid box must be positive");
        if (dirichlet_edges.empty()) throw ConfigError("config: need a Dirichlet edge");
        if (!(T > 0.0 && tau > 0.0)) throw ConfigError("config: time.T and time.tau must be positive");
        const double n_real = T / tau;
        if (std::abs(n_real - std::llround(n_real)) > 1e-9 * std::max(1.0, n_real))
            throw ConfigError("config: time.T must be an integer multiple of time.tau");
        if (material.eps > 0.0 && !(tau < material.eps))
            throw ConfigError("config: time.tau must be smaller than material.eps");
        if (omega0.empty()) throw ConfigError("config: omega0 must contain at least one disk");
        for (const Disk& d : omega0)
            if (!(d.radius > 0.0)) throw ConfigError("config: omega0 radii must be positive");
        const Grid2 g = make_grid();
        if (!preflight_growth_fits(g, omega0, material, T))
            throw ConfigError(
                "config: omega0 dilated by C_gamma*T must fit strictly inside the domain");
        bool any_seed = false;
        for (auto m : seed_mask_from_disks(g, omega0)) any_seed = any_seed || m;
        if (!any_seed) throw ConfigError("config: omega0 does not cover a single grid node");
        if (!(tol_theta_rel > 0.0 && tol_grad_rel > 0.0 && det_floor > 0.0))
            throw ConfigError("config: tolerances must be positive");
        if (max_coupling_iters < 1 || max_newton_iters < 1)
            throw ConfigError("config: iteration caps must be >= 1");
        if (audit_substeps < 1) throw ConfigError("config: audit.substeps must be >= 1");
        if (output.snapshot_stride < 1) throw ConfigError("config: output.stride must be >= 1");
        for (double dl : delta_levels_h)
            if (!(dl > 0.0)) throw ConfigError("config: audit.delta_levels must be positive");
    }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::string& path,
                                const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config: expected an object at " + path);
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigError("config: unknown key '" + path + key + "'");
}

inline Edge edge_from_string(const std::string& s) {
    if (s == "left") return Edge::Left;
    if (s == "right") return Edge::Right;
    if (s == "bottom") return Edge::Bottom;
    if (s == "top") return Edge::Top;
    throw ConfigError("config: unknown edge '" + s + "'");
}

inline std::string edge_to_string(Edge e) {
    switch (e) {
        case Edge::Left: return "left";
        case Edge::Right: return "right";
        case Edge::Bottom: return "bottom";
        case Edge::Top: return "top";
    }
    return "left";
}

inline Vec2 vec2_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError("config: " + path + " must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    detail::reject_unknown_keys(j, "", {"grid", "time", "material", "omega0", "initial",
                                        "solver", "audit", "sweep", "output", "seed"});
    if (j.contains("grid")) {
        const auto& jg = j.at("grid");
        detail::reject_unknown_keys(jg, "grid.", {"nx", "ny", "origin", "lx", "ly",
                                                  "dirichlet_edges"});
        c.nx = jg.value("nx", c.nx);
        c.ny = jg.value("ny", c.ny);
        if (jg.contains("origin")) c.origin = detail::vec2_from_json(jg.at("origin"), "grid.origin");
        c.lx = jg.value("lx", c.lx);
        c.ly = jg.value("ly", c.ly);
        if (jg.contains("dirichlet_edges")) {
            c.dirichlet_edges.clear();
            for (const auto& e : jg.at("dirichlet_edges"))
                c.dirichlet_edges.push_back(detail::edge_from_string(e.get<std::string>()));
        }
    }
    if (j.contains("time")) {
        const auto& jt = j.at("time");
        detail::reject_unknown_keys(jt, "time.", {"T", "tau"});
        c.T = jt.value("T", c.T);
        c.tau = jt.value("tau", c.tau);
    }
    if (j.contains("material")) {
        const auto& jm = j.at("material");
        detail::reject_unknown_keys(
            jm, "material.",
            {"mu_a", "mu_r", "kappa", "p", "q", "eta_a", "eta_r", "h_coef", "eps",
             "c_gamma", "C_gamma", "gamma_sensitivity", "force"});
        MaterialParams& m = c.material;
        m.mu_a = jm.value("mu_a", m.mu_a);
        m.mu_r = jm.value("mu_r", m.mu_r);
        m.kappa = jm.value("kappa", m.kappa);
        m.p = jm.value("p", m.p);
        m.q = jm.value("q", m.q);
        m.eta_a = jm.value("eta_a", m.eta_a);
        m.eta_r = jm.value("eta_r", m.eta_r);
        m.h_coef = jm.value("h_coef", m.h_coef);
        m.eps = jm.value("eps", m.eps);
        m.c_gamma = jm.value("c_gamma", m.c_gamma);
        m.C_gamma = jm.value("C_gamma", m.C_gamma);
        m.gamma_coeffs.sensitivity = jm.value("gamma_sensitivity", m.gamma_coeffs.sensitivity);
        if (jm.contains("force")) {
            const auto& jf = jm.at("force");
            detail::reject_unknown_keys(jf, "material.force.", {"rho_a", "rho_r", "g", "eps_f"});
            m.force.rho_a = jf.value("rho_a", m.force.rho_a);
            m.force.rho_r = jf.value("rho_r", m.force.rho_r);
            if (jf.contains("g")) m.force.g = detail::vec2_from_json(jf.at("g"), "material.force.g");
            m.force.eps_f = jf.value("eps_f", m.force.eps_f);
        }
    }
    if (j.contains("omega0")) {
        c.omega0.clear();
        for (const auto& jd : j.at("omega0")) {
            detail::reject_unknown_keys(jd, "omega0[].", {"center", "radius"});
            Disk d;
            d.center = detail::vec2_from_json(jd.at("center"), "omega0[].center");
            d.radius = jd.at("radius").get<double>();
            c.omega0.push_back(d);
        }
    }
    if (j.contains("initial")) {
        const auto& ji = j.at("initial");
        detail::reject_unknown_keys(ji, "initial.", {"amplitude"});
        c.initial_amplitude = ji.value("amplitude", c.initial_amplitude);
    }
    if (j.contains("solver")) {
        const auto& js = j.at("solver");
        detail::reject_unknown_keys(js, "solver.",
                                    {"tol_theta_rel", "tol_grad_rel", "det_floor",
                                     "max_coupling_iters", "max_newton_iters"});
        c.tol_theta_rel = js.value("tol_theta_rel", c.tol_theta_rel);
        c.tol_grad_rel = js.value("tol_grad_rel", c.tol_grad_rel);
        c.det_floor = js.value("det_floor", c.det_floor);
        c.max_coupling_iters = js.value("max_coupling_iters", c.max_coupling_iters);
        c.max_newton_iters = js.value("max_newton_iters", c.max_newton_iters);
    }
    if (j.contains("audit")) {
        const auto& ja = j.at("audit");
        detail::reject_unknown_keys(ja, "audit.", {"substeps", "delta_levels"});
        c.audit_substeps = ja.value("substeps", c.audit_substeps);
        if (ja.contains("delta_levels"))
            c.delta_levels_h = ja.at("delta_levels").get<std::vector<double>>();
    }
    if (j.contains("sweep")) {
        const auto& jw = j.at("sweep");
        detail::reject_unknown_keys(jw, "sweep.", {"eps_levels"});
        if (jw.contains("eps_levels"))
            c.sweep_eps = jw.at("eps_levels").get<std::vector<double>>();
    }
    if (j.contains("output")) {
        const auto& jo = j.at("output");
        detail::reject_unknown_keys(jo, "output.", {"snapshot_stride", "csv", "vtk"});
        c.output.snapshot_stride = jo.value("snapshot_stride", c.output.snapshot_stride);
        c.output.csv = jo.value("csv", c.output.csv);
        c.output.vtk = jo.value("vtk", c.output.vtk);
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

/// Canonical echo with every default made explicit; manifests embed this.
inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["grid"]["nx"] = c.nx;
    j["grid"]["ny"] = c.ny;
    j["grid"]["origin"] = {c.origin.x, c.origin.y};
    j["grid"]["lx"] = c.lx;
    j["grid"]["ly"] = c.ly;
    {
        std::vector<std::string> edges;
        for (Edge e : c.dirichlet_edges) edges.push_back(detail::edge_to_string(e));
        j["grid"]["dirichlet_edges"] = edges;
    }
    j["time"]["T"] = c.T;
    j["time"]["tau"] = c.tau;
    const MaterialParams& m = c.material;
    j["material"] = {{"mu_a", m.mu_a},     {"mu_r", m.mu_r},
                     {"kappa", m.kappa},   {"p", m.p},
                     {"q", m.q},           {"eta_a", m.eta_a},
                     {"eta_r", m.eta_r},   {"h_coef", m.h_coef},
                     {"eps", m.eps},       {"c_gamma", m.c_gamma},
                     {"C_gamma", m.C_gamma},
                     {"gamma_sensitivity", m.gamma_coeffs.sensitivity}};
    j["material"]["force"] = {{"rho_a", m.force.rho_a},
                              {"rho_r", m.force.rho_r},
                              {"g", {m.force.g.x, m.force.g.y}},
                              {"eps_f", m.force.eps_f}};
    j["omega0"] = nlohmann::json::array();
    for (const Disk& d : c.omega0)
        j["omega0"].push_back({{"center", {d.center.x, d.center.y}}, {"radius", d.radius}});
    j["initial"]["amplitude"] = c.initial_amplitude;
    j["solver"] = {{"tol_theta_rel", c.tol_theta_rel},
                   {"tol_grad_rel", c.tol_grad_rel},
                   {"det_floor", c.det_floor},
                   {"max_coupling_iters", c.max_coupling_iters},
                   {"max_newton_iters", c.max_newton_iters}};
    j["audit"] = {{"substeps", c.audit_substeps}, {"delta_levels", c.delta_levels_h}};
    j["sweep"]["eps_levels"] = c.sweep_eps;
    j["output"] = {{"snapshot_stride", c.output.snapshot_stride},
                   {"csv", c.output.csv},
                   {"vtk", c.output.vtk}};
    j["seed"] = c.seed;
    return j;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    return config_from_json(j);
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string config_hash(const RunConfig& c) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(config_to_json(c).dump())));
    return buf;
}

}  // namespace accrete

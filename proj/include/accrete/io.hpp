#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "audit.hpp"
#include "field.hpp"
#include "mechanics.hpp"

namespace accrete {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{}) throw std::runtime_error("io: bad number '" + s + "'");
    (void)ptr;
    return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    return out;
}

inline void check_node_coords(const Grid2& g, int i, int j, double x, double y) {
    const Vec2 p = g.pos(i, j);
    const double tol = 1e-9 * (1.0 + g.h());
    if (std::abs(p.x - x) > tol || std::abs(p.y - y) > tol)
        throw std::runtime_error("io: node coordinates do not match the grid");
}

}  // namespace detail

/// CSV field dump: header "x,y,<components>", one row per node, row-major
/// (y outer, x inner), full round-trip precision.
inline void write_csv(const std::string& path, const ScalarField& f,
                      const std::string& name) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path);
    const Grid2& g = f.grid();
    os << "x,y," << name << "\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 p = g.pos(i, j);
            os << detail::fmt_double(p.x) << ',' << detail::fmt_double(p.y) << ','
               << detail::fmt_double(f.at(i, j)) << "\n";
        }
}

inline void write_csv(const std::string& path, const VectorField2& f,
                      const std::string& name1, const std::string& name2) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path);
    const Grid2& g = f.grid();
    os << "x,y," << name1 << ',' << name2 << "\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 p = g.pos(i, j);
            const Vec2 v = f.get(i, j);
            os << detail::fmt_double(p.x) << ',' << detail::fmt_double(p.y) << ','
               << detail::fmt_double(v.x) << ',' << detail::fmt_double(v.y) << "\n";
        }
}

inline ScalarField read_csv_scalar(const std::string& path, const Grid2& g) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("io: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("io: empty file " + path);
    ScalarField f(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!std::getline(is, line)) throw std::runtime_error("io: truncated " + path);
            const auto cols = detail::split_csv(line);
            if (cols.size() != 3) throw std::runtime_error("io: bad row in " + path);
            detail::check_node_coords(g, i, j, detail::parse_double(cols[0]),
                                      detail::parse_double(cols[1]));
            f.at(i, j) = detail::parse_double(cols[2]);
        }
    return f;
}

inline VectorField2 read_csv_vector(const std::string& path, const Grid2& g) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("io: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("io: empty file " + path);
    VectorField2 f(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!std::getline(is, line)) throw std::runtime_error("io: truncated " + path);
            const auto cols = detail::split_csv(line);
            if (cols.size() != 4) throw std::runtime_error("io: bad row in " + path);
            detail::check_node_coords(g, i, j, detail::parse_double(cols[0]),
                                      detail::parse_double(cols[1]));
            f.set(i, j, {detail::parse_double(cols[2]), detail::parse_double(cols[3])});
        }
    return f;
}

/// Legacy VTK structured-points file holding exactly one point-data field.
inline void write_vtk(const std::string& path, const ScalarField& f,
                      const std::string& name) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path);
    const Grid2& g = f.grid();
    os << "# vtk DataFile Version 3.0\n" << name << "\nASCII\n"
       << "DATASET STRUCTURED_POINTS\n"
       << "DIMENSIONS " << g.nx() << ' ' << g.ny() << " 1\n"
       << "ORIGIN " << detail::fmt_double(g.origin().x) << ' '
       << detail::fmt_double(g.origin().y) << " 0\n"
       << "SPACING " << detail::fmt_double(g.hx()) << ' ' << detail::fmt_double(g.hy())
       << " 1\n"
       << "POINT_DATA " << g.num_nodes() << "\n"
       << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) os << detail::fmt_double(f.at(i, j)) << "\n";
}

inline void write_vtk(const std::string& path, const VectorField2& f,
                      const std::string& name) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path);
    const Grid2& g = f.grid();
    os << "# vtk DataFile Version 3.0\n" << name << "\nASCII\n"
       << "DATASET STRUCTURED_POINTS\n"
       << "DIMENSIONS " << g.nx() << ' ' << g.ny() << " 1\n"
       << "ORIGIN " << detail::fmt_double(g.origin().x) << ' '
       << detail::fmt_double(g.origin().y) << " 0\n"
       << "SPACING " << detail::fmt_double(g.hx()) << ' ' << detail::fmt_double(g.hy())
       << " 1\n"
       << "POINT_DATA " << g.num_nodes() << "\n"
       << "VECTORS " << name << " double\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 v = f.get(i, j);
            os << detail::fmt_double(v.x) << ' ' << detail::fmt_double(v.y) << " 0\n";
        }
}

namespace detail {

inline void expect_vtk_header(std::ifstream& is, const Grid2& g, const std::string& path,
                              std::string& attr_line) {
    std::string line;
    auto next = [&]() {
        if (!std::getline(is, line)) throw std::runtime_error("io: truncated vtk " + path);
        return line;
    };
    next();  // version comment
    next();  // title
    if (next() != "ASCII") throw std::runtime_error("io: vtk not ASCII " + path);
    if (next() != "DATASET STRUCTURED_POINTS")
        throw std::runtime_error("io: vtk not structured points " + path);
    int nx = 0, ny = 0, nz = 0;
    {
        std::stringstream ss(next());
        std::string kw;
        ss >> kw >> nx >> ny >> nz;
        if (kw != "DIMENSIONS" || nx != g.nx() || ny != g.ny() || nz != 1)
            throw std::runtime_error("io: vtk dimensions mismatch " + path);
    }
    next();  // ORIGIN
    next();  // SPACING
    {
        std::stringstream ss(next());
        std::string kw;
        long long n = 0;
        ss >> kw >> n;
        if (kw != "POINT_DATA" || n != g.num_nodes())
            throw std::runtime_error("io: vtk point count mismatch " + path);
    }
    attr_line = next();
}

}  // namespace detail

inline ScalarField read_vtk_scalar(const std::string& path, const Grid2& g) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("io: cannot open " + path);
    std::string attr;
    detail::expect_vtk_header(is, g, path, attr);
    if (attr.rfind("SCALARS", 0) != 0)
        throw std::runtime_error("io: vtk scalar attribute expected in " + path);
    std::string line;
    std::getline(is, line);  // LOOKUP_TABLE
    ScalarField f(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!std::getline(is, line)) throw std::runtime_error("io: truncated " + path);
            f.at(i, j) = detail::parse_double(line);
        }
    return f;
}

inline VectorField2 read_vtk_vector(const std::string& path, const Grid2& g) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("io: cannot open " + path);
    std::string attr;
    detail::expect_vtk_header(is, g, path, attr);
    if (attr.rfind("VECTORS", 0) != 0)
        throw std::runtime_error("io: vtk vector attribute expected in " + path);
    VectorField2 f(g);
    std::string line;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!std::getline(is, line)) throw std::runtime_error("io: truncated " + path);
            std::stringstream ss(line);
            double x = 0, y = 0, z = 0;
            ss >> x >> y >> z;
            f.set(i, j, {x, y});
        }
    return f;
}

/// Per-step minimization records as line-delimited JSON.
inline void write_step_reports(const std::string& path, const std::vector<StepReport>& steps) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path);
    for (const StepReport& s : steps) {
        os << "{\"index\":" << s.index << ",\"t\":" << detail::fmt_double(s.t)
           << ",\"f_before\":" << detail::fmt_double(s.f_before)
           << ",\"f_after\":" << detail::fmt_double(s.f_after)
           << ",\"grad_norm\":" << detail::fmt_double(s.grad_norm)
           << ",\"iterations\":" << s.iterations
           << ",\"converged\":" << (s.converged ? "true" : "false")
           << ",\"line_search_failures\":" << s.line_search_failures
           << ",\"min_det\":" << detail::fmt_double(s.min_det)
           << ",\"stored\":" << detail::fmt_double(s.stored)
           << ",\"hyper\":" << detail::fmt_double(s.hyper)
           << ",\"visc\":" << detail::fmt_double(s.visc)
           << ",\"load\":" << detail::fmt_double(s.load)
           << ",\"phase_shift\":" << detail::fmt_double(s.phase_shift)
           << ",\"load_shift\":" << detail::fmt_double(s.load_shift) << "}\n";
    }
}

/// Energy audit series as a flat CSV, one row per audit time.
inline void write_energy_csv(const std::string& path, const std::vector<EnergyReport>& series) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path);
    os << "t,stored,hyper,load,e_total,dissipation_cum,load_rate_cum,phase_power_cum,residual\n";
    for (const EnergyReport& r : series) {
        os << detail::fmt_double(r.t) << ',' << detail::fmt_double(r.stored) << ','
           << detail::fmt_double(r.hyper) << ',' << detail::fmt_double(r.load) << ','
           << detail::fmt_double(r.e_total) << ',' << detail::fmt_double(r.dissipation_cum)
           << ',' << detail::fmt_double(r.load_rate_cum) << ','
           << detail::fmt_double(r.phase_power_cum) << ','
           << detail::fmt_double(r.residual) << "\n";
    }
}

inline std::vector<EnergyReport> read_energy_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("io: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("io: empty file " + path);
    std::vector<EnergyReport> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cols = detail::split_csv(line);
        if (cols.size() != 9) throw std::runtime_error("io: bad row in " + path);
        EnergyReport r;
        r.t = detail::parse_double(cols[0]);
        r.stored = detail::parse_double(cols[1]);
        r.hyper = detail::parse_double(cols[2]);
        r.load = detail::parse_double(cols[3]);
        r.e_total = detail::parse_double(cols[4]);
        r.dissipation_cum = detail::parse_double(cols[5]);
        r.load_rate_cum = detail::parse_double(cols[6]);
        r.phase_power_cum = detail::parse_double(cols[7]);
        r.residual = detail::parse_double(cols[8]);
        out.push_back(r);
    }
    return out;
}

}  // namespace accrete

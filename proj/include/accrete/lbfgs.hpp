#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

namespace accrete::lbfgs {

struct Options {
    int memory = 8;
    int max_iters = 500;
    double tol_grad = 1e-8;  ///< absolute L2 norm of the projected gradient
    double c1 = 1e-4;        ///< sufficient-decrease constant
    double c2 = 0.9;         ///< curvature constant
    int max_line_search = 60;
};

struct Result {
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    int line_search_failures = 0;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Limited-memory BFGS with backtracking line search. The objective is
/// called as obj(x, grad_out) and may return +infinity on inadmissible
/// states, which the line search treats as a failed trial. Entries flagged
/// in `fixed` are frozen (their gradient components are projected out), so
/// Dirichlet values never move. Every accepted step strictly decreases the
/// objective; the minimizer never returns a worse point than it was given.
template <class Objective>
Result minimize(Objective&& obj, std::vector<double>& x,
                const std::vector<std::uint8_t>* fixed, const Options& opt) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = x.size();

    auto project = [&](std::vector<double>& g) {
        if (!fixed) return;
        for (std::size_t i = 0; i < n; ++i)
            if ((*fixed)[i]) g[i] = 0.0;
    };

    std::vector<double> g(n), g_new(n), x_new(n), d(n);
    Result res;
    double f = obj(x, g);
    project(g);
    if (!(f < inf)) return res;  // inadmissible start; caller error
    res.value = f;
    res.grad_norm = detail::nrm2(g);
    if (res.grad_norm <= opt.tol_grad) {
        res.converged = true;
        return res;
    }

    std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;  // (s, y)
    std::vector<double> alpha_buf;

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        // Two-loop recursion: d = -H g.
        d = g;
        alpha_buf.assign(pairs.size(), 0.0);
        for (int k = static_cast<int>(pairs.size()) - 1; k >= 0; --k) {
            const auto& [s, yv] = pairs[k];
            const double rho = 1.0 / detail::dot(s, yv);
            alpha_buf[k] = rho * detail::dot(s, d);
            for (std::size_t i = 0; i < n; ++i) d[i] -= alpha_buf[k] * yv[i];
        }
        if (!pairs.empty()) {
            const auto& [s, yv] = pairs.back();
            const double gamma = detail::dot(s, yv) / detail::dot(yv, yv);
            for (auto& v : d) v *= gamma;
        }
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto& [s, yv] = pairs[k];
            const double rho = 1.0 / detail::dot(s, yv);
            const double beta = rho * detail::dot(yv, d);
            for (std::size_t i = 0; i < n; ++i) d[i] += (alpha_buf[k] - beta) * s[i];
        }
        for (auto& v : d) v = -v;
        project(d);

        double g0d = detail::dot(g, d);
        if (!(g0d < 0.0)) {  // not a descent direction; restart from steepest
            pairs.clear();
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            g0d = detail::dot(g, d);
        }

        double step = (iter == 0) ? std::min(1.0, 1.0 / std::max(1.0, res.grad_norm)) : 1.0;
        double f_new = inf;
        bool armijo = false;
        for (int ls = 0; ls < opt.max_line_search; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
            f_new = obj(x_new, g_new);
            if (f_new < inf && f_new <= f + opt.c1 * step * g0d) {
                armijo = true;
                break;
            }
            step *= 0.5;
        }
        if (!armijo) {
            res.line_search_failures++;
            if (!pairs.empty()) {  // retry once along steepest descent
                pairs.clear();
                continue;
            }
            break;
        }
        project(g_new);

        // Curvature refinement: expand while the slope is still strongly
        // negative and sufficient decrease keeps holding.
        for (int expand = 0; expand < 5; ++expand) {
            const double slope = detail::dot(g_new, d);
            if (std::abs(slope) <= opt.c2 * std::abs(g0d) || slope > 0.0) break;
            const double wider = step * 2.1;
            std::vector<double> x_try(n), g_try(n);
            for (std::size_t i = 0; i < n; ++i) x_try[i] = x[i] + wider * d[i];
            const double f_try = obj(x_try, g_try);
            if (!(f_try < inf) || f_try > f + opt.c1 * wider * g0d) break;
            step = wider;
            x_new.swap(x_try);
            f_new = f_try;
            g_new.swap(g_try);
            project(g_new);
        }

        std::vector<double> s(n), yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            yv[i] = g_new[i] - g[i];
        }
        const double sy = detail::dot(s, yv);
        if (sy > 1e-12 * detail::nrm2(s) * detail::nrm2(yv)) {
            pairs.emplace_back(std::move(s), std::move(yv));
            if (static_cast<int>(pairs.size()) > opt.memory) pairs.pop_front();
        }

        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        res.iterations = iter + 1;
        res.value = f;
        res.grad_norm = detail::nrm2(g);
        if (res.grad_norm <= opt.tol_grad) {
            res.converged = true;
            break;
        }
    }
    res.value = f;
    return res;
}

}  // namespace accrete::lbfgs

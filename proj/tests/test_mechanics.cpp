#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "accrete/accrete.hpp"

using namespace accrete;

namespace {

MaterialParams two_phase() {
    MaterialParams mp;
    mp.mu_a = 1.0;
    mp.mu_r = 3.0;
    mp.kappa = 1.0;
    mp.eta_a = 0.5;
    mp.eta_r = 2.0;
    mp.eps = 0.2;
    mp.c_gamma = 0.1;
    mp.C_gamma = 0.3;
    mp.force.rho_a = 2.0;
    mp.force.rho_r = 1.0;
    mp.force.g = {0.0, -0.3};
    return mp;
}

/// Radially expanding arrival times around a point, every node reached by T.
ScalarField cone_theta(const Grid2& g, Vec2 c, double speed) {
    ScalarField th(g);
    for (int n = 0; n < g.num_nodes(); ++n) {
        const Vec2 p = g.pos(n);
        th[n] = std::hypot(p.x - c.x, p.y - c.y) / speed;
    }
    return th;
}

}  // namespace

TEST_CASE("trajectory interpolant conventions") {
    Grid2 g(5, 4, {0.0, 0.0}, 1.0, 0.75, {Edge::Left});
    std::vector<VectorField2> snaps;
    for (int i = 0; i <= 2; ++i) {
        VectorField2 y(g);
        for (int n = 0; n < g.num_nodes(); ++n) {
            const Vec2 p = g.pos(n);
            y.set(n, {p.x + 0.01 * i, p.y - 0.02 * i});
        }
        snaps.push_back(y);
    }
    Trajectory traj(0.25, std::move(snaps));

    CHECK(traj.num_steps() == 2);
    CHECK(traj.tau() == 0.25);

    // Backward constant takes y_i on (t_{i-1}, t_i]; forward takes y_{i-1}.
    CHECK(traj.backward_index(0.3) == 2);
    CHECK(traj.forward_index(0.3) == 1);
    CHECK(traj.backward_index(0.25) == 1);
    CHECK(traj.backward_index(0.0) == 0);
    CHECK(traj.forward_index(0.5) == 2);

    const auto [i, alpha] = traj.bracket(0.3);
    CHECK(i == 2);
    CHECK(alpha == Catch::Approx(0.2).margin(1e-12));

    const VectorField2 ya = traj.sample_affine(0.3);
    for (int n = 0; n < g.num_nodes(); ++n) {
        const Vec2 want{0.8 * traj.snapshot(1).get(n).x + 0.2 * traj.snapshot(2).get(n).x,
                        0.8 * traj.snapshot(1).get(n).y + 0.2 * traj.snapshot(2).get(n).y};
        CHECK(ya.get(n).x == Catch::Approx(want.x).margin(1e-14));
        CHECK(ya.get(n).y == Catch::Approx(want.y).margin(1e-14));
    }

    SECTION("samplers clamp outside the horizon") {
        CHECK(traj.backward_index(-1.0) == 0);
        CHECK(traj.forward_index(9.0) == 2);
        CHECK(traj.bracket(9.0).first == 2);
    }
}

TEST_CASE("incremental functional gradient matches a directional difference") {
    Grid2 g(7, 6, {0.0, 0.0}, 1.0, 0.8, {Edge::Left});
    const MaterialParams mp = two_phase();
    const ScalarField theta = cone_theta(g, {0.3, 0.4}, 0.25);
    const VectorField2 y_prev = build_initial(g, 0.015);
    IncrementalProblem prob(theta, y_prev, 0.3, 0.05, mp);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x = y_prev.data();
    for (auto& v : x) v += 0.003 * u(rng);

    std::vector<double> grad(x.size());
    prob.value_and_grad(x, grad);

    std::vector<double> d(x.size());
    double nd = 0.0;
    for (auto& v : d) {
        v = u(rng);
        nd += v * v;
    }
    nd = std::sqrt(nd);
    for (auto& v : d) v /= nd;

    double want = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) want += grad[k] * d[k];

    const double step = 1e-5;
    std::vector<double> xp = x, xm = x, scratch(x.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        xp[k] += step * d[k];
        xm[k] -= step * d[k];
    }
    const double got =
        (prob.value_and_grad(xp, scratch) - prob.value_and_grad(xm, scratch)) / (2.0 * step);
    CHECK(std::abs(got - want) <= 1e-7 * std::max(1.0, std::abs(want)));
}

TEST_CASE("identity is an exact stationary point without load") {
    Grid2 g(9, 9, {0.0, 0.0}, 1.0, 1.0, {Edge::Left});
    MaterialParams mp = two_phase();
    mp.force.g = {0.0, 0.0};
    const ScalarField theta = cone_theta(g, {0.5, 0.5}, 0.2);
    const VectorField2 id = build_initial(g, 0.0);

    IncrementalProblem prob(theta, id, 0.1, 0.05, mp);
    const VectorField2 gr = prob.gradient(id);
    for (int n = 0; n < g.num_nodes(); ++n) {
        CHECK(gr.get(n).x == 0.0);
        CHECK(gr.get(n).y == 0.0);
    }

    EvolveOptions opt;
    const EvolveResult res = evolve(id, theta, 0.1, 0.2, mp, opt);
    CHECK(res.all_converged);
    for (const auto& s : res.steps) CHECK(s.iterations == 0);
    for (int i = 0; i <= res.traj.num_steps(); ++i)
        for (int n = 0; n < g.num_nodes(); ++n) {
            CHECK(res.traj.snapshot(i).get(n).x == g.pos(n).x);
            CHECK(res.traj.snapshot(i).get(n).y == g.pos(n).y);
        }
}

TEST_CASE("loaded incremental steps decrease the functional and stay orientation-safe") {
    Grid2 g(13, 13, {0.0, 0.0}, 1.0, 1.0, {Edge::Left});
    const MaterialParams mp = two_phase();
    const ScalarField theta = cone_theta(g, {0.5, 0.5}, 0.2);
    const VectorField2 y0 = build_initial(g, 0.01);

    EvolveOptions opt;
    const EvolveResult res = evolve(y0, theta, 0.1, 0.3, mp, opt);
    REQUIRE(res.steps.size() == 3);
    CHECK(res.all_converged);
    CHECK(res.minimality_ok);
    CHECK(res.energy_chain_ok);
    for (const auto& s : res.steps) {
        CHECK(s.f_after <= s.f_before + 1e-12);
        CHECK(s.min_det > opt.det_floor);
        CHECK(s.converged);
    }

    SECTION("weak form of the optimality system is small") {
        const double r = weak_residual(res.traj, theta, mp, build_test_fields(g));
        CHECK(r <= 1e-5);
    }
}

TEST_CASE("boundary pins are enforced and preserved") {
    Grid2 g(9, 8, {0.0, 0.0}, 1.0, 0.9, {Edge::Left, Edge::Bottom});
    const MaterialParams mp = two_phase();
    const ScalarField theta = cone_theta(g, {0.6, 0.5}, 0.2);

    VectorField2 bad = build_initial(g, 0.0);
    bad.set(g.index(0, 3), {0.05, bad.get(g.index(0, 3)).y});
    CHECK_THROWS_AS(evolve(bad, theta, 0.1, 0.2, mp, EvolveOptions{}),
                    std::invalid_argument);

    const VectorField2 y0 = build_initial(g, 0.02);
    const EvolveResult res = evolve(y0, theta, 0.1, 0.2, mp, EvolveOptions{});
    for (int i = 0; i <= res.traj.num_steps(); ++i)
        for (int n = 0; n < g.num_nodes(); ++n)
            if (g.is_dirichlet(n)) {
                CHECK(res.traj.snapshot(i).get(n).x == g.pos(n).x);
                CHECK(res.traj.snapshot(i).get(n).y == g.pos(n).y);
            }

    SECTION("horizon must be an integer number of steps") {
        CHECK_THROWS_AS(evolve(y0, theta, 0.3, 1.0, mp, EvolveOptions{}),
                        std::invalid_argument);
    }
}

TEST_CASE("a folded warm start is rejected as inadmissible") {
    Grid2 g(9, 9, {0.0, 0.0}, 1.0, 1.0, {Edge::Left});
    const MaterialParams mp = two_phase();
    const ScalarField theta = cone_theta(g, {0.5, 0.5}, 0.2);

    VectorField2 folded = build_initial(g, 0.0);
    const int n = g.index(5, 4);
    folded.set(n, {g.pos(n).x - 3.0 * g.hx(), g.pos(n).y});
    CHECK_THROWS_AS(incremental_step(theta, folded, 0.1, 0.1, mp, EvolveOptions{}),
                    std::invalid_argument);
}

TEST_CASE("test fields vanish on the pinned boundary and have positive norm") {
    Grid2 g(11, 9, {0.0, 0.0}, 1.0, 0.8, {Edge::Left, Edge::Top});
    const auto fields = build_test_fields(g);
    REQUIRE(fields.size() >= 2);
    for (const auto& z : fields) {
        for (int n = 0; n < g.num_nodes(); ++n)
            if (g.is_dirichlet(n)) {
                CHECK(z.get(n).x == 0.0);
                CHECK(z.get(n).y == 0.0);
            }
        CHECK(sobolev2p_norm(z, 4.0) > 0.0);
    }
}

TEST_CASE("initial state construction") {
    Grid2 g(9, 9, {0.0, 0.0}, 1.0, 1.0, {Edge::Left});
    const VectorField2 id = build_initial(g, 0.0);
    for (int n = 0; n < g.num_nodes(); ++n) {
        CHECK(id.get(n).x == g.pos(n).x);
        CHECK(id.get(n).y == g.pos(n).y);
    }

    const VectorField2 y = build_initial(g, 0.05);
    double dev = 0.0;
    for (int n = 0; n < g.num_nodes(); ++n) {
        if (g.is_dirichlet(n)) {
            CHECK(y.get(n).x == g.pos(n).x);
            CHECK(y.get(n).y == g.pos(n).y);
        }
        dev = std::max(dev, norm(y.get(n) - g.pos(n)));
    }
    CHECK(dev > 0.0);
    CHECK(dev <= 2.0 * 0.05);

    SECTION("the vanishing factor is zero exactly on pinned edges") {
        for (int j = 0; j < g.ny(); ++j)
            CHECK(dirichlet_vanishing_factor(g, g.pos(0, j)) == 0.0);
        CHECK(dirichlet_vanishing_factor(g, {0.5, 0.5}) > 0.0);
    }
}

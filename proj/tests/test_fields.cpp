#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "accrete/accrete.hpp"

using namespace accrete;

namespace {

ScalarField fill(const Grid2& g, double (*f)(double, double)) {
    ScalarField u(g);
    for (int n = 0; n < g.num_nodes(); ++n) u[n] = f(g.pos(n).x, g.pos(n).y);
    return u;
}

double dot_all(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("grid indexing and boundary classification") {
    Grid2 g(5, 4, {1.0, -2.0}, 2.0, 1.5, {Edge::Left, Edge::Bottom});

    REQUIRE(g.num_nodes() == 20);
    CHECK(g.hx() == Catch::Approx(0.5));
    CHECK(g.hy() == Catch::Approx(0.5));
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const int n = g.index(i, j);
            CHECK(n == j * g.nx() + i);
            const Vec2 p = g.pos(i, j);
            CHECK(p.x == Catch::Approx(1.0 + 0.5 * i));
            CHECK(p.y == Catch::Approx(-2.0 + 0.5 * j));
        }

    CHECK(g.on_boundary(0, 0));
    CHECK(g.on_boundary(4, 3));
    CHECK_FALSE(g.on_boundary(2, 2));

    // Dirichlet wins at shared corners; the rest of the boundary is Neumann.
    CHECK(g.is_dirichlet(0, 3));
    CHECK(g.is_dirichlet(4, 0));
    CHECK(g.is_dirichlet(0, 0));
    CHECK_FALSE(g.is_dirichlet(4, 3));
    CHECK(g.is_neumann(4, 3));
    CHECK_FALSE(g.is_neumann(2, 2));

    CHECK(g.boundary_distance(2, 2) == Catch::Approx(0.5));
    CHECK(g.boundary_distance(2, 1) == Catch::Approx(0.5));

    CHECK_THROWS_AS(Grid2(2, 4, {0, 0}, 1, 1, {Edge::Left}), std::invalid_argument);
    CHECK_THROWS_AS(Grid2(4, 4, {0, 0}, -1, 1, {Edge::Left}), std::invalid_argument);
    CHECK_THROWS_AS(Grid2(4, 4, {0, 0}, 1, 1, {}), std::invalid_argument);
}

TEST_CASE("trapezoid weights integrate bilinear polynomials exactly") {
    Grid2 g(9, 7, {0.0, 0.0}, 1.0, 1.0, {Edge::Left});

    double total = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) total += g.quad_weight(i, j);
    CHECK(total == Catch::Approx(1.0).epsilon(1e-14));

    const ScalarField xy = fill(g, [](double x, double y) { return x * y; });
    CHECK(integrate(xy) == Catch::Approx(0.25).epsilon(1e-14));

    const ScalarField lin = fill(g, [](double x, double y) { return 2.0 * x - 3.0 * y + 1.0; });
    CHECK(integrate(lin) == Catch::Approx(2.0 * 0.5 - 3.0 * 0.5 + 1.0).epsilon(1e-14));
}

TEST_CASE("first derivatives are exact on quadratics, including the boundary stencils") {
    Grid2 g(11, 9, {-0.5, 0.25}, 2.0, 1.0, {Edge::Left});
    const ScalarField u = fill(
        g, [](double x, double y) { return 1.5 * x * x - 0.7 * x * y + 2.3 * y * y + 0.4 * x - 1.1 * y + 3.0; });

    const ScalarField ux = dx(u), uy = dy(u);
    for (int n = 0; n < g.num_nodes(); ++n) {
        const Vec2 p = g.pos(n);
        CHECK(ux[n] == Catch::Approx(3.0 * p.x - 0.7 * p.y + 0.4).margin(1e-11));
        CHECK(uy[n] == Catch::Approx(-0.7 * p.x + 4.6 * p.y - 1.1).margin(1e-11));
    }
}

TEST_CASE("second derivatives are exact on cubics, including the boundary stencils") {
    Grid2 g(10, 12, {0.0, 0.0}, 1.0, 1.2, {Edge::Left});
    const ScalarField u = fill(g, [](double x, double y) {
        return x * x * x - 2.0 * x * x * y + 0.5 * y * y * y + x * y - 4.0;
    });

    const ScalarField uxx = dxx(u), uyy = dyy(u);
    for (int n = 0; n < g.num_nodes(); ++n) {
        const Vec2 p = g.pos(n);
        CHECK(uxx[n] == Catch::Approx(6.0 * p.x - 4.0 * p.y).margin(1e-10));
        CHECK(uyy[n] == Catch::Approx(3.0 * p.y).margin(1e-10));
    }

    Grid2 tiny(3, 5, {0, 0}, 1, 1, {Edge::Left});
    CHECK_THROWS_AS(dxx(ScalarField(tiny)), std::invalid_argument);
}

TEST_CASE("deformation hessian has bitwise-symmetric mixed slots") {
    Grid2 g(8, 8, {0.0, 0.0}, 1.0, 1.0, {Edge::Left});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    VectorField2 y(g);
    for (int n = 0; n < g.num_nodes(); ++n) y.set(n, {d(rng), d(rng)});

    const Ten3Field h = hessian(y);
    for (int n = 0; n < g.num_nodes(); ++n)
        for (int k = 0; k < 2; ++k) CHECK(h[n](k, 0, 1) == h[n](k, 1, 0));

    // Exact on fields whose cross term is bilinear-cubic.
    VectorField2 z(g);
    for (int n = 0; n < g.num_nodes(); ++n) {
        const Vec2 p = g.pos(n);
        z.set(n, {p.x * p.x * p.y * p.y, p.x * p.y});
    }
    const Ten3Field hz = hessian(z);
    for (int n = 0; n < g.num_nodes(); ++n) {
        const Vec2 p = g.pos(n);
        CHECK(hz[n](0, 0, 1) == Catch::Approx(4.0 * p.x * p.y).margin(1e-10));
        CHECK(hz[n](1, 0, 1) == Catch::Approx(1.0).margin(1e-11));
    }
}

TEST_CASE("derivative operators and their adjoints satisfy the discrete duality exactly") {
    Grid2 g(9, 6, {0.0, 0.0}, 1.3, 0.8, {Edge::Left});
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> d(-1.0, 1.0);

    auto rand_scalar = [&] {
        ScalarField f(g);
        for (int n = 0; n < g.num_nodes(); ++n) f[n] = d(rng);
        return f;
    };

    for (int rep = 0; rep < 5; ++rep) {
        const ScalarField u = rand_scalar(), v = rand_scalar();
        CHECK(dot_all(dx(u).data(), v.data()) ==
              Catch::Approx(dot_all(u.data(), dx_adj(v).data())).epsilon(1e-13).margin(1e-13));
        CHECK(dot_all(dy(u).data(), v.data()) ==
              Catch::Approx(dot_all(u.data(), dy_adj(v).data())).epsilon(1e-13).margin(1e-13));
        CHECK(dot_all(dxx(u).data(), v.data()) ==
              Catch::Approx(dot_all(u.data(), dxx_adj(v).data())).epsilon(1e-12).margin(1e-12));
        CHECK(dot_all(dyy(u).data(), v.data()) ==
              Catch::Approx(dot_all(u.data(), dyy_adj(v).data())).epsilon(1e-12).margin(1e-12));
    }

    SECTION("gradient and hessian assemblies inherit the duality") {
        VectorField2 y(g);
        for (int n = 0; n < g.num_nodes(); ++n) y.set(n, {d(rng), d(rng)});

        Mat2Field s(g);
        for (int n = 0; n < g.num_nodes(); ++n) {
            Mat2 m;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) m(r, c) = d(rng);
            s[n] = m;
        }
        double lhs = 0.0;
        const Mat2Field gy = grad(y);
        for (int n = 0; n < g.num_nodes(); ++n) lhs += inner(gy[n], s[n]);
        const VectorField2 gadj = grad_adjoint(s);
        const double rhs = dot_all(y.data(), gadj.data());
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12).margin(1e-12));

        Ten3Field p(g);
        for (int n = 0; n < g.num_nodes(); ++n) {
            Ten3 t;
            for (int k = 0; k < 2; ++k)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) t(k, a, b) = d(rng);
            p[n] = t;
        }
        double lhs2 = 0.0;
        const Ten3Field hy = hessian(y);
        for (int n = 0; n < g.num_nodes(); ++n) lhs2 += inner(hy[n], p[n]);
        const VectorField2 hadj = hessian_adjoint(p);
        CHECK(lhs2 == Catch::Approx(dot_all(y.data(), hadj.data())).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("fields survive their source grid") {
    ScalarField f = [] {
        Grid2 local(6, 6, {0.0, 0.0}, 1.0, 1.0, {Edge::Left});
        ScalarField inner(local, 2.5);
        return inner;
    }();
    CHECK(f.grid().nx() == 6);
    CHECK(f[f.grid().index(3, 3)] == 2.5);
    CHECK(integrate(f) == Catch::Approx(2.5));
}

TEST_CASE("bilinear sampling reproduces nodal values and linear fields") {
    Grid2 g(7, 5, {0.0, 0.0}, 1.2, 0.8, {Edge::Left});
    const ScalarField u = fill(g, [](double x, double y) { return 3.0 * x - 2.0 * y + 0.5; });

    for (int n = 0; n < g.num_nodes(); ++n)
        CHECK(bilinear(u, g.pos(n)) == Catch::Approx(u[n]).margin(1e-13));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dx01(0.0, 1.2), dy01(0.0, 0.8);
    for (int k = 0; k < 20; ++k) {
        const Vec2 p{dx01(rng), dy01(rng)};
        CHECK(bilinear(u, p) == Catch::Approx(3.0 * p.x - 2.0 * p.y + 0.5).margin(1e-13));
    }
}

TEST_CASE("field norms and differences") {
    Grid2 g(4, 4, {0.0, 0.0}, 1.0, 1.0, {Edge::Left});
    ScalarField a(g, 1.0), b(g, 1.0);
    b[5] = -2.0;
    CHECK(sup_diff(a, b) == 3.0);
    CHECK(sup_norm(b) == 2.0);

    VectorField2 u = VectorField2::identity(g), v = VectorField2::identity(g);
    v.set(2, v.get(2) + Vec2{0.0, 0.25});
    CHECK(sup_diff(u, v) == Catch::Approx(0.25));
    CHECK(l2_diff(u, v) > 0.0);
}

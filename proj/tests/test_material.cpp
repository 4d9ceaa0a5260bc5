#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "accrete/accrete.hpp"

using namespace accrete;

namespace {

MaterialParams desk_params() {
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

Mat2 random_admissible(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Mat2 f = Mat2::identity();
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) f(r, c) += 0.4 * d(rng);
    if (det(f) < 0.1) f += Mat2::identity();
    return f;
}

}  // namespace

TEST_CASE("phase blend ramp") {
    const double eps = 0.2;

    CHECK(blend(-0.1, eps) == 0.0);
    CHECK(blend(0.1, eps) == 1.0);
    CHECK(blend(0.0, eps) == 0.5);
    CHECK(blend(0.05, eps) == Catch::Approx(0.896484375).epsilon(1e-14));

    SECTION("monotone, with slope bounded by 2/eps") {
        double prev = -1.0;
        for (int k = 0; k <= 400; ++k) {
            const double s = -0.15 + 0.3 * k / 400.0;
            const double b = blend(s, eps);
            CHECK(b >= prev);
            prev = b;
            CHECK(blend_slope(s, eps) <= 2.0 / eps + 1e-12);
            CHECK(blend_slope(s, eps) >= 0.0);
        }
    }

    SECTION("slope matches a finite difference") {
        for (double s : {-0.09, -0.03, 0.0, 0.02, 0.07}) {
            const double h = 1e-6;
            const double fd = (blend(s + h, eps) - blend(s - h, eps)) / (2.0 * h);
            CHECK(blend_slope(s, eps) == Catch::Approx(fd).margin(1e-7));
        }
    }

    SECTION("sharp limit is the unit step, accreted at zero") {
        CHECK(blend(-1e-12, 0.0) == 0.0);
        CHECK(blend(0.0, 0.0) == 0.0);
        CHECK(blend(1e-12, 0.0) == 1.0);
        CHECK(blend(0.3, 0.0) == 1.0);
    }

    CHECK(blend(0.05, 0.2) == Catch::Approx(0.896484375).epsilon(1e-15));
    CHECK(blend_slope(0.05, 0.2) == Catch::Approx(5.2734375).epsilon(1e-14));
}

TEST_CASE("stored energy is stress-free and phase-independent at the identity") {
    const MaterialParams mp = desk_params();
    for (double sigma : {-1.0, -0.1, 0.0, 0.05, 0.1, 1.0}) {
        CHECK(stored_energy(sigma, Mat2::identity(), mp) ==
              Catch::Approx(mp.kappa).epsilon(1e-14));
        const Mat2 s = stored_energy_deriv(sigma, Mat2::identity(), mp);
        CHECK(inner(s, s) == 0.0);
    }
}

TEST_CASE("stored energy frozen values") {
    const MaterialParams mp = desk_params();
    const Mat2 f{{{{1.2, 0.1}, {-0.05, 0.9}}}};

    CHECK(accreting_energy(f, mp) == Catch::Approx(0.43890625).epsilon(1e-12));
    CHECK(receding_energy(f, mp) == Catch::Approx(3.0 * 0.43890625).epsilon(1e-12));
    CHECK(barrier_energy(f, mp) == Catch::Approx(1.090045423288436).epsilon(1e-12));
    CHECK(stored_energy(0.05, f, mp) == Catch::Approx(2.3158968637181276).epsilon(1e-12));
    CHECK(stored_energy_sigma_slope(0.05, f, mp) ==
          Catch::Approx(4.629089355468764).epsilon(1e-12));
    CHECK(phase_energy_gap(f, mp) == Catch::Approx(2.0 * 0.43890625).epsilon(1e-12));
}

TEST_CASE("stored energy vanishes exactly on rotations and is frame indifferent") {
    const MaterialParams mp = desk_params();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(-3.14159, 3.14159);

    for (int k = 0; k < 30; ++k) {
        const Mat2 r = rotation(ang(rng));
        CHECK(accreting_energy(r, mp) ==
              Catch::Approx(0.0).margin(1e-13 * (1.0 + mp.mu_a)));
        CHECK(receding_energy(r, mp) == Catch::Approx(0.0).margin(1e-13 * (1.0 + mp.mu_r)));
    }

    for (int k = 0; k < 30; ++k) {
        const Mat2 f = random_admissible(rng);
        const Mat2 q = rotation(ang(rng));
        const double sigma = 0.3 * ang(rng);
        const auto [w, wq] = frame_check_stored(sigma, f, q, mp);
        CHECK(wq == Catch::Approx(w).epsilon(1e-12));
    }
}

TEST_CASE("growth-law and barrier inequalities hold with the published constants") {
    const MaterialParams mp = desk_params();
    const DerivedConstants dc = derived_constants(mp);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-1.0, 1.0);

    for (int k = 0; k < 200; ++k) {
        Mat2 f;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) f(r, c) = 2.0 * d(rng);
        if (det(f) <= 1e-3) continue;

        const double np = std::pow(norm2(f), mp.p / 2.0);
        const double va = accreting_energy(f, mp);
        const double vr = receding_energy(f, mp);

        CHECK(va >= 0.0);
        CHECK(vr >= 0.0);
        CHECK(va >= dc.coercivity_scale * np - dc.coercivity_offset - 1e-12);
        CHECK(std::abs(va - vr) <= dc.phase_gap_scale * (1.0 + np) + 1e-12);
        CHECK(barrier_energy(f, mp) >=
              dc.barrier_scale * std::pow(det(f), -mp.q) - 1e-12);
    }

    SECTION("barrier blows up as orientation degenerates") {
        const Mat2 a{{{{1e-2, 0.0}, {0.0, 1.0}}}};
        const Mat2 b{{{{1e-3, 0.0}, {0.0, 1.0}}}};
        CHECK(barrier_energy(b, mp) > 1e4 * barrier_energy(a, mp));
        CHECK_THROWS_AS(stored_energy(0.0, Mat2{{{{1.0, 0.0}, {0.0, -1.0}}}}, mp),
                        std::domain_error);
    }

    SECTION("barrier derivative frozen values at diag(2, 1)") {
        const Mat2 f{{{{2.0, 0.0}, {0.0, 1.0}}}};
        const Mat2 s = barrier_energy_deriv(f, mp);
        CHECK(s(0, 0) == Catch::Approx(4.921875).epsilon(1e-14));
        CHECK(s(1, 1) == Catch::Approx(9.84375).epsilon(1e-14));
        CHECK(s(0, 1) == 0.0);
        CHECK(s(1, 0) == 0.0);
    }
}

TEST_CASE("second-gradient penalty: frozen values and p-monotonicity") {
    const MaterialParams mp = desk_params();

    Ten3 gz;
    CHECK(hyper_energy(gz, mp) == 0.0);
    const Ten3 dz = hyper_energy_deriv(gz, mp);
    CHECK(inner(dz, dz) == 0.0);

    Ten3 gh;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) gh(k, i, j) = 0.5;
    CHECK(hyper_energy(gh, mp) == Catch::Approx(0.004).epsilon(1e-14));
    CHECK(hyper_energy_deriv(gh, mp)(0, 1, 1) == Catch::Approx(0.004).epsilon(1e-14));

    const DerivedConstants dc = derived_constants(mp);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        Ten3 a, b;
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    a(k, i, j) = 2.0 * d(rng);
                    b(k, i, j) = 2.0 * d(rng);
                }
        const Ten3 diff = a - b;
        const double lhs = inner(hyper_energy_deriv(a, mp) - hyper_energy_deriv(b, mp), diff);
        const double rhs =
            dc.hyper_monotonicity * std::pow(inner(diff, diff), mp.p / 2.0);
        CHECK(lhs >= rhs - 1e-12);
    }
}

TEST_CASE("viscous dissipation: quadratic in the rate, blended, frame indifferent") {
    const MaterialParams mp = desk_params();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-1.0, 1.0);

    const Mat2 fdot_zero;
    CHECK(dissipation(0.0, Mat2::identity(), fdot_zero, mp) == 0.0);

    // Shear-rate oracle at the identity: R = eta/4 * |Fdot^T F + F^T Fdot|^2.
    Mat2 shear;
    shear(0, 1) = 1.0;
    CHECK(dissipation(-1.0, Mat2::identity(), shear, mp) ==
          Catch::Approx(mp.eta_a / 2.0).epsilon(1e-14));
    CHECK(dissipation(1.0, Mat2::identity(), shear, mp) ==
          Catch::Approx(mp.eta_r / 2.0).epsilon(1e-14));

    SECTION("stress pairs with the rate to twice the dissipation") {
        for (int k = 0; k < 50; ++k) {
            const Mat2 f = random_admissible(rng);
            Mat2 fdot;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) fdot(r, c) = d(rng);
            const double sigma = 0.5 * d(rng);
            const double r2 = inner(viscous_stress(sigma, f, fdot, mp), fdot);
            CHECK(r2 == Catch::Approx(2.0 * dissipation(sigma, f, fdot, mp))
                            .epsilon(1e-12)
                            .margin(1e-14));
        }
    }

    SECTION("superposed rigid rotation rate costs nothing") {
        // Fdot = W F with W skew: Cdot = F^T(W^T + W)F = 0.
        for (int k = 0; k < 20; ++k) {
            const Mat2 f = random_admissible(rng);
            Mat2 w;
            w(0, 1) = d(rng);
            w(1, 0) = -w(0, 1);
            CHECK(dissipation(0.2, f, w * f, mp) == Catch::Approx(0.0).margin(1e-13));
        }
    }
}

TEST_CASE("attachment speed law stays inside its configured window") {
    MaterialParams mp = desk_params();
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> d(-3.0, 3.0);

    for (int k = 0; k < 200; ++k) {
        Mat2 f;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) f(r, c) = d(rng);
        const double gam = growth_rate({0.0, 0.0}, f, mp);
        CHECK(gam >= mp.c_gamma);
        CHECK(gam <= mp.C_gamma);
    }

    CHECK(growth_rate({0.0, 0.0}, Mat2::identity(), mp) ==
          Catch::Approx(0.5 * (mp.c_gamma + mp.C_gamma)).epsilon(1e-14));

    const Mat2 stretched{{{{std::sqrt(2.0), 0.0}, {0.0, std::sqrt(2.0)}}}};
    CHECK(growth_rate({0.0, 0.0}, stretched, mp) ==
          Catch::Approx(0.27615941559557644).epsilon(1e-13));

    SECTION("zero sensitivity freezes the speed at the midpoint") {
        mp.gamma_coeffs.sensitivity = 0.0;
        for (int k = 0; k < 50; ++k) {
            Mat2 f;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) f(r, c) = d(rng);
            CHECK(growth_rate({0.0, 0.0}, f, mp) == 0.5 * (mp.c_gamma + mp.C_gamma));
        }
    }
}

TEST_CASE("body force blends densities and stays Lipschitz in the sharp limit") {
    MaterialParams mp = desk_params();
    const Vec2 x{0.3, 0.7};

    const double w = std::max(mp.eps, mp.force.eps_f);
    CHECK(body_force(-w, x, mp).y == Catch::Approx(mp.force.rho_a * mp.force.g.y));
    CHECK(body_force(w, x, mp).y == Catch::Approx(mp.force.rho_r * mp.force.g.y));
    CHECK(body_force_sigma_slope(-2.0 * w, x, mp).y == 0.0);

    SECTION("the fallback width keeps the load smooth at eps = 0") {
        mp.eps = 0.0;
        const double fd = (body_force(0.01 + 1e-7, x, mp).y -
                           body_force(0.01 - 1e-7, x, mp).y) /
                          2e-7;
        CHECK(body_force_sigma_slope(0.01, x, mp).y == Catch::Approx(fd).margin(1e-5));
        CHECK(std::abs(body_force_sigma_slope(0.01, x, mp).y) <=
              std::abs(mp.force.rho_r - mp.force.rho_a) * std::abs(mp.force.g.y) * 2.0 /
                  mp.force.eps_f);
    }
}

TEST_CASE("parameter validation rejects out-of-range models") {
    MaterialParams mp = desk_params();
    CHECK_NOTHROW(mp.validate());

    SECTION("growth exponent must exceed 2") {
        mp.p = 2.0;
        CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
    }
    SECTION("barrier exponent must dominate the growth exponent") {
        mp.q = 2.0 * mp.p / (mp.p - 2.0);
        CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
    }
    SECTION("moduli must be positive") {
        mp.mu_r = 0.0;
        CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
    }
    SECTION("speed window must be ordered") {
        mp.c_gamma = 0.4;
        CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
    }
    SECTION("blending width cannot be negative") {
        mp.eps = -0.1;
        CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
    }
}

TEST_CASE("derived constants are positive and consistent") {
    const MaterialParams mp = desk_params();
    const DerivedConstants dc = derived_constants(mp);
    CHECK(dc.coercivity_scale > 0.0);
    CHECK(dc.coercivity_offset >= 0.0);
    CHECK(dc.phase_gap_scale > 0.0);
    CHECK(dc.barrier_scale > 0.0);
    CHECK(dc.barrier_scale < mp.kappa);
    CHECK(dc.hyper_monotonicity > 0.0);
    CHECK(dc.dissipation_lower == Catch::Approx(std::min(mp.eta_a, mp.eta_r) / 2.0));
}

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "tensor.hpp"

namespace accrete {

/// Strain sensitivity of the attachment-speed law; sensitivity = 0 gives a
/// strain-independent mid-range speed.
struct GrowthLawCoeffs {
    double sensitivity = 2.0;
};

/// Piecewise-constant-density gravity load, smoothed across the interface on
/// the width max(eps, eps_f) so the load stays Lipschitz in the phase
/// variable even in the sharp-interface regime.
struct BodyForceModel {
    double rho_a = 1.0;
    double rho_r = 1.0;
    Vec2 g{0.0, 0.0};
    double eps_f = 0.05;
};

struct MaterialParams {
    double mu_a = 1.0;     ///< accreting-phase modulus
    double mu_r = 1.0;     ///< receding-phase modulus
    double kappa = 1.0;    ///< volumetric barrier modulus
    double p = 4.0;        ///< growth exponent, > 2
    double q = 5.0;        ///< barrier exponent, > 2p/(p-2)
    double eta_a = 1.0;    ///< accreting-phase viscosity
    double eta_r = 1.0;    ///< receding-phase viscosity
    double h_coef = 1e-3;  ///< second-gradient modulus
    double eps = 0.2;      ///< phase-blending width; 0 = sharp interface
    double c_gamma = 0.1;  ///< attachment speed floor
    double C_gamma = 0.3;  ///< attachment speed cap
    GrowthLawCoeffs gamma_coeffs{};
    BodyForceModel force{};

    void validate() const {
        if (!(mu_a > 0.0 && mu_r > 0.0 && kappa > 0.0))
            throw std::invalid_argument("material: moduli must be positive");
        if (!(p > 2.0)) throw std::invalid_argument("material: need p > 2");
        if (!(q > 2.0 * p / (p - 2.0)))
            throw std::invalid_argument("material: need q > 2p/(p-2)");
        if (!(eta_a > 0.0 && eta_r > 0.0))
            throw std::invalid_argument("material: viscosities must be positive");
        if (!(h_coef > 0.0)) throw std::invalid_argument("material: h_coef must be positive");
        if (!(eps >= 0.0)) throw std::invalid_argument("material: eps must be >= 0");
        if (!(c_gamma > 0.0 && C_gamma >= c_gamma))
            throw std::invalid_argument("material: need 0 < c_gamma <= C_gamma");
        if (!(force.eps_f > 0.0))
            throw std::invalid_argument("material: force smoothing width must be positive");
    }
};

/// Phase indicator ramp in the phase variable sigma. For eps > 0 a C^2
/// quintic ramp: 0 for sigma <= -eps/2, 1 for sigma >= eps/2, value 1/2 at 0,
/// slope bounded by 2/eps. For eps = 0 the left-continuous step with
/// blend(0, 0) = 0: a node whose front time equals the clock time counts as
/// already accreted, so the initial body carries the accreted energy at t=0.
inline double blend(double sigma, double eps) {
    if (eps <= 0.0) return sigma > 0.0 ? 1.0 : 0.0;
    const double u = sigma / eps + 0.5;
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
}

/// d blend / d sigma. Zero in the sharp regime (callers there use the
/// surface form of the phase power instead).
inline double blend_slope(double sigma, double eps) {
    if (eps <= 0.0) return 0.0;
    const double u = sigma / eps + 0.5;
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double v = u * (1.0 - u);
    return 30.0 * v * v / eps;
}

namespace detail {

/// Frame-indifferent phase energy shape: |F|^p - p 2^{(p-2)/2} det F
/// + (p-2) 2^{(p-2)/2}. Nonnegative, zero exactly on rotations, so the
/// reference placement carries no stress in either phase.
inline double shape_const1(double p) { return p * std::pow(2.0, 0.5 * (p - 2.0)); }
inline double shape_const0(double p) { return (p - 2.0) * std::pow(2.0, 0.5 * (p - 2.0)); }

inline double phase_shape(const Mat2& f, double p) {
    return std::pow(norm2(f), 0.5 * p) - shape_const1(p) * det(f) + shape_const0(p);
}

inline Mat2 phase_shape_deriv(const Mat2& f, double p) {
    const double n2 = norm2(f);
    const double scale = (n2 > 0.0) ? p * std::pow(n2, 0.5 * p - 1.0) : 0.0;
    return scale * f - shape_const1(p) * cofactor(f);
}

inline void require_orientation(const Mat2& f) {
    if (!(det(f) > 0.0))
        throw std::domain_error("material: deformation gradient must have det > 0");
}

}  // namespace detail

/// Volumetric barrier shared by both phases; the linear term keeps it
/// nonnegative and stress-free at det F = 1.
inline double barrier_energy(const Mat2& f, const MaterialParams& mp) {
    detail::require_orientation(f);
    const double d = det(f);
    return mp.kappa * (std::pow(d, -mp.q) + mp.q * (d - 1.0));
}

inline Mat2 barrier_energy_deriv(const Mat2& f, const MaterialParams& mp) {
    detail::require_orientation(f);
    const double d = det(f);
    return mp.kappa * mp.q * (1.0 - std::pow(d, -mp.q - 1.0)) * cofactor(f);
}

inline double accreting_energy(const Mat2& f, const MaterialParams& mp) {
    return mp.mu_a * detail::phase_shape(f, mp.p);
}

inline double receding_energy(const Mat2& f, const MaterialParams& mp) {
    return mp.mu_r * detail::phase_shape(f, mp.p);
}

/// V^r(F) - V^a(F); the density whose interface flux the energy audit tracks.
inline double phase_energy_gap(const Mat2& f, const MaterialParams& mp) {
    return (mp.mu_r - mp.mu_a) * detail::phase_shape(f, mp.p);
}

/// Blended stored energy density at phase variable sigma.
inline double stored_energy(double sigma, const Mat2& f, const MaterialParams& mp) {
    const double h = blend(sigma, mp.eps);
    const double mu = (1.0 - h) * mp.mu_a + h * mp.mu_r;
    return mu * detail::phase_shape(f, mp.p) + barrier_energy(f, mp);
}

inline Mat2 stored_energy_deriv(double sigma, const Mat2& f, const MaterialParams& mp) {
    const double h = blend(sigma, mp.eps);
    const double mu = (1.0 - h) * mp.mu_a + h * mp.mu_r;
    return mu * detail::phase_shape_deriv(f, mp.p) + barrier_energy_deriv(f, mp);
}

/// d stored_energy / d sigma; the volumetric phase-power density.
inline double stored_energy_sigma_slope(double sigma, const Mat2& f,
                                        const MaterialParams& mp) {
    return blend_slope(sigma, mp.eps) * phase_energy_gap(f, mp);
}

/// Rate of the right Cauchy-Green tensor: Fdot^T F + F^T Fdot.
inline Mat2 cauchy_green_rate(const Mat2& f, const Mat2& fdot) {
    return transpose(fdot) * f + transpose(f) * fdot;
}

/// Isotropic fourth-order viscosity acting on symmetric rates; the default
/// model. A custom model only needs apply(C, Cdot) -> D(C):Cdot.
struct IsotropicViscosity {
    double eta = 1.0;
    Mat2 apply(const Mat2& /*cauchy_green*/, const Mat2& cdot) const {
        return (eta / 2.0) * cdot;
    }
};

template <class DTensorA, class DTensorR>
double dissipation_with(const DTensorA& da, const DTensorR& dr, double sigma,
                        double eps, const Mat2& f, const Mat2& fdot) {
    const Mat2 cdot = cauchy_green_rate(f, fdot);
    const Mat2 c = transpose(f) * f;
    const double h = blend(sigma, eps);
    return 0.5 * ((1.0 - h) * inner(cdot, da.apply(c, cdot)) +
                  h * inner(cdot, dr.apply(c, cdot)));
}

template <class DTensorA, class DTensorR>
Mat2 viscous_stress_with(const DTensorA& da, const DTensorR& dr, double sigma,
                         double eps, const Mat2& f, const Mat2& fdot) {
    const Mat2 cdot = cauchy_green_rate(f, fdot);
    const Mat2 c = transpose(f) * f;
    const double h = blend(sigma, eps);
    return 2.0 * (1.0 - h) * (f * da.apply(c, cdot)) + 2.0 * h * (f * dr.apply(c, cdot));
}

/// Blended viscous dissipation (1-h) eta_a/4 |Cdot|^2 + h eta_r/4 |Cdot|^2.
inline double dissipation(double sigma, const Mat2& f, const Mat2& fdot,
                          const MaterialParams& mp) {
    return dissipation_with(IsotropicViscosity{mp.eta_a}, IsotropicViscosity{mp.eta_r},
                            sigma, mp.eps, f, fdot);
}

/// d dissipation / d Fdot; linear in Fdot, pairs to exactly twice the
/// dissipation: viscous_stress : Fdot == 2 * dissipation.
inline Mat2 viscous_stress(double sigma, const Mat2& f, const Mat2& fdot,
                           const MaterialParams& mp) {
    return viscous_stress_with(IsotropicViscosity{mp.eta_a}, IsotropicViscosity{mp.eta_r},
                               sigma, mp.eps, f, fdot);
}

/// Second-gradient (hyperelastic regularization) energy h_coef |G|^p.
inline double hyper_energy(const Ten3& g, const MaterialParams& mp) {
    return mp.h_coef * std::pow(norm2(g), 0.5 * mp.p);
}

inline Ten3 hyper_energy_deriv(const Ten3& g, const MaterialParams& mp) {
    const double n2 = norm2(g);
    const double scale = (n2 > 0.0) ? mp.p * mp.h_coef * std::pow(n2, 0.5 * mp.p - 1.0) : 0.0;
    return scale * g;
}

/// Attachment speed: bounded sigmoid of the trace strain measure, clamped to
/// [c_gamma, C_gamma]. The deformed position argument is part of the law's
/// contract; the default law does not use it.
inline double growth_rate(const Vec2& /*y*/, const Mat2& f, const MaterialParams& mp) {
    const double u = mp.gamma_coeffs.sensitivity * (0.5 * norm2(f) - 1.0);
    const double s = 1.0 / (1.0 + std::exp(-u));
    const double val = mp.c_gamma + (mp.C_gamma - mp.c_gamma) * s;
    return std::clamp(val, mp.c_gamma, mp.C_gamma);
}

/// Phase-blended gravity load; constant rho_a g deep in the accreting phase
/// (sigma <= -w/2 with w = max(eps, eps_f)).
inline Vec2 body_force(double sigma, const Vec2& /*x*/, const MaterialParams& mp) {
    const double w = std::max(mp.eps, mp.force.eps_f);
    const double rho = mp.force.rho_a + (mp.force.rho_r - mp.force.rho_a) * blend(sigma, w);
    return rho * mp.force.g;
}

/// d body_force / d sigma. The audit's time derivative of s -> f(theta - s)
/// is the negative of this.
inline Vec2 body_force_sigma_slope(double sigma, const Vec2& /*x*/,
                                   const MaterialParams& mp) {
    const double w = std::max(mp.eps, mp.force.eps_f);
    return (mp.force.rho_r - mp.force.rho_a) * blend_slope(sigma, w) * mp.force.g;
}

/// Frame-indifference probes: both returned values must agree to roundoff.
inline std::pair<double, double> frame_check_stored(double sigma, const Mat2& f,
                                                    const Mat2& q,
                                                    const MaterialParams& mp) {
    return {stored_energy(sigma, q * f, mp), stored_energy(sigma, f, mp)};
}

inline std::pair<double, double> frame_check_hyper(const Ten3& g, const Mat2& q,
                                                   const MaterialParams& mp) {
    return {hyper_energy(rotate_first_slot(q, g), mp), hyper_energy(g, mp)};
}

/// Admissibility constants implied by the concrete defaults; recorded in run
/// manifests and asserted by sampling tests.
struct DerivedConstants {
    double coercivity_scale;     ///< V^i >= coercivity_scale |F|^p - coercivity_offset
    double coercivity_offset;
    double phase_gap_scale;      ///< |V^a - V^r| <= phase_gap_scale (1 + |F|^p)
    double barrier_scale;        ///< V^J >= barrier_scale (det F)^{-q}
    double hyper_monotonicity;   ///< (DH(G)-DH(G')):(G-G') >= hyper_monotonicity |G-G'|^p
    double dissipation_lower;    ///< Cdot : D : Cdot >= dissipation_lower |Cdot|^2
};

inline DerivedConstants derived_constants(const MaterialParams& mp) {
    DerivedConstants dc{};
    const double mu_min = std::min(mp.mu_a, mp.mu_r);
    const double mu_max = std::max(mp.mu_a, mp.mu_r);
    dc.coercivity_scale = 0.5 * mu_min;
    dc.coercivity_offset = mu_max * (mp.p - 1.0) * std::pow(2.0, 0.5 * (mp.p - 2.0));
    dc.phase_gap_scale =
        std::abs(mp.mu_a - mp.mu_r) * std::max(1.0, detail::shape_const0(mp.p));
    dc.barrier_scale =
        mp.kappa * (1.0 - std::pow(mp.q / (mp.q + 1.0), mp.q + 1.0));
    dc.hyper_monotonicity = mp.h_coef * std::pow(2.0, 2.0 - mp.p);
    dc.dissipation_lower = 0.5 * std::min(mp.eta_a, mp.eta_r);
    return dc;
}

}  // namespace accrete

#pragma once

#include <cmath>
#include <complex>

#include "ale/complex_util.hpp"
#include "ale/errors.hpp"

namespace ale {

/// One slit particle: capacity c, slit length d, base half-angle beta,
/// plus constants cached for the hot evaluation paths.
///
/// The defining identities are
///   4 e^c = (d+2)^2 / (d+1),
///   e^{i beta} = 2 e^{-c} - 1 + 2 i e^{-c} sqrt(e^c - 1).
struct SlitParams {
    double c = 0.0;
    double d = 0.0;
    double beta = 0.0;
    cplx e_ibeta;

    // cached
    double ec = 1.0;        // e^c
    double emc = 1.0;       // e^{-c}
    double emch = 1.0;      // e^{-c/2}
    double ech = 1.0;       // e^{c/2}
    double a = 0.0;         // sqrt(e^c - 1), half-plane base position
    double a_sq = 0.0;      // e^c - 1
    cplx eib_m1;            // e^{i beta} - 1
    cplx eib_p1;            // e^{i beta} + 1
    cplx inv_eib_p1;        // 1 / (e^{i beta} + 1)
    cplx two_i_sinb;        // e^{i beta} - e^{-i beta}
    double tip_height = 0.0; // sqrt(1 - e^{-c}), half-plane slit tip
};

/// Build SlitParams from the capacity; d is the positive root of
/// (d+2)^2 = 4 e^c (d+1), solved in closed form.
SlitParams params_from_capacity(double c);

/// m_H(w) = i (w-1)/(w+1), exterior disc -> upper half-plane.
inline cplx mobius_to_halfplane(cplx w) {
    if (w == cplx{-1.0, 0.0}) throw pole_error("mobius_to_halfplane: pole at w = -1");
    return cplx{0.0, 1.0} * (w - 1.0) / (w + 1.0);
}

/// m_Delta(z) = (1 - iz)/(1 + iz), inverse of mobius_to_halfplane.
inline cplx mobius_to_disc_exterior(cplx z) {
    if (z == cplx{0.0, 1.0}) throw pole_error("mobius_to_disc_exterior: pole at z = i");
    const cplx iz{-z.imag(), z.real()};
    return (1.0 - iz) / (1.0 + iz);
}

/// Half-plane slit map f~(zeta) = e^{-c/2} sqrt(zeta^2 - (e^c - 1)), branch
/// arg in (0, 2pi).  Boundary inputs (Im zeta ~ 0) are resolved as the
/// continuous extension from the open half-plane, which on the branch cut
/// amounts to taking the sign of Re zeta.
inline cplx halfplane_slit(cplx zeta, const SlitParams& p) {
    const double x = zeta.real(), y = zeta.imag();
    if (std::abs(y) <= 1e-13 * (1.0 + std::abs(x))) {
        const double ur = (x - p.a) * (x + p.a);
        if (ur >= 0.0) {
            const double s = std::sqrt(ur);
            return {p.emch * (x >= 0.0 ? s : -s), 0.0};
        }
        return {0.0, p.emch * std::sqrt(-ur)};
    }
    if (std::norm(zeta) > 1e200) {
        // far field: sqrt(zeta^2 - a^2) ~ zeta (1 - a^2/(2 zeta^2))
        const cplx inv = 1.0 / zeta;
        return p.emch * zeta * (1.0 - 0.5 * p.a_sq * inv * inv);
    }
    return p.emch * sqrt_upper(zeta * zeta - p.a_sq, x);
}

/// Final Moebius stage of the slit map, in the cancellation-free form
///   f = e^c (1 - iz')^2 (w+1)^2 / (4w),
/// using (1+iz')(1-iz') = 1 + z'^2 = e^{-c}(1 + zeta^2) = 4 w e^{-c}/(w+1)^2.
/// Re(iz') <= 0 for z' in the closed upper half-plane, so 1 - iz' never
/// cancels; the grouping (1-iz')(w+1) avoids overflow near w = -1.
inline cplx slit_finish(cplx w, cplx zp, double ec) {
    const cplx t = w + 1.0;
    const cplx izp_t = cplx{-zp.imag(), zp.real()} * t;
    const cplx g = t - izp_t;
    return 0.25 * ec * g * g / w;
}

/// Single-slit map f_c : Delta -> Delta \ (1, 1+d].  Boundary |w| = 1 is
/// accepted (continuous extension); |w| < 1 - 1e-12 is rejected.
cplx slit_map(cplx w, const SlitParams& p);

/// f^{theta,c}(w) = e^{i theta} f_c(e^{-i theta} w).
cplx slit_map_rotated(cplx w, double theta, const SlitParams& p);

/// Inverse of slit_map on Delta \ (1, 1+d]; boundary points off the slit are
/// handled by continuous extension.  Realized as m_Delta . f~^{-1} . m_H with
/// f~^{-1}(z) = sqrt(e^c z^2 + (e^c - 1)), root chosen in the closed upper
/// half-plane (ties on the real axis broken by sign of Re m_H(z)).
cplx slit_map_inverse(cplx z, const SlitParams& p);

/// log|f'(w)| from the closed form
///   f'(z) = (f(z)/z) (z-1) / ((z - e^{i beta})^{1/2} (z - e^{-i beta})^{1/2}).
double log_abs_f_prime(cplx w, const SlitParams& p);

/// f(e^{i sign beta} + delta) - 1 through the factored stable formulas; valid
/// for |delta| <= beta/2, retains full relative precision for tiny |delta|.
cplx slit_map_offset(cplx delta, int sign, const SlitParams& p);

/// Stable preimage offsets near the base: for z = 1 + eps (off the slit),
/// returns (f^{-1}(z) - e^{i beta}, f^{-1}(z) - e^{-i beta}) for the two
/// prime-end branches, each computed without cancellation.
std::pair<cplx, cplx> slit_map_inverse_offset(cplx eps, const SlitParams& p);

/// log|f'(e^{i sign beta} + delta)| through the anchored factored form; keeps
/// relative precision for |delta| far below the double resolution of the pole
/// position itself.
double log_abs_f_prime_offset(cplx delta, int sign, const SlitParams& p);

// ---------------------------------------------------------------------------
// Fused kernels for the composition chains.  No domain checks; callers are
// responsible for staying inside the regime.  |f'|^2 is returned as a plain
// factor so chains can accumulate products instead of per-level logs.
// ---------------------------------------------------------------------------

struct SlitEval {
    cplx image;        // f(w)
    double fprime_sq;  // |f'(w)|^2
};

/// Absolute evaluation at w (local frame).  Returns 0 in fprime_sq if a pole
/// distance underflowed to exactly zero.
inline SlitEval slit_eval(cplx w, const SlitParams& p) {
    const cplx zeta = cplx{0.0, 1.0} * (w - 1.0) / (w + 1.0);
    const cplx zp = halfplane_slit(zeta, p);
    const cplx fw = slit_finish(w, zp, p.ec);
    const double n_im = std::norm(fw);
    const double n_w = std::norm(w);
    const double n_w1 = std::norm(w - 1.0);
    const double n_dp = std::norm(w - p.e_ibeta);
    const double n_dm = std::norm(w - std::conj(p.e_ibeta));
    const double denom = n_w * std::sqrt(n_dp * n_dm);
    return {fw, denom > 0.0 ? n_im * n_w1 / denom : 0.0};
}

struct SlitOffsetEval {
    cplx image_offset; // f(e^{i beta} + delta) - 1
    double fprime_sq;  // |f'(e^{i beta} + delta)|^2
};

/// Anchored evaluation at w = e^{+i beta} + delta.  The e^{-i beta} pole is
/// obtained by conjugation at the call site.
inline SlitOffsetEval slit_offset_eval(cplx delta, const SlitParams& p) {
    const cplx lam = 2.0 * cplx{-delta.imag(), delta.real()} * p.inv_eib_p1 / (p.eib_p1 + delta);
    const cplx u = lam * (lam - 2.0 * p.a);
    // Branch selection.  Genuine Im u below the rounding floor is resolved by
    // the Im lambda -> 0+ limit, whose side on the cut is sign(Re lambda - a).
    const double nl = std::norm(lam);
    const double al = std::sqrt(nl);
    const double noise = 1e-14 * (nl + 2.0 * p.a * al);
    cplx root;
    if (std::abs(u.imag()) <= noise) {
        if (u.real() >= 0.0) {
            const double s = std::sqrt(u.real());
            root = {lam.real() - p.a >= 0.0 ? s : -s, 0.0};
        } else {
            root = {0.0, std::sqrt(-u.real())};
        }
    } else {
        root = csqrt_fast(u);
        if (root.imag() < 0.0) root = -root;
    }
    const cplx zp = p.emch * root;
    const cplx izp{-zp.imag(), zp.real()};
    const cplx off = -2.0 * izp / (1.0 + izp);

    const double n_im = 1.0 + 2.0 * off.real() + std::norm(off);
    const double n_w = 1.0 + 2.0 * (delta.real() * p.e_ibeta.real() + delta.imag() * p.e_ibeta.imag()) + std::norm(delta);
    const double n_w1 = std::norm(p.eib_m1 + delta);
    const double n_dp = std::norm(delta);
    const double n_dm = std::norm(delta + p.two_i_sinb);
    const double denom = n_w * std::sqrt(n_dp * n_dm);
    return {off, denom > 0.0 ? n_im * n_w1 / denom : 0.0};
}

} // namespace ale

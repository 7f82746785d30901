#include "ale/slit_map.hpp"

#include <cmath>
#include <limits>

namespace ale {

SlitParams params_from_capacity(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw domain_error("params_from_capacity: capacity must be a positive finite real");
    }
    SlitParams p;
    p.c = c;
    p.ec = std::exp(c);
    p.emc = std::exp(-c);
    p.emch = std::exp(-0.5 * c);
    p.ech = std::exp(0.5 * c);
    p.a_sq = std::expm1(c);
    p.a = std::sqrt(p.a_sq);
    p.d = 2.0 * p.a_sq + 2.0 * std::sqrt(p.ec * p.a_sq);
    const double re = 2.0 * p.emc - 1.0;
    const double im = 2.0 * p.emc * p.a;
    p.e_ibeta = {re, im};
    p.beta = std::atan2(im, re);
    p.eib_m1 = {2.0 * std::expm1(-c), im};
    p.eib_p1 = {2.0 * p.emc, im};
    p.inv_eib_p1 = 1.0 / p.eib_p1;
    p.two_i_sinb = {0.0, 2.0 * im};
    p.tip_height = std::sqrt(-std::expm1(-c));
    return p;
}

cplx slit_map(cplx w, const SlitParams& p) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        throw domain_error("slit_map: non-finite input");
    }
    const double r = std::abs(w);
    if (r < 1.0 - 1e-12) throw domain_error("slit_map: |w| < 1");
    if (w == cplx{-1.0, 0.0}) return {-1.0, 0.0};
    const cplx zeta = cplx{0.0, 1.0} * (w - 1.0) / (w + 1.0);
    const cplx zp = halfplane_slit(zeta, p);
    return slit_finish(w, zp, p.ec);
}

cplx slit_map_rotated(cplx w, double theta, const SlitParams& p) {
    const cplx rot = unit_rot(theta);
    return rot * slit_map(std::conj(rot) * w, p);
}

cplx slit_map_inverse(cplx z, const SlitParams& p) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw domain_error("slit_map_inverse: non-finite input");
    }
    const double r = std::abs(z);
    if (r < 1.0 - 1e-12) throw domain_error("slit_map_inverse: |z| < 1");
    if (z.imag() == 0.0 && z.real() > 1.0 && z.real() < 1.0 + p.d) {
        throw domain_error("slit_map_inverse: z strictly inside the slit");
    }
    if (z == cplx{-1.0, 0.0}) return {-1.0, 0.0};
    const cplx zeta = cplx{0.0, 1.0} * (z - 1.0) / (z + 1.0);
    cplx u;
    if (std::norm(zeta) > 1e200) {
        const cplx inv = 1.0 / zeta;
        u = p.ec * zeta * zeta * (1.0 + (p.a_sq / p.ec) * inv * inv);
    } else {
        u = p.ec * zeta * zeta + p.a_sq;
    }
    cplx root = csqrt_fast(u);
    if (root.imag() > 0.0) {
        // keep
    } else if (root.imag() < 0.0) {
        root = -root;
    } else {
        root = zeta.real() >= 0.0 ? root : -root;
    }
    return slit_finish(z, root, p.emc);
}

double log_abs_f_prime(cplx w, const SlitParams& p) {
    const double n_dp = std::norm(w - p.e_ibeta);
    const double n_dm = std::norm(w - std::conj(p.e_ibeta));
    if (n_dp == 0.0 || n_dm == 0.0) throw pole_error("log_abs_f_prime: w at a pole of f'");
    const cplx fw = slit_map(w, p);
    const double n_im = std::norm(fw);
    const double n_w = std::norm(w);
    const double n_w1 = std::norm(w - 1.0);
    if (n_w1 == 0.0) return -std::numeric_limits<double>::infinity(); // tip preimage, |f'(1)| = 0
    return 0.5 * (std::log(n_im) - std::log(n_w) + std::log(n_w1)) - 0.25 * (std::log(n_dp) + std::log(n_dm));
}

cplx slit_map_offset(cplx delta, int sign, const SlitParams& p) {
    if (std::abs(delta) > 0.5 * p.beta) {
        throw out_of_regime_error("slit_map_offset: |delta| > beta/2, use slit_map");
    }
    if (sign < 0) return std::conj(slit_map_offset(std::conj(delta), +1, p));
    return slit_offset_eval(delta, p).image_offset;
}

double log_abs_f_prime_offset(cplx delta, int sign, const SlitParams& p) {
    const cplx d = sign < 0 ? std::conj(delta) : delta;
    const double fsq = slit_offset_eval(d, p).fprime_sq;
    if (!(fsq > 0.0) || !std::isfinite(fsq)) throw pole_error("log_abs_f_prime_offset: pole distance underflowed");
    return 0.5 * std::log(fsq);
}

std::pair<cplx, cplx> slit_map_inverse_offset(cplx eps, const SlitParams& p) {
    if (std::abs(eps) > p.c) {
        throw out_of_regime_error("slit_map_inverse_offset: |z - 1| > c, use slit_map_inverse");
    }
    // zeta' = m_H(1 + eps) = i eps / (2 + eps)
    const cplx zeta = cplx{0.0, 1.0} * eps / (2.0 + eps);
    // sqrt(a^2 + e^c zeta'^2) = a + lam_r, stable for tiny zeta'
    const cplx w2 = p.ec * zeta * zeta;
    const cplx root = csqrt_fast(p.a_sq + w2);
    const cplx root_pos = root.real() >= 0.0 ? root : -root;
    const cplx lam_r = w2 / (root_pos + p.a);
    // offsets of m_Delta(-(a + lam_r)) from m_Delta(-a) = e^{i beta}
    // and of m_Delta(a + lam_r) from m_Delta(a) = e^{-i beta}:
    // m_Delta(z) - m_Delta(v) = -2i (z - v) / ((1 + iz)(1 + iv))
    const cplx ia{0.0, p.a};
    const cplx i_lam{-lam_r.imag(), lam_r.real()};
    const cplx off_plus = 2.0 * i_lam / ((1.0 - ia - i_lam) * (1.0 - ia));
    const cplx off_minus = -2.0 * i_lam / ((1.0 + ia + i_lam) * (1.0 + ia));
    return {off_plus, off_minus};
}

} // namespace ale

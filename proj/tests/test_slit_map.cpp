#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "ale/rng.hpp"
#include "ale/slit_map.hpp"

using namespace ale;

namespace {

// central-difference |f'| oracle, independent of the closed form
double fd_log_abs_f_prime(cplx w, const SlitParams& p) {
    const double h = 1e-7 * std::max(1.0, std::abs(w));
    const cplx d1 = (slit_map(w + h, p) - slit_map(w - h, p)) / (2.0 * h);
    const cplx d2 = (slit_map(w + cplx{0, h}, p) - slit_map(w - cplx{0, h}, p)) / (2.0 * cplx{0, h});
    return std::log(std::abs(0.5 * (d1 + d2)));
}

cplx random_exterior_point(Rng& rng, double rmin, double rmax) {
    return rng.uniform(rmin, rmax) * unit_rot(rng.uniform(-kPi, kPi));
}

} // namespace

TEST_CASE("params_from_capacity identities") {
    const double c_unit = std::log(9.0 / 8.0);
    const SlitParams p = params_from_capacity(c_unit);
    CHECK(p.d == doctest::Approx(1.0).epsilon(1e-14));

    for (double c : {1e-2, 1e-3, 1e-4, 0.3}) {
        const SlitParams q = params_from_capacity(c);
        // 4e^c = (d+2)^2/(d+1)
        const double lhs = 4.0 * std::exp(c);
        const double rhs = (q.d + 2.0) * (q.d + 2.0) / (q.d + 1.0);
        CHECK(std::abs(lhs - rhs) / lhs < 1e-12);
        // e^{i beta} closed form
        const cplx eib_ref = 2.0 * std::exp(-c) - 1.0 + cplx{0, 2.0} * std::exp(-c) * std::sqrt(std::expm1(c));
        CHECK(std::abs(q.e_ibeta - eib_ref) < 1e-12);
        CHECK(std::abs(std::abs(q.e_ibeta) - 1.0) < 1e-12);
    }

    // c -> 0 degenerate particle: beta/(2 sqrt c) -> 1, d/(2 sqrt c) -> 1
    const SlitParams tiny = params_from_capacity(1e-10);
    CHECK(tiny.beta / (2.0 * std::sqrt(1e-10)) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(tiny.d / (2.0 * std::sqrt(1e-10)) == doctest::Approx(1.0).epsilon(1e-5));

    // c = 1e-4: beta = 0.02 (1 + eps), |eps| < 1e-2
    const SlitParams small = params_from_capacity(1e-4);
    CHECK(std::abs(small.beta / 0.02 - 1.0) < 1e-2);

    CHECK_THROWS_AS(params_from_capacity(0.0), domain_error);
    CHECK_THROWS_AS(params_from_capacity(-1.0), domain_error);
    CHECK_THROWS_AS(params_from_capacity(std::nan("")), domain_error);
}

TEST_CASE("mobius maps") {
    CHECK(std::abs(mobius_to_halfplane({1.0, 0.0})) == 0.0);
    // w -> infinity: m_H -> i
    CHECK(std::abs(mobius_to_halfplane({1e14, 0.0}) - cplx{0, 1}) < 1e-13);
    CHECK_THROWS_AS(mobius_to_halfplane({-1.0, 0.0}), pole_error);

    // m_H(e^{i beta}) = -sqrt(e^c - 1) for c = 0.01
    const SlitParams p = params_from_capacity(0.01);
    CHECK(std::abs(mobius_to_halfplane(p.e_ibeta) - cplx{-p.a, 0.0}) < 1e-14);

    CHECK(std::abs(mobius_to_disc_exterior({0.0, 0.0}) - 1.0) == 0.0);
    CHECK(std::abs(mobius_to_disc_exterior({-p.a, 0.0}) - p.e_ibeta) < 1e-14);
    CHECK_THROWS_AS(mobius_to_disc_exterior({0.0, 1.0}), pole_error);

    // inverse pair on random exterior points
    Rng rng(42);
    for (int i = 0; i < 100; ++i) {
        const cplx w = random_exterior_point(rng, 1.01, 8.0);
        CHECK(std::abs(mobius_to_disc_exterior(mobius_to_halfplane(w)) - w) < 1e-13 * std::abs(w));
    }
}

TEST_CASE("halfplane_slit branch and landmarks") {
    const SlitParams p = params_from_capacity(0.01);
    // base maps to 0
    CHECK(std::abs(halfplane_slit({-p.a, 0.0}, p)) < 1e-15);
    // zeta = 0 maps to the slit tip i sqrt(1 - e^{-c})
    const cplx tip = halfplane_slit({0.0, 0.0}, p);
    CHECK(std::abs(tip - cplx{0.0, p.tip_height}) < 1e-15);
    // far field
    const cplx far = halfplane_slit({1e6, 2e5}, p);
    const cplx zeta{1e6, 2e5};
    CHECK(std::abs(far / zeta - p.emch) < 1e-12);

    // branch consistency: Im f~ >= 0 on upper half-plane samples
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        const cplx z{rng.uniform(-3.0, 3.0), rng.uniform(0.0, 3.0)};
        CHECK(halfplane_slit(z, p).imag() >= -1e-15);
    }
}

TEST_CASE("slit_map landmarks and far field") {
    for (double c : {1e-2, 1e-3, 1e-4}) {
        const SlitParams p = params_from_capacity(c);
        CHECK(std::abs(slit_map({1.0, 0.0}, p) - (1.0 + p.d)) < 1e-12);
        CHECK(std::abs(slit_map(p.e_ibeta, p) - 1.0) < 1e-10);
        CHECK(std::abs(slit_map(std::conj(p.e_ibeta), p) - 1.0) < 1e-10);
        const cplx far = slit_map({1e9, 0.0}, p);
        CHECK(std::abs(far / (p.ec * 1e9) - 1.0) < 1e-9);
        // capacity normalization at R = 1e8
        const double cap = std::log(std::abs(slit_map({1e8, 0.0}, p)) / 1e8);
        CHECK(std::abs(cap - c) < 1e-7);
    }
    const SlitParams p = params_from_capacity(1e-3);
    CHECK_THROWS_AS(slit_map({0.5, 0.1}, p), domain_error);
    // real coefficients: f(conj w) = conj f(w)
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const cplx w = random_exterior_point(rng, 1.0, 5.0);
        CHECK(std::abs(slit_map(std::conj(w), p) - std::conj(slit_map(w, p))) < 1e-13 * (1.0 + std::abs(w)));
    }
    // f(-1) = -1 (the only real boundary fixed point away from the slit)
    CHECK(std::abs(slit_map({-1.0, 0.0}, p) + 1.0) == 0.0);
}

TEST_CASE("slit_map_rotated equivariance") {
    const SlitParams p = params_from_capacity(2e-3);
    Rng rng(11);
    // theta = 0 reduces to slit_map
    for (int i = 0; i < 20; ++i) {
        const cplx w = random_exterior_point(rng, 1.0, 4.0);
        CHECK(std::abs(slit_map_rotated(w, 0.0, p) - slit_map(w, p)) < 1e-14 * std::abs(w));
    }
    // theta = pi, w = -1 -> -(1 + d)
    CHECK(std::abs(slit_map_rotated({-1.0, 0.0}, kPi, p) + (1.0 + p.d)) < 1e-12);
    // modulus is rotation invariant
    for (int i = 0; i < 100; ++i) {
        const double th = rng.uniform(-kPi, kPi);
        const cplx w = random_exterior_point(rng, 1.0, 4.0);
        const double m1 = std::abs(slit_map_rotated(unit_rot(th) * w, th, p));
        const double m2 = std::abs(slit_map(w, p));
        CHECK(std::abs(m1 - m2) < 1e-12 * (1.0 + m2));
    }
}

TEST_CASE("slit_map_inverse") {
    const SlitParams p = params_from_capacity(1e-3);
    // tip preimage; the sqrt singularity of f^{-1} at the tip limits the
    // attainable absolute precision to ~sqrt(eps * c)
    CHECK(std::abs(slit_map_inverse({1.0 + p.d, 0.0}, p) - 1.0) < 5e-9);
    CHECK_THROWS_AS(slit_map_inverse({1.0 + 0.5 * p.d, 0.0}, p), domain_error);
    CHECK_THROWS_AS(slit_map_inverse({0.2, 0.2}, p), domain_error);

    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const cplx w = random_exterior_point(rng, 1.0 + 1e-6, 10.0);
        const cplx z = slit_map(w, p);
        CHECK(std::abs(slit_map_inverse(z, p) - w) < 1e-10 * std::abs(w));
        CHECK(std::abs(slit_map(slit_map_inverse(z, p), p) - z) < 1e-10 * std::abs(z));
    }

    // inverse distance estimate at |z-1| = s = c
    const double s = p.c;
    const cplx z = 1.0 + s * unit_rot(0.7);
    const cplx wpre = slit_map_inverse(z, p);
    const double dist = std::min(std::abs(wpre - p.e_ibeta), std::abs(wpre - std::conj(p.e_ibeta)));
    const double predicted = s * s / (4.0 * std::sqrt(p.a_sq));
    CHECK(std::abs(dist / predicted - 1.0) < 10.0 * s);
}

TEST_CASE("log_abs_f_prime: closed form vs finite differences") {
    Rng rng(17);
    for (double c : {1e-2, 1e-3, 1e-4}) {
        const SlitParams p = params_from_capacity(c);
        int done = 0;
        while (done < 100) {
            const cplx w = random_exterior_point(rng, 1.0 + 1e-4, 6.0);
            const double dist = std::min(std::abs(w - p.e_ibeta), std::abs(w - std::conj(p.e_ibeta)));
            if (dist < 0.5 * p.beta || std::abs(w - 1.0) < 1e-3) continue;
            const double lf = log_abs_f_prime(w, p);
            const double fd = fd_log_abs_f_prime(w, p);
            CHECK(std::abs(lf - fd) < 1e-6 * std::max(1.0, std::abs(lf)));
            ++done;
        }
    }
    // conjugation symmetry
    const SlitParams p = params_from_capacity(1e-3);
    for (int i = 0; i < 100; ++i) {
        const cplx w = random_exterior_point(rng, 1.0, 5.0);
        if (std::min(std::abs(w - p.e_ibeta), std::abs(w - std::conj(p.e_ibeta))) < 1e-6) continue;
        CHECK(log_abs_f_prime(w, p) == doctest::Approx(log_abs_f_prime(std::conj(w), p)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(log_abs_f_prime(p.e_ibeta, p), pole_error);

    // near-pole growth: log|f'| within [log A1, log A2] + 0.5 log(beta/|d|)
    const cplx delta = p.beta * 1e-4 * unit_rot(0.5 * kPi + p.beta);
    const cplx w = p.e_ibeta + delta;
    const double val = log_abs_f_prime(w, p);
    const double growth = 0.5 * std::log(p.beta / std::abs(delta));
    CHECK(val > std::log(0.1) + growth);
    CHECK(val < std::log(10.0) + growth);
}

TEST_CASE("slit_map_offset: stability and agreement") {
    // delta = 0 -> 0
    const SlitParams p4 = params_from_capacity(1e-4);
    CHECK(std::abs(slit_map_offset({0.0, 0.0}, +1, p4)) == 0.0);

    // deep offsets keep full relative precision against the lemma leading term
    for (double psi : {0.0, 0.5, 1.2}) {
        const cplx delta = 1e-20 * unit_rot(psi) * p4.e_ibeta; // outward-ish directions
        const cplx off = slit_map_offset(delta, +1, p4);
        const double lead = 2.0 * std::pow(p4.a_sq, 0.25) * std::sqrt(std::abs(delta));
        CHECK(std::abs(std::abs(off) / lead - 1.0) <= 1e-10);
    }

    // cross-validation with plain composition in the overlap regime
    Rng rng(23);
    for (double c : {1e-2, 1e-3}) {
        const SlitParams p = params_from_capacity(c);
        for (int i = 0; i < 200; ++i) {
            const double mag = std::pow(10.0, rng.uniform(-6.0, std::log10(0.5 * p.beta)));
            const double psi = rng.uniform(0.0, kPi); // keep w outside the disc
            const cplx delta = mag * unit_rot(psi) * p.e_ibeta;
            const cplx w = p.e_ibeta + delta;
            if (std::abs(w) < 1.0) continue;
            const cplx off = slit_map_offset(delta, +1, p);
            const cplx plain = slit_map(w, p) - 1.0;
            CHECK(std::abs(off - plain) < 1e-8 * std::abs(plain));
        }
    }

    // sign = -1 mirrors sign = +1
    const SlitParams p = params_from_capacity(1e-3);
    const cplx d{1e-9, 3e-9};
    CHECK(std::abs(slit_map_offset(d, -1, p) - std::conj(slit_map_offset(std::conj(d), +1, p))) == 0.0);

    CHECK_THROWS_AS(slit_map_offset({0.9 * p.beta, 0.0}, +1, p), out_of_regime_error);
}

TEST_CASE("distance-estimate envelope: single K < 10 per capacity") {
    Rng rng(31);
    for (double c : {1e-2, 1e-3, 1e-4}) {
        const SlitParams p = params_from_capacity(c);
        const double coeff = 2.0 * std::pow(p.a_sq, 0.25);
        double K = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double lo = std::pow(c, 1.5), hi = 0.5 * p.beta;
            const double mag = lo * std::pow(hi / lo, rng.uniform());
            const double psi = rng.uniform(0.0, kPi);
            const cplx delta = mag * unit_rot(psi) * p.e_ibeta;
            if (std::abs(p.e_ibeta + delta) < 1.0) continue;
            const cplx off = slit_map_offset(delta, +1, p);
            const double ratio = std::abs(off) / (coeff * std::sqrt(mag));
            const double err = std::max(mag / std::sqrt(c), std::pow(c, 0.25) * std::sqrt(mag));
            K = std::max(K, std::abs(ratio - 1.0) / err);
        }
        CHECK(K < 10.0);
        CHECK(K > 0.0);
    }
}

TEST_CASE("slit_map_inverse_offset: stable preimage offsets near the base") {
    const SlitParams p = params_from_capacity(1e-3);
    // cross-check against the direct inverse where both are accurate
    for (double s : {1e-4, 3e-5}) {
        const cplx z = 1.0 + s * unit_rot(0.9);
        const auto [op, om] = slit_map_inverse_offset(z - 1.0, p);
        const cplx direct = slit_map_inverse(z, p);
        const double dplus = std::abs(direct - p.e_ibeta);
        const double dmin = std::min(std::abs(op), std::abs(om));
        // the direct inverse lands on one prime end; our offsets cover both
        CHECK(std::min(std::abs(std::abs(op) - dplus), std::abs(std::abs(om) - dplus)) < 1e-6 * dplus);
        // lemma scaling
        const double predicted = s * s / (4.0 * std::sqrt(p.a_sq));
        CHECK(std::abs(dmin / predicted - 1.0) < 10.0 * s);
    }
    // deep regime: |z-1| = 1e-12, far below direct-inverse resolution
    const auto [op, om] = slit_map_inverse_offset({1e-12, 0.0}, p);
    const double predicted = 1e-24 / (4.0 * std::sqrt(p.a_sq));
    CHECK(std::abs(std::abs(op) / predicted - 1.0) < 1e-6);
    CHECK(std::abs(std::abs(om) / predicted - 1.0) < 1e-6);
}

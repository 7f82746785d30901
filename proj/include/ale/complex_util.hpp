#pragma once

#include <cmath>
#include <complex>

namespace ale {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

/// Principal square root, computed without the libm complex-branch overhead.
inline cplx csqrt_fast(cplx u) {
    const double x = u.real(), y = u.imag();
    const double r = std::hypot(x, y);
    if (r == 0.0) return {0.0, 0.0};
    if (x >= 0.0) {
        const double t = std::sqrt(0.5 * (r + x));
        return {t, 0.5 * y / t};
    }
    const double t = std::sqrt(0.5 * (r - x));
    return {0.5 * std::abs(y) / t, std::copysign(t, y)};
}

/// Square root with the branch fixed by arg : C \ [0,inf) -> (0, 2pi), i.e. the
/// root lying in the closed upper half-plane.  Points exactly on the cut
/// (u real > 0) are resolved by `side`: side >= 0 takes the limit from above
/// (+sqrt), side < 0 from below (-sqrt).
inline cplx sqrt_upper(cplx u, double side = 1.0) {
    if (u.imag() == 0.0) {
        if (u.real() >= 0.0) {
            const double s = std::sqrt(u.real());
            return {side >= 0.0 ? s : -s, 0.0};
        }
        return {0.0, std::sqrt(-u.real())};
    }
    cplx s = csqrt_fast(u);
    return s.imag() < 0.0 ? -s : s;
}

/// e^{i phi} - 1 without cancellation near phi = 0.
inline cplx expim1(double phi) {
    const double s = std::sin(0.5 * phi);
    return {-2.0 * s * s, std::sin(phi)};
}

/// e^{sigma + i phi} - 1, full relative precision for tiny sigma, phi.
inline cplx expm1_complex(double sigma, double phi) {
    const double u = std::expm1(sigma);
    const cplx v = expim1(phi);
    return u + v + u * v;
}

/// log|1 + z| computed stably when |z| is small.
inline double log_abs_1p(cplx z) {
    return 0.5 * std::log1p(2.0 * z.real() + std::norm(z));
}

inline cplx unit_rot(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Wrap an angle to (-pi, pi].
inline double wrap_pi(double x) {
    x = std::remainder(x, kTwoPi);
    if (x <= -kPi) x += kTwoPi;
    return x;
}

} // namespace ale

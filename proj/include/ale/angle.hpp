#pragma once

#include <cmath>
#include <cstdint>

#include "ale/complex_util.hpp"

namespace ale {

/// Angle stored as base + m*unit + r with |r| <= unit/2, where unit is the
/// base particle's half-angle beta and base is the reference angle theta_1.
/// Keeping the beta-multiple as an integer preserves relative precision of
/// tiny offsets from the attachment poles; differences of anchored angles are
/// exact in the integer part.
struct AnchoredAngle {
    std::int64_t m = 0;
    double r = 0.0;
    double base = 0.0;

    double value(double unit) const { return base + static_cast<double>(m) * unit + r; }

    /// Adding k steps of unit changes m only; r is untouched, exactly.
    AnchoredAngle add_steps(std::int64_t k) const { return {m + k, r, base}; }

    /// Add a small offset into r, then fold whole units of r back into m.
    AnchoredAngle add_offset(double phi, double unit) const {
        AnchoredAngle out{m, r + phi, base};
        return out.renormalized(unit);
    }

    AnchoredAngle renormalized(double unit) const {
        AnchoredAngle out = *this;
        if (std::abs(out.r) > 0.5 * unit) {
            const double k = std::nearbyint(out.r / unit);
            out.m += static_cast<std::int64_t>(k);
            out.r -= k * unit;
        }
        return out;
    }

    static AnchoredAngle from_value(double theta, double unit, double base = 0.0) {
        const double k = std::nearbyint((theta - base) / unit);
        AnchoredAngle out;
        out.m = static_cast<std::int64_t>(k);
        out.r = theta - base - k * unit;
        out.base = base;
        return out;
    }

    /// Exact-in-the-integer-part difference a - b, in radians.
    static double diff(const AnchoredAngle& a, const AnchoredAngle& b, double unit) {
        return static_cast<double>(a.m - b.m) * unit + (a.r - b.r) + (a.base - b.base);
    }
};

} // namespace ale

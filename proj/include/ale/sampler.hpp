#pragma once

#include <cstdint>
#include <vector>

#include "ale/cluster.hpp"

namespace ale {

/// One density cell.  Pole-window cells store their left edge as an offset
/// from the pole anchor so that sub-sigma resolution survives; coarse cells
/// store an absolute circle angle.
struct GridCell {
    double left = 0.0;           // offset from anchor, or absolute angle
    double width = 0.0;
    double log_integrand = 0.0;  // nu log|Phi_n'| at the midpoint
    std::int8_t anchor = -1;     // -1 coarse, 0 pole plus, 1 pole minus, 2 old basepoint
    bool excluded = false;       // pole hit at the midpoint (guard value)
    double anchor_pos = 0.0;     // absolute anchor angle (anchor >= 0)
};

/// Discretized attachment density h_{n+1} in log space.
struct DensityGrid {
    std::vector<GridCell> cells;
    std::vector<double> prob;   // cell probabilities (0 for excluded)
    std::vector<double> cum;    // cumulative probabilities
    double log_z = 0.0;
    std::size_t n = 0;
    bool has_poles = false;
    AnchoredAngle pole_plus, pole_minus;
    double pole_plus_pos = 0.0;
    double pole_minus_pos = 0.0;
    double window = 0.0;        // pole window half-width (radians)
    double unit = 0.0;          // anchored-angle unit (base beta)
    std::size_t excluded_count = 0;

    /// Absolute midpoint angle of a cell (collapsed to double).
    double midpoint(std::size_t i) const {
        const GridCell& cell = cells[i];
        const double mid = cell.left + 0.5 * cell.width;
        return cell.anchor < 0 ? mid : cell.anchor_pos + mid;
    }
};

/// Build the attachment density for the next particle: nu log|Phi_n'(e^{sigma+i theta})|
/// on coarse cells plus dyadic pole windows (offset-chain evaluation), with
/// log-sum-exp normalization.
DensityGrid build_density(const ClusterState& state);

/// Inverse-CDF sample; results drawn from a pole window carry the pole anchor
/// so the offset survives in the anchored representation.
AnchoredAngle sample_angle(const DensityGrid& grid, Rng& rng);

/// c_{n+1} = c |Phi_n'(e^{sigma + i theta})|^{-alpha}; exactly c when alpha = 0.
double next_capacity(const ClusterState& state, const AnchoredAngle& theta);

/// Probability mass within half_width of the anchor (partial cells pro-rated).
double mass_near(const DensityGrid& grid, const AnchoredAngle& anchor, double half_width);

struct StepMoments {
    double m1 = 0.0;    // int phi h(center+phi) dphi
    double m2 = 0.0;    // int phi^2 h dphi
    double tail2 = 0.0; // int phi^2 h 1[|phi| > eps] dphi
};

/// Signed circular moments of the density about `center`, exact per cell for
/// the piecewise-constant density.
StepMoments step_moments(const DensityGrid& grid, const AnchoredAngle& center, double eps);

} // namespace ale

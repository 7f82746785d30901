#pragma once

#include <vector>

#include "ale/cluster.hpp"

namespace ale {

/// Piecewise-constant driver: value k drives capacity interval [k dt, (k+1) dt).
struct PiecewiseDriver {
    double dt = 0.0;
    std::vector<double> values;

    double total_capacity() const { return dt * static_cast<double>(values.size()); }
};

/// Exact solution of the radial Loewner equation for a piecewise-constant
/// driver: the composition of rotated slit maps of capacity dt.
ClusterState solve_composition(const PiecewiseDriver& driver);

/// phi_T(w) by RK4 on the characteristic flow du/ds = u (u + e^{i xi}) / (u - e^{i xi})
/// with the driver traversed in reverse.  Throws swallowed_error if the
/// trajectory reaches the unit circle.
cplx solve_ode(const PiecewiseDriver& driver, cplx w, int rk_steps_per_unit_capacity);

/// Piecewise-constant sample of sqrt(kappa) B_t on [0, T] with step dt.
PiecewiseDriver sample_sle_driver(double kappa, double T, double dt, Rng& rng);

/// Symmetric Hausdorff distance between two polylines.
double hull_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

} // namespace ale

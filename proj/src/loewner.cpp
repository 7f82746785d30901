#include "ale/loewner.hpp"

#include <algorithm>
#include <cmath>

namespace ale {

ClusterState solve_composition(const PiecewiseDriver& driver) {
    if (!(driver.dt > 0.0)) throw domain_error("solve_composition: dt must be positive");
    SimParams cfg;
    cfg.c = driver.dt;
    cfg.nu = 4.0;
    cfg.T = std::max(driver.total_capacity(), driver.dt);
    cfg.d_stat = 1e9; // replaying a given driver never stops
    ClusterState st = new_cluster(cfg);
    for (double xi : driver.values) {
        st = append_particle(std::move(st), AnchoredAngle::from_value(xi, st.unit()), driver.dt);
    }
    return st;
}

cplx solve_ode(const PiecewiseDriver& driver, cplx w, int rk_steps_per_unit_capacity) {
    if (rk_steps_per_unit_capacity < 1) throw domain_error("solve_ode: need at least one step per unit capacity");
    if (std::abs(w) <= 1.0) throw domain_error("solve_ode: |w| must exceed 1");
    cplx u = w;
    auto field = [](cplx z, cplx e) { return z * (z + e) / (z - e); };
    // newest particle first: time-reversed driver
    for (std::size_t idx = driver.values.size(); idx >= 1; --idx) {
        const cplx e = unit_rot(driver.values[idx - 1]);
        const int m = std::max(1, static_cast<int>(std::ceil(driver.dt * rk_steps_per_unit_capacity)));
        const double h = driver.dt / m;
        for (int s = 0; s < m; ++s) {
            const cplx k1 = field(u, e);
            const cplx k2 = field(u + 0.5 * h * k1, e);
            const cplx k3 = field(u + 0.5 * h * k2, e);
            const cplx k4 = field(u + h * k3, e);
            u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (std::abs(u) < 1.0 + 1e-12) throw swallowed_error("solve_ode: trajectory reached the unit circle");
        }
    }
    return u;
}

PiecewiseDriver sample_sle_driver(double kappa, double T, double dt, Rng& rng) {
    if (kappa < 0.0) throw domain_error("sample_sle_driver: kappa must be >= 0");
    if (!(dt > 0.0) || !(T > 0.0)) throw domain_error("sample_sle_driver: T and dt must be positive");
    PiecewiseDriver d;
    d.dt = dt;
    const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(T / dt)));
    d.values.reserve(m);
    double xi = 0.0;
    const double step_sd = std::sqrt(kappa * dt);
    for (std::size_t k = 0; k < m; ++k) {
        d.values.push_back(xi);
        xi += step_sd * rng.gauss();
    }
    return d;
}

namespace {

double point_segment_distance(cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p.real() - a.real()) * ab.real() + (p.imag() - a.imag()) * ab.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

double directed_hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    for (const cplx& p : a) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < b.size(); ++i) {
            best = std::min(best, point_segment_distance(p, b[i], b[i + 1]));
            if (best == 0.0) break;
        }
        if (b.size() == 1) best = std::abs(p - b[0]);
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

double hull_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() || b.empty()) throw domain_error("hull_distance: empty polyline");
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

} // namespace ale

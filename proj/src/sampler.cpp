#include "ale/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ale/parallel.hpp"

namespace ale {

namespace {

constexpr double kGuard = std::numeric_limits<double>::infinity();

// dyadic shells from half-width W down to sigma/8, `depth` cells per shell,
// appended as offsets covering [-W, W] in circle order
void append_window_offsets(std::vector<std::pair<double, double>>& cells, double W, double sigma, int depth) {
    const int K = std::max(1, static_cast<int>(std::ceil(std::log2(W / (0.125 * sigma))))); // W 2^-K <= sigma/8
    // left side: from -W inward
    for (int k = 0; k < K; ++k) {
        const double hi = W * std::ldexp(1.0, -k);
        const double lo = 0.5 * hi;
        const double h = (hi - lo) / depth;
        for (int j = 0; j < depth; ++j) cells.emplace_back(-hi + j * h, h);
    }
    const double core = W * std::ldexp(1.0, -K);
    cells.emplace_back(-core, 2.0 * core);
    for (int k = K - 1; k >= 0; --k) {
        const double lo = W * std::ldexp(1.0, -(k + 1));
        const double hi = 2.0 * lo;
        const double h = (hi - lo) / depth;
        for (int j = 0; j < depth; ++j) cells.emplace_back(lo + j * h, h);
    }
}

double circ_offset(double x, double ref) { return wrap_pi(x - ref); }

} // namespace

DensityGrid build_density(const ClusterState& state) {
    if (state.stopped()) throw domain_error("build_density: state is stopped");
    const SimParams& prm = state.params;
    DensityGrid grid;
    grid.n = state.size();
    grid.unit = state.unit();
    const double sigma = prm.sigma();
    const double nu = prm.nu;

    if (grid.n == 0) {
        const int m = prm.grid_coarse;
        const double h = kTwoPi / m;
        grid.cells.reserve(m);
        for (int i = 0; i < m; ++i) {
            GridCell cell;
            cell.left = -kPi + i * h;
            cell.width = h;
            cell.log_integrand = 0.0;
            grid.cells.push_back(cell);
        }
        grid.log_z = std::log(kTwoPi);
    } else {
        grid.has_poles = true;
        grid.pole_plus = state.pole(+1);
        grid.pole_minus = state.pole(-1);
        grid.pole_plus_pos = wrap_pi(grid.pole_plus.value(grid.unit));
        grid.pole_minus_pos = wrap_pi(grid.pole_minus.value(grid.unit));
        const double pole_gap = std::abs(wrap_pi(grid.pole_plus_pos - grid.pole_minus_pos));
        double W = prm.grid_window * state.base.beta;
        W = std::min(W, 0.45 * pole_gap);
        grid.window = W;

        struct Window {
            double pos;
            double halfw;
            std::int8_t anchor;
        };
        std::vector<Window> windows{{grid.pole_plus_pos, W, 0}, {grid.pole_minus_pos, W, 1}};
        if (prm.refine_old_basepoints && grid.n >= 2) {
            const Basepoints bp = basepoints(state);
            for (const auto& z : bp.zhat) {
                if (!z) continue;
                const double pos = std::atan2(z->imag(), z->real());
                double hw = 0.25 * W;
                for (const Window& wref : windows) {
                    const double dist = std::abs(wrap_pi(pos - wref.pos));
                    hw = std::min(hw, 0.45 * std::max(dist - wref.halfw, 1e-15));
                }
                if (hw > 4.0 * sigma) windows.push_back({pos, hw, 2});
            }
        }
        std::sort(windows.begin(), windows.end(), [](const Window& a, const Window& b) { return a.pos < b.pos; });

        // windows plus coarse gap cells, in circle order
        const double h0 = kTwoPi / prm.grid_coarse;
        auto fill_gap = [&](double a, double b) {
            if (b - a <= 1e-15) return;
            const int count = std::max(1, static_cast<int>(std::lround((b - a) / h0)));
            const double h = (b - a) / count;
            for (int i = 0; i < count; ++i) {
                GridCell cell;
                cell.left = a + i * h;
                cell.width = h;
                grid.cells.push_back(cell);
            }
        };
        std::vector<std::pair<double, double>> offs;
        double cursor = windows.front().pos - windows.front().halfw; // start of first window
        const double origin = cursor;
        for (std::size_t widx = 0; widx < windows.size(); ++widx) {
            const Window& win = windows[widx];
            offs.clear();
            append_window_offsets(offs, win.halfw, sigma, prm.grid_depth);
            for (const auto& [left, width] : offs) {
                GridCell cell;
                cell.left = left;
                cell.width = width;
                cell.anchor = win.anchor;
                cell.anchor_pos = win.pos;
                grid.cells.push_back(cell);
            }
            cursor = win.pos + win.halfw;
            const double next_start = widx + 1 < windows.size() ? windows[widx + 1].pos - windows[widx + 1].halfw
                                                                : origin + kTwoPi;
            fill_gap(cursor, next_start);
        }

        // midpoint evaluation through the batched chain, assembled by index
        const cplx pole_rot_plus = unit_rot(grid.pole_plus_pos);
        const cplx pole_rot_minus = unit_rot(grid.pole_minus_pos);
        const double lift = std::exp(sigma);
        const double l_practical = state.l_practical;
        ChainBatch batch;
        batch.resize(grid.cells.size());
        for (std::size_t i = 0; i < grid.cells.size(); ++i) {
            const GridCell& cell = grid.cells[i];
            if (cell.anchor == 0 || cell.anchor == 1) {
                const double phi = cell.left + 0.5 * cell.width;
                const cplx rotp = cell.anchor == 0 ? pole_rot_plus : pole_rot_minus;
                const cplx delta = rotp * expm1_complex(sigma, phi);
                if (std::abs(delta) <= l_practical) {
                    batch_init_anchored(batch, i, state, cell.anchor == 0 ? +1 : -1, delta);
                } else {
                    batch_init_absolute(batch, i, rotp + delta);
                }
            } else {
                batch_init_absolute(batch, i, lift * unit_rot(grid.midpoint(i)));
            }
        }
        std::vector<double> logphi;
        batch_chain_run(state, batch, logphi);
        for (std::size_t i = 0; i < grid.cells.size(); ++i) {
            GridCell& cell = grid.cells[i];
            if (std::isfinite(logphi[i])) {
                cell.log_integrand = nu * logphi[i];
            } else {
                cell.log_integrand = kGuard;
                cell.excluded = true;
                ++grid.excluded_count;
            }
        }

        // log-sum-exp with max subtraction
        double peak = -kGuard;
        for (const GridCell& cell : grid.cells) {
            if (cell.excluded) continue;
            peak = std::max(peak, cell.log_integrand + std::log(cell.width));
        }
        long double sum = 0.0L;
        for (const GridCell& cell : grid.cells) {
            if (cell.excluded) continue;
            sum += std::exp(static_cast<long double>(cell.log_integrand + std::log(cell.width) - peak));
        }
        grid.log_z = peak + static_cast<double>(std::log(sum));
    }

    grid.prob.resize(grid.cells.size());
    grid.cum.resize(grid.cells.size());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const GridCell& cell = grid.cells[i];
        grid.prob[i] = cell.excluded ? 0.0 : std::exp(cell.log_integrand + std::log(cell.width) - grid.log_z);
        acc += grid.prob[i];
        grid.cum[i] = static_cast<double>(acc);
    }
    return grid;
}

AnchoredAngle sample_angle(const DensityGrid& grid, Rng& rng) {
    const double total = grid.cum.back();
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(grid.cum.begin(), grid.cum.end(), u);
    std::size_t i = static_cast<std::size_t>(it - grid.cum.begin());
    if (i >= grid.cells.size()) i = grid.cells.size() - 1;
    while (i > 0 && grid.prob[i] == 0.0) --i;
    const GridCell& cell = grid.cells[i];
    const double pos = cell.left + rng.uniform() * cell.width;
    if (cell.anchor == 0 || cell.anchor == 1) {
        const AnchoredAngle& pole = cell.anchor == 0 ? grid.pole_plus : grid.pole_minus;
        return pole.add_offset(pos, grid.unit);
    }
    // absolute cell: lift onto the branch nearest the current endpoint
    const double ref = grid.has_poles ? 0.5 * (grid.pole_plus.value(grid.unit) + grid.pole_minus.value(grid.unit)) : 0.0;
    const double theta = cell.anchor < 0 ? pos : cell.anchor_pos + pos;
    const double lifted = theta + kTwoPi * std::nearbyint((ref - theta) / kTwoPi);
    return AnchoredAngle::from_value(lifted, grid.unit);
}

double next_capacity(const ClusterState& state, const AnchoredAngle& theta) {
    const SimParams& prm = state.params;
    if (prm.alpha == 0.0) return prm.c;
    if (state.size() == 0) return prm.c;
    const double sigma = prm.sigma();
    const double unit = state.unit();
    // offset from the nearest pole, exact through the anchored representation
    const AnchoredAngle pp = state.pole(+1);
    const AnchoredAngle pm = state.pole(-1);
    const double dp = AnchoredAngle::diff(theta, pp, unit);
    const double dm = AnchoredAngle::diff(theta, pm, unit);
    double logphi;
    const double phi = std::abs(dp) <= std::abs(dm) ? dp : dm;
    const int sign = std::abs(dp) <= std::abs(dm) ? +1 : -1;
    const AnchoredAngle& pole = sign > 0 ? pp : pm;
    const cplx delta = unit_rot(pole.value(unit)) * expm1_complex(sigma, phi);
    if (std::abs(delta) <= state.l_practical) {
        logphi = log_abs_phi_prime(state, sign, delta);
    } else {
        logphi = log_abs_phi_prime(state, std::exp(sigma) * unit_rot(theta.value(unit)));
    }
    return prm.c * std::exp(-prm.alpha * logphi);
}

namespace {

// Fraction of a cell [mid - w/2, mid + w/2] lying inside [-hw, hw], computed
// so that widths far below ulp(mid) survive.
double inside_fraction(double mid, double width, double hw) {
    const double half = 0.5 * width;
    const double below = std::clamp((-hw - mid) + half, 0.0, width); // length with x < -hw
    const double above = std::clamp((mid - hw) + half, 0.0, width);  // length with x > +hw
    return std::max(0.0, width - below - above) / width;
}

} // namespace

double mass_near(const DensityGrid& grid, const AnchoredAngle& anchor, double half_width) {
    const double apos = wrap_pi(anchor.value(grid.unit));
    const bool is_plus = grid.has_poles && anchor.m == grid.pole_plus.m && anchor.r == grid.pole_plus.r &&
                         anchor.base == grid.pole_plus.base;
    const bool is_minus = grid.has_poles && anchor.m == grid.pole_minus.m && anchor.r == grid.pole_minus.r &&
                          anchor.base == grid.pole_minus.base;
    long double total = 0.0L;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const GridCell& cell = grid.cells[i];
        if (grid.prob[i] == 0.0) continue;
        double mid;
        if ((is_plus && cell.anchor == 0) || (is_minus && cell.anchor == 1)) {
            mid = cell.left + 0.5 * cell.width; // exact offsets from the queried pole
        } else if (cell.anchor >= 0) {
            mid = circ_offset(cell.anchor_pos - apos, 0.0) + (cell.left + 0.5 * cell.width);
        } else {
            mid = circ_offset(cell.left + 0.5 * cell.width, apos);
        }
        const double frac = inside_fraction(mid, cell.width, half_width);
        if (frac > 0.0) total += grid.prob[i] * frac;
    }
    return static_cast<double>(total);
}

StepMoments step_moments(const DensityGrid& grid, const AnchoredAngle& center, double eps) {
    const double cpos = wrap_pi(center.value(grid.unit));
    StepMoments out;
    long double m1 = 0.0L, m2 = 0.0L, t2 = 0.0L;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        if (grid.prob[i] == 0.0) continue;
        const GridCell& cell = grid.cells[i];
        double mid;
        const bool plus_pole = grid.has_poles && cell.anchor == 0;
        const bool minus_pole = grid.has_poles && cell.anchor == 1;
        if (plus_pole || minus_pole) {
            // pole offset from the center through the anchored representation
            const AnchoredAngle& pole = plus_pole ? grid.pole_plus : grid.pole_minus;
            const double poff = AnchoredAngle::diff(pole, center, grid.unit);
            mid = wrap_pi(poff) + (cell.left + 0.5 * cell.width);
        } else if (cell.anchor >= 0) {
            mid = circ_offset(cell.anchor_pos - cpos, 0.0) + (cell.left + 0.5 * cell.width);
        } else {
            mid = circ_offset(cell.left + 0.5 * cell.width, cpos);
        }
        const double w = cell.width;
        const double p = grid.prob[i];
        m1 += p * mid;
        const double second = mid * mid + w * w / 12.0;
        m2 += p * second;
        // tail indicator, pro-rated for cells straddling +-eps; the clipped
        // piece's second moment is approximated at the cell midpoint
        const double tail_frac = 1.0 - inside_fraction(mid, w, eps);
        if (tail_frac > 0.0) t2 += p * tail_frac * second;
    }
    out.m1 = static_cast<double>(m1);
    out.m2 = static_cast<double>(m2);
    out.tail2 = static_cast<double>(t2);
    return out;
}

} // namespace ale

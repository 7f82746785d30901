#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "ale/angle.hpp"
#include "ale/errors.hpp"
#include "ale/rng.hpp"
#include "ale/slit_map.hpp"

namespace ale {

/// Radial lift used when evaluating maps on boundary meshes.
constexpr double kRadialLift = 1e-9;

struct SimParams {
    double c = 1e-3;                 // base capacity
    double nu = 4.0;                 // -eta
    double alpha = 0.0;              // capacity exponent
    double sigma_exponent = 6.0;     // sigma = c^p
    double T = 1.0;                  // total capacity (N = floor(T/c))
    std::uint64_t seed = 1;

    int grid_coarse = 4096;          // coarse cell count
    int grid_depth = 32;             // cells per dyadic shell in pole windows
    double grid_window = 0.25;       // window half-width, in units of beta
    double d_stat = 0.0;             // stopping radius; 0 -> beta/4
    bool refine_old_basepoints = false;
    double mcleish_eps = 0.1;        // tail cutoff for step moments

    double sigma() const { return std::pow(c, sigma_exponent); }
    std::size_t steps() const { return static_cast<std::size_t>(T / c + 1e-9); }

    /// Throws config_error on invalid values; warns (stderr) when nu <= 2.
    void validate() const;
};

/// Growing cluster: angles, capacities, per-particle slit parameters and the
/// bookkeeping needed to evaluate Phi_n and its derivative stably near the
/// attachment poles.
struct ClusterState {
    SimParams params;
    SlitParams base;            // slit params of the base capacity; base.beta is the angle unit
    double d_stat = 0.0;        // resolved stopping radius (radians)
    double l_practical = 0.0;   // offset-chain regime radius (beta * 1e-3)

    std::vector<AnchoredAngle> angles; // theta_k (1-based as angles[k-1])
    std::vector<double> caps;          // c_k
    std::vector<SlitParams> part;      // per-particle params
    std::vector<int> top_sign;         // s_k in {-1,+1}; s_1 = 0
    std::vector<double> resid;         // theta_k - theta_top_k (exact anchored diff); resid_1 = 0
    std::vector<cplx> rot;             // e^{i theta_k}
    std::vector<cplx> top_rot;         // e^{i theta_top_k}
    std::vector<cplx> mismatch;        // e^{i theta_k} - e^{i theta_top_k}, stable form
    std::optional<std::size_t> stopped_at; // 1-based index of the particle that tripped tau_D
    double total_capacity = 0.0;

    std::size_t size() const { return angles.size(); }
    double unit() const { return base.beta; }
    bool stopped() const { return stopped_at.has_value(); }

    const AnchoredAngle& angle(std::size_t k) const { return angles[k - 1]; }
    const SlitParams& particle(std::size_t k) const { return part[k - 1]; }

    /// theta_n + sign*beta_n as an anchored angle (the next attachment poles).
    AnchoredAngle pole(int sign) const;
    /// theta_perp_{k+1} = theta_k - s_{k+1} beta_k, for 1 <= k <= n-1.
    AnchoredAngle perp(std::size_t k) const;
};

ClusterState new_cluster(const SimParams& config);

/// Cluster from an exact +-beta step sequence: theta_1 = 0 and
/// theta_{k+1} = theta_k + signs[k-1] * beta, all capacities c.  Bypasses the
/// sampler so analytic checks are free of sampling noise.
ClusterState ideal_cluster(const SimParams& config, const std::vector<int>& signs);

/// Append one particle; records s_{n+1}, the residual to theta_top, and trips
/// the stopping rule when the angle is farther than d_stat from both poles.
ClusterState append_particle(ClusterState state, const AnchoredAngle& theta, double cap);

/// Phi_n(w) = f_1(f_2(...f_n(w)...)).  Throws domain_error if an intermediate
/// leaves the exterior disc by more than 1e-9.
cplx phi_apply(const ClusterState& state, cplx w);

/// Phi_{j,n}(w) = f_{j+1}(...f_n(w)...); j = n is the identity.
cplx phi_partial_apply(const ClusterState& state, std::size_t j, cplx w);

/// log|Phi_n'| at an absolute point w.
double log_abs_phi_prime(const ClusterState& state, cplx w);

/// log|Phi_n'| at w = e^{i(theta_n + sign beta_n)} + delta.  For
/// |delta| <= l_practical the intermediate images are tracked as offsets from
/// e^{i theta_top} (the sticky chain); otherwise absolute evaluation is used.
double log_abs_phi_prime(const ClusterState& state, int pole_sign, cplx delta);

/// Offset sequence delta_j = Phi_{n-j,n}(w) - e^{i theta_top_{n-j+1}},
/// j = 1..n, for w = e^{i(theta_n + sign beta_n)} + delta0.
std::vector<cplx> offset_chain(const ClusterState& state, int pole_sign, cplx delta0);

struct Basepoints {
    std::vector<std::optional<cplx>> zhat; // zhat_j^n, j = 1..n-1 (index j-1)
    cplx pole_plus;                        // e^{i(theta_n + beta_n)}
    cplx pole_minus;                       // e^{i(theta_n - beta_n)}
};

/// zhat_j^n = Phi_{j,n}^{-1}(e^{i theta_perp_{j+1}}), computed by successive
/// inverse maps with a radial lift, then renormalized to the circle.
Basepoints basepoints(const ClusterState& state);

/// Closed polyline tracing Phi_n of a boundary mesh, adaptively refined where
/// the image stretches (particle preimage arcs).
std::vector<cplx> boundary_trace(const ClusterState& state, int points_per_particle);

/// k points Phi_n(e^{radial lift + iU}), U uniform: harmonic measure from
/// infinity on the cluster boundary.
std::vector<cplx> harmonic_sample(const ClusterState& state, Rng& rng, std::size_t k);

// ---------------------------------------------------------------------------
// Chain evaluator internals, shared with the sampler's grid builder.
// ---------------------------------------------------------------------------

struct ChainResult {
    double log_phi_prime = 0.0;
    bool pole_hit = false;
};

/// Fused chain: log|Phi_n'| with product accumulation; optionally captures the
/// per-level offsets.  `anchored` selects the sticky-chain entry (pole_sign,
/// delta0) versus an absolute starting point w.
ChainResult chain_eval(const ClusterState& state, bool anchored, int pole_sign, cplx delta0,
                       cplx w_abs, std::vector<cplx>* offsets_out);

// Batched chain evaluation over many points at once (the density grid's hot
// path).  Points are carried in structure-of-arrays form; the offset levels
// run scalar, the absolute tail runs a branchless kernel.
struct ChainBatch {
    std::vector<double> zr, zi;      // absolute points (after conversion)
    std::vector<double> mant;        // running |f'|^2 product mantissa
    std::vector<int> ex2;            // base-2 exponent of the product
    std::vector<std::uint8_t> offset_mode;
    std::vector<cplx> delta;         // offset from the anchor while anchored
    std::vector<cplx> anchor_rot;
    std::vector<std::int8_t> sign;   // s for the next map while anchored

    void resize(std::size_t m);
    std::size_t size() const { return zr.size(); }
};

/// Initialize entry i as an anchored point e^{i pole} + delta0.
void batch_init_anchored(ChainBatch& batch, std::size_t i, const ClusterState& state, int pole_sign,
                         cplx delta0);
/// Initialize entry i as an absolute point w.
void batch_init_absolute(ChainBatch& batch, std::size_t i, cplx w);

/// Run the whole chain over the batch; log|Phi_n'| lands in `out` (NaN on a
/// pole hit).  Deterministic for any worker count.
void batch_chain_run(const ClusterState& state, ChainBatch& batch, std::vector<double>& out);

} // namespace ale

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ale/cluster.hpp"
#include "ale/sampler.hpp"

namespace ale {

/// Machine-readable result of one numerical lemma check.  `fitted` carries the
/// empirically fitted constants so drift stays observable; `pass` applies the
/// engineering envelope documented per check.
struct OracleReport {
    std::string id;
    std::vector<std::string> covers;
    std::size_t samples = 0;
    std::map<std::string, double> fitted;
    double worst_residual = 0.0;
    bool pass = false;
    std::string notes;
};

std::string report_to_json(const OracleReport& report);

/// Fitted single-map derivative constants: A1/A2 bound the ratio
/// |f'(w)| sqrt(|w - e^{i beta}|/beta) on |w - e^{i beta}| <= 3beta/4, and A3
/// bounds |f'| away from both poles.
struct FprimeFit {
    double A1 = 0.0;
    double A2 = 0.0;
    double A3 = 0.0;
};
FprimeFit fit_f_prime_constants(double c, std::size_t samples, std::uint64_t seed = 2024);

/// Independent dense quadrature of |Phi_n'(e^{sigma + i theta})|^nu, log-spaced
/// toward the attachment poles; returns the log of the integral.  This is the
/// reference the grid discretization is checked against.
double quad_log_integral(const ClusterState& state, double nu);
/// Same integrand over {theta_pole + phi : |phi| <= half_width}.
double quad_log_window(const ClusterState& state, double nu, int pole_sign, double half_width);

OracleReport check_f_prime_bounds(double c, std::size_t samples);
OracleReport check_distance_estimates(double c, std::size_t samples);
OracleReport check_sticky(const ClusterState& ideal_state, const std::vector<double>& delta0_mags);
OracleReport check_deriv_estimate(const ClusterState& ideal_state, const std::vector<double>& phis);
OracleReport check_pf_bound(const ClusterState& ideal_state);
OracleReport check_symmetry(const ClusterState& state, const std::vector<double>& phis);

/// Per-cell labels over a density grid: 0 regular (R_n), 1 pole windows (T_n),
/// 2+j singular window of zhat_j^n (S_{n,j}), -1 unclassified residue.
struct RegionClassification {
    std::vector<int> labels;
    std::vector<double> window_bounds; // L_j^n, j = 1..n-1
    std::size_t residue_count = 0;
};

RegionClassification classify_regions(const ClusterState& state, const DensityGrid& grid);

OracleReport check_region_masses(const ClusterState& state, const DensityGrid& grid,
                                 const RegionClassification& cls, double mass_threshold = 1e-3);

OracleReport check_basepoint_separation(const ClusterState& state);

/// Short-run McLeish sums: tail2 ~ 0, sum m2 ~ 4T, sum |m1| small.
OracleReport check_mcleish(const SimParams& params);

/// The full suite at desk-scale defaults; every covered lemma id appears in
/// exactly one report.
std::vector<OracleReport> run_oracle_suite(const std::string& selector, std::uint64_t seed = 2024);

/// All lemma ids the suite must cover (the quantitative estimates in the
/// analysis behind the concentration argument).
const std::vector<std::string>& oracle_lemma_ids();

} // namespace ale

#pragma once

#include <optional>
#include <vector>

#include "ale/cluster.hpp"
#include "ale/sampler.hpp"

namespace ale {

/// Cadlag driving function xi_t = theta_{floor(t/c)+1}, unwrapped to the real
/// line (consecutive values differ by ~beta, far less than pi).
struct DriverPath {
    double c = 0.0;
    double T = 0.0;              // horizon actually covered: len * c
    std::vector<double> values;  // xi on [k c, (k+1) c)
};

/// Extract the driver from a cluster; truncated at tau_D when stopped.
/// Throws statistics_error if the state has too few particles.
DriverPath extract_driver(const ClusterState& state, double T);

struct StatsReport {
    std::optional<std::size_t> tau_d;
    double T = 0.0;
    double frac_plus = 0.5;        // fraction of s_k = +1
    double qv = 0.0;               // sum of squared jumps
    double mcleish_tail2 = 0.0;    // sum of tail second moments
    double mcleish_m2 = 0.0;       // sum of second moments
    double mcleish_abs_m1 = 0.0;   // sum of |first moments|
    double endpoint = 0.0;         // xi at the end of the path
    std::vector<double> offsets;   // |theta_k - theta_top_k| per step
};

/// Path statistics; per-step moments are the ones recorded while sampling.
StatsReport statistics(const DriverPath& path, const ClusterState& state,
                       const std::vector<StepMoments>& moments);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

/// Kolmogorov-Smirnov test of a sample against N(0,1), asymptotic p-value.
KsResult ks_normal(std::vector<double> xs);

/// KS test of {xi_T / (2 sqrt T)} across runs against the standard normal.
/// Requires at least 30 runs.
KsResult ensemble_normality(const std::vector<StatsReport>& reports);

} // namespace ale

#include "ale/driver.hpp"

#include <algorithm>
#include <cmath>

namespace ale {

DriverPath extract_driver(const ClusterState& state, double T) {
    const double c = state.params.c;
    std::size_t want = static_cast<std::size_t>(T / c + 1e-9);
    if (state.stopped_at) want = std::min(want, *state.stopped_at);
    if (state.size() < want) throw statistics_error("extract_driver: not enough particles for the horizon");
    DriverPath path;
    path.c = c;
    path.T = static_cast<double>(want) * c;
    path.values.reserve(want);
    const double unit = state.unit();
    for (std::size_t k = 1; k <= want; ++k) path.values.push_back(state.angle(k).value(unit));
    return path;
}

StatsReport statistics(const DriverPath& path, const ClusterState& state,
                       const std::vector<StepMoments>& moments) {
    StatsReport rep;
    rep.tau_d = state.stopped_at;
    rep.T = path.T;
    const std::size_t len = path.values.size();
    std::size_t plus = 0, signs = 0;
    for (std::size_t k = 2; k <= std::min(len, state.size()); ++k) {
        if (state.top_sign[k - 1] == 0) continue;
        ++signs;
        if (state.top_sign[k - 1] > 0) ++plus;
    }
    rep.frac_plus = signs > 0 ? static_cast<double>(plus) / static_cast<double>(signs) : 0.5;
    for (std::size_t k = 1; k < len; ++k) {
        const double jump = path.values[k] - path.values[k - 1];
        rep.qv += jump * jump;
    }
    for (const StepMoments& m : moments) {
        rep.mcleish_tail2 += m.tail2;
        rep.mcleish_m2 += m.m2;
        rep.mcleish_abs_m1 += std::abs(m.m1);
    }
    rep.endpoint = len > 0 ? path.values.back() : 0.0;
    rep.offsets.reserve(std::min(len, state.size()));
    for (std::size_t k = 1; k <= std::min(len, state.size()); ++k) rep.offsets.push_back(std::abs(state.resid[k - 1]));
    return rep;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace

KsResult ks_normal(std::vector<double> xs) {
    if (xs.empty()) throw statistics_error("ks_normal: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = normal_cdf(xs[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    return {d, kolmogorov_q(lambda)};
}

KsResult ensemble_normality(const std::vector<StatsReport>& reports) {
    if (reports.size() < 30) throw statistics_error("ensemble_normality: need at least 30 runs");
    std::vector<double> xs;
    xs.reserve(reports.size());
    for (const StatsReport& r : reports) {
        xs.push_back(r.endpoint / (2.0 * std::sqrt(r.T)));
    }
    return ks_normal(std::move(xs));
}

} // namespace ale

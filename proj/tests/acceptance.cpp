// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion.  Exit code is the number of failures.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "ale/cluster.hpp"
#include "ale/driver.hpp"
#include "ale/lemma_oracle.hpp"
#include "ale/loewner.hpp"
#include "ale/parallel.hpp"
#include "ale/run_io.hpp"
#include "ale/sampler.hpp"

#ifndef ALE_CLI_PATH
#define ALE_CLI_PATH "./ale"
#endif

using namespace ale;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
    std::printf("CRITERION %2d: %s  %s  (%.1f s)\n", id, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// --- criterion 1: slit-map identities ---------------------------------------
void criterion_1() {
    const double t0 = now_s();
    bool pass = true;
    std::ostringstream detail;
    for (double c : {1e-2, 1e-3, 1e-4}) {
        const SlitParams p = params_from_capacity(c);
        pass = pass && std::abs(slit_map(p.e_ibeta, p) - 1.0) < 1e-9;
        pass = pass && std::abs(slit_map({1.0, 0.0}, p) - (1.0 + p.d)) < 1e-9;
        pass = pass && std::abs(slit_map({1e8, 0.0}, p) / (p.ec * 1e8) - 1.0) < 1e-6;
    }
    const SlitParams p4 = params_from_capacity(1e-4);
    const double ratio = p4.beta / (2.0 * std::sqrt(1e-4));
    pass = pass && ratio >= 0.99 && ratio <= 1.01;
    detail << "slit-map identities at c in {1e-2,1e-3,1e-4}; beta/(2 sqrt c) = " << ratio;
    report(1, pass, detail.str(), now_s() - t0);
}

// --- criterion 2: derivative closed form vs finite differences --------------
void criterion_2() {
    const double t0 = now_s();
    bool pass = true;
    double worst = 0.0;
    Rng rng(20260801);
    for (double c : {1e-2, 1e-3, 1e-4}) {
        const SlitParams p = params_from_capacity(c);
        int done = 0;
        while (done < 100) {
            const cplx w = rng.uniform(1.0 + 1e-4, 6.0) * unit_rot(rng.uniform(-kPi, kPi));
            const double dist = std::min(std::abs(w - p.e_ibeta), std::abs(w - std::conj(p.e_ibeta)));
            if (dist < 0.5 * p.beta || std::abs(w - 1.0) < 1e-3) continue;
            ++done;
            const double lf = log_abs_f_prime(w, p);
            const double h = 1e-7 * std::max(1.0, std::abs(w));
            const cplx d1 = (slit_map(w + h, p) - slit_map(w - h, p)) / (2.0 * h);
            const cplx d2 = (slit_map(w + cplx{0, h}, p) - slit_map(w - cplx{0, h}, p)) / (2.0 * cplx{0, h});
            const double fd = std::log(std::abs(0.5 * (d1 + d2)));
            const double rel = std::abs(lf - fd) / std::max(1.0, std::abs(lf));
            worst = std::max(worst, rel);
            pass = pass && rel < 1e-6;
        }
    }
    std::ostringstream detail;
    detail << "closed form vs central differences, worst rel err " << worst;
    report(2, pass, detail.str(), now_s() - t0);
}

// --- criterion 3: distance-estimate envelopes --------------------------------
void criterion_3() {
    const double t0 = now_s();
    bool pass = true;
    double worst = 0.0;
    for (double c : {1e-2, 1e-3, 1e-4}) {
        const OracleReport rep = check_distance_estimates(c, 1000);
        worst = std::max(worst, rep.worst_residual);
        pass = pass && rep.pass;
    }
    std::ostringstream detail;
    detail << "forward/inverse envelopes, largest fitted K = " << worst << " (< 10)";
    report(3, pass, detail.str(), now_s() - t0);
}

// --- criterion 4: sticky chain profile ---------------------------------------
void criterion_4() {
    const double t0 = now_s();
    SimParams cfg;
    cfg.c = 1e-3;
    cfg.nu = 4.0;
    ClusterState st = ideal_cluster(cfg, std::vector<int>(5, 1));
    const double coeff = 2.0 * std::pow(st.base.a_sq, 0.25);
    const auto offs = offset_chain(st, +1, {1e-15, 0.0});
    bool pass = offs.size() == 6;
    double worst = 0.0, level_n = 0.0;
    for (std::size_t j = 1; j <= offs.size(); ++j) {
        const double closed = std::pow(coeff, 2.0 * (1.0 - std::pow(2.0, -static_cast<double>(j)))) *
                              std::pow(1e-15, std::pow(2.0, -static_cast<double>(j)));
        const double resid = std::abs(std::abs(offs[j - 1]) / closed - 1.0);
        if (j <= offs.size() - 1) {
            worst = std::max(worst, resid);
            pass = pass && resid < 0.1;
        } else {
            level_n = resid; // the final level leaves the square-root regime
        }
    }
    std::ostringstream detail;
    detail << "sticky profile n=6, worst residual through level 5 = " << worst
           << " (level-6 residual " << level_n << ", beyond the estimate's regime)";
    report(4, pass, detail.str(), now_s() - t0);
}

// --- criterion 5: one-slit concentration and phase sanity --------------------
void criterion_5() {
    const double t0 = now_s();
    SimParams cfg;
    cfg.c = 1e-3;
    cfg.sigma_exponent = 6.0;
    double f4 = 0.0, f1 = 0.0;
    {
        cfg.nu = 4.0;
        ClusterState st = ideal_cluster(cfg, {});
        const double hw = 0.25 * st.base.beta;
        const double total = quad_log_integral(st, 4.0);
        f4 = 1.0 - std::exp(quad_log_window(st, 4.0, +1, hw) - total) -
             std::exp(quad_log_window(st, 4.0, -1, hw) - total);
    }
    {
        cfg.nu = 1.0;
        ClusterState st = ideal_cluster(cfg, {});
        const double hw = 0.25 * st.base.beta;
        const double total = quad_log_integral(st, 1.0);
        f1 = 1.0 - std::exp(quad_log_window(st, 1.0, +1, hw) - total) -
             std::exp(quad_log_window(st, 1.0, -1, hw) - total);
    }
    const bool pass = f4 < 1e-3 && f1 > 0.1;
    std::ostringstream detail;
    detail << "independent quadrature: mass(F_1) = " << f4 << " at nu=4 (< 1e-3), " << f1
           << " at nu=1 (> 0.1)";
    report(5, pass, detail.str(), now_s() - t0);
}

// --- criteria 6 and 7: full simulation statistics ----------------------------
void criteria_6_and_7() {
    const double t0 = now_s();
    SimParams cfg;
    cfg.c = 1e-3;
    cfg.nu = 4.0;
    cfg.sigma_exponent = 6.0;
    cfg.T = 1.0; // N = 1000
    cfg.seed = 20260810;
    const std::size_t runs = 100;

    std::vector<RunResult> results(runs);
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(runs));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t r = next.fetch_add(1);
                if (r >= runs) return;
                results[r] = run_simulation(cfg, r);
            }
        });
    }
    for (auto& th : pool) th.join();

    std::size_t tau_count = 0, qv_ok = 0, plus = 0, signs = 0, aborted = 0;
    std::vector<StatsReport> stats;
    double imbalance_mean = 0.0;
    for (const auto& run : results) {
        if (run.aborted) ++aborted;
        if (run.stats.tau_d) ++tau_count;
        const double ratio = run.stats.qv / (4.0 * run.stats.T);
        if (ratio >= 0.9 && ratio <= 1.1) ++qv_ok;
        for (std::size_t k = 2; k <= run.state.size(); ++k) {
            if (run.state.top_sign[k - 1] == 0) continue;
            ++signs;
            if (run.state.top_sign[k - 1] > 0) ++plus;
        }
        stats.push_back(run.stats);
        double s = 0.0;
        std::size_t cnt = 0;
        for (std::size_t i = 1; i < run.records.size(); ++i) {
            s += std::abs(run.records[i].mass_plus - run.records[i].mass_minus);
            ++cnt;
        }
        if (cnt > 0) imbalance_mean += s / static_cast<double>(cnt);
    }
    imbalance_mean /= static_cast<double>(runs);

    const double tau_freq = static_cast<double>(tau_count) / static_cast<double>(runs);
    const double frac_plus = static_cast<double>(plus) / static_cast<double>(signs);
    const double bound_b = 4.0 / std::sqrt(4.0e5);
    const double qv_frac = static_cast<double>(qv_ok) / static_cast<double>(runs);
    const KsResult ks = ensemble_normality(stats);

    const bool pass_a = tau_freq <= 0.01;
    const bool pass_b = std::abs(frac_plus - 0.5) <= bound_b;
    const bool pass_c = qv_frac >= 0.95;
    const bool pass_d = ks.p_value > 0.001;
    const bool pass6 = pass_a && pass_b && pass_c && pass_d && aborted == 0;
    {
        std::ostringstream detail;
        detail << "R=100, N=1000: tau freq " << tau_freq << " (a:" << (pass_a ? "ok" : "FAIL")
               << "), frac_plus " << frac_plus << " vs 0.5 +- " << bound_b << " (b:"
               << (pass_b ? "ok" : "FAIL") << "), qv in range " << qv_frac << " (c:"
               << (pass_c ? "ok" : "FAIL") << "), KS p " << ks.p_value << " (d:"
               << (pass_d ? "ok" : "FAIL") << ")";
        report(6, pass6, detail.str(), now_s() - t0);
    }

    // criterion 7: per-step window mass symmetry
    const double t7 = now_s();
    SimParams one = cfg;
    ClusterState st1 = ideal_cluster(one, {});
    const DensityGrid grid1 = build_density(st1);
    const double m_plus = mass_near(grid1, grid1.pole_plus, st1.d_stat);
    const double m_minus = mass_near(grid1, grid1.pole_minus, st1.d_stat);
    const bool exact_n1 = std::abs(m_plus - m_minus) < 1e-9;
    const bool pass7 = imbalance_mean < 0.05 && exact_n1;
    std::ostringstream detail;
    detail << "mean per-step |mass+ - mass-| over runs = " << imbalance_mean
           << " (< 0.05); n=1 window asymmetry " << std::abs(m_plus - m_minus) << " (< 1e-9)";
    report(7, pass7, detail.str(), now_s() - t7);
}

// --- criterion 8: Loewner round-trips ----------------------------------------
void criterion_8() {
    const double t0 = now_s();
    bool pass = true;
    std::ostringstream detail;

    {
        PiecewiseDriver d{0.01, {0.0}};
        ClusterState st = solve_composition(d);
        const double err = std::abs(phi_apply(st, {1.0, 0.0}) - (1.0 + params_from_capacity(0.01).d));
        pass = pass && err < 1e-9;
        detail << "single-step tip err " << err;
    }
    {
        PiecewiseDriver d{1e-4, std::vector<double>(100, 0.0)};
        ClusterState st = solve_composition(d);
        const double err = std::abs(phi_apply(st, {1.0, 0.0}) - (1.0 + params_from_capacity(0.01).d));
        pass = pass && err < 1e-4;
        detail << ", 100-substep tip err " << err;
    }
    {
        Rng rng(20260808);
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            PiecewiseDriver d;
            d.dt = 0.02;
            double xi = 0.0;
            for (int k = 0; k < 20; ++k) {
                d.values.push_back(xi);
                xi += 0.2 * (rng.uniform() - 0.5);
            }
            ClusterState st = solve_composition(d);
            const cplx exact = phi_apply(st, {2.0, 0.0});
            const cplx ode = solve_ode(d, {2.0, 0.0}, 10000);
            worst = std::max(worst, std::abs(ode - exact));
        }
        pass = pass && worst < 1e-6;
        detail << ", ODE-vs-composition worst " << worst;
    }
    report(8, pass, detail.str(), now_s() - t0);
}

// --- criterion 9: region classification on sampled small clusters -----------
void criterion_9() {
    const double t0 = now_s();
    bool pass = true;
    double worst_mass = 0.0;
    std::size_t total_residue = 0, checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SimParams cfg;
        cfg.c = 1e-3;
        cfg.nu = 4.0;
        cfg.sigma_exponent = 6.0;
        cfg.T = 8.0 * cfg.c;
        cfg.seed = 3000 + seed;
        const RunResult run = run_simulation(cfg, 0);
        if (run.aborted || run.state.size() < 2 || run.state.stopped()) {
            pass = false;
            continue;
        }
        const DensityGrid grid = build_density(run.state);
        const RegionClassification cls = classify_regions(run.state, grid);
        const OracleReport rep = check_region_masses(run.state, grid, cls);
        total_residue += cls.residue_count;
        worst_mass = std::max(worst_mass, rep.fitted.at("nonpole_mass"));
        pass = pass && rep.pass;
        ++checked;
    }
    std::ostringstream detail;
    detail << checked << " clusters (n <= 8): residue cells " << total_residue
           << ", worst non-pole mass " << worst_mass << " (< 1e-3)";
    report(9, pass && total_residue == 0, detail.str(), now_s() - t0);
}

// --- criterion 10: byte-identical reruns through the CLI ---------------------
void criterion_10() {
    const double t0 = now_s();
    const fs::path dir = fs::temp_directory_path() / "ale_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"c": 1e-3, "nu": 4, "N": 200, "seed": 13579})";
    }
    auto invoke = [&](const std::string& out) {
        const std::string cmd = std::string(ALE_CLI_PATH) + " simulate --config " +
                                (dir / "cfg.json").string() + " --out " + (dir / out).string() +
                                " > /dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    bool pass = invoke("a") == 0 && invoke("b") == 0;
    if (pass) {
        std::ifstream fa(dir / "a" / "run.jsonl", std::ios::binary);
        std::ifstream fb(dir / "b" / "run.jsonl", std::ios::binary);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        pass = !sa.str().empty() && sa.str() == sb.str();
    }
    report(10, pass, "identical seeds give byte-identical run.jsonl", now_s() - t0);
}

} // namespace

int main() {
    std::printf("acceptance suite, %u worker(s)\n", thread_count());
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criteria_6_and_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
    return g_failures;
}

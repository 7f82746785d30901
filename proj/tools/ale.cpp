// Batch front-end: simulate runs, verify the numerical-lemma suites, and run
// statistics ensembles.  Exit codes: 0 success, 2 config/usage error,
// 3 numerical abort.
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ale/cluster.hpp"
#include "ale/driver.hpp"
#include "ale/lemma_oracle.hpp"
#include "ale/loewner.hpp"
#include "ale/parallel.hpp"
#include "ale/run_io.hpp"
#include "ale/sampler.hpp"
#include "ale/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_boundary_svg(const std::string& path, const ale::ClusterState& state) {
    ale::SvgWriter svg;
    svg.add_polyline(ale::boundary_trace(state, 12));
    svg.write(path);
}

void write_run_outputs(const fs::path& dir, const ale::RunResult& run, bool with_svg) {
    fs::create_directories(dir);
    ale::write_run_jsonl((dir / "run.jsonl").string(), run.records);
    if (run.state.size() >= 1) {
        const double covered = static_cast<double>(run.state.size()) * run.state.params.c;
        ale::write_driver_csv((dir / "driver.csv").string(), ale::extract_driver(run.state, covered));
    }
    ale::write_stats_json((dir / "stats.json").string(), run.stats, run.wall_ms_total);
    if (with_svg) write_boundary_svg((dir / "boundary.svg").string(), run.state);
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    ale::SimParams params;
    try {
        params = ale::params_from_json_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    const ale::RunResult run = ale::run_simulation(params);
    try {
        write_run_outputs(out_dir, run, true);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 3;
    }
    if (run.aborted) {
        std::cerr << "numerical abort after record " << run.last_good << ": " << run.abort_reason << "\n";
        return 3;
    }
    std::cout << "simulated " << run.state.size() << " particles";
    if (run.stats.tau_d) std::cout << " (stopped at tau_D = " << *run.stats.tau_d << ")";
    std::cout << " -> " << out_dir << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, const std::string& out_path) {
    std::vector<ale::OracleReport> reports;
    try {
        reports = ale::run_oracle_suite(suite);
    } catch (const ale::config_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    json arr = json::array();
    bool all_pass = true;
    for (const auto& rep : reports) {
        arr.push_back(json::parse(ale::report_to_json(rep)));
        all_pass = all_pass && rep.pass;
        std::cout << (rep.pass ? "PASS " : "FAIL ") << rep.id << "  worst residual " << rep.worst_residual
                  << "\n";
    }
    std::ofstream out(out_path);
    out << arr.dump(2) << "\n";
    std::cout << (all_pass ? "all selected oracles pass" : "some oracles FAILED") << " -> " << out_path
              << "\n";
    return all_pass ? 0 : 1;
}

int cmd_ensemble(const std::string& config_path, std::size_t runs, const std::string& out_dir,
                 bool inject_ssrw) {
    ale::SimParams params;
    try {
        params = ale::params_from_json_file(config_path);
        if (runs < 1) throw ale::config_error("runs must be >= 1");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    fs::create_directories(out_dir);

    std::vector<ale::RunResult> results(runs);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> aborted{false};
    const unsigned workers = std::min<unsigned>(ale::thread_count(), static_cast<unsigned>(runs));
    auto worker = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= runs) return;
            results[r] = inject_ssrw ? ale::run_ssrw(params, r) : ale::run_simulation(params, r);
            if (results[r].aborted) aborted = true;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::vector<ale::StatsReport> stats;
    char name[32];
    for (std::size_t r = 0; r < runs; ++r) {
        std::snprintf(name, sizeof(name), "run_%03zu", r);
        write_run_outputs(fs::path(out_dir) / name, results[r], false);
        stats.push_back(results[r].stats);
    }

    json pooled;
    std::size_t tau_count = 0, plus = 0, signs = 0, qv_ok = 0;
    std::vector<double> qv_ratio;
    for (const auto& run : results) {
        if (run.stats.tau_d) ++tau_count;
        for (std::size_t k = 2; k <= run.state.size(); ++k) {
            if (run.state.top_sign[k - 1] == 0) continue;
            ++signs;
            if (run.state.top_sign[k - 1] > 0) ++plus;
        }
        const double ratio = run.stats.qv / (4.0 * run.stats.T);
        qv_ratio.push_back(ratio);
        if (ratio >= 0.9 && ratio <= 1.1) ++qv_ok;
    }
    const double frac_plus = signs > 0 ? static_cast<double>(plus) / static_cast<double>(signs) : 0.5;
    pooled["runs"] = runs;
    pooled["tau_d_count"] = tau_count;
    pooled["tau_d_frequency"] = static_cast<double>(tau_count) / static_cast<double>(runs);
    pooled["pooled_frac_plus"] = frac_plus;
    pooled["pooled_signs"] = signs;
    pooled["qv_over_4T"] = qv_ratio;
    pooled["qv_in_range_fraction"] = static_cast<double>(qv_ok) / static_cast<double>(runs);
    if (runs >= 30) {
        const ale::KsResult ks = ale::ensemble_normality(stats);
        pooled["ks_statistic"] = ks.statistic;
        pooled["ks_p_value"] = ks.p_value;
    }
    json per_run = json::array();
    for (std::size_t r = 0; r < runs; ++r) {
        per_run.push_back(json::parse(ale::stats_to_json(stats[r], results[r].wall_ms_total)));
    }
    json out;
    out["pooled"] = pooled;
    out["per_run"] = per_run;
    std::ofstream f(fs::path(out_dir) / "ensemble_stats.json");
    f << out.dump(2) << "\n";

    std::cout << "ensemble of " << runs << " runs -> " << out_dir << "\n";
    if (aborted) {
        std::cerr << "at least one run aborted numerically\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ALE aggregation simulator and numerical verification laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", suite, report_path = "oracle_reports.json";
    std::size_t runs = 1;
    bool inject = false;

    auto* sim = app.add_subcommand("simulate", "run one simulation");
    sim->add_option("--config", config_path, "JSON config file")->required();
    sim->add_option("--out", out_dir, "output directory");

    auto* ver = app.add_subcommand("verify", "run a numerical-lemma oracle suite");
    ver->add_option("--suite", suite, "slit | sticky | deriv | symmetry | regions | all")->required();
    ver->add_option("--out", report_path, "report file");

    auto* ens = app.add_subcommand("ensemble", "run an ensemble of simulations");
    ens->add_option("--config", config_path, "JSON config file")->required();
    ens->add_option("--runs", runs, "number of runs")->required();
    ens->add_option("--out", out_dir, "output directory");
    ens->add_flag("--inject-ssrw", inject, "bypass the sampler with exact SSRW steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir);
        if (ver->parsed()) return cmd_verify(suite, report_path);
        if (ens->parsed()) return cmd_ensemble(config_path, runs, out_dir, inject);
    } catch (const ale::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

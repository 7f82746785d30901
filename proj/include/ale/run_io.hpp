#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ale/cluster.hpp"
#include "ale/driver.hpp"
#include "ale/sampler.hpp"

namespace ale {

/// One line of run.jsonl.  Angles are serialized as (m, r) pairs so post-hoc
/// analysis keeps pole-offset precision.  Wall time is kept in memory for
/// diagnostics but written to stats.json only: run.jsonl is byte-reproducible
/// for a fixed seed.
struct RunRecord {
    std::size_t n = 0;
    std::int64_t m = 0;
    double r = 0.0;
    double capacity = 0.0;
    double log_z = 0.0;
    double mass_plus = 0.0;
    double mass_minus = 0.0;
    double f_mass = 0.0;
    double paper_d = 0.0;
    bool tau_d = false;
    double wall_ms = 0.0;
};

struct RunResult {
    ClusterState state;
    std::vector<RunRecord> records;
    std::vector<StepMoments> moments;
    StatsReport stats;
    bool aborted = false;
    std::string abort_reason;
    std::size_t last_good = 0;
    double wall_ms_total = 0.0;
};

/// The model loop: theta_1 = 0 by convention, then sample, record, append
/// until N = floor(T/c) particles or the stopping rule trips.
RunResult run_simulation(const SimParams& params, std::uint64_t run_index = 0);

/// SSRW injection: exact +-beta steps with fair coin signs, bypassing the
/// sampler (ground truth for the driver statistics).  Produces N jumps.
RunResult run_ssrw(const SimParams& params, std::uint64_t run_index = 0);

SimParams params_from_json(const std::string& text);
SimParams params_from_json_file(const std::string& path);

std::string record_to_json(const RunRecord& rec);
RunRecord record_from_json(const std::string& line);

void write_run_jsonl(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_run_jsonl(const std::string& path);
void write_driver_csv(const std::string& path, const DriverPath& driver);
std::string stats_to_json(const StatsReport& stats, double wall_ms_total);
void write_stats_json(const std::string& path, const StatsReport& stats, double wall_ms_total);

} // namespace ale

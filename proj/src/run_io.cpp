#include "ale/run_io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ale {

using nlohmann::json;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

RunRecord make_record(std::size_t n, const AnchoredAngle& theta, double cap, double log_z,
                      double mass_plus, double mass_minus, double paper_d, bool tau_d) {
    RunRecord rec;
    rec.n = n;
    rec.m = theta.m;
    rec.r = theta.r;
    rec.capacity = cap;
    rec.log_z = log_z;
    rec.mass_plus = mass_plus;
    rec.mass_minus = mass_minus;
    rec.f_mass = std::max(0.0, 1.0 - mass_plus - mass_minus);
    rec.paper_d = paper_d;
    rec.tau_d = tau_d;
    return rec;
}

void finalize_stats(RunResult& out) {
    const double c = out.state.params.c;
    const double covered = static_cast<double>(out.state.size()) * c;
    if (out.state.size() >= 1) {
        const DriverPath path = extract_driver(out.state, covered);
        out.stats = statistics(path, out.state, out.moments);
    }
}

} // namespace

RunResult run_simulation(const SimParams& params, std::uint64_t run_index) {
    params.validate();
    Rng rng = Rng::substream(params.seed, run_index);
    RunResult out;
    out.state = new_cluster(params);
    const std::size_t N = params.steps();
    const double paper_d = std::pow(params.c, 4.5) * std::sqrt(params.sigma());
    const double t_start = now_ms();

    if (N == 0) {
        finalize_stats(out);
        return out;
    }

    // theta_1 = 0 by convention; drawn from the uniform h_1 only formally
    out.state = append_particle(std::move(out.state), AnchoredAngle{0, 0.0, 0.0}, params.c);
    {
        RunRecord rec = make_record(1, out.state.angle(1), params.c, std::log(kTwoPi), 0.0, 0.0, paper_d, false);
        out.records.push_back(rec);
        out.last_good = 1;
    }

    for (std::size_t n = 1; n < N && !out.state.stopped(); ++n) {
        const double t0 = now_ms();
        try {
            const DensityGrid grid = build_density(out.state);
            const AnchoredAngle theta = sample_angle(grid, rng);
            const double cap = next_capacity(out.state, theta);
            const double mass_plus = mass_near(grid, grid.pole_plus, out.state.d_stat);
            const double mass_minus = mass_near(grid, grid.pole_minus, out.state.d_stat);
            out.moments.push_back(step_moments(grid, out.state.angle(n), params.mcleish_eps));
            out.state = append_particle(std::move(out.state), theta, cap);
            RunRecord rec = make_record(n + 1, theta, cap, grid.log_z, mass_plus, mass_minus, paper_d,
                                        out.state.stopped_at && *out.state.stopped_at == n + 1);
            rec.wall_ms = now_ms() - t0;
            out.records.push_back(rec);
            out.last_good = n + 1;
        } catch (const std::exception& e) {
            out.aborted = true;
            out.abort_reason = e.what();
            break;
        }
    }
    out.wall_ms_total = now_ms() - t_start;
    finalize_stats(out);
    return out;
}

RunResult run_ssrw(const SimParams& params, std::uint64_t run_index) {
    params.validate();
    Rng rng = Rng::substream(params.seed, run_index);
    RunResult out;
    out.state = new_cluster(params);
    const std::size_t N = params.steps();
    const double paper_d = std::pow(params.c, 4.5) * std::sqrt(params.sigma());
    const double t_start = now_ms();
    const double beta = out.state.base.beta;

    // N jumps: theta_0 = 0 plus N fair +-beta steps (N+1 particles)
    AnchoredAngle theta{0, 0.0, 0.0};
    out.state = append_particle(std::move(out.state), theta, params.c);
    out.records.push_back(make_record(1, theta, params.c, std::log(kTwoPi), 0.0, 0.0, paper_d, false));
    for (std::size_t k = 0; k < N; ++k) {
        const int sign = (rng.bits() & 1) ? 1 : -1;
        theta = theta.add_steps(sign);
        out.state = append_particle(std::move(out.state), theta, params.c);
        out.records.push_back(make_record(out.state.size(), theta, params.c, 0.0, 0.5, 0.5, paper_d, false));
        StepMoments m;
        m.m1 = 0.0;
        m.m2 = beta * beta;
        m.tail2 = 0.0;
        out.moments.push_back(m);
    }
    out.last_good = out.state.size();
    out.wall_ms_total = now_ms() - t_start;
    finalize_stats(out);
    return out;
}

SimParams params_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    SimParams p;
    try {
        if (j.contains("c")) p.c = j.at("c").get<double>();
        if (j.contains("nu")) p.nu = j.at("nu").get<double>();
        if (j.contains("alpha")) p.alpha = j.at("alpha").get<double>();
        if (j.contains("sigma_exponent")) p.sigma_exponent = j.at("sigma_exponent").get<double>();
        if (j.contains("T")) {
            p.T = j.at("T").get<double>();
        } else if (j.contains("N")) {
            p.T = static_cast<double>(j.at("N").get<std::size_t>()) * p.c;
        }
        if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            if (g.contains("coarse")) p.grid_coarse = g.at("coarse").get<int>();
            if (g.contains("depth")) p.grid_depth = g.at("depth").get<int>();
            if (g.contains("window")) p.grid_window = g.at("window").get<double>();
        }
        if (j.contains("d_stat")) p.d_stat = j.at("d_stat").get<double>();
        if (j.contains("refine_old_basepoints")) p.refine_old_basepoints = j.at("refine_old_basepoints").get<bool>();
        if (j.contains("mcleish_eps")) p.mcleish_eps = j.at("mcleish_eps").get<double>();
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(std::string("config field error: ") + e.what());
    }
    p.validate();
    return p;
}

SimParams params_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return params_from_json(buf.str());
}

std::string record_to_json(const RunRecord& rec) {
    json j;
    j["n"] = rec.n;
    j["m"] = rec.m;
    j["r"] = rec.r;
    j["capacity"] = rec.capacity;
    j["log_z"] = rec.log_z;
    j["mass_plus"] = rec.mass_plus;
    j["mass_minus"] = rec.mass_minus;
    j["f_mass"] = rec.f_mass;
    j["paper_d"] = rec.paper_d;
    j["tau_d"] = rec.tau_d;
    return j.dump();
}

RunRecord record_from_json(const std::string& line) {
    const json j = json::parse(line);
    RunRecord rec;
    rec.n = j.at("n").get<std::size_t>();
    rec.m = j.at("m").get<std::int64_t>();
    rec.r = j.at("r").get<double>();
    rec.capacity = j.at("capacity").get<double>();
    rec.log_z = j.at("log_z").get<double>();
    rec.mass_plus = j.at("mass_plus").get<double>();
    rec.mass_minus = j.at("mass_minus").get<double>();
    rec.f_mass = j.at("f_mass").get<double>();
    rec.paper_d = j.at("paper_d").get<double>();
    rec.tau_d = j.at("tau_d").get<bool>();
    return rec;
}

void write_run_jsonl(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const RunRecord& rec : records) out << record_to_json(rec) << "\n";
}

std::vector<RunRecord> read_run_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<RunRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) records.push_back(record_from_json(line));
    }
    return records;
}

void write_driver_csv(const std::string& path, const DriverPath& driver) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,xi\n";
    char buf[96];
    for (std::size_t k = 0; k < driver.values.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", static_cast<double>(k) * driver.c, driver.values[k]);
        out << buf;
    }
}

std::string stats_to_json(const StatsReport& stats, double wall_ms_total) {
    json j;
    if (stats.tau_d) {
        j["tau_d"] = *stats.tau_d;
    } else {
        j["tau_d"] = nullptr;
    }
    j["T"] = stats.T;
    j["frac_plus"] = stats.frac_plus;
    j["qv"] = stats.qv;
    j["mcleish"] = {{"tail2", stats.mcleish_tail2}, {"m2", stats.mcleish_m2}, {"abs_m1", stats.mcleish_abs_m1}};
    j["endpoint"] = stats.endpoint;
    j["max_offset"] = stats.offsets.empty() ? 0.0 : *std::max_element(stats.offsets.begin(), stats.offsets.end());
    j["wall_ms"] = wall_ms_total;
    return j.dump(2);
}

void write_stats_json(const std::string& path, const StatsReport& stats, double wall_ms_total) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << stats_to_json(stats, wall_ms_total) << "\n";
}

} // namespace ale

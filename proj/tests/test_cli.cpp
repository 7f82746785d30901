#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ale/run_io.hpp"

#ifndef ALE_CLI_PATH
#define ALE_CLI_PATH "./ale"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ale;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ALE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("ale_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_config(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

} // namespace

TEST_CASE("config parsing") {
    SimParams p = params_from_json(R"({"c": 2e-3, "nu": 3.5, "N": 50, "seed": 9,
        "grid": {"coarse": 512, "depth": 16, "window": 0.2}, "d_stat": 0.01,
        "refine_old_basepoints": true})");
    CHECK(p.c == 2e-3);
    CHECK(p.nu == 3.5);
    CHECK(p.steps() == 50);
    CHECK(p.seed == 9);
    CHECK(p.grid_coarse == 512);
    CHECK(p.grid_depth == 16);
    CHECK(p.grid_window == 0.2);
    CHECK(p.d_stat == 0.01);
    CHECK(p.refine_old_basepoints);

    CHECK_THROWS_AS(params_from_json("{not json"), config_error);
    CHECK_THROWS_AS(params_from_json(R"({"c": -1})"), config_error);
    CHECK_THROWS_AS(params_from_json(R"({"c": 1e-3, "nu": "four"})"), config_error);
}

TEST_CASE("run records round-trip") {
    RunRecord rec;
    rec.n = 17;
    rec.m = -5;
    rec.r = 3.25e-19;
    rec.capacity = 1e-3;
    rec.log_z = 123.456789012345;
    rec.mass_plus = 0.499999;
    rec.mass_minus = 0.500001;
    rec.f_mass = 1e-16;
    rec.paper_d = 3.1e-23;
    rec.tau_d = false;
    const RunRecord back = record_from_json(record_to_json(rec));
    CHECK(back.n == rec.n);
    CHECK(back.m == rec.m);
    CHECK(back.r == rec.r);
    CHECK(back.log_z == rec.log_z);
    CHECK(back.mass_plus == rec.mass_plus);
    CHECK(back.paper_d == rec.paper_d);
}

TEST_CASE("cli exit codes") {
    CHECK(run_cli("simulate --config /nonexistent.json") == 2);
    const fs::path dir = temp_dir("badcfg");
    write_config(dir / "bad.json", R"({"c": -3})");
    CHECK(run_cli("simulate --config " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli("verify --suite bogus") == 2);
    CHECK(run_cli("") == 2);
}

TEST_CASE("cli simulate: outputs, determinism, N = 0") {
    const fs::path dir = temp_dir("sim");
    write_config(dir / "cfg.json", R"({"c": 1e-3, "nu": 4, "N": 60, "seed": 4242})");

    CHECK(run_cli("simulate --config " + (dir / "cfg.json").string() + " --out " + (dir / "a").string()) == 0);
    CHECK(fs::exists(dir / "a" / "run.jsonl"));
    CHECK(fs::exists(dir / "a" / "driver.csv"));
    CHECK(fs::exists(dir / "a" / "stats.json"));
    CHECK(fs::exists(dir / "a" / "boundary.svg"));

    const auto records = read_run_jsonl((dir / "a" / "run.jsonl").string());
    CHECK(records.size() == 60);
    CHECK(records.front().n == 1);
    CHECK(records.back().n == 60);

    // same seed twice: byte identical
    CHECK(run_cli("simulate --config " + (dir / "cfg.json").string() + " --out " + (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "run.jsonl") == slurp(dir / "b" / "run.jsonl"));
    CHECK(slurp(dir / "a" / "driver.csv") == slurp(dir / "b" / "driver.csv"));

    // different thread count: still byte identical
    {
        const std::string cmd = "ALE_THREADS=1 " + std::string(ALE_CLI_PATH) + " simulate --config " +
                                (dir / "cfg.json").string() + " --out " + (dir / "c").string() +
                                " > /dev/null 2>&1";
        CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
        CHECK(slurp(dir / "a" / "run.jsonl") == slurp(dir / "c" / "run.jsonl"));
    }

    // N = 0: empty run, unit-circle svg still written
    write_config(dir / "cfg0.json", R"({"c": 1e-3, "nu": 4, "N": 0})");
    CHECK(run_cli("simulate --config " + (dir / "cfg0.json").string() + " --out " + (dir / "zero").string()) == 0);
    CHECK(slurp(dir / "zero" / "run.jsonl").empty());
    CHECK(fs::exists(dir / "zero" / "boundary.svg"));
    CHECK(slurp(dir / "zero" / "boundary.svg").find("<svg") != std::string::npos);

    // driver.csv round-trips: t column is k*c, xi matches the records
    std::istringstream csv(slurp(dir / "a" / "driver.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t,xi");
    const double beta = params_from_capacity(1e-3).beta;
    std::size_t k = 0;
    while (std::getline(csv, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        const double t = std::stod(line.substr(0, comma));
        const double xi = std::stod(line.substr(comma + 1));
        CHECK(t == static_cast<double>(k) * 1e-3);
        // FMA contraction may round m*beta + r differently across TUs
        const double from_record = static_cast<double>(records[k].m) * beta + records[k].r;
        CHECK(std::abs(xi - from_record) <= 1e-15 * (1.0 + std::abs(xi)));
        ++k;
    }
    CHECK(k == records.size());

    // stats.json parses and carries the expected fields
    const json stats = json::parse(slurp(dir / "a" / "stats.json"));
    CHECK(stats.contains("qv"));
    CHECK(stats.contains("frac_plus"));
    CHECK(stats.at("T").get<double>() == doctest::Approx(0.06));
}

TEST_CASE("cli ensemble with SSRW injection") {
    const fs::path dir = temp_dir("ens");
    write_config(dir / "cfg.json", R"({"c": 1e-3, "nu": 4, "N": 256, "seed": 7})");
    CHECK(run_cli("ensemble --config " + (dir / "cfg.json").string() + " --runs 3 --out " +
                  (dir / "out").string() + " --inject-ssrw") == 0);
    CHECK(fs::exists(dir / "out" / "ensemble_stats.json"));
    const json stats = json::parse(slurp(dir / "out" / "ensemble_stats.json"));
    CHECK(stats.at("pooled").at("runs") == 3);
    CHECK(stats.at("per_run").size() == 3);
    // SSRW ground truth: qv = N beta^2 exactly
    const SimParams params = params_from_json(slurp(dir / "cfg.json"));
    const double beta = params_from_capacity(params.c).beta;
    for (const auto& run : stats.at("per_run")) {
        CHECK(run.at("qv").get<double>() == doctest::Approx(256.0 * beta * beta).epsilon(1e-12));
    }
    for (int r = 0; r < 3; ++r) {
        char name[32];
        std::snprintf(name, sizeof(name), "run_%03d", r);
        CHECK(fs::exists(dir / "out" / name / "run.jsonl"));
        CHECK(fs::exists(dir / "out" / name / "stats.json"));
    }
}

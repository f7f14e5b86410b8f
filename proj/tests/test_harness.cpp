#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ledgerprint/errors.hpp"
#include "ledgerprint/harness.hpp"
#include "ledgerprint/kv_config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace ledgerprint;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Small spec that runs in well under a second per grid point.
ExperimentSpec tiny_spec() {
    ExperimentSpec spec;
    spec.duration = 3600.0;
    spec.device_types = {"Smart_Things", "iHome", "HP_Printer", "Netatmo_Weather"};
    spec.max_packets_per_device = 300;
    spec.delays = {0.0, 2.0};
    spec.devices_per_ledger = {1, 4};
    spec.packets_per_transaction = {1};
    spec.scenarios = {ScenarioKind::Informed};
    spec.trials = 2;
    spec.folds = 3;
    spec.seed = 5;
    return spec;
}

}  // namespace

TEST_CASE("KvConfig parses the supported subset") {
    const auto kv = KvConfig::parse(
        "# comment\n"
        "name = \"hello # not a comment\"  # trailing\n"
        "count = 17\n"
        "ratio = 0.25\n"
        "flag = false\n"
        "values = [1, 2.5, 30]\n"
        "names = [\"a\", \"b\"]\n"
        "\n");
    CHECK(kv.get_string("name", "") == "hello # not a comment");
    CHECK(kv.get_int("count", 0) == 17);
    CHECK(kv.get_double("ratio", 0.0) == 0.25);
    CHECK(kv.get_bool("flag", true) == false);
    CHECK(kv.get_double_array("values", {}) == std::vector<double>{1.0, 2.5, 30.0});
    CHECK(kv.get_string_array("names", {}) == std::vector<std::string>{"a", "b"});
    CHECK(kv.get_int("missing", 42) == 42);
    CHECK(kv.keys().size() == 6);

    CHECK_THROWS_AS(KvConfig::parse("junk line\n"), ParseError);
    CHECK_THROWS_AS(KvConfig::parse("a = [1,\n2]\n"), ParseError);
    CHECK_THROWS_AS(KvConfig::parse("a = 1\na = 2\n"), ParseError);
    CHECK_THROWS_AS(kv.get_int("ratio", 0), ConfigError);
    CHECK_THROWS_AS(kv.get_string("count", ""), ConfigError);
}

TEST_CASE("parse_experiment_spec fills defaults and validates") {
    const auto spec = parse_experiment_spec(
        "duration_s = 7200\n"
        "delays_s = [0, 0.5, 2, 30]\n"
        "devices_per_ledger = [1, 17]\n"
        "packets_per_transaction = [1, 3]\n"
        "scenarios = [\"informed\", \"blind\"]\n"
        "trials = 5\n"
        "seed = 9\n");
    CHECK(spec.duration == 7200.0);
    CHECK(spec.delays == std::vector<double>{0.0, 0.5, 2.0, 30.0});
    CHECK(spec.devices_per_ledger == std::vector<int>{1, 17});
    CHECK(spec.packets_per_transaction == std::vector<int>{1, 3});
    CHECK(spec.scenarios.size() == 2);
    CHECK(spec.trials == 5);
    CHECK(spec.folds == 10);
    CHECK(spec.features.window == 5);
    CHECK(spec.seed == 9);

    CHECK_THROWS_AS(parse_experiment_spec("delays_s = [-1]\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec("devices_per_ledger = [0]\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec("scenarios = [\"nope\"]\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec("trials = 0\n"), ConfigError);
}

TEST_CASE("run_sweep emits one row per grid point, scenario and trial") {
    auto spec = tiny_spec();
    const auto result = run_sweep(spec);
    // |grid| * |scenarios| * trials.
    CHECK(result.rows.size() == 2 * 2 * 1 * 2);
    for (const auto& row : result.rows) {
        CHECK(row.accuracy >= 0.0);
        CHECK(row.accuracy <= 1.0);
    }
    // Rows come out in grid order.
    for (size_t i = 1; i < result.rows.size(); ++i) {
        CHECK(result.rows[i - 1].grid_index <= result.rows[i].grid_index);
    }
    CHECK(result.summaries.size() == 4);
    for (const auto& s : result.summaries) {
        CHECK(s.trials == 2);
    }
}

TEST_CASE("sweep results are deterministic and parallel-invariant") {
    auto spec = tiny_spec();
    const auto a = run_sweep(spec);
    const auto b = run_sweep(spec);
    CHECK(results_csv(a.rows) == results_csv(b.rows));
    CHECK(summary_csv(a.summaries) == summary_csv(b.summaries));

    SweepOptions parallel;
    parallel.jobs = 4;
    const auto c = run_sweep(spec, parallel);
    CHECK(results_csv(a.rows) == results_csv(c.rows));
}

TEST_CASE("run_sweep writes incremental CSVs and resumes") {
    const fs::path dir = fs::temp_directory_path() / "lp_harness_test";
    fs::remove_all(dir);
    auto spec = tiny_spec();
    spec.out_dir = dir.string();

    const auto first = run_sweep(spec);
    const std::string results_a = read_file(dir / "results.csv");
    const std::string summary_a = read_file(dir / "summary.csv");
    CHECK(results_a == results_csv(first.rows));
    CHECK(summary_a == summary_csv(first.summaries));

    // Truncate the file to simulate a crash after the first grid point,
    // then resume: the final bytes must match a clean run.
    std::ostringstream partial;
    size_t kept = 0;
    std::istringstream lines(results_a);
    std::string line;
    bool header = true;
    while (std::getline(lines, line)) {
        if (header) {
            partial << line << "\n";
            header = false;
            continue;
        }
        if (line.rfind("0.000000,1,", 0) == 0) {
            partial << line << "\n";
            ++kept;
        }
    }
    REQUIRE(kept > 0);
    {
        std::ofstream out(dir / "results.csv", std::ios::binary | std::ios::trunc);
        out << partial.str();
    }
    SweepOptions resume;
    resume.resume = true;
    const auto second = run_sweep(spec, resume);
    CHECK(read_file(dir / "results.csv") == results_a);
    CHECK(results_csv(second.rows) == results_a);
    fs::remove_all(dir);
}

TEST_CASE("results CSV round-trips") {
    auto spec = tiny_spec();
    const auto result = run_sweep(spec);
    const auto rows = parse_results_csv(results_csv(result.rows));
    REQUIRE(rows.size() == result.rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].scenario == result.rows[i].scenario);
        CHECK(rows[i].trial == result.rows[i].trial);
        CHECK(rows[i].max_delay == result.rows[i].max_delay);
    }
    CHECK_THROWS_AS(parse_results_csv("bogus\n"), ParseError);
}

TEST_CASE("render_report groups by the chosen axis") {
    std::vector<TrialRow> rows = {
        {0, 0.0, 1, 1, "informed", 0, 0.9},
        {0, 0.0, 1, 1, "informed", 1, 0.8},
        {1, 30.0, 1, 1, "informed", 0, 0.5},
        {1, 30.0, 1, 1, "informed", 1, 0.4},
    };
    const std::string report = render_report(rows, ReportAxis::Delay);
    CHECK(report.find("scenario=informed") != std::string::npos);
    CHECK(report.find("delay_s") != std::string::npos);
    CHECK(report.find("0.8500") != std::string::npos);  // mean at delay 0
    CHECK(report.find("0.4500") != std::string::npos);  // mean at delay 30
}

TEST_CASE("a failing grid point is logged and skipped, the sweep continues") {
    ExperimentSpec spec = tiny_spec();
    // With heavy consolidation the dataset shrinks below the fold count, so
    // that grid point aborts while the n=1 point still completes.
    spec.duration = 1200.0;
    spec.device_types = {"HP_Printer"};
    spec.delays = {0.0};
    spec.devices_per_ledger = {1};
    spec.packets_per_transaction = {1, 8};
    spec.folds = 3;
    spec.trials = 1;

    std::ostringstream log;
    SweepOptions options;
    options.log = &log;
    const auto result = run_sweep(spec, options);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].packets_per_transaction == 1);
    CHECK(log.str().find("skipped") != std::string::npos);
}

TEST_CASE("baseline dominates obfuscated points for informed attacks") {
    size_t dominated = 0;
    const size_t seeds = 5;
    for (uint64_t seed = 1; seed <= seeds; ++seed) {
        ExperimentSpec spec = tiny_spec();
        spec.seed = seed * 131;
        spec.delays = {0.0, 30.0};
        spec.devices_per_ledger = {1, 4};
        spec.packets_per_transaction = {1};
        spec.trials = 1;
        const auto result = run_sweep(spec);
        double baseline = -1.0;
        double worst_obfuscated = -1.0;
        for (const auto& s : result.summaries) {
            if (s.max_delay == 0.0 && s.devices_per_ledger == 1) {
                baseline = s.mean_accuracy;
            } else {
                worst_obfuscated = std::max(worst_obfuscated, s.mean_accuracy);
            }
        }
        REQUIRE(baseline >= 0.0);
        if (baseline >= worst_obfuscated) {
            ++dominated;
        }
    }
    // Statistical, not absolute: at least 90% of seeds.
    CHECK(dominated * 10 >= seeds * 9);
}

TEST_CASE("build_home_trace balances the synthetic home") {
    auto spec = tiny_spec();
    const auto trace = build_home_trace(spec);
    std::map<std::string, size_t> counts;
    for (const auto& rec : trace.records) {
        ++counts[rec.device_id];
    }
    CHECK(counts.size() == 4);
    for (const auto& [device, count] : counts) {
        CHECK(count <= spec.max_packets_per_device);
    }
    // Deterministic.
    const auto again = build_home_trace(spec);
    CHECK(trace.records == again.records);
}

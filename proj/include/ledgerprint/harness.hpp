#pragma once

#include "ledgerprint/attack.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ledgerprint {

/// Full description of one sweep: the trace source, the obfuscation grid and
/// the attack scenarios to run at every grid point.
struct ExperimentSpec {
    // Trace source: a CSV file, or a synthetic home built from the builtin
    // profiles when `trace_csv` is empty.
    std::string trace_csv;
    double duration = 86400.0;
    double jitter = 0.01;
    int count_per_type = 1;
    std::vector<std::string> device_types;  ///< empty = all builtin types
    size_t max_packets_per_device = 2000;   ///< 0 disables balancing
    size_t balance_run_length = 32;

    // Obfuscation grid.
    std::vector<double> delays;                 ///< max_delay values, seconds
    std::vector<int> devices_per_ledger;        ///< k values
    std::vector<int> packets_per_transaction;   ///< n values

    std::vector<ScenarioKind> scenarios;
    int trials = 5;
    int folds = 10;
    /// Per trial, the blind lab covers a uniformly drawn share of the device
    /// catalog in [min, max] (the attacker may own few or many of the home's
    /// device types; the default averages 60%). Set min == max for a
    /// fixed-size lab.
    double blind_lab_fraction_min = 0.4;
    double blind_lab_fraction_max = 1.0;
    double lab_duration = 0.0;  ///< 0 = same as `duration`
    int days = 1;

    FeatureConfig features;
    TrainConfig train;
    uint64_t seed = 1;
    std::string out_dir;
};

/// One per-trial result row.
struct TrialRow {
    size_t grid_index = 0;
    double max_delay = 0.0;
    int devices_per_ledger = 1;
    int packets_per_transaction = 1;
    std::string scenario;
    int trial = 0;
    double accuracy = 0.0;
};

/// Aggregates of one (grid point, scenario).
struct PointSummary {
    double max_delay = 0.0;
    int devices_per_ledger = 1;
    int packets_per_transaction = 1;
    std::string scenario;
    int trials = 0;
    double mean_accuracy = 0.0;
    double max_accuracy = 0.0;
    double variance = 0.0;
};

struct SweepResult {
    std::vector<TrialRow> rows;
    std::vector<PointSummary> summaries;
};

struct SweepOptions {
    int jobs = 1;        ///< grid points processed concurrently
    bool resume = false; ///< reuse complete grid points from an existing results.csv
    std::ostream* log = nullptr;  ///< per-point progress / error lines
};

ExperimentSpec parse_experiment_spec(std::string_view toml_text);
void validate(const ExperimentSpec& spec);

/// The home trace the sweep runs on (loaded or synthesized, then balanced).
TraceSet build_home_trace(const ExperimentSpec& spec);

/// Runs every (grid point, scenario, trial); rows are ordered by grid index,
/// scenario, trial regardless of worker scheduling. When spec.out_dir is
/// non-empty, results.csv is written incrementally per grid point and
/// summary.csv at the end. A failed grid point is logged and skipped; the
/// sweep continues.
SweepResult run_sweep(const ExperimentSpec& spec, const SweepOptions& options = {});

/// CSV renderings (also what run_sweep writes to disk).
std::string results_csv(const std::vector<TrialRow>& rows);
std::string summary_csv(const std::vector<PointSummary>& summaries);
std::vector<TrialRow> parse_results_csv(std::string_view csv_text);

enum class ReportAxis { Delay, DevicesPerLedger, PacketsPerTransaction };

/// Plain-text accuracy-vs-parameter table per scenario, aggregated over the
/// other grid dimensions and trials.
std::string render_report(const std::vector<TrialRow>& rows, ReportAxis axis);

}  // namespace ledgerprint

#include "ledgerprint/harness.hpp"

#include "ledgerprint/errors.hpp"
#include "ledgerprint/format.hpp"
#include "ledgerprint/kv_config.hpp"
#include "ledgerprint/rng.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace ledgerprint {

namespace fs = std::filesystem;

namespace {

constexpr double kDaySeconds = 86400.0;

struct GridPoint {
    double max_delay = 0.0;
    int devices_per_ledger = 1;
    int packets_per_transaction = 1;
};

std::vector<GridPoint> grid_points(const ExperimentSpec& spec) {
    std::vector<GridPoint> points;
    for (double delay : spec.delays) {
        for (int k : spec.devices_per_ledger) {
            for (int n : spec.packets_per_transaction) {
                points.push_back({delay, k, n});
            }
        }
    }
    return points;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_accuracy(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

/// Day window of a trace (timestamps shifted to the window origin).
TraceSet day_window(const TraceSet& trace, int day) {
    const double begin = day * kDaySeconds;
    const double end = begin + kDaySeconds;
    TraceSet window;
    window.duration = kDaySeconds;
    for (const PacketRecord& rec : trace.records) {
        if (rec.timestamp >= begin && rec.timestamp < end) {
            PacketRecord shifted = rec;
            shifted.timestamp -= begin;
            window.records.push_back(std::move(shifted));
        }
    }
    return window;
}

struct PointOutcome {
    std::vector<TrialRow> rows;
    std::string error;  ///< non-empty when the grid point was aborted
};

class SweepContext {
public:
    SweepContext(const ExperimentSpec& spec, std::ostream* log) : spec_(spec), log_(log) {
        home_full_ = build_home_trace(spec);
        if (spec.days > 1) {
            for (int d = 0; d < spec.days; ++d) {
                home_days_.push_back(day_window(home_full_, d));
            }
        } else {
            home_days_.push_back(home_full_);
        }
        for (const auto& day : home_days_) {
            if (day.records.empty()) {
                throw DataError("home trace has an empty day window");
            }
        }
        catalog_ = device_types(home_full_);
        if (catalog_.empty()) {
            throw DataError("home trace has no devices");
        }
        lab_duration_ = spec.lab_duration > 0.0 ? spec.lab_duration
                                                : std::min(spec.duration, kDaySeconds);
    }

    PointOutcome run_point(size_t grid_index, const GridPoint& point) const {
        PointOutcome outcome;
        try {
            for (size_t s = 0; s < spec_.scenarios.size(); ++s) {
                const ScenarioKind kind = spec_.scenarios[s];
                for (int trial = 0; trial < spec_.trials; ++trial) {
                    const double acc = run_trial(grid_index, point, kind, s, trial);
                    outcome.rows.push_back({grid_index, point.max_delay,
                                            point.devices_per_ledger,
                                            point.packets_per_transaction, to_string(kind), trial,
                                            acc});
                }
            }
        } catch (const std::exception& e) {
            outcome.rows.clear();
            outcome.error = e.what();
        }
        return outcome;
    }

    const ExperimentSpec& spec() const { return spec_; }
    std::ostream* log() const { return log_; }

private:
    double run_trial(size_t grid_index, const GridPoint& point, ScenarioKind kind,
                     size_t scenario_index, int trial) const {
        const uint64_t trial_seed =
            derive_seed(spec_.seed, "trial", grid_index * 64 + scenario_index,
                        static_cast<uint64_t>(trial));
        const TraceSet& home = home_days_[trial % home_days_.size()];

        PipelineOptions options;
        options.obfuscation = {point.max_delay, point.devices_per_ledger,
                               point.packets_per_transaction, trial_seed};
        options.features = spec_.features;
        options.train = spec_.train;
        options.key_seed = derive_seed(trial_seed, "keys");
        // The home trace is balanced once up front.
        options.balance_cap = 0;
        const LabeledDataset home_ds = pipeline_dataset(home, options);

        if (kind == ScenarioKind::Informed) {
            return run_informed(home_ds, spec_.folds, spec_.train, derive_seed(trial_seed, "cv"))
                .mean_accuracy;
        }

        // Blind: synthesize the attacker's lab with a random subset of the
        // device catalog and push it through the same pipeline. The subset
        // size varies per trial between the configured fractions.
        std::vector<std::string> lab_types = catalog_;
        Rng rng(derive_seed(trial_seed, "lab-pick"));
        rng.shuffle(lab_types);
        const auto size_at = [&](double fraction) {
            return std::max<size_t>(
                1, static_cast<size_t>(
                       std::llround(fraction * static_cast<double>(catalog_.size()))));
        };
        const size_t lo = size_at(spec_.blind_lab_fraction_min);
        const size_t hi = std::max(lo, size_at(spec_.blind_lab_fraction_max));
        const size_t lab_size = lo + rng.below(hi - lo + 1);
        lab_types.resize(std::min(lab_size, lab_types.size()));
        std::sort(lab_types.begin(), lab_types.end());

        const auto profiles = [&] {
            auto selected = select_profiles(lab_types);
            for (auto& p : selected) {
                p.jitter_fraction = spec_.jitter;
            }
            return selected;
        }();
        std::map<std::string, int> counts;
        for (const auto& p : profiles) {
            counts[p.device_type] += spec_.count_per_type;
        }
        const TraceSet lab_raw =
            synth_trace(profiles, counts, lab_duration_, derive_seed(trial_seed, "lab"));
        const TraceSet lab_balanced =
            balance_trace(lab_raw, spec_.max_packets_per_device, spec_.balance_run_length,
                          derive_seed(trial_seed, "lab-balance"));

        PipelineOptions lab_options = options;
        lab_options.obfuscation.seed = derive_seed(trial_seed, "lab-obf");
        lab_options.key_seed = derive_seed(trial_seed, "lab-keys");
        const LabeledDataset lab_ds = pipeline_dataset(lab_balanced, lab_options);

        return run_blind(lab_ds, home_ds, spec_.train).mean_accuracy;
    }

    const ExperimentSpec& spec_;
    std::ostream* log_;
    TraceSet home_full_;
    std::vector<TraceSet> home_days_;
    std::vector<std::string> catalog_;
    double lab_duration_ = kDaySeconds;
};

std::vector<PointSummary> summarize(const std::vector<TrialRow>& rows) {
    // Keyed by (grid_index, scenario); rows are already grid-ordered.
    std::map<std::pair<size_t, std::string>, std::vector<const TrialRow*>> groups;
    for (const TrialRow& row : rows) {
        groups[{row.grid_index, row.scenario}].push_back(&row);
    }
    std::vector<PointSummary> summaries;
    for (const auto& [key, group] : groups) {
        PointSummary s;
        s.max_delay = group.front()->max_delay;
        s.devices_per_ledger = group.front()->devices_per_ledger;
        s.packets_per_transaction = group.front()->packets_per_transaction;
        s.scenario = key.second;
        s.trials = static_cast<int>(group.size());
        double sum = 0.0;
        for (const auto* row : group) {
            sum += row->accuracy;
            s.max_accuracy = std::max(s.max_accuracy, row->accuracy);
        }
        s.mean_accuracy = sum / static_cast<double>(group.size());
        double sq = 0.0;
        for (const auto* row : group) {
            const double d = row->accuracy - s.mean_accuracy;
            sq += d * d;
        }
        s.variance = sq / static_cast<double>(group.size());
        summaries.push_back(std::move(s));
    }
    return summaries;
}

std::string rows_csv_body(const std::vector<TrialRow>& rows) {
    std::string out;
    for (const TrialRow& row : rows) {
        out += canonical_seconds(row.max_delay);
        out.push_back(',');
        out += std::to_string(row.devices_per_ledger);
        out.push_back(',');
        out += std::to_string(row.packets_per_transaction);
        out.push_back(',');
        out += row.scenario;
        out.push_back(',');
        out += std::to_string(row.trial);
        out.push_back(',');
        out += format_accuracy(row.accuracy);
        out.push_back('\n');
    }
    return out;
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::string_view toml_text) {
    const KvConfig kv = KvConfig::parse(toml_text);
    ExperimentSpec spec;
    spec.trace_csv = kv.get_string("trace_csv", spec.trace_csv);
    spec.duration = kv.get_double("duration_s", spec.duration);
    spec.jitter = kv.get_double("jitter", spec.jitter);
    spec.count_per_type = static_cast<int>(kv.get_int("count_per_type", spec.count_per_type));
    spec.device_types = kv.get_string_array("device_types", spec.device_types);
    spec.max_packets_per_device = static_cast<size_t>(
        kv.get_int("max_packets_per_device", static_cast<int64_t>(spec.max_packets_per_device)));
    spec.balance_run_length = static_cast<size_t>(
        kv.get_int("balance_run_length", static_cast<int64_t>(spec.balance_run_length)));

    spec.delays = kv.get_double_array("delays_s", spec.delays);
    {
        std::vector<int64_t> fallback_k, fallback_n;
        for (const auto k : kv.get_int_array("devices_per_ledger", fallback_k)) {
            spec.devices_per_ledger.push_back(static_cast<int>(k));
        }
        for (const auto n : kv.get_int_array("packets_per_transaction", fallback_n)) {
            spec.packets_per_transaction.push_back(static_cast<int>(n));
        }
    }
    if (spec.delays.empty()) {
        spec.delays = {0.0};
    }
    if (spec.devices_per_ledger.empty()) {
        spec.devices_per_ledger = {1};
    }
    if (spec.packets_per_transaction.empty()) {
        spec.packets_per_transaction = {1};
    }

    for (const auto& name : kv.get_string_array("scenarios", {"informed"})) {
        if (name == "informed") {
            spec.scenarios.push_back(ScenarioKind::Informed);
        } else if (name == "blind") {
            spec.scenarios.push_back(ScenarioKind::Blind);
        } else {
            throw ConfigError("unknown scenario '" + name + "'");
        }
    }
    spec.trials = static_cast<int>(kv.get_int("trials", spec.trials));
    spec.folds = static_cast<int>(kv.get_int("folds", spec.folds));
    if (kv.has("blind_lab_fraction")) {
        // Fixed-size lab.
        spec.blind_lab_fraction_min = kv.get_double("blind_lab_fraction", 0.6);
        spec.blind_lab_fraction_max = spec.blind_lab_fraction_min;
    }
    spec.blind_lab_fraction_min =
        kv.get_double("blind_lab_fraction_min", spec.blind_lab_fraction_min);
    spec.blind_lab_fraction_max =
        kv.get_double("blind_lab_fraction_max", spec.blind_lab_fraction_max);
    spec.lab_duration = kv.get_double("lab_duration_s", spec.lab_duration);
    spec.days = static_cast<int>(kv.get_int("days", spec.days));

    spec.features.window = static_cast<int>(kv.get_int("window", spec.features.window));
    spec.features.log_scale = kv.get_bool("log_scale", spec.features.log_scale);
    spec.train.max_depth = static_cast<int>(kv.get_int("max_depth", spec.train.max_depth));
    spec.train.min_samples_split =
        static_cast<int>(kv.get_int("min_samples_split", spec.train.min_samples_split));
    spec.seed = kv.get_uint("seed", spec.seed);
    spec.out_dir = kv.get_string("out_dir", spec.out_dir);
    validate(spec);
    return spec;
}

void validate(const ExperimentSpec& spec) {
    for (double delay : spec.delays) {
        if (delay < 0.0) {
            throw ConfigError("spec: negative delay in grid");
        }
    }
    for (int k : spec.devices_per_ledger) {
        if (k < 1) {
            throw ConfigError("spec: devices_per_ledger values must be >= 1");
        }
    }
    for (int n : spec.packets_per_transaction) {
        if (n < 1) {
            throw ConfigError("spec: packets_per_transaction values must be >= 1");
        }
    }
    if (spec.scenarios.empty()) {
        throw ConfigError("spec: no scenarios");
    }
    if (spec.trials < 1) {
        throw ConfigError("spec: trials must be >= 1");
    }
    if (spec.folds < 2) {
        throw ConfigError("spec: folds must be >= 2");
    }
    if (spec.trace_csv.empty() && !(spec.duration > 0.0)) {
        throw ConfigError("spec: duration_s must be > 0");
    }
    if (spec.blind_lab_fraction_min <= 0.0 || spec.blind_lab_fraction_max > 1.0 ||
        spec.blind_lab_fraction_min > spec.blind_lab_fraction_max) {
        throw ConfigError("spec: blind lab fractions must satisfy 0 < min <= max <= 1");
    }
    if (spec.days < 1) {
        throw ConfigError("spec: days must be >= 1");
    }
    if (spec.days > 1 && spec.trace_csv.empty() &&
        spec.duration < spec.days * kDaySeconds) {
        throw ConfigError("spec: duration_s shorter than the requested days");
    }
    if (spec.features.window < 1) {
        throw ConfigError("spec: window must be >= 1");
    }
    if (spec.count_per_type < 1) {
        throw ConfigError("spec: count_per_type must be >= 1");
    }
}

TraceSet build_home_trace(const ExperimentSpec& spec) {
    TraceSet trace;
    if (!spec.trace_csv.empty()) {
        trace = parse_trace(read_file(spec.trace_csv));
    } else {
        auto profiles = select_profiles(spec.device_types);
        for (auto& p : profiles) {
            p.jitter_fraction = spec.jitter;
        }
        // One device per profile variant (17 nodes for the full catalog).
        std::map<std::string, int> counts;
        for (const auto& p : profiles) {
            counts[p.device_type] += spec.count_per_type;
        }
        trace = synth_trace(profiles, counts, spec.duration, derive_seed(spec.seed, "home"));
    }
    return balance_trace(trace, spec.max_packets_per_device, spec.balance_run_length,
                         derive_seed(spec.seed, "home-balance"));
}

std::string results_csv(const std::vector<TrialRow>& rows) {
    return "delay_s,devices_per_ledger,packets_per_transaction,scenario,trial,accuracy\n" +
           rows_csv_body(rows);
}

std::string summary_csv(const std::vector<PointSummary>& summaries) {
    std::string out =
        "delay_s,devices_per_ledger,packets_per_transaction,scenario,trials,"
        "mean_accuracy,max_accuracy,variance\n";
    for (const PointSummary& s : summaries) {
        out += canonical_seconds(s.max_delay);
        out.push_back(',');
        out += std::to_string(s.devices_per_ledger);
        out.push_back(',');
        out += std::to_string(s.packets_per_transaction);
        out.push_back(',');
        out += s.scenario;
        out.push_back(',');
        out += std::to_string(s.trials);
        out.push_back(',');
        out += format_accuracy(s.mean_accuracy);
        out.push_back(',');
        out += format_accuracy(s.max_accuracy);
        out.push_back(',');
        out += format_accuracy(s.variance);
        out.push_back('\n');
    }
    return out;
}

std::vector<TrialRow> parse_results_csv(std::string_view csv_text) {
    std::vector<TrialRow> rows;
    bool saw_header = false;
    detail::for_each_line(csv_text, [&](size_t line_no, std::string_view line) {
        if (line.empty()) {
            return;
        }
        if (!saw_header) {
            if (line != "delay_s,devices_per_ledger,packets_per_transaction,scenario,trial,"
                        "accuracy") {
                throw ParseError("line 1: unexpected results header");
            }
            saw_header = true;
            return;
        }
        const auto fields = detail::split(line, ',');
        if (fields.size() != 6) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 6 columns");
        }
        TrialRow row;
        const auto delay = detail::parse_double(fields[0]);
        const auto k = detail::parse_uint(fields[1]);
        const auto n = detail::parse_uint(fields[2]);
        const auto trial = detail::parse_uint(fields[4]);
        const auto acc = detail::parse_double(fields[5]);
        if (!delay || !k || !n || !trial || !acc) {
            throw ParseError("line " + std::to_string(line_no) + ": malformed row");
        }
        row.max_delay = *delay;
        row.devices_per_ledger = static_cast<int>(*k);
        row.packets_per_transaction = static_cast<int>(*n);
        row.scenario = std::string(fields[3]);
        row.trial = static_cast<int>(*trial);
        row.accuracy = *acc;
        rows.push_back(std::move(row));
    });
    if (!saw_header) {
        throw ParseError("line 1: empty results input, header missing");
    }
    return rows;
}

SweepResult run_sweep(const ExperimentSpec& spec, const SweepOptions& options) {
    validate(spec);
    const SweepContext context(spec, options.log);
    const auto points = grid_points(spec);

    // Resume support: reuse rows for grid points that are fully present.
    std::map<size_t, std::vector<TrialRow>> cached;
    const fs::path out_dir = spec.out_dir;
    const fs::path results_path = out_dir / "results.csv";
    if (options.resume && !spec.out_dir.empty() && fs::exists(results_path)) {
        const auto existing = parse_results_csv(read_file(results_path.string()));
        std::map<size_t, std::vector<TrialRow>> by_point;
        for (TrialRow row : existing) {
            for (size_t i = 0; i < points.size(); ++i) {
                if (points[i].max_delay == row.max_delay &&
                    points[i].devices_per_ledger == row.devices_per_ledger &&
                    points[i].packets_per_transaction == row.packets_per_transaction) {
                    row.grid_index = i;
                    by_point[i].push_back(row);
                    break;
                }
            }
        }
        const size_t expected = spec.scenarios.size() * static_cast<size_t>(spec.trials);
        for (auto& [index, rows] : by_point) {
            if (rows.size() == expected) {
                cached.emplace(index, std::move(rows));
            }
        }
    }

    std::vector<std::optional<PointOutcome>> outcomes(points.size());
    for (const auto& [index, rows] : cached) {
        outcomes[index] = PointOutcome{rows, {}};
        if (options.log) {
            *options.log << "grid point " << index << ": resumed from results.csv\n";
        }
    }

    std::ofstream results_file;
    if (!spec.out_dir.empty()) {
        fs::create_directories(out_dir);
        results_file.open(results_path, std::ios::binary | std::ios::trunc);
        if (!results_file) {
            throw DataError("cannot write '" + results_path.string() + "'");
        }
        results_file << "delay_s,devices_per_ledger,packets_per_transaction,scenario,trial,"
                        "accuracy\n";
        results_file.flush();
    }

    std::mutex mu;
    size_t next_to_take = 0;
    size_t next_to_flush = 0;
    SweepResult result;

    auto flush_ready = [&]() {
        // Caller holds `mu`.
        while (next_to_flush < points.size() && outcomes[next_to_flush].has_value()) {
            PointOutcome& outcome = *outcomes[next_to_flush];
            if (!outcome.error.empty()) {
                if (options.log) {
                    const GridPoint& p = points[next_to_flush];
                    *options.log << "grid point " << next_to_flush << " (delay=" << p.max_delay
                                 << ",k=" << p.devices_per_ledger
                                 << ",n=" << p.packets_per_transaction
                                 << "): skipped: " << outcome.error << "\n";
                }
            } else {
                result.rows.insert(result.rows.end(), outcome.rows.begin(), outcome.rows.end());
                if (results_file.is_open()) {
                    results_file << rows_csv_body(outcome.rows);
                    results_file.flush();
                }
            }
            ++next_to_flush;
        }
    };

    auto worker = [&]() {
        while (true) {
            size_t index;
            {
                std::lock_guard<std::mutex> lock(mu);
                while (next_to_take < points.size() && outcomes[next_to_take].has_value()) {
                    ++next_to_take;
                }
                if (next_to_take >= points.size()) {
                    return;
                }
                index = next_to_take++;
            }
            PointOutcome outcome = context.run_point(index, points[index]);
            {
                std::lock_guard<std::mutex> lock(mu);
                outcomes[index] = std::move(outcome);
                flush_ready();
            }
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        worker();
        std::lock_guard<std::mutex> lock(mu);
        flush_ready();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<size_t>(jobs));
        for (int i = 0; i < jobs; ++i) {
            threads.emplace_back(worker);
        }
        for (auto& t : threads) {
            t.join();
        }
        std::lock_guard<std::mutex> lock(mu);
        flush_ready();
    }

    result.summaries = summarize(result.rows);
    if (!spec.out_dir.empty()) {
        results_file.close();
        std::ofstream summary_file(out_dir / "summary.csv", std::ios::binary | std::ios::trunc);
        if (!summary_file) {
            throw DataError("cannot write summary.csv");
        }
        summary_file << summary_csv(result.summaries);
    }
    return result;
}

std::string render_report(const std::vector<TrialRow>& rows, ReportAxis axis) {
    const char* axis_name = axis == ReportAxis::Delay ? "delay_s"
                            : axis == ReportAxis::DevicesPerLedger ? "devices_per_ledger"
                                                                   : "packets_per_transaction";
    auto axis_value = [&](const TrialRow& row) {
        switch (axis) {
            case ReportAxis::Delay: return row.max_delay;
            case ReportAxis::DevicesPerLedger: return static_cast<double>(row.devices_per_ledger);
            default: return static_cast<double>(row.packets_per_transaction);
        }
    };

    std::map<std::string, std::map<double, std::vector<double>>> grouped;
    for (const TrialRow& row : rows) {
        grouped[row.scenario][axis_value(row)].push_back(row.accuracy);
    }

    std::ostringstream out;
    for (const auto& [scenario, by_value] : grouped) {
        out << "scenario=" << scenario << " axis=" << axis_name << "\n";
        char header[128];
        std::snprintf(header, sizeof(header), "  %-12s %8s %10s %10s %10s %12s\n", axis_name,
                      "rows", "mean", "min", "max", "variance");
        out << header;
        for (const auto& [value, accs] : by_value) {
            double sum = 0.0, lo = accs.front(), hi = accs.front();
            for (double a : accs) {
                sum += a;
                lo = std::min(lo, a);
                hi = std::max(hi, a);
            }
            const double mean = sum / static_cast<double>(accs.size());
            double sq = 0.0;
            for (double a : accs) {
                sq += (a - mean) * (a - mean);
            }
            char line[160];
            std::snprintf(line, sizeof(line), "  %-12g %8zu %10.4f %10.4f %10.4f %12.6f\n", value,
                          accs.size(), mean, lo, hi, sq / static_cast<double>(accs.size()));
            out << line;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace ledgerprint

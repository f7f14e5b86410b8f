// ledgerprint CLI: synthesize traces, build ledgers, apply the timestamp
// obfuscation defenses, featurize, train/evaluate the attacker model and run
// full parameter sweeps.
//
// Exit codes: 0 success, 1 usage error, 2 data/config error.

#include "ledgerprint/attack.hpp"
#include "ledgerprint/classifier.hpp"
#include "ledgerprint/errors.hpp"
#include "ledgerprint/features.hpp"
#include "ledgerprint/harness.hpp"
#include "ledgerprint/ledger.hpp"
#include "ledgerprint/obfuscate.hpp"
#include "ledgerprint/rng.hpp"
#include "ledgerprint/trace.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ledgerprint;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    out << content;
    if (!out) {
        throw DataError("short write to '" + path + "'");
    }
}

struct SynthArgs {
    double duration = 86400.0;
    uint64_t seed = 1;
    std::string out;
    std::vector<std::string> types;
    int count_per_type = 1;
    double jitter = 0.01;
    uint64_t max_per_device = 0;
    uint64_t run_length = 32;
};

int cmd_synth(const SynthArgs& args) {
    auto profiles = select_profiles(args.types);
    for (auto& p : profiles) {
        p.jitter_fraction = args.jitter;
    }
    std::map<std::string, int> counts;
    for (const auto& p : profiles) {
        counts[p.device_type] = args.count_per_type;
    }
    TraceSet trace = synth_trace(profiles, counts, args.duration, args.seed);
    trace = balance_trace(trace, args.max_per_device, args.run_length,
                          derive_seed(args.seed, "balance"));
    write_file(args.out, serialize_trace(trace));
    std::fprintf(stderr, "synth: %zu records, %zu devices -> %s\n", trace.records.size(),
                 device_ids(trace).size(), args.out.c_str());
    return 0;
}

struct PopulateArgs {
    std::string trace;
    std::string out;
    std::string labels;
    std::string assignment_in;
    int devices_per_ledger = 1;
    uint64_t seed = 1;
    uint64_t key_seed = 1;
    uint64_t blocksize = 100;
};

std::map<std::string, std::string> parse_assignment_csv(const std::string& text) {
    std::map<std::string, std::string> assignment;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || (line_no == 1 && line == "device_id,ledger_id")) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("assignment line " + std::to_string(line_no) +
                             ": expected device_id,ledger_id");
        }
        assignment[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return assignment;
}

int cmd_populate(const PopulateArgs& args) {
    const TraceSet trace = parse_trace(read_file(args.trace));
    std::map<std::string, std::string> assignment;
    if (!args.assignment_in.empty()) {
        assignment = parse_assignment_csv(read_file(args.assignment_in));
    } else {
        assignment = assign_multi_device(device_ids(trace), args.devices_per_ledger, args.seed);
    }
    const auto chains = populate(trace, assignment, args.key_seed);
    for (const auto& chain : chains) {
        if (!verify_chain(chain)) {
            throw DataError("internal: populated chain failed verification");
        }
    }
    write_file(args.out, export_ledger(chains));
    if (!args.labels.empty()) {
        write_file(args.labels, export_labels(chains));
    }
    if (args.blocksize > 0) {
        const auto blocks = form_blocks(chains, args.blocksize);
        if (!verify_blocks(blocks)) {
            throw DataError("internal: block chain failed verification");
        }
        std::fprintf(stderr, "populate: %zu blocks of size <= %llu verify\n", blocks.size(),
                     static_cast<unsigned long long>(args.blocksize));
    }
    std::fprintf(stderr, "populate: %zu chains -> %s\n", chains.size(), args.out.c_str());
    return 0;
}

struct ObfuscateArgs {
    std::string trace;
    std::string out;
    std::string config_file;
    std::string assignment_out;
    double max_delay = 0.0;
    int devices_per_ledger = 1;
    int packets_per_transaction = 1;
    uint64_t seed = 1;
};

int cmd_obfuscate(const ObfuscateArgs& args) {
    ObfuscationConfig config;
    if (!args.config_file.empty()) {
        config = parse_obfuscation_config(read_file(args.config_file));
    } else {
        config = {args.max_delay, args.devices_per_ledger, args.packets_per_transaction,
                  args.seed};
        validate(config);
    }
    const TraceSet trace = parse_trace(read_file(args.trace));
    const auto result = apply_obfuscation(config, trace, device_ids(trace));
    write_file(args.out, serialize_trace(result.trace));
    if (!args.assignment_out.empty()) {
        std::string csv = "device_id,ledger_id\n";
        for (const auto& [device, ledger] : result.assignment) {
            csv += device + "," + ledger + "\n";
        }
        write_file(args.assignment_out, csv);
    }
    std::fprintf(stderr, "obfuscate: %zu -> %zu records\n", trace.records.size(),
                 result.trace.records.size());
    return 0;
}

struct FeaturizeArgs {
    std::string ledger;
    std::string labels;
    std::string out;
    int window = 5;
    bool no_log = false;
};

int cmd_featurize(const FeaturizeArgs& args) {
    const auto chains = import_ledger(read_file(args.ledger));
    const auto labels = parse_labels(read_file(args.labels));
    FeatureConfig config;
    config.window = args.window;
    config.log_scale = !args.no_log;
    const auto dataset = extract(chains, labels, config);
    write_file(args.out, serialize_dataset(dataset));
    std::fprintf(stderr, "featurize: %zu examples, %zu labels -> %s\n", dataset.examples.size(),
                 dataset.label_vocabulary.size(), args.out.c_str());
    return 0;
}

struct TrainArgs {
    std::string dataset;
    std::string out;
    int max_depth = 20;
    int min_samples_split = 2;
};

int cmd_train(const TrainArgs& args) {
    const auto dataset = parse_dataset(read_file(args.dataset));
    TrainConfig config;
    config.max_depth = args.max_depth;
    config.min_samples_split = args.min_samples_split;
    const auto tree = train(dataset, config);
    write_file(args.out, tree_to_json(tree));
    std::fprintf(stderr, "train: %zu examples -> %zu nodes\n", dataset.examples.size(),
                 tree.nodes.size());
    return 0;
}

struct EvaluateArgs {
    std::string tree;
    std::string dataset;
    std::string report;
};

int cmd_evaluate(const EvaluateArgs& args) {
    const auto tree = tree_from_json(read_file(args.tree));
    const auto dataset = parse_dataset(read_file(args.dataset));
    const auto rep = evaluate(tree, dataset);
    std::printf("accuracy=%.6f examples=%zu\n", rep.accuracy, rep.total);
    if (!args.report.empty()) {
        std::string csv = "label,support,recall\n";
        for (const auto& [label, recall] : rep.per_class_recall) {
            size_t support = 0;
            for (const auto& [predicted, count] : rep.confusion.at(label)) {
                support += count;
            }
            char line[256];
            std::snprintf(line, sizeof(line), "%s,%zu,%.6f\n", label.c_str(), support, recall);
            csv += line;
        }
        write_file(args.report, csv);
    }
    return 0;
}

struct SweepArgs {
    std::string spec;
    std::string out;
    int jobs = 1;
    bool resume = false;
};

int cmd_sweep(const SweepArgs& args) {
    ExperimentSpec spec = parse_experiment_spec(read_file(args.spec));
    if (!args.out.empty()) {
        spec.out_dir = args.out;
    }
    if (spec.out_dir.empty()) {
        throw ConfigError("sweep: no output directory (set out_dir in the spec or pass --out)");
    }
    // Paths in the spec resolve relative to the spec file.
    if (!spec.trace_csv.empty()) {
        const auto spec_dir = std::filesystem::path(args.spec).parent_path();
        if (!std::filesystem::path(spec.trace_csv).is_absolute() &&
            !std::filesystem::exists(spec.trace_csv) &&
            std::filesystem::exists(spec_dir / spec.trace_csv)) {
            spec.trace_csv = (spec_dir / spec.trace_csv).string();
        }
    }
    SweepOptions options;
    options.jobs = args.jobs;
    options.resume = args.resume;
    options.log = &std::cerr;
    const auto result = run_sweep(spec, options);
    std::printf("sweep: %zu rows, %zu grid summaries -> %s\n", result.rows.size(),
                result.summaries.size(), spec.out_dir.c_str());
    return 0;
}

struct ReportArgs {
    std::string results;
    std::string axis = "delay";
    std::string out;
};

int cmd_report(const ReportArgs& args) {
    ReportAxis axis;
    if (args.axis == "delay") {
        axis = ReportAxis::Delay;
    } else if (args.axis == "devices") {
        axis = ReportAxis::DevicesPerLedger;
    } else if (args.axis == "packets") {
        axis = ReportAxis::PacketsPerTransaction;
    } else {
        throw ConfigError("report: unknown axis '" + args.axis +
                          "' (expected delay|devices|packets)");
    }
    const auto rows = parse_results_csv(read_file(args.results));
    const std::string table = render_report(rows, axis);
    if (!args.out.empty()) {
        write_file(args.out, table);
    } else {
        std::fputs(table.c_str(), stdout);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ledgerprint: device-classification attacks on IoT transaction ledgers,\n"
                 "and the timestamp obfuscation defenses that blunt them"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic trace CSV");
    synth->add_option("--duration", synth_args.duration, "Trace length, seconds")
        ->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_args.seed, "RNG seed");
    synth->add_option("--out", synth_args.out, "Output trace CSV")->required();
    synth->add_option("--types", synth_args.types,
                      "Device types to include (default: all builtin)")
        ->delimiter(',');
    synth->add_option("--count-per-type", synth_args.count_per_type, "Devices per type")
        ->check(CLI::PositiveNumber);
    synth->add_option("--jitter", synth_args.jitter, "Relative gap jitter in [0,1)");
    synth->add_option("--max-per-device", synth_args.max_per_device,
                      "Cap records per device (0 = uncapped)");
    synth->add_option("--run-length", synth_args.run_length, "Balancing run length");

    PopulateArgs populate_args;
    auto* populate = app.add_subcommand("populate", "Build hash-chained ledgers from a trace");
    populate->add_option("--trace", populate_args.trace, "Input trace CSV")->required();
    populate->add_option("--out", populate_args.out, "Output ledger JSONL")->required();
    populate->add_option("--labels", populate_args.labels, "Output ground-truth labels CSV");
    populate->add_option("--assignment", populate_args.assignment_in,
                         "Device-to-ledger CSV (device_id,ledger_id)");
    populate->add_option("--devices-per-ledger", populate_args.devices_per_ledger,
                         "Random assignment group size (ignored with --assignment)")
        ->check(CLI::PositiveNumber);
    populate->add_option("--seed", populate_args.seed, "Assignment shuffle seed");
    populate->add_option("--key-seed", populate_args.key_seed, "Key rotation seed");
    populate->add_option("--blocksize", populate_args.blocksize,
                         "Form and verify blocks of this size (0 skips block formation)");

    ObfuscateArgs obfuscate_args;
    auto* obfuscate = app.add_subcommand("obfuscate", "Apply the timestamp defenses to a trace");
    obfuscate->add_option("--trace", obfuscate_args.trace, "Input trace CSV")->required();
    obfuscate->add_option("--out", obfuscate_args.out, "Output trace CSV")->required();
    obfuscate->add_option("--config", obfuscate_args.config_file,
                          "Obfuscation config file (overrides the flags below)");
    obfuscate->add_option("--max-delay", obfuscate_args.max_delay, "MaxDelay, seconds");
    obfuscate->add_option("--devices-per-ledger", obfuscate_args.devices_per_ledger, "k");
    obfuscate->add_option("--packets-per-transaction", obfuscate_args.packets_per_transaction,
                          "n");
    obfuscate->add_option("--seed", obfuscate_args.seed, "RNG seed");
    obfuscate->add_option("--assignment-out", obfuscate_args.assignment_out,
                          "Write the device-to-ledger assignment CSV here");

    FeaturizeArgs featurize_args;
    auto* featurize = app.add_subcommand("featurize", "Extract gap-window features from ledgers");
    featurize->add_option("--ledger", featurize_args.ledger, "Ledger JSONL")->required();
    featurize->add_option("--labels", featurize_args.labels, "Labels CSV")->required();
    featurize->add_option("--out", featurize_args.out, "Output dataset CSV")->required();
    featurize->add_option("--window", featurize_args.window, "Gaps per example")
        ->check(CLI::PositiveNumber);
    featurize->add_flag("--no-log", featurize_args.no_log, "Skip the ln(1+x) transform");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train the decision-tree attacker");
    train_cmd->add_option("--dataset", train_args.dataset, "Training dataset CSV")->required();
    train_cmd->add_option("--out", train_args.out, "Output tree JSON")->required();
    train_cmd->add_option("--max-depth", train_args.max_depth, "Depth cap")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--min-samples-split", train_args.min_samples_split,
                          "Minimum node size to split");

    EvaluateArgs evaluate_args;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a tree on a dataset");
    evaluate_cmd->add_option("--tree", evaluate_args.tree, "Tree JSON")->required();
    evaluate_cmd->add_option("--dataset", evaluate_args.dataset, "Dataset CSV")->required();
    evaluate_cmd->add_option("--report", evaluate_args.report, "Per-class recall CSV");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Run a full obfuscation-grid experiment");
    sweep->add_option("--spec", sweep_args.spec, "Experiment spec file")->required();
    sweep->add_option("--out", sweep_args.out, "Output directory (overrides spec out_dir)");
    sweep->add_option("--jobs", sweep_args.jobs, "Concurrent grid points")
        ->check(CLI::PositiveNumber);
    sweep->add_flag("--resume", sweep_args.resume, "Reuse complete grid points from results.csv");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Accuracy-vs-parameter table from results.csv");
    report->add_option("--results", report_args.results, "results.csv path")->required();
    report->add_option("--axis", report_args.axis, "delay|devices|packets");
    report->add_option("--out", report_args.out, "Write the table here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_args);
        }
        if (populate->parsed()) {
            return cmd_populate(populate_args);
        }
        if (obfuscate->parsed()) {
            return cmd_obfuscate(obfuscate_args);
        }
        if (featurize->parsed()) {
            return cmd_featurize(featurize_args);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train_args);
        }
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(evaluate_args);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_args);
        }
        if (report->parsed()) {
            return cmd_report(report_args);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

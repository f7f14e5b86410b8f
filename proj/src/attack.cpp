#include "ledgerprint/attack.hpp"

#include "ledgerprint/errors.hpp"
#include "ledgerprint/ledger.hpp"
#include "ledgerprint/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ledgerprint {

namespace {

constexpr double kDaySeconds = 86400.0;

double trace_end(const TraceSet& trace) {
    const double last = trace.records.empty() ? 0.0 : trace.records.back().timestamp;
    return std::max(trace.duration, last);
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    return kind == ScenarioKind::Informed ? "informed" : "blind";
}

ScenarioReport make_report(std::vector<double> accuracies,
                           std::map<std::string, double> per_class_recall) {
    if (accuracies.empty()) {
        throw DomainError("make_report: no accuracies");
    }
    ScenarioReport report;
    report.accuracies = std::move(accuracies);
    report.per_class_recall = std::move(per_class_recall);
    double sum = 0.0;
    double best = 0.0;
    for (double a : report.accuracies) {
        sum += a;
        best = std::max(best, a);
    }
    report.mean_accuracy = sum / static_cast<double>(report.accuracies.size());
    report.max_accuracy = best;
    double sq = 0.0;
    for (double a : report.accuracies) {
        const double d = a - report.mean_accuracy;
        sq += d * d;
    }
    report.variance = sq / static_cast<double>(report.accuracies.size());
    return report;
}

ScenarioReport merge_reports(const std::vector<ScenarioReport>& reports) {
    if (reports.empty()) {
        throw DomainError("merge_reports: no reports");
    }
    std::vector<double> accuracies;
    std::map<std::string, double> recall_sum;
    std::map<std::string, size_t> recall_n;
    for (const ScenarioReport& r : reports) {
        accuracies.insert(accuracies.end(), r.accuracies.begin(), r.accuracies.end());
        for (const auto& [label, recall] : r.per_class_recall) {
            recall_sum[label] += recall;
            ++recall_n[label];
        }
    }
    std::map<std::string, double> recall;
    for (const auto& [label, sum] : recall_sum) {
        recall[label] = sum / static_cast<double>(recall_n[label]);
    }
    return make_report(std::move(accuracies), std::move(recall));
}

ScenarioReport run_informed(const LabeledDataset& dataset,
                            int folds,
                            const TrainConfig& train_config,
                            uint64_t seed) {
    if (dataset.examples.empty()) {
        throw DomainError("run_informed: empty dataset");
    }
    const auto splits = split_kfold(dataset, folds, seed);

    std::vector<double> accuracies;
    std::map<std::string, size_t> hit, support;
    for (const auto& [train_set, test_set] : splits) {
        const DecisionTree tree = train(train_set, train_config);
        const ClassificationReport rep = evaluate(tree, test_set);
        accuracies.push_back(rep.accuracy);
        for (const auto& [truth, row] : rep.confusion) {
            for (const auto& [predicted, count] : row) {
                support[truth] += count;
                if (predicted == truth) {
                    hit[truth] += count;
                }
            }
        }
    }
    std::map<std::string, double> recall;
    for (const auto& [label, n] : support) {
        recall[label] = static_cast<double>(hit[label]) / static_cast<double>(n);
    }
    return make_report(std::move(accuracies), std::move(recall));
}

ScenarioReport run_blind(const LabeledDataset& lab_dataset,
                         const LabeledDataset& home_dataset,
                         const TrainConfig& train_config) {
    if (lab_dataset.examples.empty()) {
        throw DomainError("run_blind: empty training (lab) dataset");
    }
    if (home_dataset.examples.empty()) {
        throw DomainError("run_blind: empty test (home) dataset");
    }
    const DecisionTree tree = train(lab_dataset, train_config);
    const ClassificationReport rep = evaluate(tree, home_dataset);
    return make_report({rep.accuracy}, rep.per_class_recall);
}

LabeledDataset pipeline_dataset(const TraceSet& trace, const PipelineOptions& options) {
    const TraceSet balanced = balance_trace(trace, options.balance_cap,
                                            options.balance_run_length,
                                            derive_seed(options.obfuscation.seed, "pipe-balance"));
    const auto devices = device_ids(balanced);
    if (devices.empty()) {
        throw DataError("pipeline_dataset: trace has no records");
    }
    const ObfuscationResult obf = apply_obfuscation(options.obfuscation, balanced, devices);
    const auto chains = populate(obf.trace, obf.assignment, options.key_seed);
    return extract(chains, labels_from_chains(chains), options.features);
}

std::vector<ScenarioReport> run_daily(const TraceSet& trace,
                                      const AttackScenario& scenario,
                                      const PipelineOptions& options,
                                      int days) {
    if (days < 1) {
        throw ConfigError("run_daily: days must be >= 1");
    }
    if (trace_end(trace) < static_cast<double>(days) * kDaySeconds) {
        throw ConfigError("run_daily: trace shorter than " + std::to_string(days) + " day(s)");
    }
    if (scenario.kind == ScenarioKind::Blind && scenario.trained_types.empty()) {
        throw ConfigError("run_daily: blind scenario without trained_types");
    }

    std::vector<ScenarioReport> reports;
    for (int day = 0; day < days; ++day) {
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
        if (window.records.empty()) {
            throw DataError("run_daily: day " + std::to_string(day) + " has no records");
        }

        PipelineOptions day_options = options;
        day_options.obfuscation.seed =
            derive_seed(options.obfuscation.seed, "day", static_cast<uint64_t>(day));
        day_options.key_seed = derive_seed(options.key_seed, "day-keys", static_cast<uint64_t>(day));
        const LabeledDataset home = pipeline_dataset(window, day_options);

        if (scenario.kind == ScenarioKind::Informed) {
            reports.push_back(run_informed(home, scenario.folds, options.train,
                                           derive_seed(scenario.seed, "day-cv",
                                                       static_cast<uint64_t>(day))));
        } else {
            const std::vector<std::string> lab_types(scenario.trained_types.begin(),
                                                     scenario.trained_types.end());
            const auto profiles = select_profiles(lab_types);
            std::map<std::string, int> counts;
            for (const auto& type : lab_types) {
                counts[type] = 1;
            }
            const TraceSet lab_trace =
                synth_trace(profiles, counts, options.lab_duration,
                            derive_seed(scenario.seed, "day-lab", static_cast<uint64_t>(day)));
            PipelineOptions lab_options = day_options;
            lab_options.obfuscation.seed =
                derive_seed(options.obfuscation.seed, "day-lab-obf", static_cast<uint64_t>(day));
            lab_options.key_seed =
                derive_seed(options.key_seed, "day-lab-keys", static_cast<uint64_t>(day));
            const LabeledDataset lab = pipeline_dataset(lab_trace, lab_options);
            reports.push_back(run_blind(lab, home, options.train));
        }
    }
    return reports;
}

}  // namespace ledgerprint

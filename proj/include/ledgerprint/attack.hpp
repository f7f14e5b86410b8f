#pragma once

#include "ledgerprint/classifier.hpp"
#include "ledgerprint/features.hpp"
#include "ledgerprint/obfuscate.hpp"
#include "ledgerprint/trace.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ledgerprint {

enum class ScenarioKind { Informed, Blind };

std::string to_string(ScenarioKind kind);

/// Threat-model parameters. Informed attackers train on the target's own
/// device inventory via cross validation; blind attackers train on a lab
/// inventory (`trained_types`) that may overlap the home arbitrarily.
struct AttackScenario {
    ScenarioKind kind = ScenarioKind::Informed;
    std::set<std::string> trained_types;  ///< blind only; must be non-empty
    int folds = 10;                       ///< informed only
    uint64_t seed = 0;
};

/// Aggregated accuracy over folds (informed) or trials (blind).
struct ScenarioReport {
    std::vector<double> accuracies;
    double mean_accuracy = 0.0;
    double max_accuracy = 0.0;
    double variance = 0.0;  ///< population variance over `accuracies`
    std::map<std::string, double> per_class_recall;
};

/// Builds the aggregate statistics from per-fold/per-trial accuracies.
ScenarioReport make_report(std::vector<double> accuracies,
                           std::map<std::string, double> per_class_recall = {});

/// Merges several single-trial reports into one (per-class recall averaged
/// over the trials in which the class appears).
ScenarioReport merge_reports(const std::vector<ScenarioReport>& reports);

/// Informed attacker: stratified k-fold cross validation, one tree per fold.
ScenarioReport run_informed(const LabeledDataset& dataset,
                            int folds,
                            const TrainConfig& train_config,
                            uint64_t seed);

/// Blind attacker: train once on lab data, evaluate on the target home.
/// Predictions are structurally restricted to the lab vocabulary, so
/// transactions of untrained device types count against accuracy.
ScenarioReport run_blind(const LabeledDataset& lab_dataset,
                         const LabeledDataset& home_dataset,
                         const TrainConfig& train_config);

/// Plumbing shared by the daily runner and the sweep harness.
struct PipelineOptions {
    ObfuscationConfig obfuscation;
    FeatureConfig features;
    TrainConfig train;
    uint64_t key_seed = 0;
    double lab_duration = 86400.0;    ///< blind lab trace length, seconds
    size_t balance_cap = 2000;        ///< per-device record cap (0 = off)
    size_t balance_run_length = 32;
};

/// Obfuscates, populates and featurizes one trace end to end.
LabeledDataset pipeline_dataset(const TraceSet& trace, const PipelineOptions& options);

/// Runs the scenario independently on each 86400-second day window of the
/// trace. Requires trace duration >= days * 86400.
std::vector<ScenarioReport> run_daily(const TraceSet& trace,
                                      const AttackScenario& scenario,
                                      const PipelineOptions& options,
                                      int days);

}  // namespace ledgerprint

#pragma once

#include "ledgerprint/ledger.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ledgerprint {

/// Gap-window featurization parameters.
struct FeatureConfig {
    int window = 5;          ///< preceding inter-transaction gaps per example
    bool log_scale = true;   ///< x -> ln(1 + x)
    double pad_value = 0.0;  ///< fills slots before the first gaps (post-transform space)
};

/// One training/evaluation example: the last `window` inter-transaction gaps
/// of the ledger stream ending at this transaction (most recent gap last).
struct FeatureVector {
    std::vector<double> values;
    std::string label;      ///< ground-truth device type
    std::string ledger_id;  ///< provenance
    std::string t_id;       ///< provenance
};

struct LabeledDataset {
    std::vector<FeatureVector> examples;
    std::vector<std::string> label_vocabulary;  ///< sorted unique labels
};

/// Rebuilds the vocabulary as the sorted unique labels of `examples`.
LabeledDataset dataset_from_examples(std::vector<FeatureVector> examples);

/// Extracts one example per transaction. Gaps are taken over each ledger's
/// full interleaved stream (the attacker cannot segregate devices within a
/// ledger). Throws DataError when a transaction has no label.
LabeledDataset extract(const std::vector<LedgerChain>& chains,
                       const std::map<std::string, std::string>& labels,
                       const FeatureConfig& config);

/// Stratified-by-label k-fold split; every example lands in exactly one test
/// fold, per-fold label counts within one example of proportionality.
/// Deterministic per seed.
std::vector<std::pair<LabeledDataset, LabeledDataset>> split_kfold(const LabeledDataset& dataset,
                                                                   int k,
                                                                   uint64_t seed);

/// Dataset CSV: header f1..fw,label,ledger_id,t_id. Feature values render
/// with shortest-round-trip precision, so parse(serialize(ds)) is lossless.
std::string serialize_dataset(const LabeledDataset& dataset);
LabeledDataset parse_dataset(std::string_view csv_text);

}  // namespace ledgerprint

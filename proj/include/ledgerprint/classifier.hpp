#pragma once

#include "ledgerprint/features.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ledgerprint {

struct TrainConfig {
    int max_depth = 20;
    int min_samples_split = 2;
    uint64_t seed = 0;  ///< reserved; CART growth itself is deterministic
};

/// Array-backed CART node. Internal nodes carry (feature, threshold, children);
/// leaves carry the training label distribution. `left < 0` marks a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<uint32_t> counts;  ///< per-label training counts (leaves)

    bool is_leaf() const { return left < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;       ///< root at index 0
    int n_features = 0;
    std::vector<std::string> labels;   ///< vocabulary; leaf counts index into it
};

/// Gini impurity 1 - sum p_c^2 of a non-empty label multiset.
double gini(const std::vector<std::string>& labels);

struct SplitCandidate {
    int feature = 0;
    double threshold = 0.0;
};

/// Exhaustive CART split search over midpoints between consecutive distinct
/// sorted values per feature; minimizes weighted child Gini. Ties break to
/// the lowest feature index, then the lowest threshold. Returns nullopt when
/// no split reduces impurity.
std::optional<SplitCandidate> best_split(const LabeledDataset& dataset);

/// Recursive CART growth; stops on max_depth, min_samples_split, purity, or
/// exhausted splits. Deterministic given dataset order and config.
DecisionTree train(const LabeledDataset& dataset, const TrainConfig& config);

/// Routes a vector to its leaf; returns the majority label, ties broken by
/// the lowest label index in vocabulary order. Throws DomainError on a width
/// mismatch.
std::string predict(const DecisionTree& tree, const std::vector<double>& values);

struct ClassificationReport {
    double accuracy = 0.0;
    size_t total = 0;
    /// confusion[true_label][predicted_label] = count
    std::map<std::string, std::map<std::string, size_t>> confusion;
    std::map<std::string, double> per_class_recall;
};

ClassificationReport evaluate(const DecisionTree& tree, const LabeledDataset& dataset);

/// JSON serialization of the node array, for inspection and fixtures.
std::string tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(std::string_view json_text);

}  // namespace ledgerprint

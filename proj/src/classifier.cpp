#include "ledgerprint/classifier.hpp"

#include "ledgerprint/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace ledgerprint {

namespace {

struct TrainingData {
    const LabeledDataset* dataset = nullptr;
    std::vector<int> label_index;  // per example
    size_t n_features = 0;
    size_t n_labels = 0;
};

TrainingData prepare(const LabeledDataset& dataset) {
    if (dataset.examples.empty()) {
        throw DomainError("train: empty dataset");
    }
    TrainingData data;
    data.dataset = &dataset;
    data.n_features = dataset.examples.front().values.size();
    if (data.n_features == 0) {
        throw DomainError("train: examples have no features");
    }
    data.n_labels = dataset.label_vocabulary.size();
    data.label_index.reserve(dataset.examples.size());
    for (const FeatureVector& ex : dataset.examples) {
        if (ex.values.size() != data.n_features) {
            throw DomainError("train: inconsistent feature widths");
        }
        const auto it = std::lower_bound(dataset.label_vocabulary.begin(),
                                         dataset.label_vocabulary.end(), ex.label);
        if (it == dataset.label_vocabulary.end() || *it != ex.label) {
            throw DomainError("train: label '" + ex.label + "' missing from vocabulary");
        }
        data.label_index.push_back(
            static_cast<int>(it - dataset.label_vocabulary.begin()));
    }
    return data;
}

struct InternalSplit {
    int feature = -1;
    double threshold = 0.0;
};

/// Split search over examples[indices[begin..end)]. `counts` are the node's
/// label counts. Returns nullopt when nothing beats the parent impurity.
///
/// Minimizing the weighted child Gini is equivalent to maximizing
/// Q = ssl/nl + ssr/nr, where ssl/ssr are the sums of squared child label
/// counts. Those are integers, so candidates are compared as exact rationals
/// (128-bit cross products); ties then deterministically keep the lowest
/// feature index and threshold, and "reduces impurity" is exact too.
std::optional<InternalSplit> search_split(const TrainingData& data,
                                          const std::vector<uint32_t>& indices,
                                          size_t begin,
                                          size_t end,
                                          const std::vector<uint32_t>& counts) {
    const size_t n = end - begin;
    if (n < 2) {
        return std::nullopt;
    }
    uint64_t parent_sumsq = 0;
    for (uint32_t c : counts) {
        parent_sumsq += static_cast<uint64_t>(c) * c;
    }
    if (parent_sumsq == static_cast<uint64_t>(n) * n) {
        return std::nullopt;  // pure node
    }

    const auto& examples = data.dataset->examples;
    std::vector<uint32_t> order(indices.begin() + static_cast<long>(begin),
                                indices.begin() + static_cast<long>(end));
    std::vector<uint32_t> left_counts(data.n_labels);
    std::vector<uint32_t> right_counts(data.n_labels);

    // Baseline: the parent itself, Q0 = parent_sumsq / n.
    uint64_t best_num = parent_sumsq;
    uint64_t best_den = n;
    InternalSplit best;
    bool found = false;

    for (size_t f = 0; f < data.n_features; ++f) {
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            const double va = examples[a].values[f];
            const double vb = examples[b].values[f];
            if (va != vb) {
                return va < vb;
            }
            return a < b;
        });

        std::fill(left_counts.begin(), left_counts.end(), 0u);
        std::copy(counts.begin(), counts.end(), right_counts.begin());
        uint64_t sumsq_left = 0;
        uint64_t sumsq_right = parent_sumsq;

        for (size_t i = 1; i < n; ++i) {
            const int moved = data.label_index[order[i - 1]];
            sumsq_left += 2ull * left_counts[moved] + 1;
            sumsq_right -= 2ull * right_counts[moved] - 1;
            ++left_counts[moved];
            --right_counts[moved];

            const double prev = examples[order[i - 1]].values[f];
            const double cur = examples[order[i]].values[f];
            if (!(cur > prev)) {
                continue;
            }

            const uint64_t nl = i;
            const uint64_t nr = n - i;
            // Q = (ssl * nr + ssr * nl) / (nl * nr), compared exactly.
            const uint64_t num = sumsq_left * nr + sumsq_right * nl;
            const uint64_t den = nl * nr;
            const bool better = static_cast<unsigned __int128>(num) * best_den >
                                static_cast<unsigned __int128>(best_num) * den;
            if (better) {
                double threshold = (prev + cur) / 2.0;
                if (!(threshold > prev)) {
                    threshold = cur;
                }
                best.feature = static_cast<int>(f);
                best.threshold = threshold;
                best_num = num;
                best_den = den;
                found = true;
            }
        }
    }
    if (!found) {
        return std::nullopt;
    }
    return best;
}

int build_node(const TrainingData& data,
               std::vector<uint32_t>& indices,
               size_t begin,
               size_t end,
               int depth,
               const TrainConfig& config,
               std::vector<TreeNode>& nodes) {
    const size_t n = end - begin;
    std::vector<uint32_t> counts(data.n_labels, 0u);
    for (size_t i = begin; i < end; ++i) {
        ++counts[data.label_index[indices[i]]];
    }
    const bool pure = std::count_if(counts.begin(), counts.end(),
                                    [](uint32_t c) { return c > 0; }) <= 1;

    const int node_index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (pure || depth >= config.max_depth || n < static_cast<size_t>(config.min_samples_split)) {
        nodes[node_index].counts = std::move(counts);
        return node_index;
    }

    const auto split = search_split(data, indices, begin, end, counts);
    if (!split) {
        nodes[node_index].counts = std::move(counts);
        return node_index;
    }

    const auto& examples = data.dataset->examples;
    const auto mid_it = std::stable_partition(
        indices.begin() + static_cast<long>(begin), indices.begin() + static_cast<long>(end),
        [&](uint32_t idx) { return examples[idx].values[split->feature] < split->threshold; });
    const size_t mid = static_cast<size_t>(mid_it - indices.begin());

    nodes[node_index].feature = split->feature;
    nodes[node_index].threshold = split->threshold;
    const int left = build_node(data, indices, begin, mid, depth + 1, config, nodes);
    const int right = build_node(data, indices, mid, end, depth + 1, config, nodes);
    nodes[node_index].left = left;
    nodes[node_index].right = right;
    return node_index;
}

}  // namespace

double gini(const std::vector<std::string>& labels) {
    if (labels.empty()) {
        throw DomainError("gini: empty label multiset");
    }
    std::map<std::string, size_t> counts;
    for (const auto& label : labels) {
        ++counts[label];
    }
    double sumsq = 0.0;
    for (const auto& [label, count] : counts) {
        const double p = static_cast<double>(count) / static_cast<double>(labels.size());
        sumsq += p * p;
    }
    return 1.0 - sumsq;
}

std::optional<SplitCandidate> best_split(const LabeledDataset& dataset) {
    if (dataset.examples.size() < 2) {
        throw DomainError("best_split: need at least 2 examples");
    }
    const TrainingData data = prepare(dataset);
    std::vector<uint32_t> indices(dataset.examples.size());
    for (size_t i = 0; i < indices.size(); ++i) {
        indices[i] = static_cast<uint32_t>(i);
    }
    std::vector<uint32_t> counts(data.n_labels, 0u);
    for (int li : data.label_index) {
        ++counts[li];
    }
    const auto split = search_split(data, indices, 0, indices.size(), counts);
    if (!split) {
        return std::nullopt;
    }
    return SplitCandidate{split->feature, split->threshold};
}

DecisionTree train(const LabeledDataset& dataset, const TrainConfig& config) {
    if (config.max_depth < 1) {
        throw ConfigError("train: max_depth must be >= 1");
    }
    if (config.min_samples_split < 2) {
        throw ConfigError("train: min_samples_split must be >= 2");
    }
    const TrainingData data = prepare(dataset);

    DecisionTree tree;
    tree.n_features = static_cast<int>(data.n_features);
    tree.labels = dataset.label_vocabulary;

    std::vector<uint32_t> indices(dataset.examples.size());
    for (size_t i = 0; i < indices.size(); ++i) {
        indices[i] = static_cast<uint32_t>(i);
    }
    build_node(data, indices, 0, indices.size(), 0, config, tree.nodes);
    return tree;
}

std::string predict(const DecisionTree& tree, const std::vector<double>& values) {
    if (tree.nodes.empty()) {
        throw DomainError("predict: empty tree");
    }
    if (values.size() != static_cast<size_t>(tree.n_features)) {
        throw DomainError("predict: expected " + std::to_string(tree.n_features) +
                          " features, got " + std::to_string(values.size()));
    }
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf()) {
        node = values[node->feature] < node->threshold ? &tree.nodes[node->left]
                                                       : &tree.nodes[node->right];
    }
    size_t arg = 0;
    for (size_t i = 1; i < node->counts.size(); ++i) {
        if (node->counts[i] > node->counts[arg]) {
            arg = i;
        }
    }
    return tree.labels.at(arg);
}

ClassificationReport evaluate(const DecisionTree& tree, const LabeledDataset& dataset) {
    if (dataset.examples.empty()) {
        throw DomainError("evaluate: empty dataset");
    }
    ClassificationReport report;
    report.total = dataset.examples.size();
    size_t correct = 0;
    for (const FeatureVector& ex : dataset.examples) {
        const std::string predicted = predict(tree, ex.values);
        ++report.confusion[ex.label][predicted];
        if (predicted == ex.label) {
            ++correct;
        }
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(report.total);
    for (const auto& [truth, row] : report.confusion) {
        size_t support = 0;
        size_t hit = 0;
        for (const auto& [predicted, count] : row) {
            support += count;
            if (predicted == truth) {
                hit += count;
            }
        }
        report.per_class_recall[truth] =
            static_cast<double>(hit) / static_cast<double>(support);
    }
    return report;
}

std::string tree_to_json(const DecisionTree& tree) {
    nlohmann::ordered_json j;
    j["n_features"] = tree.n_features;
    j["labels"] = tree.labels;
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (const TreeNode& node : tree.nodes) {
        nlohmann::ordered_json nj;
        if (node.is_leaf()) {
            nj["counts"] = node.counts;
        } else {
            nj["feature"] = node.feature;
            nj["threshold"] = node.threshold;
            nj["left"] = node.left;
            nj["right"] = node.right;
        }
        nodes.push_back(std::move(nj));
    }
    return j.dump();
}

DecisionTree tree_from_json(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tree JSON: ") + e.what());
    }
    DecisionTree tree;
    try {
        tree.n_features = j.at("n_features").get<int>();
        tree.labels = j.at("labels").get<std::vector<std::string>>();
        for (const auto& nj : j.at("nodes")) {
            TreeNode node;
            if (nj.contains("counts")) {
                node.counts = nj.at("counts").get<std::vector<uint32_t>>();
                if (node.counts.size() != tree.labels.size()) {
                    throw ParseError("tree JSON: leaf counts width mismatch");
                }
            } else {
                node.feature = nj.at("feature").get<int>();
                node.threshold = nj.at("threshold").get<double>();
                node.left = nj.at("left").get<int>();
                node.right = nj.at("right").get<int>();
            }
            tree.nodes.push_back(std::move(node));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tree JSON: ") + e.what());
    }
    if (tree.nodes.empty()) {
        throw ParseError("tree JSON: no nodes");
    }
    for (const TreeNode& node : tree.nodes) {
        if (!node.is_leaf()) {
            const auto valid = [&](int idx) {
                return idx >= 0 && static_cast<size_t>(idx) < tree.nodes.size();
            };
            if (!valid(node.left) || !valid(node.right) || node.feature < 0 ||
                node.feature >= tree.n_features) {
                throw ParseError("tree JSON: invalid node references");
            }
        }
    }
    return tree;
}

}  // namespace ledgerprint

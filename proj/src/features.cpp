#include "ledgerprint/features.hpp"

#include "ledgerprint/errors.hpp"
#include "ledgerprint/rng.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace ledgerprint {

namespace {

std::string shortest_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::vector<std::string> sorted_labels(const std::vector<FeatureVector>& examples) {
    std::set<std::string> labels;
    for (const auto& ex : examples) {
        labels.insert(ex.label);
    }
    return {labels.begin(), labels.end()};
}

}  // namespace

LabeledDataset dataset_from_examples(std::vector<FeatureVector> examples) {
    LabeledDataset ds;
    ds.label_vocabulary = sorted_labels(examples);
    ds.examples = std::move(examples);
    return ds;
}

LabeledDataset extract(const std::vector<LedgerChain>& chains,
                       const std::map<std::string, std::string>& labels,
                       const FeatureConfig& config) {
    if (config.window < 1) {
        throw ConfigError("extract: window must be >= 1");
    }
    const size_t w = static_cast<size_t>(config.window);

    LabeledDataset ds;
    for (const LedgerChain& chain : chains) {
        const auto& txs = chain.transactions;
        std::vector<double> gaps;  // gaps[i] ends at transaction i+1
        gaps.reserve(txs.size());
        for (size_t i = 1; i < txs.size(); ++i) {
            double gap = txs[i].timestamp - txs[i - 1].timestamp;
            if (config.log_scale) {
                gap = std::log1p(gap);
            }
            gaps.push_back(gap);
        }
        for (size_t i = 0; i < txs.size(); ++i) {
            const auto label_it = labels.find(txs[i].t_id);
            if (label_it == labels.end()) {
                throw DataError("extract: no label for transaction " + txs[i].t_id);
            }
            FeatureVector fv;
            fv.values.resize(w, config.pad_value);
            // Most recent gap (ending at i) goes last.
            for (size_t j = 0; j < w && j < i; ++j) {
                fv.values[w - 1 - j] = gaps[i - 1 - j];
            }
            fv.label = label_it->second;
            fv.ledger_id = chain.ledger_id;
            fv.t_id = txs[i].t_id;
            ds.examples.push_back(std::move(fv));
        }
    }
    ds.label_vocabulary = sorted_labels(ds.examples);
    return ds;
}

std::vector<std::pair<LabeledDataset, LabeledDataset>> split_kfold(const LabeledDataset& dataset,
                                                                   int k,
                                                                   uint64_t seed) {
    if (k < 2) {
        throw ConfigError("split_kfold: k must be >= 2");
    }
    const size_t n = dataset.examples.size();
    if (static_cast<size_t>(k) > n) {
        throw ConfigError("split_kfold: k exceeds dataset size");
    }

    std::map<std::string, std::vector<size_t>> by_label;
    for (size_t i = 0; i < n; ++i) {
        by_label[dataset.examples[i].label].push_back(i);
    }

    Rng rng(derive_seed(seed, "kfold"));
    std::vector<int> fold_of(n, 0);
    size_t offset = 0;
    for (auto& [label, indices] : by_label) {
        rng.shuffle(indices);
        for (size_t j = 0; j < indices.size(); ++j) {
            fold_of[indices[j]] = static_cast<int>((offset + j) % static_cast<size_t>(k));
        }
        offset = (offset + indices.size()) % static_cast<size_t>(k);
    }

    std::vector<std::pair<LabeledDataset, LabeledDataset>> folds;
    folds.reserve(static_cast<size_t>(k));
    for (int f = 0; f < k; ++f) {
        LabeledDataset train, test;
        train.label_vocabulary = dataset.label_vocabulary;
        test.label_vocabulary = dataset.label_vocabulary;
        for (size_t i = 0; i < n; ++i) {
            (fold_of[i] == f ? test : train).examples.push_back(dataset.examples[i]);
        }
        folds.emplace_back(std::move(train), std::move(test));
    }
    return folds;
}

std::string serialize_dataset(const LabeledDataset& dataset) {
    const size_t w = dataset.examples.empty() ? 0 : dataset.examples.front().values.size();
    std::string out;
    for (size_t i = 1; i <= std::max<size_t>(w, 1); ++i) {
        if (i > 1) {
            out.push_back(',');
        }
        out += "f" + std::to_string(i);
    }
    out += ",label,ledger_id,t_id\n";
    for (const FeatureVector& ex : dataset.examples) {
        if (ex.values.size() != std::max<size_t>(w, 1)) {
            throw DataError("serialize_dataset: inconsistent feature widths");
        }
        for (size_t i = 0; i < ex.values.size(); ++i) {
            if (i > 0) {
                out.push_back(',');
            }
            out += shortest_double(ex.values[i]);
        }
        out.push_back(',');
        out += ex.label;
        out.push_back(',');
        out += ex.ledger_id;
        out.push_back(',');
        out += ex.t_id;
        out.push_back('\n');
    }
    return out;
}

LabeledDataset parse_dataset(std::string_view csv_text) {
    std::vector<FeatureVector> examples;
    size_t width = 0;
    bool saw_header = false;
    detail::for_each_line(csv_text, [&](size_t line_no, std::string_view line) {
        if (line.empty()) {
            return;
        }
        const auto fields = detail::split(line, ',');
        if (!saw_header) {
            if (fields.size() < 4 || fields[0] != "f1" ||
                fields[fields.size() - 3] != "label" || fields[fields.size() - 2] != "ledger_id" ||
                fields.back() != "t_id") {
                throw ParseError("line 1: expected dataset header f1..fw,label,ledger_id,t_id");
            }
            width = fields.size() - 3;
            saw_header = true;
            return;
        }
        if (fields.size() != width + 3) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(width + 3) + " columns");
        }
        FeatureVector fv;
        fv.values.reserve(width);
        for (size_t i = 0; i < width; ++i) {
            const auto value = detail::parse_double(fields[i]);
            if (!value) {
                throw ParseError("line " + std::to_string(line_no) + ": bad feature value '" +
                                 std::string(fields[i]) + "'");
            }
            fv.values.push_back(*value);
        }
        fv.label = std::string(fields[width]);
        fv.ledger_id = std::string(fields[width + 1]);
        fv.t_id = std::string(fields[width + 2]);
        if (fv.label.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty label");
        }
        examples.push_back(std::move(fv));
    });
    if (!saw_header) {
        throw ParseError("line 1: empty dataset input, header missing");
    }
    return dataset_from_examples(std::move(examples));
}

}  // namespace ledgerprint

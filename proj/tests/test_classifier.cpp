#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ledgerprint/classifier.hpp"
#include "ledgerprint/errors.hpp"
#include "ledgerprint/rng.hpp"
#include "support/brute_force_split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace ledgerprint;

namespace {

LabeledDataset toy(const std::vector<std::pair<std::vector<double>, std::string>>& rows) {
    std::vector<FeatureVector> examples;
    for (const auto& [values, label] : rows) {
        FeatureVector fv;
        fv.values = values;
        fv.label = label;
        examples.push_back(std::move(fv));
    }
    return dataset_from_examples(std::move(examples));
}

LabeledDataset random_dataset(Rng& rng, size_t max_examples, size_t max_features) {
    const size_t n = 2 + rng.below(max_examples - 1);
    const size_t f = 1 + rng.below(max_features);
    const size_t classes = 2 + rng.below(3);
    const bool discrete = rng.below(2) == 0;
    std::vector<FeatureVector> examples;
    for (size_t i = 0; i < n; ++i) {
        FeatureVector fv;
        for (size_t j = 0; j < f; ++j) {
            fv.values.push_back(discrete ? static_cast<double>(rng.below(4))
                                         : rng.uniform(0.0, 10.0));
        }
        fv.label = "c" + std::to_string(rng.below(classes));
        examples.push_back(std::move(fv));
    }
    return dataset_from_examples(std::move(examples));
}

size_t tree_depth(const DecisionTree& tree, int node = 0) {
    const TreeNode& n = tree.nodes[static_cast<size_t>(node)];
    if (n.is_leaf()) {
        return 0;
    }
    return 1 + std::max(tree_depth(tree, n.left), tree_depth(tree, n.right));
}

}  // namespace

TEST_CASE("gini impurity") {
    CHECK(gini({"A", "A", "A", "A"}) == doctest::Approx(0.0));
    CHECK(gini({"A", "A", "B", "B"}) == doctest::Approx(0.5));
    CHECK(gini({"A", "A", "A", "B"}) == doctest::Approx(0.375));
    CHECK_THROWS_AS(gini({}), DomainError);

    // Bounds: 0 <= g <= 1 - 1/c, zero iff pure.
    Rng rng(10);
    for (int round = 0; round < 50; ++round) {
        const size_t c = 1 + rng.below(6);
        std::vector<std::string> labels;
        std::set<std::string> distinct;
        const size_t n = 1 + rng.below(30);
        for (size_t i = 0; i < n; ++i) {
            labels.push_back("c" + std::to_string(rng.below(c)));
            distinct.insert(labels.back());
        }
        const double g = gini(labels);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0 - 1.0 / static_cast<double>(distinct.size()) + 1e-12);
        if (distinct.size() == 1) {
            CHECK(g == doctest::Approx(0.0));
        } else {
            CHECK(g > 0.0);
        }
    }
}

TEST_CASE("best_split finds the midpoint between separable values") {
    const auto ds = toy({{{0.2}, "A"}, {{58.0}, "B"}});
    const auto split = best_split(ds);
    REQUIRE(split.has_value());
    CHECK(split->feature == 0);
    CHECK(split->threshold == doctest::Approx(29.1));
}

TEST_CASE("best_split returns nothing when no split reduces impurity") {
    const auto ds = toy({{{1.0, 2.0}, "A"}, {{1.0, 2.0}, "B"}, {{1.0, 2.0}, "A"}});
    CHECK_FALSE(best_split(ds).has_value());
    // A pure node has nothing to improve either.
    CHECK_FALSE(best_split(toy({{{1.0}, "A"}, {{2.0}, "A"}})).has_value());
}

TEST_CASE("best_split matches the exhaustive brute-force oracle") {
    Rng rng(2024);
    size_t with_split = 0;
    for (int round = 0; round < 400; ++round) {
        const auto ds = random_dataset(rng, 50, 3);
        const auto fast = best_split(ds);
        const auto brute = testing::brute_force_best_split(ds);
        REQUIRE(fast.has_value() == brute.has_value());
        if (fast) {
            ++with_split;
            CHECK(fast->feature == brute->feature);
            CHECK(fast->threshold == brute->threshold);
        }
    }
    CHECK(with_split > 200);
}

TEST_CASE("train fits separable data perfectly") {
    Rng rng(5);
    std::vector<std::pair<std::vector<double>, std::string>> rows;
    for (int i = 0; i < 40; ++i) {
        const bool upper = i % 2 == 0;
        rows.push_back({{rng.uniform(0.0, 1.0) + (upper ? 2.0 : 0.0), rng.uniform()},
                        upper ? "hi" : "lo"});
    }
    const auto ds = toy(rows);
    const auto tree = train(ds, TrainConfig{});
    const auto report = evaluate(tree, ds);
    CHECK(report.accuracy == doctest::Approx(1.0));

    // Every training example re-predicts its own label on the unpruned tree.
    for (const auto& ex : ds.examples) {
        CHECK(predict(tree, ex.values) == ex.label);
    }
}

TEST_CASE("max_depth 1 yields a decision stump") {
    Rng rng(8);
    const auto ds = random_dataset(rng, 40, 2);
    TrainConfig config;
    config.max_depth = 1;
    const auto tree = train(ds, config);
    CHECK(tree_depth(tree) <= 1);
    CHECK(tree.nodes.size() <= 3);
}

TEST_CASE("training is deterministic") {
    Rng rng(12);
    const auto ds = random_dataset(rng, 50, 3);
    const auto a = train(ds, TrainConfig{});
    const auto b = train(ds, TrainConfig{});
    CHECK(tree_to_json(a) == tree_to_json(b));
}

TEST_CASE("train respects depth and leaf-size limits") {
    Rng rng(13);
    for (int round = 0; round < 10; ++round) {
        const auto ds = random_dataset(rng, 60, 3);
        TrainConfig config;
        config.max_depth = 1 + static_cast<int>(rng.below(6));
        config.min_samples_split = 2 + static_cast<int>(rng.below(5));
        const auto tree = train(ds, config);
        CHECK(tree_depth(tree) <= static_cast<size_t>(config.max_depth));
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) {
                size_t total = 0;
                for (uint32_t c : node.counts) {
                    total += c;
                }
                CHECK(total >= 1);
            }
        }
    }
}

TEST_CASE("train rejects bad input") {
    CHECK_THROWS_AS(train(LabeledDataset{}, TrainConfig{}), DomainError);
    const auto ds = toy({{{1.0}, "A"}});
    TrainConfig bad;
    bad.max_depth = 0;
    CHECK_THROWS_AS(train(ds, bad), ConfigError);
}

TEST_CASE("predict majority label with vocabulary-order tie break") {
    // Single leaf: counts A=3, B=3 -> A (lowest vocabulary index).
    DecisionTree tree;
    tree.n_features = 1;
    tree.labels = {"A", "B"};
    TreeNode leaf;
    leaf.counts = {3, 3};
    tree.nodes.push_back(leaf);
    CHECK(predict(tree, {0.5}) == "A");

    TreeNode pure;
    pure.counts = {0, 7};
    tree.nodes[0] = pure;
    CHECK(predict(tree, {0.5}) == "B");

    CHECK_THROWS_AS(predict(tree, {0.5, 0.5}), DomainError);
}

TEST_CASE("evaluate computes accuracy and confusion totals") {
    const auto ds = toy({{{0.0}, "A"}, {{1.0}, "A"}, {{10.0}, "B"}, {{11.0}, "B"}});
    const auto tree = train(ds, TrainConfig{});
    const auto report = evaluate(tree, ds);
    CHECK(report.accuracy == doctest::Approx(1.0));
    size_t total = 0;
    for (const auto& [truth, row] : report.confusion) {
        for (const auto& [predicted, count] : row) {
            total += count;
        }
    }
    CHECK(total == ds.examples.size());
    CHECK(report.per_class_recall.at("A") == doctest::Approx(1.0));

    // Constant predictor on balanced c-class data scores 1/c.
    DecisionTree constant;
    constant.n_features = 1;
    constant.labels = ds.label_vocabulary;
    TreeNode leaf;
    leaf.counts = {1, 0};
    constant.nodes.push_back(leaf);
    CHECK(evaluate(constant, ds).accuracy == doctest::Approx(0.5));

    CHECK_THROWS_AS(evaluate(tree, LabeledDataset{}), DomainError);
}

TEST_CASE("permuting feature columns leaves predictions unchanged") {
    Rng rng(77);
    const auto ds = random_dataset(rng, 40, 3);
    const size_t width = ds.examples.front().values.size();
    std::vector<size_t> perm(width);
    for (size_t i = 0; i < width; ++i) {
        perm[i] = (i + 1) % width;
    }
    auto permuted = ds;
    for (auto& ex : permuted.examples) {
        std::vector<double> values(width);
        for (size_t i = 0; i < width; ++i) {
            values[perm[i]] = ex.values[i];
        }
        ex.values = std::move(values);
    }
    const auto tree_a = train(ds, TrainConfig{});
    const auto tree_b = train(permuted, TrainConfig{});
    for (size_t i = 0; i < ds.examples.size(); ++i) {
        CHECK(predict(tree_a, ds.examples[i].values) ==
              predict(tree_b, permuted.examples[i].values));
    }
}

TEST_CASE("tree JSON round-trips and validates") {
    Rng rng(31);
    const auto ds = random_dataset(rng, 50, 3);
    const auto tree = train(ds, TrainConfig{});
    const auto back = tree_from_json(tree_to_json(tree));
    CHECK(tree_to_json(back) == tree_to_json(tree));
    for (const auto& ex : ds.examples) {
        CHECK(predict(back, ex.values) == predict(tree, ex.values));
    }
    CHECK_THROWS_AS(tree_from_json("{"), ParseError);
    CHECK_THROWS_AS(tree_from_json(R"({"n_features":1,"labels":["a"],"nodes":[]})"), ParseError);
    CHECK_THROWS_AS(
        tree_from_json(
            R"({"n_features":1,"labels":["a"],"nodes":[{"feature":0,"threshold":1,"left":5,"right":6}]})"),
        ParseError);
}

TEST_CASE("accepted splits never increase weighted impurity") {
    Rng rng(55);
    for (int round = 0; round < 30; ++round) {
        const auto ds = random_dataset(rng, 40, 2);
        const auto split = best_split(ds);
        if (!split) {
            continue;
        }
        std::vector<std::string> all, left, right;
        for (const auto& ex : ds.examples) {
            all.push_back(ex.label);
            (ex.values[static_cast<size_t>(split->feature)] < split->threshold ? left : right)
                .push_back(ex.label);
        }
        REQUIRE_FALSE(left.empty());
        REQUIRE_FALSE(right.empty());
        const double parent = gini(all);
        const double weighted = (static_cast<double>(left.size()) * gini(left) +
                                 static_cast<double>(right.size()) * gini(right)) /
                                static_cast<double>(all.size());
        CHECK(weighted < parent);
    }
}

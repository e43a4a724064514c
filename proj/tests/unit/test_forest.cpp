#include <doctest.h>

#include <cmath>
#include <set>

#include "sgrf/dataset.hpp"
#include "sgrf/errors.hpp"
#include "sgrf/forest.hpp"
#include "sgrf/rng.hpp"

#include "../support/builders.hpp"
#include "../support/oracles.hpp"

using namespace sgrf;

namespace {

RandomForest stump_forest(const std::vector<int>& leaf_labels, int n_classes = 2) {
    RandomForest rf;
    rf.config.n_trees = static_cast<int>(leaf_labels.size());
    rf.n_features = 1;
    rf.n_classes = n_classes;
    rf.label_names.resize(n_classes, "c");
    for (int label : leaf_labels) {
        Tree tree;
        TreeNode leaf;
        leaf.is_leaf = true;
        leaf.label = label;
        leaf.counts.assign(n_classes, 0);
        leaf.counts[label] = 1;
        tree.nodes.push_back(leaf);
        rf.trees.push_back(tree);
    }
    return rf;
}

bool same_tree(const Tree& tree, int idx, const oracles::RefNode& ref) {
    const TreeNode& node = tree.nodes[idx];
    if (node.is_leaf != ref.is_leaf) return false;
    if (node.is_leaf) return node.label == ref.label;
    return node.feature == ref.feature && node.threshold == ref.threshold &&
           same_tree(tree, node.left, *ref.left) && same_tree(tree, node.right, *ref.right);
}

Dataset random_dataset(std::size_t n, std::size_t f, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows(n, std::vector<double>(f));
    std::vector<int> labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (auto& v : rows[r]) v = rng.uniform01();
        // label loosely tied to the first two features so trees have structure
        double s = rows[r][0] + 0.5 * rows[r][f > 1 ? 1 : 0] + 0.3 * rng.uniform01();
        labels[r] = s > 0.9 ? 1 : 0;
    }
    if (std::set<int>(labels.begin(), labels.end()).size() < 2) labels[0] = 1 - labels[0];
    return builders::dataset(rows, labels);
}

}  // namespace

TEST_SUITE("forest") {

TEST_CASE("entropy of canonical count vectors") {
    CHECK(entropy({4, 4}) == 1.0);
    CHECK(entropy({8, 0}) == 0.0);
    CHECK(entropy({1, 1, 1, 1}) == 2.0);
    CHECK_THROWS_AS(entropy({0, 0}), ComputeError);
}

TEST_CASE("best_split finds the single informative midpoint") {
    Dataset ds = builders::dataset({{0.1}, {0.2}, {0.8}, {0.9}}, {0, 0, 1, 1});
    auto split = best_split(ds, {0, 1, 2, 3}, {0});
    REQUIRE(split.has_value());
    CHECK(split->feature == 0);
    CHECK(split->threshold == 0.5);
    CHECK(split->gain == 1.0);
}

TEST_CASE("best_split returns nothing on pure or constant data") {
    Dataset pure = builders::dataset({{0.1}, {0.9}}, {1, 1});
    CHECK(!best_split(pure, {0, 1}, {0}).has_value());

    Dataset constant = builders::dataset({{0.5}, {0.5}, {0.5}}, {0, 1, 0});
    CHECK(!best_split(constant, {0, 1, 2}, {0}).has_value());
}

TEST_CASE("best_split ties break toward the lower feature index") {
    // two identical features: both give the same gain
    Dataset ds = builders::dataset({{0.0, 0.0}, {1.0, 1.0}}, {0, 1});
    auto split = best_split(ds, {0, 1}, {0, 1});
    REQUIRE(split.has_value());
    CHECK(split->feature == 0);
}

TEST_CASE("grow_tree handles pure data, the 4-point dataset and depth caps") {
    ForestConfig cfg;
    cfg.features_per_node = 1;

    Dataset pure = builders::dataset({{0.1}, {0.9}}, {1, 1});
    Rng rng1(0);
    Tree leaf = grow_tree(pure, {0, 1}, cfg, rng1);
    REQUIRE(leaf.nodes.size() == 1);
    CHECK(leaf.nodes[0].is_leaf);
    CHECK(leaf.nodes[0].label == 1);

    Dataset four = builders::dataset({{0.1}, {0.2}, {0.8}, {0.9}}, {0, 0, 1, 1});
    Rng rng2(0);
    Tree tree = grow_tree(four, {0, 1, 2, 3}, cfg, rng2);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(!tree.nodes[0].is_leaf);
    CHECK(tree.nodes[0].threshold == 0.5);
    CHECK(tree.nodes[tree.nodes[0].left].label == 0);
    CHECK(tree.nodes[tree.nodes[0].right].label == 1);

    ForestConfig capped = cfg;
    capped.max_depth = 0;
    Rng rng3(0);
    Tree stump = grow_tree(four, {0, 1, 2, 3}, capped, rng3);
    REQUIRE(stump.nodes.size() == 1);
    CHECK(stump.nodes[0].is_leaf);
    CHECK(stump.nodes[0].label == 0);  // majority tie between classes goes to 0
}

TEST_CASE("fit validates inputs") {
    Dataset single = builders::dataset({{0.1}, {0.2}}, {0, 0});
    ForestConfig cfg;
    CHECK_THROWS_AS(fit(single, cfg), ComputeError);

    Dataset two = builders::dataset({{0.1}, {0.9}}, {0, 1});
    ForestConfig too_many;
    too_many.features_per_node = 5;
    CHECK_THROWS_AS(fit(two, too_many), ComputeError);

    Dataset no_features = select_columns(two, {});
    CHECK_THROWS_AS(fit(no_features, cfg), ComputeError);
}

TEST_CASE("fit is deterministic per seed and across thread counts") {
    Dataset ds = random_dataset(60, 4, 31);
    ForestConfig cfg;
    cfg.n_trees = 30;
    cfg.seed = 5;
    std::string a = forest_to_json(fit(ds, cfg, 1));
    std::string b = forest_to_json(fit(ds, cfg, 4));
    std::string c = forest_to_json(fit(ds, cfg, 8));
    CHECK(a == b);
    CHECK(a == c);
    cfg.seed = 6;
    CHECK(forest_to_json(fit(ds, cfg, 1)) != a);
}

TEST_CASE("reference CART equivalence with K=1, k=f, bootstrap off") {
    for (std::uint64_t seed : {101u, 102u, 103u}) {
        Dataset ds = random_dataset(40, 3, seed);
        ForestConfig cfg;
        cfg.n_trees = 1;
        cfg.features_per_node = 3;
        cfg.bootstrap = false;
        RandomForest rf = fit(ds, cfg);
        oracles::RefCart ref(builders::to_rows(ds), ds.y, 2, 1, -1);
        CHECK(same_tree(rf.trees[0], 0, ref.root()));
    }
}

TEST_CASE("vote arithmetic: fractions, one-hot and tie to the lower label") {
    double x = 0.0;
    RandomForest rf = stump_forest({1, 1, 1, 1, 1, 1, 1, 0, 0, 0});
    auto proba = predict_proba(rf, {&x, 1});
    CHECK(proba[0] == 0.3);
    CHECK(proba[1] == 0.7);
    CHECK(predict(rf, {&x, 1}) == 1);

    RandomForest hot = stump_forest({1, 1, 1});
    auto one_hot = predict_proba(hot, {&x, 1});
    CHECK(one_hot[0] == 0.0);
    CHECK(one_hot[1] == 1.0);

    RandomForest tie = stump_forest({0, 1});
    CHECK(predict(tie, {&x, 1}) == 0);
}

TEST_CASE("predict_proba sums to one and predict matches its argmax") {
    Dataset ds = random_dataset(80, 4, 77);
    ForestConfig cfg;
    cfg.n_trees = 37;
    cfg.seed = 3;
    RandomForest rf = fit(ds, cfg);
    for (std::size_t r = 0; r < 20; ++r) {
        std::span<const double> row(ds.x.data() + r * 4, 4);
        auto proba = predict_proba(rf, row);
        double sum = 0.0;
        for (double p : proba) sum += p;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        int argmax = proba[1] > proba[0] ? 1 : 0;
        CHECK(predict(rf, row) == argmax);
    }
    std::vector<double> bad(5, 0.0);
    CHECK_THROWS_AS(predict(rf, bad), ComputeError);
}

TEST_CASE("oob error is small on separated blobs and near half on coin flips") {
    Dataset blobs = generate_synthetic(builders::blobs(200, 200, 3, 0, 4.0, 11));
    ForestConfig cfg;
    cfg.n_trees = 100;
    cfg.seed = 2;
    OobReport good = oob_error(fit(blobs, cfg), blobs);
    CHECK(good.error <= 0.05);
    CHECK(good.coverage == 1.0);

    Rng rng(400);
    std::vector<std::vector<double>> rows(400, std::vector<double>(2));
    std::vector<int> labels(400);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rows[r][0] = rng.uniform01();
        rows[r][1] = rng.uniform01();
        labels[r] = rng.bernoulli(0.5) ? 1 : 0;
    }
    Dataset coin = builders::dataset(rows, labels);
    ForestConfig null_cfg;
    null_cfg.n_trees = 60;
    null_cfg.seed = 8;
    OobReport null_report = oob_error(fit(coin, null_cfg), coin);
    CHECK(null_report.error >= 0.4);
    CHECK(null_report.error <= 0.6);
}

TEST_CASE("single-tree coverage matches the bootstrap exclusion rate") {
    Dataset ds = random_dataset(1000, 3, 55);
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.seed = 4;
    RandomForest rf = fit(ds, cfg);
    OobReport report = oob_error(rf, ds);
    CHECK(report.coverage >= 0.318);
    CHECK(report.coverage <= 0.418);
}

TEST_CASE("per-tree bootstrap leaves out about a third of the rows") {
    Dataset ds = random_dataset(300, 3, 59);
    ForestConfig cfg;
    cfg.n_trees = 50;
    cfg.seed = 12;
    RandomForest rf = fit(ds, cfg);
    double total_fraction = 0.0;
    for (const auto& bag : rf.in_bag) {
        CHECK(bag.size() == ds.n_rows());
        std::set<std::size_t> distinct(bag.begin(), bag.end());
        total_fraction +=
            1.0 - static_cast<double>(distinct.size()) / static_cast<double>(ds.n_rows());
    }
    double mean = total_fraction / static_cast<double>(rf.in_bag.size());
    CHECK(mean >= 0.318);
    CHECK(mean <= 0.418);
}

TEST_CASE("oob requires bootstrap") {
    Dataset ds = random_dataset(30, 3, 66);
    ForestConfig cfg;
    cfg.n_trees = 3;
    cfg.bootstrap = false;
    RandomForest rf = fit(ds, cfg);
    CHECK_THROWS_AS(oob_error(rf, ds), ComputeError);
}

TEST_CASE("fully grown training accuracy dominates a depth-capped forest") {
    Dataset ds = random_dataset(120, 4, 91);
    ForestConfig full;
    full.n_trees = 25;
    full.seed = 9;
    ForestConfig capped = full;
    capped.max_depth = 2;
    RandomForest rf_full = fit(ds, full);
    RandomForest rf_capped = fit(ds, capped);

    std::set<std::size_t> in_bag_union;
    for (const auto& bag : rf_full.in_bag) in_bag_union.insert(bag.begin(), bag.end());
    auto accuracy = [&](const RandomForest& rf) {
        std::size_t correct = 0;
        for (std::size_t r : in_bag_union) {
            std::span<const double> row(ds.x.data() + r * 4, 4);
            if (predict(rf, row) == ds.y[r]) correct++;
        }
        return static_cast<double>(correct) / static_cast<double>(in_bag_union.size());
    };
    CHECK(accuracy(rf_full) >= accuracy(rf_capped));
}

TEST_CASE("permutation importance ranks the informative feature first") {
    Dataset ds = generate_synthetic(builders::blobs(100, 100, 1, 5, 3.0, 23));
    ForestConfig cfg;
    cfg.n_trees = 60;
    cfg.seed = 7;
    RandomForest rf = fit(ds, cfg);
    ImportanceReport report = variable_importance(rf, ds, 99);
    CHECK(report.rank[0] == 0);
    CHECK(report.importance[0] > 0.1);

    ImportanceReport again = variable_importance(rf, ds, 99);
    CHECK(report.importance == again.importance);
    CHECK(report.rank == again.rank);
}

TEST_CASE("a feature no tree uses scores exactly zero") {
    // second feature is constant: no split can ever use it
    Rng rng(5);
    std::vector<std::vector<double>> rows(60, std::vector<double>(2));
    std::vector<int> labels(60);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        labels[r] = r % 2 == 0 ? 0 : 1;
        rows[r][0] = labels[r] + rng.uniform01() * 0.2;
        rows[r][1] = 7.0;
    }
    Dataset ds = builders::dataset(rows, labels);
    ForestConfig cfg;
    cfg.n_trees = 20;
    cfg.seed = 3;
    RandomForest rf = fit(ds, cfg);
    ImportanceReport report = variable_importance(rf, ds, 1);
    CHECK(report.importance[1] == 0.0);
    CHECK(report.importance[0] > 0.0);
}

TEST_CASE("model json round-trip preserves predictions and bytes") {
    Dataset ds = random_dataset(50, 3, 121);
    ForestConfig cfg;
    cfg.n_trees = 12;
    cfg.seed = 10;
    RandomForest rf = fit(ds, cfg);
    std::string json_text = forest_to_json(rf);
    RandomForest loaded = forest_from_json(json_text);
    CHECK(forest_to_json(loaded) == json_text);
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        std::span<const double> row(ds.x.data() + r * 3, 3);
        CHECK(predict(loaded, row) == predict(rf, row));
        CHECK(predict_proba(loaded, row) == predict_proba(rf, row));
    }
    CHECK_THROWS_AS(forest_from_json("{}"), InputError);
    CHECK_THROWS_AS(forest_from_json("not json"), InputError);
}

}  // TEST_SUITE

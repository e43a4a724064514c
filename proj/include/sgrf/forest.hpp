#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgrf/dataset.hpp"
#include "sgrf/rng.hpp"

namespace sgrf {

struct ForestConfig {
    int n_trees = 100;
    int features_per_node = 0;  // 0 = floor(sqrt(f)), at least 1
    int min_samples_leaf = 1;
    std::optional<int> max_depth;  // unset = unlimited
    std::uint64_t seed = 0;
    bool bootstrap = true;  // test hook: off = every tree trains on all rows
};

struct TreeNode {
    bool is_leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;                     // leaf: argmax of counts, ties to lower label
    std::vector<std::int64_t> counts;   // leaf: in-bag class counts
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    const TreeNode& root() const { return nodes.front(); }
};

struct RandomForest {
    ForestConfig config;
    std::size_t n_features = 0;
    int n_classes = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> label_names;
    int positive_class = 1;  // minority class at fit time; used for score output
    std::vector<Tree> trees;
    std::vector<std::vector<std::size_t>> in_bag;  // per-tree sorted row multiset
};

// Shannon entropy in bits of a count vector. Errors on an all-zero vector.
double entropy(const std::vector<std::int64_t>& counts);

struct SplitChoice {
    std::size_t feature;
    double threshold;
    double gain;
};

// Exhausts midpoint thresholds of the candidate features and returns the
// information-gain maximizer (ties: lower feature index, then lower
// threshold), or nullopt when no split has positive gain. `rows` may contain
// duplicates; duplicated rows weigh accordingly.
std::optional<SplitChoice> best_split(const Dataset& ds, const std::vector<std::size_t>& rows,
                                      const std::vector<std::size_t>& candidate_features);

Tree grow_tree(const Dataset& ds, const std::vector<std::size_t>& in_bag_rows,
               const ForestConfig& cfg, Rng& rng);

RandomForest fit(const Dataset& ds, const ForestConfig& cfg, int threads = 1);

std::vector<double> predict_proba(const RandomForest& rf, std::span<const double> row);
int predict(const RandomForest& rf, std::span<const double> row);

struct OobReport {
    double error = 0.0;      // misclassification rate over covered rows
    double coverage = 0.0;   // covered rows / total rows
    std::size_t covered_rows = 0;
};

OobReport oob_error(const RandomForest& rf, const Dataset& ds);

struct ImportanceReport {
    std::vector<double> importance;  // mean per-tree OOB accuracy drop
    std::vector<int> rank;           // 0 = most important; ties to lower index
};

ImportanceReport variable_importance(const RandomForest& rf, const Dataset& ds,
                                     std::uint64_t seed);

std::string forest_to_json(const RandomForest& rf, bool include_in_bag = true);
RandomForest forest_from_json(const std::string& json_text);

}  // namespace sgrf

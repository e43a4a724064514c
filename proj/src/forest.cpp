#include "sgrf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "sgrf/errors.hpp"
#include "sgrf/parallel.hpp"
#include "sgrf/version.hpp"

namespace sgrf {

using nlohmann::json;
using nlohmann::ordered_json;

double entropy(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) {
        if (c < 0) throw ComputeError("entropy: negative count");
        total += c;
    }
    if (total == 0) throw ComputeError("entropy: all counts zero");
    double h = 0.0;
    for (std::int64_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

std::optional<SplitChoice> best_split(const Dataset& ds, const std::vector<std::size_t>& rows,
                                      const std::vector<std::size_t>& candidate_features) {
    const std::size_t n = rows.size();
    if (n < 2) return std::nullopt;
    const int n_classes = ds.n_classes();

    std::vector<std::int64_t> parent_counts(n_classes, 0);
    for (std::size_t r : rows) parent_counts[ds.y[r]]++;
    double parent_entropy = entropy(parent_counts);
    if (parent_entropy == 0.0) return std::nullopt;

    std::optional<SplitChoice> best;
    std::vector<std::pair<double, int>> sorted;  // (value, label)
    sorted.reserve(n);

    for (std::size_t feature : candidate_features) {
        sorted.clear();
        for (std::size_t r : rows) sorted.emplace_back(ds.at(r, feature), ds.y[r]);
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (sorted.front().first == sorted.back().first) continue;  // constant feature

        std::vector<std::int64_t> left(n_classes, 0);
        std::size_t ptr = 0;
        for (std::size_t p = 1; p < n; ++p) {
            if (sorted[p].first == sorted[p - 1].first) continue;
            double threshold = (sorted[p - 1].first + sorted[p].first) / 2.0;
            // Count through the same `value < threshold` predicate prediction
            // uses, so fit-time child counts match routing even when the
            // midpoint rounds onto one of its endpoints.
            while (ptr < n && sorted[ptr].first < threshold) {
                left[sorted[ptr].second]++;
                ++ptr;
            }
            if (ptr == 0 || ptr == n) continue;

            std::vector<std::int64_t> right(n_classes, 0);
            for (int c = 0; c < n_classes; ++c) right[c] = parent_counts[c] - left[c];
            double wl = static_cast<double>(ptr) / static_cast<double>(n);
            double wr = 1.0 - wl;
            double gain = parent_entropy - wl * entropy(left) - wr * entropy(right);
            if (gain <= 0.0) continue;

            bool take = !best || gain > best->gain ||
                        (gain == best->gain &&
                         (feature < best->feature ||
                          (feature == best->feature && threshold < best->threshold)));
            if (take) best = SplitChoice{feature, threshold, gain};
        }
    }
    return best;
}

namespace {

int resolve_features_per_node(const ForestConfig& cfg, std::size_t n_features) {
    if (cfg.features_per_node == 0) {
        return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features)))));
    }
    if (cfg.features_per_node < 0)
        throw ComputeError("forest: features_per_node must be positive");
    if (static_cast<std::size_t>(cfg.features_per_node) > n_features)
        throw ComputeError("forest: features_per_node exceeds feature count");
    return cfg.features_per_node;
}

int leaf_label(const std::vector<std::int64_t>& counts) {
    int label = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[label]) label = static_cast<int>(c);
    }
    return label;
}

struct TreeBuilder {
    const Dataset& ds;
    const ForestConfig& cfg;
    int k;
    Rng& rng;
    Tree tree;
    std::vector<std::size_t> feature_scratch;

    TreeBuilder(const Dataset& d, const ForestConfig& c, int k_, Rng& r)
        : ds(d), cfg(c), k(k_), rng(r) {
        feature_scratch.resize(ds.n_features());
        std::iota(feature_scratch.begin(), feature_scratch.end(), 0);
    }

    int build(std::vector<std::size_t>& rows, int depth) {
        std::vector<std::int64_t> counts(ds.n_classes(), 0);
        for (std::size_t r : rows) counts[ds.y[r]]++;

        bool stop = (cfg.max_depth && depth >= *cfg.max_depth) ||
                    rows.size() < 2 * static_cast<std::size_t>(cfg.min_samples_leaf) ||
                    std::count_if(counts.begin(), counts.end(),
                                  [](std::int64_t c) { return c > 0; }) <= 1;

        std::optional<SplitChoice> split;
        if (!stop) {
            std::iota(feature_scratch.begin(), feature_scratch.end(), 0);
            for (int i = 0; i < k; ++i) {
                std::size_t j = i + rng.uniform_index(feature_scratch.size() - i);
                std::swap(feature_scratch[i], feature_scratch[j]);
            }
            std::vector<std::size_t> candidates(feature_scratch.begin(),
                                                feature_scratch.begin() + k);
            std::sort(candidates.begin(), candidates.end());
            split = best_split(ds, rows, candidates);
        }

        if (!split) {
            TreeNode leaf;
            leaf.is_leaf = true;
            leaf.label = leaf_label(counts);
            leaf.counts = std::move(counts);
            tree.nodes.push_back(std::move(leaf));
            return static_cast<int>(tree.nodes.size()) - 1;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            (ds.at(r, split->feature) < split->threshold ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        int node_index = static_cast<int>(tree.nodes.size());
        TreeNode node;
        node.is_leaf = false;
        node.feature = static_cast<int>(split->feature);
        node.threshold = split->threshold;
        tree.nodes.push_back(std::move(node));
        int left = build(left_rows, depth + 1);
        int right = build(right_rows, depth + 1);
        tree.nodes[node_index].left = left;
        tree.nodes[node_index].right = right;
        return node_index;
    }
};

int route(const Tree& tree, std::span<const double> row) {
    int idx = 0;
    while (!tree.nodes[idx].is_leaf) {
        const TreeNode& node = tree.nodes[idx];
        idx = row[node.feature] < node.threshold ? node.left : node.right;
    }
    return idx;
}

int route_with_override(const Tree& tree, const double* row, int override_feature,
                        double override_value) {
    int idx = 0;
    while (!tree.nodes[idx].is_leaf) {
        const TreeNode& node = tree.nodes[idx];
        double v = node.feature == override_feature ? override_value : row[node.feature];
        idx = v < node.threshold ? node.left : node.right;
    }
    return idx;
}

std::vector<std::uint8_t> in_bag_flags(const std::vector<std::size_t>& in_bag, std::size_t n) {
    std::vector<std::uint8_t> flags(n, 0);
    for (std::size_t r : in_bag) {
        if (r >= n) throw ComputeError("in-bag row index out of range for this dataset");
        flags[r] = 1;
    }
    return flags;
}

bool tree_uses_feature(const Tree& tree, int feature) {
    for (const auto& node : tree.nodes) {
        if (!node.is_leaf && node.feature == feature) return true;
    }
    return false;
}

}  // namespace

Tree grow_tree(const Dataset& ds, const std::vector<std::size_t>& in_bag_rows,
               const ForestConfig& cfg, Rng& rng) {
    if (in_bag_rows.empty()) throw ComputeError("grow_tree: empty in-bag row set");
    int k = resolve_features_per_node(cfg, ds.n_features());
    TreeBuilder builder(ds, cfg, k, rng);
    std::vector<std::size_t> rows = in_bag_rows;
    builder.build(rows, 0);
    return std::move(builder.tree);
}

RandomForest fit(const Dataset& ds, const ForestConfig& cfg, int threads) {
    if (cfg.n_trees < 1) throw ComputeError("forest: n_trees must be >= 1");
    if (cfg.min_samples_leaf < 1) throw ComputeError("forest: min_samples_leaf must be >= 1");
    if (cfg.max_depth && *cfg.max_depth < 0)
        throw ComputeError("forest: max_depth must be >= 0");
    if (ds.n_rows() == 0) throw ComputeError("forest: empty dataset");
    if (ds.n_features() == 0) throw ComputeError("forest: dataset has no features");
    if (ds.has_missing()) throw ComputeError("forest: dataset has missing values");

    auto counts = ds.class_counts();
    int present = 0;
    for (std::size_t c : counts) present += c > 0 ? 1 : 0;
    if (present < 2) throw ComputeError("forest: training data has a single class");

    resolve_features_per_node(cfg, ds.n_features());  // validates k <= f

    RandomForest rf;
    rf.config = cfg;
    rf.n_features = ds.n_features();
    rf.n_classes = ds.n_classes();
    rf.feature_names = ds.feature_names();
    rf.label_names = ds.label_names;
    rf.trees.resize(cfg.n_trees);
    rf.in_bag.resize(cfg.n_trees);

    // Score column = vote fraction of the rarest training label; counts tie
    // after oversampling, where the later-mapped label is the minority one.
    std::size_t minority = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] <= counts[minority]) minority = c;
    }
    rf.positive_class = static_cast<int>(minority);

    const std::size_t n = ds.n_rows();
    parallel_for(static_cast<std::size_t>(cfg.n_trees), threads, [&](std::size_t t) {
        Rng rng(mix_seed(cfg.seed, t));
        std::vector<std::size_t> bag;
        bag.reserve(n);
        if (cfg.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) bag.push_back(rng.uniform_index(n));
            std::sort(bag.begin(), bag.end());
        } else {
            bag.resize(n);
            std::iota(bag.begin(), bag.end(), 0);
        }
        rf.trees[t] = grow_tree(ds, bag, cfg, rng);
        rf.in_bag[t] = std::move(bag);
    });
    return rf;
}

std::vector<double> predict_proba(const RandomForest& rf, std::span<const double> row) {
    if (row.size() != rf.n_features)
        throw ComputeError("predict: row has " + std::to_string(row.size()) +
                           " features, model expects " + std::to_string(rf.n_features));
    std::vector<std::int64_t> votes(rf.n_classes, 0);
    for (const auto& tree : rf.trees) votes[tree.nodes[route(tree, row)].label]++;
    std::vector<double> proba(rf.n_classes, 0.0);
    for (int c = 0; c < rf.n_classes; ++c) {
        proba[c] = static_cast<double>(votes[c]) / static_cast<double>(rf.trees.size());
    }
    return proba;
}

int predict(const RandomForest& rf, std::span<const double> row) {
    auto proba = predict_proba(rf, row);
    int best = 0;
    for (int c = 1; c < rf.n_classes; ++c) {
        if (proba[c] > proba[best]) best = c;
    }
    return best;
}

OobReport oob_error(const RandomForest& rf, const Dataset& ds) {
    if (!rf.config.bootstrap)
        throw ComputeError("oob_error: forest was fitted without bootstrap");
    if (rf.in_bag.size() != rf.trees.size() || rf.in_bag.empty())
        throw ComputeError("oob_error: forest carries no in-bag records");
    if (ds.n_features() != rf.n_features)
        throw ComputeError("oob_error: dataset feature count differs from model");

    const std::size_t n = ds.n_rows();
    std::vector<std::vector<std::uint8_t>> flags;
    flags.reserve(rf.trees.size());
    for (const auto& bag : rf.in_bag) flags.push_back(in_bag_flags(bag, n));

    OobReport report;
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<std::int64_t> votes(rf.n_classes, 0);
        bool any = false;
        const double* row = ds.x.data() + r * rf.n_features;
        for (std::size_t t = 0; t < rf.trees.size(); ++t) {
            if (flags[t][r]) continue;
            votes[rf.trees[t].nodes[route(rf.trees[t], {row, rf.n_features})].label]++;
            any = true;
        }
        if (!any) continue;
        int pred = 0;
        for (int c = 1; c < rf.n_classes; ++c) {
            if (votes[c] > votes[pred]) pred = c;
        }
        report.covered_rows++;
        if (pred != ds.y[r]) wrong++;
    }
    if (report.covered_rows == 0)
        throw ComputeError("oob_error: no row is out-of-bag; increase n_trees");
    report.error = static_cast<double>(wrong) / static_cast<double>(report.covered_rows);
    report.coverage = static_cast<double>(report.covered_rows) / static_cast<double>(n);
    return report;
}

ImportanceReport variable_importance(const RandomForest& rf, const Dataset& ds,
                                     std::uint64_t seed) {
    if (!rf.config.bootstrap)
        throw ComputeError("variable_importance: forest was fitted without bootstrap");
    if (ds.n_features() != rf.n_features)
        throw ComputeError("variable_importance: dataset feature count differs from model");

    const std::size_t n = ds.n_rows();
    const std::size_t f = rf.n_features;
    ImportanceReport report;
    report.importance.assign(f, 0.0);
    std::size_t used_trees = 0;

    for (std::size_t t = 0; t < rf.trees.size(); ++t) {
        auto flags = in_bag_flags(rf.in_bag[t], n);
        std::vector<std::size_t> oob;
        for (std::size_t r = 0; r < n; ++r) {
            if (!flags[r]) oob.push_back(r);
        }
        if (oob.empty()) continue;
        used_trees++;

        const Tree& tree = rf.trees[t];
        std::size_t baseline_correct = 0;
        for (std::size_t r : oob) {
            const double* row = ds.x.data() + r * f;
            if (tree.nodes[route(tree, {row, f})].label == ds.y[r]) baseline_correct++;
        }
        double baseline = static_cast<double>(baseline_correct) / static_cast<double>(oob.size());

        for (std::size_t j = 0; j < f; ++j) {
            if (!tree_uses_feature(tree, static_cast<int>(j))) continue;  // exact zero
            Rng rng(mix_seed(seed, t, j));
            std::vector<std::size_t> perm(oob.size());
            std::iota(perm.begin(), perm.end(), 0);
            rng.shuffle(perm);
            std::size_t correct = 0;
            for (std::size_t p = 0; p < oob.size(); ++p) {
                std::size_t r = oob[p];
                double value = ds.at(oob[perm[p]], j);
                const double* row = ds.x.data() + r * f;
                if (tree.nodes[route_with_override(tree, row, static_cast<int>(j), value)].label ==
                    ds.y[r]) {
                    correct++;
                }
            }
            double permuted = static_cast<double>(correct) / static_cast<double>(oob.size());
            report.importance[j] += baseline - permuted;
        }
    }
    if (used_trees > 0) {
        for (double& v : report.importance) v /= static_cast<double>(used_trees);
    }

    std::vector<std::size_t> order(f);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.importance[a] > report.importance[b];
    });
    report.rank.assign(f, 0);
    for (std::size_t pos = 0; pos < f; ++pos) report.rank[order[pos]] = static_cast<int>(pos);
    return report;
}

// ---- persistence ----

namespace {

ordered_json node_to_json(const Tree& tree, int idx) {
    const TreeNode& node = tree.nodes[idx];
    ordered_json j;
    if (node.is_leaf) {
        j["type"] = "leaf";
        j["label"] = node.label;
        j["counts"] = node.counts;
    } else {
        j["type"] = "split";
        j["feature"] = node.feature;
        j["threshold"] = node.threshold;
        j["left"] = node_to_json(tree, node.left);
        j["right"] = node_to_json(tree, node.right);
    }
    return j;
}

int node_from_json(const json& j, Tree& tree, int n_classes, std::size_t n_features) {
    TreeNode node;
    std::string type = j.at("type").get<std::string>();
    if (type == "leaf") {
        node.is_leaf = true;
        node.label = j.at("label").get<int>();
        node.counts = j.at("counts").get<std::vector<std::int64_t>>();
        if (node.label < 0 || node.label >= n_classes)
            throw InputError("model: leaf label out of range");
        tree.nodes.push_back(std::move(node));
        return static_cast<int>(tree.nodes.size()) - 1;
    }
    if (type != "split") throw InputError("model: unknown node type '" + type + "'");
    node.is_leaf = false;
    node.feature = j.at("feature").get<int>();
    node.threshold = j.at("threshold").get<double>();
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= n_features)
        throw InputError("model: split feature index out of range");
    int self = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(std::move(node));
    int left = node_from_json(j.at("left"), tree, n_classes, n_features);
    int right = node_from_json(j.at("right"), tree, n_classes, n_features);
    tree.nodes[self].left = left;
    tree.nodes[self].right = right;
    return self;
}

}  // namespace

std::string forest_to_json(const RandomForest& rf, bool include_in_bag) {
    ordered_json j;
    j["format"] = "sgrf.forest";
    j["version"] = kModelFormatVersion;
    ordered_json cfg;
    cfg["n_trees"] = rf.config.n_trees;
    cfg["features_per_node"] = rf.config.features_per_node;
    cfg["min_samples_leaf"] = rf.config.min_samples_leaf;
    if (rf.config.max_depth) {
        cfg["max_depth"] = *rf.config.max_depth;
    } else {
        cfg["max_depth"] = nullptr;
    }
    cfg["seed"] = rf.config.seed;
    cfg["bootstrap"] = rf.config.bootstrap;
    j["config"] = std::move(cfg);
    j["n_features"] = rf.n_features;
    j["n_classes"] = rf.n_classes;
    j["feature_names"] = rf.feature_names;
    j["label_names"] = rf.label_names;
    j["positive_class"] = rf.positive_class;
    j["trees"] = ordered_json::array();
    for (const auto& tree : rf.trees) j["trees"].push_back(node_to_json(tree, 0));
    if (include_in_bag) j["in_bag"] = rf.in_bag;
    return j.dump(2) + "\n";
}

RandomForest forest_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("model json: ") + e.what());
    }
    RandomForest rf;
    try {
        if (j.at("format").get<std::string>() != "sgrf.forest")
            throw InputError("model: unrecognized format field");
        if (j.at("version").get<int>() != kModelFormatVersion)
            throw InputError("model: unsupported format version");
        const auto& cfg = j.at("config");
        rf.config.n_trees = cfg.at("n_trees").get<int>();
        rf.config.features_per_node = cfg.at("features_per_node").get<int>();
        rf.config.min_samples_leaf = cfg.at("min_samples_leaf").get<int>();
        if (!cfg.at("max_depth").is_null()) rf.config.max_depth = cfg.at("max_depth").get<int>();
        rf.config.seed = cfg.at("seed").get<std::uint64_t>();
        rf.config.bootstrap = cfg.at("bootstrap").get<bool>();
        rf.n_features = j.at("n_features").get<std::size_t>();
        rf.n_classes = j.at("n_classes").get<int>();
        rf.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        rf.label_names = j.at("label_names").get<std::vector<std::string>>();
        rf.positive_class = j.at("positive_class").get<int>();
        for (const auto& tj : j.at("trees")) {
            Tree tree;
            node_from_json(tj, tree, rf.n_classes, rf.n_features);
            rf.trees.push_back(std::move(tree));
        }
        if (j.contains("in_bag"))
            rf.in_bag = j.at("in_bag").get<std::vector<std::vector<std::size_t>>>();
    } catch (const json::exception& e) {
        throw InputError(std::string("model json: ") + e.what());
    }
    if (rf.trees.empty()) throw InputError("model: no trees");
    if (rf.feature_names.size() != rf.n_features)
        throw InputError("model: feature_names length mismatch");
    return rf;
}

}  // namespace sgrf

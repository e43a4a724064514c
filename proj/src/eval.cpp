#include "sgrf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "sgrf/csv.hpp"
#include "sgrf/errors.hpp"
#include "sgrf/rng.hpp"
#include "sgrf/version.hpp"

namespace sgrf {

using nlohmann::json;
using nlohmann::ordered_json;

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(cells.begin(), cells.end(), std::int64_t{0});
}

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels,
                          int n_classes) {
    if (preds.size() != labels.size())
        throw ComputeError("confusion: predictions and labels differ in length");
    if (n_classes < 1) throw ComputeError("confusion: n_classes must be >= 1");
    ConfusionMatrix cm(n_classes);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes || preds[i] < 0 || preds[i] >= n_classes)
            throw ComputeError("confusion: label out of range at position " + std::to_string(i));
        cm.at(labels[i], preds[i])++;
    }
    return cm;
}

namespace {

// 0/0 is defined as 0 and flagged so degenerate folds surface in reports.
double safe_ratio(std::int64_t num, std::int64_t den, bool& flagged) {
    if (den == 0) {
        flagged = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport class_metrics(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total == 0) throw ComputeError("class_metrics: empty confusion matrix");

    MetricsReport report;
    std::int64_t trace = 0;
    for (int c = 0; c < cm.n_classes; ++c) trace += cm.at(c, c);
    report.accuracy = static_cast<double>(trace) / static_cast<double>(total);

    double sens_product = 1.0;
    for (int c = 0; c < cm.n_classes; ++c) {
        std::int64_t tp = cm.at(c, c);
        std::int64_t row = 0, col = 0;
        for (int o = 0; o < cm.n_classes; ++o) {
            row += cm.at(c, o);
            col += cm.at(o, c);
        }
        std::int64_t fn = row - tp;
        std::int64_t fp = col - tp;
        std::int64_t tn = total - tp - fn - fp;

        ClassMetrics m;
        m.sensitivity = safe_ratio(tp, tp + fn, m.zero_division);
        m.specificity = safe_ratio(tn, tn + fp, m.zero_division);
        double precision = safe_ratio(tp, tp + fp, m.zero_division);
        if (precision + m.sensitivity == 0.0) {
            m.zero_division = true;
            m.f1 = 0.0;
        } else {
            m.f1 = 2.0 * precision * m.sensitivity / (precision + m.sensitivity);
        }
        sens_product *= m.sensitivity;
        report.any_zero_division = report.any_zero_division || m.zero_division;
        report.per_class.push_back(m);
    }
    report.g_mean = cm.n_classes == 2
                        ? std::sqrt(sens_product)
                        : std::pow(sens_product, 1.0 / static_cast<double>(cm.n_classes));
    return report;
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels,
                   int positive_class) {
    if (scores.size() != labels.size())
        throw ComputeError("roc: scores and labels differ in length");
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += (y == positive_class) ? 1 : 0;
    std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw ComputeError("roc: needs at least one positive and one negative label");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    RocCurve curve;
    curve.positive_class = positive_class;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        double score = scores[order[i]];
        while (i < order.size() && scores[order[i]] == score) {
            if (labels[order[i]] == positive_class) {
                tp++;
            } else {
                fp++;
            }
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                                static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    if (curve.points.size() < 2) throw ComputeError("auc: curve has fewer than 2 points");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        if (b.fpr < a.fpr || b.tpr < a.tpr) throw ComputeError("auc: curve is not monotonic");
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    return area;
}

std::string roc_to_csv(const RocCurve& curve) {
    std::string out = "fpr,tpr\n";
    for (const auto& p : curve.points) {
        out += csv::format_double(p.fpr);
        out += ',';
        out += csv::format_double(p.tpr);
        out += '\n';
    }
    return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int k,
                                                       std::uint64_t seed,
                                                       std::vector<std::string>* warnings) {
    if (k < 2) throw ComputeError("stratified_folds: k must be >= 2");
    if (static_cast<std::size_t>(k) > labels.size())
        throw ComputeError("stratified_folds: k exceeds the number of rows");

    int n_classes = 0;
    for (int y : labels) {
        if (y < 0) throw ComputeError("stratified_folds: negative label");
        n_classes = std::max(n_classes, y + 1);
    }

    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t r = 0; r < labels.size(); ++r) by_class[labels[r]].push_back(r);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t position = 0;  // running deal position, continued across classes
    for (int c = 0; c < n_classes; ++c) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(c)));
        rng.shuffle(by_class[c]);
        for (std::size_t idx : by_class[c]) {
            folds[position % k].push_back(idx);
            ++position;
        }
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());

    if (warnings) {
        for (int f = 0; f < k; ++f) {
            std::vector<std::size_t> counts(n_classes, 0);
            for (std::size_t r : folds[f]) counts[labels[r]]++;
            for (int c = 0; c < n_classes; ++c) {
                if (counts[c] == 0 && !by_class[c].empty()) {
                    warnings->push_back("stratified_folds: fold " + std::to_string(f) +
                                        " has no rows of class " + std::to_string(c));
                }
            }
        }
    }
    return folds;
}

// ---- pipeline configuration ----

std::string pipeline_mode_name(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::RfOnly: return "rf_only";
        case PipelineMode::SmoteRf: return "smote_rf";
        case PipelineMode::SmoteGaRf: return "smote_ga_rf";
    }
    throw Error("unreachable pipeline mode");
}

PipelineMode pipeline_mode_from_name(const std::string& name) {
    if (name == "rf_only") return PipelineMode::RfOnly;
    if (name == "smote_rf") return PipelineMode::SmoteRf;
    if (name == "smote_ga_rf") return PipelineMode::SmoteGaRf;
    throw InputError("unknown pipeline mode: '" + name + "'");
}

std::string smote_scope_name(SmoteScope scope) {
    return scope == SmoteScope::PerFold ? "per_fold" : "global";
}

SmoteScope smote_scope_from_name(const std::string& name) {
    if (name == "per_fold") return SmoteScope::PerFold;
    if (name == "global") return SmoteScope::Global;
    throw InputError("unknown smote_scope: '" + name + "'");
}

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            throw InputError("config: unknown field '" + key + "' in " + where);
    }
}

SmoteConfig smote_from_json(const json& j) {
    reject_unknown_keys(j, {"k_neighbors", "target_ratio"}, "smote");
    SmoteConfig cfg;
    cfg.k_neighbors = j.value("k_neighbors", cfg.k_neighbors);
    cfg.target_ratio = j.value("target_ratio", cfg.target_ratio);
    return cfg;
}

ForestConfig forest_from_json_cfg(const json& j, const std::string& where) {
    reject_unknown_keys(
        j, {"n_trees", "features_per_node", "min_samples_leaf", "max_depth", "bootstrap"}, where);
    ForestConfig cfg;
    cfg.n_trees = j.value("n_trees", cfg.n_trees);
    if (j.contains("features_per_node")) {
        const auto& k = j.at("features_per_node");
        if (k.is_string()) {
            if (k.get<std::string>() != "sqrt")
                throw InputError("config: features_per_node must be a count or \"sqrt\"");
            cfg.features_per_node = 0;
        } else {
            cfg.features_per_node = k.get<int>();
        }
    }
    cfg.min_samples_leaf = j.value("min_samples_leaf", cfg.min_samples_leaf);
    if (j.contains("max_depth") && !j.at("max_depth").is_null())
        cfg.max_depth = j.at("max_depth").get<int>();
    cfg.bootstrap = j.value("bootstrap", cfg.bootstrap);
    return cfg;
}

GaConfig ga_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"population_size", "generations", "crossover_rate", "mutation_rate",
                         "tournament_size", "elitism_count", "init_bit_probability", "selection"},
                        "ga");
    GaConfig cfg;
    cfg.population_size = j.value("population_size", cfg.population_size);
    cfg.generations = j.value("generations", cfg.generations);
    cfg.crossover_rate = j.value("crossover_rate", cfg.crossover_rate);
    cfg.mutation_rate = j.value("mutation_rate", cfg.mutation_rate);
    cfg.tournament_size = j.value("tournament_size", cfg.tournament_size);
    cfg.elitism_count = j.value("elitism_count", cfg.elitism_count);
    cfg.init_bit_probability = j.value("init_bit_probability", cfg.init_bit_probability);
    if (j.contains("selection")) {
        std::string s = j.at("selection").get<std::string>();
        if (s == "tournament") {
            cfg.selection = SelectionOp::Tournament;
        } else if (s == "roulette") {
            cfg.selection = SelectionOp::Roulette;
        } else {
            throw InputError("config: selection must be \"tournament\" or \"roulette\"");
        }
    }
    return cfg;
}

FitnessSpec fitness_from_json(const json& j) {
    reject_unknown_keys(j, {"mode", "cv_folds", "forest"}, "fitness");
    FitnessSpec spec;
    if (j.contains("mode")) {
        std::string m = j.at("mode").get<std::string>();
        if (m == "cv_accuracy") {
            spec.mode = FitnessMode::CvAccuracy;
        } else if (m == "oob_accuracy") {
            spec.mode = FitnessMode::OobAccuracy;
        } else {
            throw InputError("config: fitness mode must be \"cv_accuracy\" or \"oob_accuracy\"");
        }
    }
    spec.cv_folds = j.value("cv_folds", spec.cv_folds);
    if (j.contains("forest")) spec.rf_config = forest_from_json_cfg(j.at("forest"), "fitness.forest");
    return spec;
}

ordered_json forest_to_json_cfg(const ForestConfig& cfg) {
    ordered_json j;
    j["n_trees"] = cfg.n_trees;
    if (cfg.features_per_node == 0) {
        j["features_per_node"] = "sqrt";
    } else {
        j["features_per_node"] = cfg.features_per_node;
    }
    j["min_samples_leaf"] = cfg.min_samples_leaf;
    if (cfg.max_depth) {
        j["max_depth"] = *cfg.max_depth;
    } else {
        j["max_depth"] = nullptr;
    }
    j["bootstrap"] = cfg.bootstrap;
    return j;
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("pipeline config json: ") + e.what());
    }
    PipelineConfig cfg;
    try {
        reject_unknown_keys(j,
                            {"mode", "modes", "smote_scope", "cv_folds", "seed", "positive_class",
                             "threads", "smote", "ga", "fitness", "forest"},
                            "pipeline config");
        if (j.contains("mode")) cfg.mode = pipeline_mode_from_name(j.at("mode").get<std::string>());
        if (j.contains("smote_scope"))
            cfg.smote_scope = smote_scope_from_name(j.at("smote_scope").get<std::string>());
        cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.positive_class = j.value("positive_class", cfg.positive_class);
        cfg.threads = j.value("threads", cfg.threads);
        if (j.contains("smote")) cfg.smote = smote_from_json(j.at("smote"));
        if (j.contains("ga")) cfg.ga = ga_from_json(j.at("ga"));
        if (j.contains("fitness")) cfg.fitness = fitness_from_json(j.at("fitness"));
        if (j.contains("forest")) cfg.forest = forest_from_json_cfg(j.at("forest"), "forest");
    } catch (const json::exception& e) {
        throw InputError(std::string("pipeline config json: ") + e.what());
    }
    return cfg;
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
    // Deliberately excludes threads: worker count must not alter any output.
    ordered_json j;
    j["mode"] = pipeline_mode_name(cfg.mode);
    j["smote_scope"] = smote_scope_name(cfg.smote_scope);
    j["cv_folds"] = cfg.cv_folds;
    j["seed"] = cfg.seed;
    j["positive_class"] = cfg.positive_class;
    j["smote"] = {{"k_neighbors", cfg.smote.k_neighbors},
                  {"target_ratio", cfg.smote.target_ratio}};
    ordered_json ga;
    ga["population_size"] = cfg.ga.population_size;
    ga["generations"] = cfg.ga.generations;
    ga["crossover_rate"] = cfg.ga.crossover_rate;
    ga["mutation_rate"] = cfg.ga.mutation_rate;
    ga["tournament_size"] = cfg.ga.tournament_size;
    ga["elitism_count"] = cfg.ga.elitism_count;
    ga["init_bit_probability"] = cfg.ga.init_bit_probability;
    ga["selection"] = cfg.ga.selection == SelectionOp::Tournament ? "tournament" : "roulette";
    j["ga"] = std::move(ga);
    ordered_json fitness;
    fitness["mode"] = cfg.fitness.mode == FitnessMode::CvAccuracy ? "cv_accuracy" : "oob_accuracy";
    fitness["cv_folds"] = cfg.fitness.cv_folds;
    fitness["forest"] = forest_to_json_cfg(cfg.fitness.rf_config);
    j["fitness"] = std::move(fitness);
    j["forest"] = forest_to_json_cfg(cfg.forest);
    return j.dump();
}

// ---- pipeline driver ----

namespace {

struct FoldData {
    Dataset train;
    Dataset test;
};

int resolve_positive_class(const Dataset& ds, const PipelineConfig& cfg) {
    if (cfg.positive_class >= 0) {
        if (cfg.positive_class >= ds.n_classes())
            throw InputError("pipeline: positive_class out of range");
        return cfg.positive_class;
    }
    auto counts = ds.class_counts();
    std::size_t minority = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] < counts[minority]) minority = c;
    }
    return static_cast<int>(minority);
}

Dataset preprocess_fit_apply(Dataset train, Dataset& test, std::vector<std::string>& dropped) {
    DegenerateScan scan = find_degenerate(train);
    dropped = scan.drop_names;
    train = drop_columns(train, scan.drop_indices);
    test = drop_columns(test, scan.drop_indices);
    ImputeParams imp = fit_impute(train);
    train = apply_impute(train, imp);
    test = apply_impute(test, imp);
    ScaleParams sc = fit_scale(train);
    train = apply_scale(train, sc);
    test = apply_scale(test, sc);
    return train;
}

}  // namespace

EvalReport run_pipeline(const Dataset& ds, const PipelineConfig& cfg) {
    if (ds.n_classes() != 2)
        throw ComputeError("pipeline: exactly two classes required, got " +
                           std::to_string(ds.n_classes()));
    if (cfg.cv_folds < 2) throw ComputeError("pipeline: cv_folds must be >= 2");

    EvalReport report;
    report.mode = cfg.mode;
    report.smote_scope = cfg.smote_scope;
    report.seed = cfg.seed;
    report.label_names = ds.label_names;
    report.positive_class = resolve_positive_class(ds, cfg);
    report.config_json = pipeline_config_to_json(cfg);

    Dataset working = ds;
    const bool uses_smote = cfg.mode != PipelineMode::RfOnly;

    if (cfg.smote_scope == SmoteScope::Global) {
        // Reproduction mode: preprocessing and oversampling see every row
        // before the folds are drawn.
        auto [prepped, dropped] = drop_degenerate(working);
        Dataset imputed = impute(prepped);
        working = apply_scale(imputed, fit_scale(imputed));
        if (!dropped.empty()) {
            std::string msg = "global preprocessing dropped:";
            for (const auto& name : dropped) msg += " " + name;
            report.warnings.push_back(msg);
        }
        if (uses_smote) {
            SmoteConfig smote_cfg = cfg.smote;
            smote_cfg.seed = mix_seed(cfg.seed, 0x510);
            SmoteResult res = oversample(working, smote_cfg);
            working = std::move(res.data);
            for (const auto& w : res.warnings) report.warnings.push_back(w);
        }
        report.warnings.push_back(
            std::string("leakage: smote_scope=global ") +
            (uses_smote ? "preprocesses and oversamples" : "preprocesses") +
            " the full dataset before cross-validation; test folds contain rows "
            "correlated with training data and every score is optimistically biased");
    }

    std::vector<std::string> fold_warnings;
    auto folds = stratified_folds(working.y, cfg.cv_folds, mix_seed(cfg.seed, 0xF01D),
                                  &fold_warnings);
    for (const auto& w : fold_warnings) report.warnings.push_back(w);

    const std::size_t n = working.n_rows();
    std::vector<int> pooled_preds(n, -1);
    std::vector<double> pooled_scores(n, 0.0);
    std::map<std::string, int> selection_votes;

    for (int f = 0; f < cfg.cv_folds; ++f) {
        FoldReport fold;
        fold.fold_index = f;
        const auto& test_idx = folds[f];
        std::vector<std::uint8_t> in_test(n, 0);
        for (std::size_t r : test_idx) in_test[r] = 1;
        std::vector<std::size_t> train_idx;
        train_idx.reserve(n - test_idx.size());
        for (std::size_t r = 0; r < n; ++r) {
            if (!in_test[r]) train_idx.push_back(r);
        }

        Dataset train = select_rows(working, train_idx);
        Dataset test = select_rows(working, test_idx);

        fold.n_test = test.n_rows();
        fold.test_class_counts = test.class_counts();
        for (int c = 0; c < working.n_classes(); ++c) {
            if (fold.test_class_counts[c] == 0) {
                fold.warnings.push_back("no test rows of class " + working.label_names[c]);
            }
        }

        if (cfg.smote_scope == SmoteScope::PerFold) {
            train = preprocess_fit_apply(std::move(train), test, fold.dropped_features);
            if (uses_smote) {
                SmoteConfig smote_cfg = cfg.smote;
                smote_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(f), 1);
                SmoteResult res = oversample(train, smote_cfg);
                fold.n_train_synthetic = res.provenance.size();
                train = std::move(res.data);
                for (const auto& w : res.warnings) fold.warnings.push_back(w);
            }
        }
        fold.n_train = train.n_rows();

        if (cfg.mode == PipelineMode::SmoteGaRf) {
            GaConfig ga_cfg = cfg.ga;
            ga_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(f), 2);
            FitnessSpec fitness = cfg.fitness;
            fitness.fitness_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(f), 3);
            GaResult ga = run_ga(train, ga_cfg, fitness, cfg.threads);
            std::vector<std::size_t> cols;
            for (std::size_t i = 0; i < ga.best_mask.size(); ++i) {
                if (ga.best_mask[i]) cols.push_back(i);
            }
            fold.selected_features = mask_to_names(ga.best_mask, train.feature_names());
            fold.ga_history = std::move(ga.history);
            for (const auto& name : fold.selected_features) selection_votes[name]++;
            train = select_columns(train, cols);
            test = select_columns(test, cols);
        }

        ForestConfig rf_cfg = cfg.forest;
        rf_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(f), 4);
        RandomForest rf = fit(train, rf_cfg, cfg.threads);

        std::vector<int> fold_preds;
        std::vector<int> fold_labels;
        for (std::size_t i = 0; i < test.n_rows(); ++i) {
            std::span<const double> row(test.x.data() + i * test.n_features(),
                                        test.n_features());
            auto proba = predict_proba(rf, row);
            int pred = 0;
            for (int c = 1; c < working.n_classes(); ++c) {
                if (proba[c] > proba[pred]) pred = c;
            }
            pooled_preds[test_idx[i]] = pred;
            pooled_scores[test_idx[i]] = proba[report.positive_class];
            fold_preds.push_back(pred);
            fold_labels.push_back(test.y[i]);
        }
        fold.cm = confusion(fold_preds, fold_labels, working.n_classes());
        report.folds.push_back(std::move(fold));
    }

    report.cm = confusion(pooled_preds, working.y, working.n_classes());
    report.metrics = class_metrics(report.cm);
    report.roc = roc_curve(pooled_scores, working.y, report.positive_class);
    report.auc_value = auc(report.roc);

    if (cfg.mode == PipelineMode::SmoteGaRf) {
        for (const auto& [name, votes] : selection_votes) {
            if (votes * 2 > cfg.cv_folds) report.selected_features.push_back(name);
        }
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    ordered_json j;
    j["tool"] = "sgrf";
    j["version"] = kVersion;
    j["mode"] = pipeline_mode_name(report.mode);
    j["smote_scope"] = smote_scope_name(report.smote_scope);
    j["seed"] = report.seed;
    j["label_names"] = report.label_names;
    j["positive_class"] = report.positive_class;
    j["positive_label"] = report.label_names.at(report.positive_class);

    j["accuracy"] = report.metrics.accuracy;
    j["g_mean"] = report.metrics.g_mean;
    j["auc"] = report.auc_value;
    j["per_class"] = ordered_json::array();
    for (std::size_t c = 0; c < report.metrics.per_class.size(); ++c) {
        const auto& m = report.metrics.per_class[c];
        ordered_json cj;
        cj["label"] = report.label_names.at(c);
        cj["sensitivity"] = m.sensitivity;
        cj["specificity"] = m.specificity;
        cj["f1"] = m.f1;
        cj["zero_division"] = m.zero_division;
        j["per_class"].push_back(std::move(cj));
    }

    ordered_json cm = ordered_json::array();
    for (int t = 0; t < report.cm.n_classes; ++t) {
        ordered_json row = ordered_json::array();
        for (int p = 0; p < report.cm.n_classes; ++p) row.push_back(report.cm.at(t, p));
        cm.push_back(std::move(row));
    }
    j["confusion_matrix"] = std::move(cm);

    ordered_json roc = ordered_json::array();
    for (const auto& p : report.roc.points) roc.push_back({p.fpr, p.tpr});
    j["roc"] = std::move(roc);

    if (report.mode == PipelineMode::SmoteGaRf)
        j["selected_features"] = report.selected_features;
    j["warnings"] = report.warnings;

    j["folds"] = ordered_json::array();
    for (const auto& fold : report.folds) {
        ordered_json fj;
        fj["fold"] = fold.fold_index;
        fj["n_test"] = fold.n_test;
        fj["n_train"] = fold.n_train;
        fj["n_train_synthetic"] = fold.n_train_synthetic;
        fj["test_class_counts"] = fold.test_class_counts;
        ordered_json fcm = ordered_json::array();
        for (int t = 0; t < fold.cm.n_classes; ++t) {
            ordered_json row = ordered_json::array();
            for (int p = 0; p < fold.cm.n_classes; ++p) row.push_back(fold.cm.at(t, p));
            fcm.push_back(std::move(row));
        }
        fj["confusion_matrix"] = std::move(fcm);
        fj["dropped_features"] = fold.dropped_features;
        if (report.mode == PipelineMode::SmoteGaRf) {
            fj["selected_features"] = fold.selected_features;
            ordered_json hist = ordered_json::array();
            for (const auto& e : fold.ga_history.entries)
                hist.push_back({e.best_fitness, e.mean_fitness});
            fj["ga_history"] = std::move(hist);
        }
        fj["warnings"] = fold.warnings;
        j["folds"].push_back(std::move(fj));
    }

    j["config"] = ordered_json::parse(report.config_json);
    return j.dump(2) + "\n";
}

}  // namespace sgrf

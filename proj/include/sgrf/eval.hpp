#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgrf/dataset.hpp"
#include "sgrf/forest.hpp"
#include "sgrf/gafs.hpp"
#include "sgrf/smote.hpp"

namespace sgrf {

struct ConfusionMatrix {
    int n_classes = 0;
    std::vector<std::int64_t> cells;  // row-major, [true][predicted]

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int classes)
        : n_classes(classes), cells(static_cast<std::size_t>(classes) * classes, 0) {}

    std::int64_t& at(int truth, int pred) { return cells[truth * n_classes + pred]; }
    std::int64_t at(int truth, int pred) const { return cells[truth * n_classes + pred]; }
    std::int64_t total() const;
};

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels,
                          int n_classes);

struct ClassMetrics {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
    bool zero_division = false;  // some ratio hit 0/0 and was defined as 0
};

struct MetricsReport {
    double accuracy = 0.0;
    double g_mean = 0.0;  // geometric mean of per-class sensitivities
    std::vector<ClassMetrics> per_class;
    bool any_zero_division = false;
};

MetricsReport class_metrics(const ConfusionMatrix& cm);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // starts at (0,0), ends at (1,1)
    int positive_class = 1;
};

// Threshold sweep over the scores, one point per distinct score value.
// Grouped ties give the curve diagonal segments, so the trapezoidal area
// equals the Mann-Whitney statistic with half credit for tied pairs.
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels,
                   int positive_class);
double auc(const RocCurve& curve);
std::string roc_to_csv(const RocCurve& curve);

// Per-class shuffle, then one continuous round-robin deal over the fold
// cycle; per-class fold counts differ by at most one and no fold is empty
// when k <= n_rows.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int k,
                                                       std::uint64_t seed,
                                                       std::vector<std::string>* warnings = nullptr);

// ---- pipeline ----

enum class PipelineMode { RfOnly, SmoteRf, SmoteGaRf };
enum class SmoteScope { PerFold, Global };

std::string pipeline_mode_name(PipelineMode mode);
PipelineMode pipeline_mode_from_name(const std::string& name);
std::string smote_scope_name(SmoteScope scope);
SmoteScope smote_scope_from_name(const std::string& name);

struct PipelineConfig {
    PipelineMode mode = PipelineMode::SmoteGaRf;
    SmoteScope smote_scope = SmoteScope::PerFold;
    int cv_folds = 10;
    SmoteConfig smote;
    GaConfig ga;
    FitnessSpec fitness;
    ForestConfig forest;
    std::uint64_t seed = 0;
    int positive_class = -1;  // -1 = minority class of the input dataset
    int threads = 1;          // never echoed into reports
};

// Parses the nested pipeline configuration; unknown fields are rejected so
// typos surface instead of silently using defaults.
PipelineConfig parse_pipeline_config(const std::string& json_text);
std::string pipeline_config_to_json(const PipelineConfig& cfg);

struct FoldReport {
    int fold_index = 0;
    std::size_t n_test = 0;
    std::size_t n_train = 0;            // after any per-fold oversampling
    std::size_t n_train_synthetic = 0;  // SMOTE rows, never part of n_test
    std::vector<std::size_t> test_class_counts;
    ConfusionMatrix cm;
    std::vector<std::string> warnings;
    std::vector<std::string> dropped_features;
    std::vector<std::string> selected_features;  // smote_ga_rf only
    GaHistory ga_history;                        // smote_ga_rf only
};

struct EvalReport {
    PipelineMode mode = PipelineMode::RfOnly;
    SmoteScope smote_scope = SmoteScope::PerFold;
    std::uint64_t seed = 0;
    std::vector<std::string> label_names;
    int positive_class = 1;
    MetricsReport metrics;
    double auc_value = 0.0;
    RocCurve roc;
    ConfusionMatrix cm;
    std::vector<FoldReport> folds;
    std::vector<std::string> warnings;
    // smote_ga_rf: features chosen by more than half of the folds
    std::vector<std::string> selected_features;
    std::string config_json;  // resolved configuration echo
};

// Cross-validated evaluation of one pipeline configuration. Predictions are
// pooled over folds into a single confusion matrix and ROC curve.
EvalReport run_pipeline(const Dataset& ds, const PipelineConfig& cfg);

std::string report_to_json(const EvalReport& report);

}  // namespace sgrf

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sgrf {

enum class FeatureKind { Binary, Categorical, Continuous };

std::string feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(const std::string& name);

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::Continuous;
    int cardinality = 0;  // >= 2 for categorical; fixed at 2 for binary
    std::optional<std::pair<double, double>> range;  // declared range, continuous only
};

struct Schema {
    std::vector<FeatureSpec> features;
    std::string label_column = "label";
};

Schema parse_schema(const std::string& json_text);
std::string schema_to_json(const Schema& schema);

// Numeric feature matrix with per-cell missingness and a recorded label
// mapping (original label text, first-appearance order -> 0..C-1).
struct Dataset {
    std::vector<double> x;               // row-major, n_rows x n_features
    std::vector<std::uint8_t> missing;   // same shape; 1 = value absent
    std::vector<int> y;
    std::vector<FeatureSpec> specs;
    std::vector<std::string> label_names;
    std::string label_column = "label";

    std::size_t n_rows() const { return y.size(); }
    std::size_t n_features() const { return specs.size(); }
    int n_classes() const { return static_cast<int>(label_names.size()); }

    double at(std::size_t row, std::size_t col) const { return x[row * n_features() + col]; }
    bool is_missing(std::size_t row, std::size_t col) const {
        return missing[row * n_features() + col] != 0;
    }
    bool has_missing() const;
    std::vector<std::size_t> class_counts() const;
    std::vector<std::string> feature_names() const;
};

Dataset load_csv(const std::string& path, const Schema& schema);
Dataset load_csv_text(const std::string& text, const Schema& schema);
std::string to_csv(const Dataset& ds);
Schema schema_of(const Dataset& ds);

// Column fill values: mean for continuous, mode for binary/categorical
// (ties toward the smallest code).
struct ImputeParams {
    std::vector<double> fill;
};

ImputeParams fit_impute(const Dataset& ds);
Dataset apply_impute(const Dataset& ds, const ImputeParams& params);
Dataset impute(const Dataset& ds);

struct ScaleParams {
    std::vector<double> min;
    std::vector<double> max;
    std::vector<std::uint8_t> degenerate;  // max == min
};

ScaleParams fit_scale(const Dataset& ds);
// (v - min) / (max - min); degenerate columns map to 0. Values fitted on
// training data may land outside [0,1] when applied to other data.
Dataset apply_scale(const Dataset& ds, const ScaleParams& params);

struct DegenerateScan {
    std::vector<std::size_t> drop_indices;  // ascending
    std::vector<std::string> drop_names;
};

// Columns that are fully missing or have zero variance over observed values.
DegenerateScan find_degenerate(const Dataset& ds);
Dataset drop_columns(const Dataset& ds, const std::vector<std::size_t>& sorted_indices);
std::pair<Dataset, std::vector<std::string>> drop_degenerate(const Dataset& ds);

Dataset select_rows(const Dataset& ds, const std::vector<std::size_t>& rows);
Dataset select_columns(const Dataset& ds, const std::vector<std::size_t>& cols);

// ---- synthetic data ----

struct GeneratorBlock {
    std::string name;  // single feature; otherwise name_i from prefix
    int count = 1;
    FeatureKind kind = FeatureKind::Continuous;
    int cardinality = 0;
    double base_mean = 0.0;
    double stddev = 1.0;
    double separation = 0.0;  // class-mean gap, in stddev units
    double skew = 0.0;        // categorical: P(code == class mod cardinality); 0 = uniform
    double flip = 0.5;        // binary: P(bit != class parity); 0.5 = pure noise
    std::optional<std::pair<double, double>> range;  // declared range; samples clipped
    std::optional<double> constant;
    std::optional<double> missing_rate;  // overrides config-level rate
};

struct GeneratorConfig {
    std::uint64_t seed = 0;
    std::vector<long long> class_counts;
    std::vector<std::string> class_labels;  // defaults to class0..classC-1
    std::string label_column = "label";
    double missing_rate = 0.0;
    std::vector<GeneratorBlock> blocks;
};

GeneratorConfig parse_generator_config(const std::string& json_text);
Dataset generate_synthetic(const GeneratorConfig& cfg);
Dataset generate_synthetic(const GeneratorConfig& cfg, std::uint64_t seed_override);

}  // namespace sgrf

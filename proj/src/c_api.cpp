#include "sgrf/c_api.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgrf/csv.hpp"
#include "sgrf/dataset.hpp"
#include "sgrf/errors.hpp"
#include "sgrf/eval.hpp"
#include "sgrf/forest.hpp"
#include "sgrf/gafs.hpp"
#include "sgrf/rng.hpp"
#include "sgrf/smote.hpp"
#include "sgrf/version.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

struct sgrf_dataset {
    sgrf::Dataset ds;
};

struct sgrf_forest {
    sgrf::RandomForest rf;
};

namespace {

thread_local std::string g_last_error;

char* alloc_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
sgrf_status guarded(Fn&& fn) {
    try {
        fn();
        return SGRF_STATUS_OK;
    } catch (const sgrf::InputError& e) {
        g_last_error = e.what();
        return SGRF_STATUS_INPUT_ERROR;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SGRF_STATUS_COMPUTE_ERROR;
    } catch (...) {
        g_last_error = "unknown error";
        return SGRF_STATUS_COMPUTE_ERROR;
    }
}

sgrf_status argument_error(const char* message) {
    g_last_error = message;
    return SGRF_STATUS_ARGUMENT_ERROR;
}

sgrf::SmoteConfig parse_smote_config(const char* config_json) {
    sgrf::SmoteConfig cfg;
    if (!config_json || !*config_json) return cfg;
    json j;
    try {
        j = json::parse(config_json);
    } catch (const json::exception& e) {
        throw sgrf::InputError(std::string("smote config json: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "k_neighbors" && key != "target_ratio" && key != "seed")
            throw sgrf::InputError("smote config: unknown field '" + key + "'");
    }
    cfg.k_neighbors = j.value("k_neighbors", cfg.k_neighbors);
    cfg.target_ratio = j.value("target_ratio", cfg.target_ratio);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

std::vector<std::string> parse_mask_names(const char* mask_json) {
    json j;
    try {
        j = json::parse(mask_json);
    } catch (const json::exception& e) {
        throw sgrf::InputError(std::string("mask json: ") + e.what());
    }
    try {
        if (j.is_array()) return j.get<std::vector<std::string>>();
        if (j.is_object() && j.contains("selected"))
            return j.at("selected").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw sgrf::InputError(std::string("mask json: ") + e.what());
    }
    throw sgrf::InputError("mask json: expected an array of names or {\"selected\": [...]}");
}

std::vector<std::size_t> columns_by_name(const sgrf::Dataset& ds,
                                         const std::vector<std::string>& names) {
    auto feature_names = ds.feature_names();
    std::vector<std::size_t> cols;
    for (const auto& name : names) {
        auto it = std::find(feature_names.begin(), feature_names.end(), name);
        if (it == feature_names.end())
            throw sgrf::InputError("dataset has no feature named '" + name + "'");
        cols.push_back(static_cast<std::size_t>(it - feature_names.begin()));
    }
    return cols;
}

}  // namespace

extern "C" {

const char* sgrf_version(void) { return sgrf::kVersion; }

const char* sgrf_last_error(void) { return g_last_error.c_str(); }

void sgrf_string_free(char* s) { std::free(s); }

void sgrf_dataset_free(sgrf_dataset* ds) { delete ds; }

void sgrf_forest_free(sgrf_forest* forest) { delete forest; }

sgrf_status sgrf_dataset_from_csv(const char* csv_text, const char* schema_json,
                                  sgrf_dataset** out) {
    if (!csv_text || !schema_json || !out) return argument_error("null argument");
    return guarded([&]() {
        sgrf::Schema schema = sgrf::parse_schema(schema_json);
        auto handle = std::make_unique<sgrf_dataset>();
        handle->ds = sgrf::load_csv_text(csv_text, schema);
        *out = handle.release();
    });
}

sgrf_status sgrf_dataset_from_csv_file(const char* csv_path, const char* schema_json,
                                       sgrf_dataset** out) {
    if (!csv_path || !schema_json || !out) return argument_error("null argument");
    return guarded([&]() {
        sgrf::Schema schema = sgrf::parse_schema(schema_json);
        auto handle = std::make_unique<sgrf_dataset>();
        handle->ds = sgrf::load_csv(csv_path, schema);
        *out = handle.release();
    });
}

sgrf_status sgrf_dataset_generate(const char* generator_json, sgrf_dataset** out) {
    if (!generator_json || !out) return argument_error("null argument");
    return guarded([&]() {
        sgrf::GeneratorConfig cfg = sgrf::parse_generator_config(generator_json);
        auto handle = std::make_unique<sgrf_dataset>();
        handle->ds = sgrf::generate_synthetic(cfg);
        *out = handle.release();
    });
}

sgrf_status sgrf_dataset_info(const sgrf_dataset* ds, char** out_json) {
    if (!ds || !out_json) return argument_error("null argument");
    return guarded([&]() {
        ordered_json j;
        j["n_rows"] = ds->ds.n_rows();
        j["n_features"] = ds->ds.n_features();
        j["label_column"] = ds->ds.label_column;
        j["label_names"] = ds->ds.label_names;
        j["class_counts"] = ds->ds.class_counts();
        std::size_t missing = 0;
        for (auto m : ds->ds.missing) missing += m;
        j["missing_cells"] = missing;
        *out_json = alloc_string(j.dump(2) + "\n");
    });
}

sgrf_status sgrf_dataset_to_csv(const sgrf_dataset* ds, char** out_csv) {
    if (!ds || !out_csv) return argument_error("null argument");
    return guarded([&]() { *out_csv = alloc_string(sgrf::to_csv(ds->ds)); });
}

sgrf_status sgrf_dataset_schema(const sgrf_dataset* ds, char** out_schema_json) {
    if (!ds || !out_schema_json) return argument_error("null argument");
    return guarded([&]() {
        *out_schema_json = alloc_string(sgrf::schema_to_json(sgrf::schema_of(ds->ds)));
    });
}

sgrf_status sgrf_dataset_preprocess(const sgrf_dataset* ds, sgrf_dataset** out,
                                    char** out_summary_json) {
    if (!ds || !out) return argument_error("null argument");
    return guarded([&]() {
        auto [kept, dropped] = sgrf::drop_degenerate(ds->ds);
        sgrf::ImputeParams imp = sgrf::fit_impute(kept);
        sgrf::Dataset imputed = sgrf::apply_impute(kept, imp);
        sgrf::ScaleParams sc = sgrf::fit_scale(imputed);
        auto handle = std::make_unique<sgrf_dataset>();
        handle->ds = sgrf::apply_scale(imputed, sc);

        if (out_summary_json) {
            ordered_json j;
            j["dropped"] = dropped;
            j["columns"] = ordered_json::array();
            for (std::size_t c = 0; c < imputed.n_features(); ++c) {
                ordered_json cj;
                cj["name"] = imputed.specs[c].name;
                cj["fill"] = imp.fill[c];
                cj["min"] = sc.min[c];
                cj["max"] = sc.max[c];
                cj["degenerate"] = sc.degenerate[c] != 0;
                j["columns"].push_back(std::move(cj));
            }
            *out_summary_json = alloc_string(j.dump(2) + "\n");
        }
        *out = handle.release();
    });
}

sgrf_status sgrf_smote(const sgrf_dataset* ds, const char* config_json, sgrf_dataset** out,
                       char** out_provenance_csv, char** out_summary_json) {
    if (!ds || !out) return argument_error("null argument");
    return guarded([&]() {
        sgrf::SmoteConfig cfg = parse_smote_config(config_json);
        auto before = ds->ds.class_counts();
        sgrf::SmoteResult res = sgrf::oversample(ds->ds, cfg);
        auto handle = std::make_unique<sgrf_dataset>();
        if (out_provenance_csv)
            *out_provenance_csv = alloc_string(sgrf::provenance_to_csv(res.provenance));
        if (out_summary_json) {
            ordered_json j;
            j["k_requested"] = cfg.k_neighbors;
            j["k_used"] = res.k_used;
            j["n_synthetic"] = res.provenance.size();
            j["class_counts_before"] = before;
            j["class_counts_after"] = res.data.class_counts();
            j["warnings"] = res.warnings;
            *out_summary_json = alloc_string(j.dump(2) + "\n");
        }
        handle->ds = std::move(res.data);
        *out = handle.release();
    });
}

sgrf_status sgrf_select_features(const sgrf_dataset* ds, const char* config_json,
                                 char** out_selection_json, char** out_history_csv) {
    if (!ds || !config_json || !out_selection_json) return argument_error("null argument");
    return guarded([&]() {
        sgrf::PipelineConfig pc = sgrf::parse_pipeline_config(config_json);
        sgrf::GaConfig ga_cfg = pc.ga;
        ga_cfg.seed = pc.seed;
        sgrf::FitnessSpec spec = pc.fitness;
        spec.fitness_seed = sgrf::mix_seed(pc.seed, 1);
        sgrf::GaResult res = sgrf::run_ga(ds->ds, ga_cfg, spec, pc.threads);

        ordered_json j;
        j["selected"] = sgrf::mask_to_names(res.best_mask, ds->ds.feature_names());
        j["mask"] = std::vector<int>(res.best_mask.begin(), res.best_mask.end());
        j["fitness"] = res.best_fitness;
        j["n_selected"] = sgrf::mask_popcount(res.best_mask);
        *out_selection_json = alloc_string(j.dump(2) + "\n");
        if (out_history_csv) *out_history_csv = alloc_string(sgrf::history_to_csv(res.history));
    });
}

sgrf_status sgrf_forest_train(const sgrf_dataset* ds, const char* config_json,
                              const char* mask_json, sgrf_forest** out) {
    if (!ds || !config_json || !out) return argument_error("null argument");
    return guarded([&]() {
        sgrf::PipelineConfig pc = sgrf::parse_pipeline_config(config_json);
        sgrf::ForestConfig fc = pc.forest;
        fc.seed = pc.seed;
        sgrf::Dataset data = ds->ds;
        if (mask_json && *mask_json) {
            auto cols = columns_by_name(data, parse_mask_names(mask_json));
            data = sgrf::select_columns(data, cols);
        }
        auto handle = std::make_unique<sgrf_forest>();
        handle->rf = sgrf::fit(data, fc, pc.threads);
        *out = handle.release();
    });
}

sgrf_status sgrf_forest_save(const sgrf_forest* forest, char** out_model_json) {
    if (!forest || !out_model_json) return argument_error("null argument");
    return guarded([&]() { *out_model_json = alloc_string(sgrf::forest_to_json(forest->rf)); });
}

sgrf_status sgrf_forest_load(const char* model_json, sgrf_forest** out) {
    if (!model_json || !out) return argument_error("null argument");
    return guarded([&]() {
        auto handle = std::make_unique<sgrf_forest>();
        handle->rf = sgrf::forest_from_json(model_json);
        *out = handle.release();
    });
}

sgrf_status sgrf_forest_predict(const sgrf_forest* forest, const sgrf_dataset* ds,
                                char** out_csv) {
    if (!forest || !ds || !out_csv) return argument_error("null argument");
    return guarded([&]() {
        if (ds->ds.has_missing())
            throw sgrf::ComputeError("predict: dataset has missing values; preprocess first");
        auto cols = columns_by_name(ds->ds, forest->rf.feature_names);
        const sgrf::RandomForest& rf = forest->rf;
        std::string csv_text = "row,predicted_label,score\n";
        std::vector<double> row(cols.size());
        for (std::size_t r = 0; r < ds->ds.n_rows(); ++r) {
            for (std::size_t c = 0; c < cols.size(); ++c) row[c] = ds->ds.at(r, cols[c]);
            auto proba = sgrf::predict_proba(rf, row);
            int pred = 0;
            for (int c = 1; c < rf.n_classes; ++c) {
                if (proba[c] > proba[pred]) pred = c;
            }
            csv_text += std::to_string(r);
            csv_text += ',';
            csv_text += rf.label_names.at(pred);
            csv_text += ',';
            csv_text += sgrf::csv::format_double(proba[rf.positive_class]);
            csv_text += '\n';
        }
        *out_csv = alloc_string(csv_text);
    });
}

sgrf_status sgrf_forest_oob(const sgrf_forest* forest, const sgrf_dataset* ds,
                            char** out_json) {
    if (!forest || !ds || !out_json) return argument_error("null argument");
    return guarded([&]() {
        auto cols = columns_by_name(ds->ds, forest->rf.feature_names);
        sgrf::OobReport report = sgrf::oob_error(forest->rf, sgrf::select_columns(ds->ds, cols));
        ordered_json j;
        j["oob_error"] = report.error;
        j["coverage"] = report.coverage;
        j["covered_rows"] = report.covered_rows;
        *out_json = alloc_string(j.dump(2) + "\n");
    });
}

sgrf_status sgrf_forest_importance(const sgrf_forest* forest, const sgrf_dataset* ds,
                                   uint64_t seed, char** out_json) {
    if (!forest || !ds || !out_json) return argument_error("null argument");
    return guarded([&]() {
        auto cols = columns_by_name(ds->ds, forest->rf.feature_names);
        sgrf::ImportanceReport report =
            sgrf::variable_importance(forest->rf, sgrf::select_columns(ds->ds, cols), seed);
        ordered_json j = ordered_json::array();
        for (std::size_t c = 0; c < report.importance.size(); ++c) {
            ordered_json cj;
            cj["feature"] = forest->rf.feature_names.at(c);
            cj["importance"] = report.importance[c];
            cj["rank"] = report.rank[c];
            j.push_back(std::move(cj));
        }
        *out_json = alloc_string(j.dump(2) + "\n");
    });
}

sgrf_status sgrf_run_pipeline(const sgrf_dataset* ds, const char* config_json,
                              char** out_report_json) {
    if (!ds || !config_json || !out_report_json) return argument_error("null argument");
    return guarded([&]() {
        sgrf::PipelineConfig cfg = sgrf::parse_pipeline_config(config_json);
        sgrf::EvalReport report = sgrf::run_pipeline(ds->ds, cfg);
        *out_report_json = alloc_string(sgrf::report_to_json(report));
    });
}

}  // extern "C"
